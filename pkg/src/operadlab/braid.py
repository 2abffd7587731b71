"""Symmetric groups, braid words, and the parenthesized braid category.

Conventions (fixed once, used consistently):

* A braid word is a sequence of signed generator indices; +i means the
  strand at position i crosses OVER the strand at position i+1.  Words are
  read temporally: the leftmost letter is the crossing nearest the top of
  the diagram and happens first.
* ``project_to_perm(b)`` returns g with g(i) = the final position of the
  strand entering at top position i.
* A :class:`PaBMorphism` f: A -> B stores a braid whose top row is ordered
  by the *target* tree B and whose bottom row by the *source* tree A; with
  the projection above this makes project(braid) = g_A^{-1} g_B hold on the
  nose, matching the hom-set description of the parenthesized braid operad.

Braid equality is decided through the faithful Artin action on the free
group F_r (sigma_i: x_i -> x_i x_{i+1} x_i^{-1}, x_{i+1} -> x_i), keeping
image words freely reduced.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tree import Tree, TreeError, compose as tree_compose, decompose

WORD_LENGTH_CAP = 10**6


class BraidError(ValueError):
    pass


# -- permutations (one-line notation) ---------------------------------------


@dataclass(frozen=True)
class Permutation:
    """One-line notation: values[i-1] = g(i); values are a bijection of 1..r."""

    values: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.values) != list(range(1, len(self.values) + 1)):
            raise BraidError(f"{self.values} is not a permutation of 1..{len(self.values)}")

    @staticmethod
    def identity(r: int) -> Permutation:
        return Permutation(tuple(range(1, r + 1)))

    @property
    def size(self) -> int:
        return len(self.values)

    def __call__(self, i: int) -> int:
        return self.values[i - 1]

    def inverse(self) -> Permutation:
        out = [0] * self.size
        for i, v in enumerate(self.values, start=1):
            out[v - 1] = i
        return Permutation(tuple(out))

    def __mul__(self, other: Permutation) -> Permutation:
        """(self * other)(i) = self(other(i))."""
        return Permutation(tuple(self(other(i)) for i in range(1, self.size + 1)))

    def then(self, other: Permutation) -> Permutation:
        """Left-to-right composition: apply self first, then other."""
        return other * self

    def one_line(self) -> str:
        if self.size and max(self.values) > 9:
            return ",".join(map(str, self.values))
        return "".join(map(str, self.values))

    @staticmethod
    def parse(text: str) -> Permutation:
        text = text.strip()
        if "," in text:
            return Permutation(tuple(int(t) for t in text.split(",")))
        return Permutation(tuple(int(ch) for ch in text))


def perm_compose(g: Permutation, p: int, h: Permutation) -> Permutation:
    """Operadic composition as ordered-set insertion.

    The value p in g's sequence is replaced by the block h shifted by p-1,
    and values above p are shifted by size(h)-1.  Example: 321 o_2 12 = 4231.
    """
    if not 1 <= p <= g.size:
        raise BraidError(f"slot {p} out of range")
    m = h.size
    out: list[int] = []
    for v in g.values:
        if v == p:
            out.extend(w + p - 1 for w in h.values)
        else:
            out.append(v + m - 1 if v > p else v)
    return Permutation(tuple(out))


def tree_perm(a: Tree) -> Permutation:
    """The leaf-order permutation g_A of a tree."""
    _, g = decompose(a)
    return Permutation(g)


# -- braid words -------------------------------------------------------------


def _free_reduce(word: list[int]) -> list[int]:
    out: list[int] = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return out


@dataclass(frozen=True)
class BraidWord:
    """A freely reduced word in the Artin generators of B_r."""

    r: int
    word: tuple[int, ...]

    def __post_init__(self):
        if self.r < 0:
            raise BraidError("strand count must be non-negative")
        for letter in self.word:
            if letter == 0 or abs(letter) >= max(self.r, 1):
                raise BraidError(f"generator {letter} out of range for B_{self.r}")
        reduced = tuple(_free_reduce(list(self.word)))
        if reduced != self.word:
            object.__setattr__(self, "word", reduced)

    @staticmethod
    def identity(r: int) -> BraidWord:
        return BraidWord(r, ())

    @staticmethod
    def from_letters(r: int, letters: list[int] | tuple[int, ...]) -> BraidWord:
        return BraidWord(r, tuple(letters))

    def __mul__(self, other: BraidWord) -> BraidWord:
        if self.r != other.r:
            raise BraidError("strand-count mismatch")
        return BraidWord(self.r, self.word + other.word)

    def inverse(self) -> BraidWord:
        return BraidWord(self.r, tuple(-l for l in reversed(self.word)))

    # text format: "s1 s2^-1 s1"
    def format(self) -> str:
        if not self.word:
            return "e"
        return " ".join(f"s{abs(l)}" + ("^-1" if l < 0 else "") for l in self.word)

    @staticmethod
    def parse(text: str, r: int) -> BraidWord:
        text = text.strip()
        if text in ("", "e"):
            return BraidWord(r, ())
        letters = []
        for tok in text.split():
            neg = tok.endswith("^-1")
            body = tok[:-3] if neg else tok
            if not body.startswith("s") or not body[1:].isdigit():
                raise BraidError(f"bad braid token {tok!r}")
            i = int(body[1:])
            letters.append(-i if neg else i)
        return BraidWord(r, tuple(letters))

    def to_json(self) -> dict:
        return {"r": self.r, "word": list(self.word)}

    @staticmethod
    def from_json(data: dict) -> BraidWord:
        return BraidWord(int(data["r"]), tuple(int(x) for x in data["word"]))


def project_to_perm(b: BraidWord) -> Permutation:
    """g(i) = final position of the strand entering at top position i."""
    arr = list(range(1, b.r + 1))  # arr[position-1] = entering strand
    for letter in b.word:
        i = abs(letter)
        arr[i - 1], arr[i] = arr[i], arr[i - 1]
    out = [0] * b.r
    for pos, strand in enumerate(arr, start=1):
        out[strand - 1] = pos
    return Permutation(tuple(out))


# -- braid equality via the Artin action --------------------------------------


def _act_letter(images: list[list[int]], letter: int, r: int) -> list[list[int]]:
    """Apply one generator's free-group automorphism to accumulated images.

    Generators of F_r are encoded +-1..+-r inside image words.  The result
    represents phi(letter) o phi(previous), kept freely reduced.
    """
    i = abs(letter)
    if letter > 0:
        # x_i -> x_i x_{i+1} x_i^{-1}, x_{i+1} -> x_i
        rules = {i: [i, i + 1, -i], i + 1: [i]}
    else:
        # x_i -> x_{i+1}, x_{i+1} -> x_{i+1}^{-1} x_i x_{i+1}
        rules = {i: [i + 1], i + 1: [-(i + 1), i, i + 1]}
    out: list[list[int]] = []
    total = 0
    for img in images:
        new: list[int] = []
        for sym in img:
            base = abs(sym)
            repl = rules.get(base)
            if repl is None:
                seq = [sym]
            else:
                seq = repl if sym > 0 else [-s for s in reversed(repl)]
            for s in seq:
                if new and new[-1] == -s:
                    new.pop()
                else:
                    new.append(s)
        total += len(new)
        if total > WORD_LENGTH_CAP:
            raise BraidError("free-group image exceeded the length cap")
        out.append(new)
    return out


def artin_images(b: BraidWord) -> list[tuple[int, ...]]:
    images = [[i] for i in range(1, b.r + 1)]
    for letter in b.word:
        images = _act_letter(images, letter, b.r)
    return [tuple(img) for img in images]


def artin_equal(b1: BraidWord, b2: BraidWord) -> bool:
    """Exact equality in B_r through the faithful action on F_r."""
    if b1.r != b2.r:
        raise BraidError("strand-count mismatch")
    if b1.word == b2.word:
        return True
    return artin_images(b1) == artin_images(b2)


# -- cabling -------------------------------------------------------------------


def _block_crossing(offset: int, w1: int, w2: int, positive: bool) -> list[int]:
    """Crossings expanding a block transposition at ``offset``.

    The left block of width w1 passes over (positive) or under the right
    block of width w2; each right-block strand walks left across the whole
    left block, leftmost first.
    """
    letters: list[int] = []
    for k in range(w2):
        for j in range(w1, 0, -1):
            letters.append(offset + j + k)
    if not positive:
        letters = [-l for l in reversed(letters)]
    return letters


def braid_cable(b: BraidWord, p: int, c: BraidWord) -> BraidWord:
    """Replace the p-th strand of ``b`` by an m-strand bundle carrying ``c``.

    The p-th strand is the one entering at top position p; the bundle
    carries the braid ``c`` at the top.  Each crossing of the cabled strand
    expands to a block of crossings; m = 0 erases the strand.
    """
    if not 1 <= p <= b.r:
        raise BraidError(f"strand {p} out of range for B_{b.r}")
    m = c.r
    new_r = b.r + m - 1
    widths = [1] * b.r
    widths[p - 1] = m
    letters: list[int] = []
    if c.word:
        off = sum(widths[: p - 1])
        letters.extend((l + off if l > 0 else l - off) for l in c.word)
    order = list(range(b.r))  # order[pos-1] = original strand index (0-based)
    for letter in b.word:
        i = abs(letter)
        s1, s2 = order[i - 1], order[i]
        w1, w2 = widths[s1], widths[s2]
        off = sum(widths[order[k]] for k in range(i - 1))
        letters.extend(_block_crossing(off, w1, w2, letter > 0))
        order[i - 1], order[i] = s2, s1
    return BraidWord(new_r, tuple(letters))


# -- the parenthesized braid operad -----------------------------------------------


@dataclass(frozen=True)
class PaBMorphism:
    """A braid tagged with source and target trees of equal leaf count."""

    source: Tree
    target: Tree
    braid: BraidWord

    def __post_init__(self):
        if self.source.r != self.target.r or self.source.r != self.braid.r:
            raise BraidError("source, target, and braid must share the strand count")

    def check_invariant(self) -> bool:
        """project(braid) == g_source^{-1} * g_target."""
        if self.source.r == 0:
            return True
        gs, gt = tree_perm(self.source), tree_perm(self.target)
        return project_to_perm(self.braid) == gs.inverse() * gt

    @staticmethod
    def identity(a: Tree) -> PaBMorphism:
        return PaBMorphism(a, a, BraidWord.identity(a.r))

    def then(self, other: PaBMorphism) -> PaBMorphism:
        """Categorical composition: self followed by ``other``."""
        if self.target.format() != other.source.format():
            raise BraidError("morphisms are not composable")
        return PaBMorphism(self.source, other.target, other.braid * self.braid)

    def inverse(self) -> PaBMorphism:
        return PaBMorphism(self.target, self.source, self.braid.inverse())


def pab_compose(f: PaBMorphism, p: int, g: PaBMorphism) -> PaBMorphism:
    """Operadic composition: cable the p-th strand of f with g made thin."""
    if not 1 <= p <= f.source.r:
        raise BraidError(f"slot {p} out of range")
    src = tree_compose(f.source, p, g.source)
    tgt = tree_compose(f.target, p, g.target)
    # The braid's top row is ordered by f's target tree.
    pos = tree_perm(f.target).inverse()(p)
    braid = braid_cable(f.braid, pos, g.braid)
    return PaBMorphism(src, tgt, braid)


def sigma_morphism(a: Tree, v: str) -> PaBMorphism:
    """The crossing that swaps the two subtrees under vertex ``v``.

    Equal to the operadic composite id_B o_p (sigma o (id, id)) of the single
    positive crossing sigma: 12 -> 21; cabling identities collapses that to a
    block crossing at the subtree's leaf positions (in the target order the
    former right subtree sits left).
    """
    from .tree import sigma_target

    node = a.node_at(v)
    if node.is_leaf:
        raise BraidError(f"{v!r} is not an internal vertex")
    leaves = a.leaf_labels()
    block = set(_labels_at(a, v))
    offset = min(i for i, l in enumerate(leaves) if l in block)
    w1 = len(_labels_at_node(node.left))
    w2 = len(_labels_at_node(node.right))
    letters = _block_crossing(offset, w2, w1, True)
    return PaBMorphism(a, sigma_target(a, v), BraidWord(a.r, tuple(letters)))


def alpha_morphism(a: Tree, site: str) -> PaBMorphism:
    """The reassociation at an alpha site; a topologically untwisted braid."""
    from .tree import alpha_target_at_vertex

    return PaBMorphism(a, alpha_target_at_vertex(a, site), BraidWord.identity(a.r))


def _labels_at(a: Tree, v: str) -> list[int]:
    return _labels_at_node(a.node_at(v))


def _labels_at_node(node) -> list[int]:
    from .tree import _labels_under

    return _labels_under(node)


# -- coherence report ------------------------------------------------------------


@dataclass
class CoherenceReport:
    kind: str
    passed: bool
    details: list[str]

    def format(self) -> str:
        head = "PASS" if self.passed else "FAIL"
        return "\n".join([head] + [f"  {line}" for line in self.details])


def _chain(*morphisms: PaBMorphism) -> PaBMorphism:
    out = morphisms[0]
    for m in morphisms[1:]:
        out = out.then(m)
    return out


def check_pentagon() -> CoherenceReport:
    """The two reassociation chains around the five 4-leaf ordered trees."""
    from .tree import parse_tree

    start = parse_tree("1(2(34))")
    chain_short = _chain(
        alpha_morphism(start, ""),
        alpha_morphism(parse_tree("(12)(34)"), ""),
    )
    chain_long = _chain(
        alpha_morphism(start, "R"),
        alpha_morphism(parse_tree("1((23)4)"), ""),
        alpha_morphism(parse_tree("(1(23))4"), "L"),
    )
    details = [
        f"short chain: {start.format()} -> {chain_short.target.format()}, braid {chain_short.braid.format()}",
        f"long chain:  {start.format()} -> {chain_long.target.format()}, braid {chain_long.braid.format()}",
    ]
    ok = (
        chain_short.target.format() == chain_long.target.format() == "((12)3)4"
        and chain_short.braid.word == ()
        and chain_long.braid.word == ()
        and artin_equal(chain_short.braid, chain_long.braid)
    )
    return CoherenceReport("pentagon", ok, details)


def check_hexagon() -> CoherenceReport:
    """Hexagon identity in the 3-strand category.

    Route 1 crosses the first input past the block (23) between two
    reassociations; route 2 uses the two single crossings.  Both run from
    (12)3 to 2(31) and must carry equal braids.
    """
    from .tree import parse_tree

    t123 = parse_tree("(12)3")
    route1 = _chain(
        alpha_morphism(parse_tree("1(23)"), "").inverse(),  # (12)3 -> 1(23)
        sigma_morphism(parse_tree("1(23)"), ""),            # -> (23)1
        alpha_morphism(parse_tree("2(31)"), "").inverse(),  # -> 2(31)
    )
    route2 = _chain(
        sigma_morphism(t123, "L"),                          # -> (21)3
        alpha_morphism(parse_tree("2(13)"), "").inverse(),  # -> 2(13)
        sigma_morphism(parse_tree("2(13)"), "R"),           # -> 2(31)
    )
    block = pab_compose(
        sigma_morphism(parse_tree("12"), ""), 2, PaBMorphism.identity(parse_tree("12"))
    )
    details = [
        f"route 1 braid: {route1.braid.format()}",
        f"route 2 braid: {route2.braid.format()}",
        f"block crossing sigma o_2 id: {block.braid.format()}",
    ]
    ok = (
        route1.source.format() == route2.source.format()
        and route1.target.format() == route2.target.format()
        and artin_equal(route1.braid, route2.braid)
        and artin_equal(block.braid, sigma_morphism(parse_tree("1(23)"), "").braid)
    )
    return CoherenceReport("hexagon", ok, details)


def check_operad_associativity(trials: int = 100, seed: int = 0) -> CoherenceReport:
    """(f o_p g) o_q h = f o_p' (g o_q' h) on random morphisms, r <= 6."""
    import random as _random

    from .tree import random_tree

    rng = _random.Random(seed)
    failures: list[str] = []
    for _ in range(trials):
        sizes = [rng.randint(1, 3) for _ in range(3)]
        if sum(sizes) - 2 > 6:
            continue
        trees = [random_tree(s, rng) for s in sizes]
        morphs = []
        for t in trees:
            paths = t.internal_paths()
            morphs.append(
                sigma_morphism(t, rng.choice(paths)) if paths else PaBMorphism.identity(t)
            )
        f, g, h = morphs
        p = rng.randint(1, f.source.r)
        fg = pab_compose(f, p, g)
        q = rng.randint(1, fg.source.r)
        if p <= q <= p + g.source.r - 1:
            lhs = pab_compose(fg, q, h)
            rhs = pab_compose(f, p, pab_compose(g, q - p + 1, h))
        elif q < p:
            lhs = pab_compose(fg, q, h)
            rhs = pab_compose(pab_compose(f, q, h), p + h.source.r - 1, g)
        else:
            lhs = pab_compose(fg, q, h)
            rhs = pab_compose(pab_compose(f, q - g.source.r + 1, h), p, g)
        same = (
            lhs.source.format() == rhs.source.format()
            and lhs.target.format() == rhs.target.format()
            and artin_equal(lhs.braid, rhs.braid)
        )
        if not same:
            failures.append(f"f={f.source.format()} p={p} g={g.source.format()} q={q}")
    return CoherenceReport(
        "operad-associativity",
        not failures,
        [f"{trials} random instances"] + failures[:5],
    )


def check_equivariance(trials: int = 100, seed: int = 0) -> CoherenceReport:
    """Magma composition factors through (shape, leaf order) pairs.

    Checks decompose(A o_p B) = (w_A o_{g_A^{-1}(p)} w_B, g_A o_p g_B) on
    random trees: the shape composes at the position of the label p, the
    leaf orders compose at the slot p itself.
    """
    import random as _random

    from .tree import random_tree

    rng = _random.Random(seed)
    failures: list[str] = []
    for _ in range(trials):
        ra, rb = rng.randint(1, 6), rng.randint(1, 5)
        A, B = random_tree(ra, rng), random_tree(rb, rng)
        p = rng.randint(1, ra)
        wa, ga = decompose(A)
        wb, gb = decompose(B)
        gA, gB = Permutation(ga), Permutation(gb)
        comp = tree_compose(A, p, B)
        wc, gc = decompose(comp)
        expect_w = tree_compose(wa, gA.inverse()(p), wb)
        expect_g = perm_compose(gA, p, gB)
        if wc.format() != expect_w.format() or Permutation(gc) != expect_g:
            failures.append(f"A={A.format()} p={p} B={B.format()}")
    return CoherenceReport(
        "equivariance", not failures, [f"{trials} random instances"] + failures[:5]
    )


def coherence_check(kind: str, trials: int = 100, seed: int = 0) -> CoherenceReport:
    """Run one of the named coherence suites and report failures, if any."""
    if kind == "pentagon":
        return check_pentagon()
    if kind == "hexagon":
        return check_hexagon()
    if kind == "operad-associativity":
        return check_operad_associativity(trials, seed)
    if kind == "equivariance":
        return check_equivariance(trials, seed)
    raise BraidError(f"unknown coherence check {kind!r}")
