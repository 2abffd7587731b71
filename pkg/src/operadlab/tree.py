"""Labeled binary trees, parenthesized words, and the magma operad.

A tree with r leaves carries a bijective labeling by {1..r} and is written
as a fully parenthesized word: ``((32)5)(41)`` is the 5-leaf tree whose left
subtree is ((3,2),5) and right subtree (4,1).  The empty tree (r = 0) prints
as the empty-word token.  Operadic composition inserts one tree into a leaf
of another with the usual label shifts; inserting the empty tree erases the
leaf.

Vertices and edges are addressed by root-relative binary path strings
("" for the root, "L"/"R" for children, "RL", ...), so identities survive
composition and rewriting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

EMPTY_TOKEN = "∅"  # the empty-word symbol


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class _Node:
    """Internal node or leaf; leaves carry a label, nodes carry children."""

    label: int | None = None
    left: Optional["_Node"] = None
    right: Optional["_Node"] = None

    @property
    def is_leaf(self) -> bool:
        return self.label is not None


@dataclass(frozen=True)
class Tree:
    """A labeled binary tree; ``root is None`` encodes the empty tree."""

    root: _Node | None = None

    # -- constructors ---------------------------------------------------

    @staticmethod
    def empty() -> Tree:
        return Tree(None)

    @staticmethod
    def leaf(label: int = 1) -> Tree:
        return Tree(_Node(label=label))

    @staticmethod
    def pair(left: Tree, right: Tree) -> Tree:
        """Graft two trees under a new root, keeping labels as given."""
        if left.root is None or right.root is None:
            raise TreeError("cannot pair with the empty tree")
        return Tree(_Node(left=left.root, right=right.root))

    def __post_init__(self):
        labels = sorted(self.leaf_labels())
        if labels != list(range(1, len(labels) + 1)):
            raise TreeError(f"leaf labels {labels} are not a bijection onto 1..r")

    # -- basic queries ----------------------------------------------------

    def leaf_labels(self) -> list[int]:
        """Labels in left-to-right order."""
        out: list[int] = []

        def walk(n: _Node | None):
            if n is None:
                return
            if n.is_leaf:
                out.append(n.label)
            else:
                walk(n.left)
                walk(n.right)

        walk(self.root)
        return out

    @property
    def r(self) -> int:
        return len(self.leaf_labels())

    def node_at(self, path: str) -> _Node:
        n = self.root
        if n is None:
            raise TreeError("empty tree has no nodes")
        for step in path:
            if n.is_leaf:
                raise TreeError(f"path {path!r} descends through a leaf")
            n = n.left if step == "L" else n.right
        return n

    def subtree(self, path: str) -> Tree:
        """The subtree at ``path`` relabeled to a standalone tree."""
        node = self.node_at(path)
        labels = sorted(_labels_under(node))
        rank = {l: i + 1 for i, l in enumerate(labels)}

        def rebuild(n: _Node) -> _Node:
            if n.is_leaf:
                return _Node(label=rank[n.label])
            return _Node(left=rebuild(n.left), right=rebuild(n.right))

        return Tree(rebuild(node))

    def internal_paths(self) -> list[str]:
        """Paths of internal (non-leaf) nodes, in depth-first preorder."""
        out: list[str] = []

        def walk(n: _Node | None, path: str):
            if n is None or n.is_leaf:
                return
            out.append(path)
            walk(n.left, path + "L")
            walk(n.right, path + "R")

        walk(self.root, "")
        return out

    # -- text format --------------------------------------------------------

    def format(self) -> str:
        if self.root is None:
            return EMPTY_TOKEN

        def fmt(n: _Node, top: bool) -> str:
            if n.is_leaf:
                return str(n.label) if n.label < 10 else f"[{n.label}]"
            body = fmt(n.left, False) + fmt(n.right, False)
            return body if top else f"({body})"

        return fmt(self.root, True)

    __str__ = format

    def __repr__(self) -> str:
        return f"Tree({self.format()!r})"

    # -- relabeling and the symmetric group action ---------------------------

    def relabel(self, mapping: dict[int, int]) -> Tree:
        def walk(n: _Node) -> _Node:
            if n.is_leaf:
                return _Node(label=mapping[n.label])
            return _Node(left=walk(n.left), right=walk(n.right))

        if self.root is None:
            return self
        return Tree(walk(self.root))


def _labels_under(n: _Node) -> list[int]:
    if n.is_leaf:
        return [n.label]
    return _labels_under(n.left) + _labels_under(n.right)


# -- parsing ------------------------------------------------------------------


def parse_tree(text: str, allow_empty_string: bool = False) -> Tree:
    """Parse a parenthesized word into a tree.

    Labels are single digits or bracketed multi-digit ``[12]``; grouping uses
    parentheses; the empty tree is the token ``∅`` (also accepted: the
    empty string when ``allow_empty_string`` is set).
    """
    s = text.strip()
    if s == EMPTY_TOKEN or (s == "" and allow_empty_string):
        return Tree.empty()
    if s == "":
        raise TreeError("empty input (use the empty-word token for the empty tree)")

    pos = 0

    def peek() -> str | None:
        return s[pos] if pos < len(s) else None

    def parse_factor() -> _Node:
        nonlocal pos
        ch = peek()
        if ch is None:
            raise TreeError("unexpected end of input")
        if ch == "(":
            pos += 1
            node = parse_word()
            if peek() != ")":
                raise TreeError(f"unbalanced parentheses in {text!r}")
            pos += 1
            return node
        if ch == "[":
            end = s.find("]", pos)
            if end < 0:
                raise TreeError(f"unterminated label bracket in {text!r}")
            label = int(s[pos + 1 : end])
            pos = end + 1
            return _Node(label=label)
        if ch.isdigit():
            pos += 1
            return _Node(label=int(ch))
        raise TreeError(f"unexpected character {ch!r} in {text!r}")

    def parse_word() -> _Node:
        nonlocal pos
        factors = [parse_factor()]
        while peek() is not None and peek() != ")":
            factors.append(parse_factor())
        if len(factors) == 1:
            return factors[0]
        if len(factors) == 2:
            return _Node(left=factors[0], right=factors[1])
        raise TreeError(f"ambiguous word with {len(factors)} factors in {text!r}")

    node = parse_word()
    if pos != len(s):
        raise TreeError(f"unbalanced parentheses in {text!r}")
    return Tree(node)


# -- magma operad ---------------------------------------------------------------


def compose(a: Tree, p: int, b: Tree) -> Tree:
    """Insert ``b`` into leaf ``p`` of ``a`` with label shifts.

    Labels of b are shifted by p-1 and labels of a above p by r(b)-1; the
    empty tree erases the leaf (labels above p shift down by one).  Erasing
    the unique leaf of a one-leaf tree yields the empty tree.
    """
    if not 1 <= p <= a.r:
        raise TreeError(f"slot {p} out of range for a tree with {a.r} leaves")
    m = b.r

    def shift_a(n: _Node) -> _Node | None:
        if n.is_leaf:
            if n.label == p:
                if b.root is None:
                    return None
                return _shift(b.root, p - 1)
            return _Node(label=n.label + (m - 1) if n.label > p else n.label)
        left = shift_a(n.left)
        right = shift_a(n.right)
        if left is None:
            return right
        if right is None:
            return left
        return _Node(left=left, right=right)

    assert a.root is not None
    return Tree(shift_a(a.root))


def _shift(n: _Node, offset: int) -> _Node:
    if n.is_leaf:
        return _Node(label=n.label + offset)
    return _Node(left=_shift(n.left, offset), right=_shift(n.right, offset))


def decompose(a: Tree) -> tuple[Tree, tuple[int, ...]]:
    """Split a tree into its ordered shape and the leaf-order permutation.

    Returns (w, g) where w has the same shape with leaves numbered 1..r left
    to right and g, in one-line notation, maps position i to the original
    label at position i.  Relabeling w by g recovers the tree.
    """
    if a.root is None:
        raise TreeError("cannot decompose the empty tree")
    g = tuple(a.leaf_labels())
    counter = iter(range(1, a.r + 1))

    def walk(n: _Node) -> _Node:
        if n.is_leaf:
            return _Node(label=next(counter))
        left = walk(n.left)
        return _Node(left=left, right=walk(n.right))

    return Tree(walk(a.root)), g


# -- structural analysis ----------------------------------------------------------


@dataclass(frozen=True)
class TreeAnalysis:
    """Vertex/edge data for the coordinate machinery.

    ``vertices`` are paths of internal nodes; ``edges`` are (upper, lower)
    path pairs between internal nodes (edges touching leaves are omitted);
    an edge is identified elsewhere by its lower path.  ``L``/``R`` give,
    per vertex, the rightmost leaf label of the left child and of the whole
    subtree.  ``alpha_edges`` are the edges whose lower vertex has an
    internal right child.
    """

    tree: Tree
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    L: dict[str, int]
    R: dict[str, int]
    r_A: int
    alpha_edges: tuple[tuple[str, str], ...]
    leaf_of_edge: dict[str, frozenset[int]]

    @property
    def t_A(self) -> str:
        return ""

    def edge_lower_paths(self) -> list[str]:
        return [d for (_, d) in self.edges]


def analyze(a: Tree) -> TreeAnalysis:
    if a.root is None or a.root.is_leaf is None:
        raise TreeError("analysis needs a nonempty tree")
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    L: dict[str, int] = {}
    R: dict[str, int] = {}
    leaf_sets: dict[str, frozenset[int]] = {}

    def walk(n: _Node, path: str) -> tuple[int, list[int]]:
        """Return (rightmost leaf label, all labels) of the subtree."""
        if n.is_leaf:
            return n.label, [n.label]
        vertices.append(path)
        lr, llabels = walk(n.left, path + "L")
        rr, rlabels = walk(n.right, path + "R")
        L[path] = lr
        R[path] = rr
        if not n.left.is_leaf:
            edges.append((path, path + "L"))
        if not n.right.is_leaf:
            edges.append((path, path + "R"))
        leaf_sets[path] = frozenset(llabels + rlabels)
        return rr, llabels + rlabels

    if a.root.is_leaf:
        return TreeAnalysis(a, (), (), {}, {}, a.root.label, (), {})
    r_a, _ = walk(a.root, "")
    edges.sort(key=lambda e: e[1])
    alpha = tuple(
        (u, d) for (u, d) in edges if not a.node_at(d).right.is_leaf
    )
    leaf_of_edge = {d: leaf_sets[d] for (_, d) in edges}
    return TreeAnalysis(
        a,
        tuple(sorted(vertices)),
        tuple(edges),
        L,
        R,
        r_a,
        alpha,
        leaf_of_edge,
    )


# -- the two local rewrites -------------------------------------------------------


def alpha_sites(a: Tree) -> list[str]:
    """Vertices at which the reassociation X(YZ) -> (XY)Z applies."""
    return [
        p
        for p in a.internal_paths()
        if not a.node_at(p).is_leaf and not a.node_at(p).right.is_leaf
    ]


def alpha_target_at_vertex(a: Tree, v: str) -> Tree:
    """Rewrite the local shape X(YZ) rooted at vertex ``v`` into (XY)Z."""
    node = a.node_at(v)
    if node.is_leaf or node.right.is_leaf:
        raise TreeError(f"vertex {v!r} does not carry an X(YZ) shape")
    x, y, z = node.left, node.right.left, node.right.right
    new = _Node(left=_Node(left=x, right=y), right=z)
    return _replace(a, v, new)


def alpha_target(a: Tree, edge: str | tuple[str, str]) -> Tree:
    """Apply the reassociation addressed by an edge.

    The rewrite site is the lower vertex of the edge when its right child is
    internal.  As a special case, an edge pointing at the root's right child
    may address the rewrite at the root itself (the plain associator on the
    whole tree); otherwise the edge is not alpha-type.
    """
    d = edge[1] if isinstance(edge, tuple) else edge
    u = d[:-1] if d else None
    node = a.node_at(d)
    if not node.is_leaf and not node.right.is_leaf:
        return alpha_target_at_vertex(a, d)
    if u is not None and d.endswith("R"):
        up = a.node_at(u)
        if not up.right.is_leaf:
            return alpha_target_at_vertex(a, u)
    raise TreeError(f"edge with lower vertex {d!r} is not alpha-type")


def sigma_target(a: Tree, v: str) -> Tree:
    """Swap the two subtrees under vertex ``v``, keeping all labels."""
    node = a.node_at(v)
    if node.is_leaf:
        raise TreeError(f"{v!r} is not an internal vertex")
    return _replace(a, v, _Node(left=node.right, right=node.left))


def _replace(a: Tree, path: str, new: _Node) -> Tree:
    def walk(n: _Node, p: str) -> _Node:
        if p == path:
            return new
        step = p and None
        nxt = path[len(p)]
        if nxt == "L":
            return _Node(left=walk(n.left, p + "L"), right=n.right)
        return _Node(left=n.left, right=walk(n.right, p + "R"))

    assert a.root is not None
    return Tree(walk(a.root, ""))


def all_trees(r: int) -> Iterator[Tree]:
    """All labeled binary trees with r leaves (r! * Catalan(r-1) of them)."""
    from itertools import permutations

    def shapes(labels: tuple[int, ...]) -> Iterator[_Node]:
        if len(labels) == 1:
            yield _Node(label=labels[0])
            return
        for cut in range(1, len(labels)):
            for left in shapes(labels[:cut]):
                for right in shapes(labels[cut:]):
                    yield _Node(left=left, right=right)

    if r == 0:
        yield Tree.empty()
        return
    for perm in permutations(range(1, r + 1)):
        for shape in shapes(perm):
            yield Tree(shape)


def random_tree(r: int, rng) -> Tree:
    """A uniformly shaped tree with a random labeling."""
    labels = list(range(1, r + 1))
    rng.shuffle(labels)
    it = iter(labels)

    def build(n: int) -> _Node:
        if n == 1:
            return _Node(label=next(it))
        cut = rng.randint(1, n - 1)
        left = build(cut)
        return _Node(left=left, right=build(n - cut))

    if r == 0:
        return Tree.empty()
    return Tree(build(r))
