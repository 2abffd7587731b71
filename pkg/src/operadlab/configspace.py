"""Tree-indexed coordinates on configuration space and exact expansions.

For an r-point configuration (z_1, .., z_r) of distinct complex numbers and
a labeled binary tree A, each internal vertex v carries the difference
x_v = z_{L(v)} - z_{R(v)} (rightmost leaf of the left child minus rightmost
leaf of the subtree) and each internal edge e the ratio
zeta_e = x_{d(e)} / x_{u(e)}.  Together with the top difference x = x_root
and the anchor z = z_{rightmost leaf} these form a polynomially invertible
chart, and every translation-invariant Laurent combination of differences
(z_i - z_j)^k expands into an exact truncated series in the zeta variables
times a power of x.

Series variables are named "z" + (edge lower-vertex path), e.g. "zR",
"zRL"; the top variable is "x".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .coeff import Coefficient, CoeffLike
from .series import LogPuiseuxSeries, TermKey
from .tree import Tree, TreeAnalysis, TreeError, analyze

XVAR = "x"


def edge_var(lower_path: str) -> str:
    return "z" + lower_path


# -- translation-invariant rational functions -----------------------------------


_FACTOR_RE = re.compile(
    r"\(\s*z(\d+)\s*-\s*z(\d+)\s*\)\s*(?:\^\s*(-?\d+))?"
)


@dataclass(frozen=True)
class RationalFunction:
    """Finite sum of terms c * prod_{i<j} (z_i - z_j)^{k_ij} with exact c.

    The key of a term is a sorted tuple of ((i, j), k) with i < j and k != 0;
    swapped pairs are normalized via (z_j - z_i) = -(z_i - z_j).
    """

    terms: tuple[tuple[tuple[tuple[tuple[int, int], int], ...], Coefficient], ...]

    @staticmethod
    def build(
        data: dict[tuple[tuple[tuple[int, int], int], ...], CoeffLike]
    ) -> RationalFunction:
        clean = {}
        for key, c in data.items():
            c = Coefficient.coerce(c)
            sign = 1
            norm = []
            for (i, j), k in key:
                if k == 0:
                    continue
                if i == j:
                    raise ValueError("zero difference z_i - z_i")
                if i > j:
                    i, j = j, i
                    sign *= (-1) ** k
                norm.append(((i, j), k))
            norm.sort()
            merged: dict[tuple[int, int], int] = {}
            for (pair, k) in norm:
                merged[pair] = merged.get(pair, 0) + k
            nkey = tuple(sorted((p, k) for p, k in merged.items() if k))
            c = c if sign == 1 else -c
            cur = clean.get(nkey)
            total = c if cur is None else cur + c
            if total.is_zero():
                clean.pop(nkey, None)
            else:
                clean[nkey] = total
        return RationalFunction(tuple(sorted(clean.items(), key=lambda kv: kv[0])))

    @staticmethod
    def monomial(factors: list[tuple[int, int, int]], coeff: CoeffLike = 1) -> RationalFunction:
        """prod (z_i - z_j)^k from (i, j, k) triples, times a constant."""
        return RationalFunction.build({tuple((((i, j), k)) for i, j, k in factors): coeff})

    @staticmethod
    def constant(c: CoeffLike) -> RationalFunction:
        return RationalFunction.build({(): c})

    @staticmethod
    def zero() -> RationalFunction:
        return RationalFunction(())

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: RationalFunction) -> RationalFunction:
        data: dict = {}
        for key, c in self.terms + other.terms:
            cur = data.get(key)
            data[key] = c if cur is None else cur + c
        return RationalFunction.build(data)

    def __neg__(self) -> RationalFunction:
        return RationalFunction(tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: RationalFunction) -> RationalFunction:
        return self + (-other)

    def __mul__(self, other: RationalFunction) -> RationalFunction:
        data: dict = {}
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                key = tuple(list(k1) + list(k2))
                c = c1 * c2
                cur = data.get(key)
                data[key] = c if cur is None else cur + c
        return RationalFunction.build(data)

    def __pow__(self, n: int) -> RationalFunction:
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("can only invert a single Laurent term")
            key, c = self.terms[0]
            inv_key = tuple((p, -k) for p, k in key)
            return RationalFunction.build({inv_key: c.inverse()}) ** (-n)
        out = RationalFunction.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def partial(self, l: int) -> RationalFunction:
        """d/dz_l by the product rule on each Laurent term."""
        data: dict = {}
        for key, c in self.terms:
            for idx, ((i, j), k) in enumerate(key):
                if l not in (i, j):
                    continue
                sign = 1 if l == i else -1
                new = list(key)
                new[idx] = ((i, j), k - 1)
                nkey = tuple(new)
                add = c.scale(Fraction(k * sign))
                cur = data.get(nkey)
                data[nkey] = add if cur is None else cur + add
        return RationalFunction.build(data)

    def variables(self) -> set[int]:
        out: set[int] = set()
        for key, _ in self.terms:
            for (i, j), _k in key:
                out.update((i, j))
        return out

    def evaluate(self, z: list[complex]) -> complex:
        """Evaluate at a configuration; z is indexed so z[i-1] is z_i."""
        total = 0j
        for key, c in self.terms:
            w = c.numeric()
            for (i, j), k in key:
                w *= (z[i - 1] - z[j - 1]) ** k
            total += w
        return total

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.terms:
            factors = [
                f"(z{i}-z{j})" + (f"^{k}" if k != 1 else "") for (i, j), k in key
            ]
            cs = repr(c)
            if factors:
                body = " * ".join(factors)
                parts.append(body if cs == "1" else f"{cs} * {body}")
            else:
                parts.append(cs)
        return " + ".join(parts)

    @staticmethod
    def parse(text: str) -> RationalFunction:
        """Parse the CLI syntax, e.g. "(z1-z2)^-1 * (z3-z4)^2 + 3"."""
        total = RationalFunction.zero()
        for chunk in _split_top(text, "+"):
            chunk = chunk.strip()
            if not chunk:
                raise ValueError("empty summand")
            term = RationalFunction.constant(1)
            for factor in _split_top(chunk, "*"):
                factor = factor.strip()
                m = _FACTOR_RE.fullmatch(factor)
                if m:
                    i, j, k = int(m.group(1)), int(m.group(2)), int(m.group(3) or 1)
                    term = term * RationalFunction.monomial([(i, j, k)])
                else:
                    try:
                        q = Fraction(factor)
                    except ValueError as exc:
                        raise ValueError(f"cannot parse factor {factor!r}") from exc
                    term = term * RationalFunction.constant(q)
            total = total + term
        return total


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


# -- coordinate systems ----------------------------------------------------------


@dataclass(frozen=True)
class FactoredDifference:
    """z_i - z_j = x * c * M * (1 + h) in the chart of a tree.

    ``monomial`` maps edge variables to the exponent of M (these match the
    degree map of the difference); ``sign`` is the constant c (+-1);
    ``tail`` is h, a polynomial of strictly positive degree.
    """

    pair: tuple[int, int]
    sign: int
    monomial: dict[str, int]
    tail: LogPuiseuxSeries

    def polynomial(self) -> LogPuiseuxSeries:
        """P_ij with (z_i - z_j) = x * P_ij, as an exact polynomial."""
        one = LogPuiseuxSeries.constant(1, self.tail.vars, None, self.tail.xvar)
        m = LogPuiseuxSeries.monomial(
            self.tail.vars, self.monomial, coeff=self.sign, xvar=self.tail.xvar
        )
        return m * (one + self.tail)


@dataclass(frozen=True)
class CoordinateSystem:
    """The chart of a tree: leaf offsets, factored differences, inverse map."""

    tree: Tree
    analysis: TreeAnalysis
    zeta_vars: tuple[str, ...]  # edge variables, sorted by lower path
    vars: tuple[str, ...]  # zeta_vars + ("x",)
    leaf_offsets: dict[int, LogPuiseuxSeries]  # z_l = z_A + x * Q_l(zeta)
    path_monomials: dict[str, dict[str, int]]  # vertex -> x_v / x as a zeta-monomial

    def difference(self, i: int, j: int) -> FactoredDifference:
        """Factored form of z_i - z_j (cached per ordered pair)."""
        return _factored_difference(self, i, j)

    def forward(self, z: list[complex]) -> dict[str, complex]:
        """A-coordinates of a configuration (zeta values plus x)."""
        an = self.analysis
        xv = {
            v: z[an.L[v] - 1] - z[an.R[v] - 1] for v in an.vertices
        }
        out = {edge_var(d): xv[d] / xv[u] for (u, d) in an.edges}
        out[XVAR] = xv[""]
        return out

    def inverse(self, coords: dict[str, complex], z_anchor: complex = 0.0) -> list[complex]:
        """Configuration with the given chart values (polynomial inverse map)."""
        z = [0j] * self.tree.r
        for label, q in self.leaf_offsets.items():
            z[label - 1] = z_anchor + coords[XVAR] * q.evaluate(
                {v: coords.get(v, 0.0) for v in q.vars if v != XVAR} | {XVAR: 1.0},
                require_cut=False,
            )
        return z

    def inverse_exact(
        self, coords: dict[str, Fraction], z_anchor: Fraction = Fraction(0)
    ) -> list[Fraction]:
        """Exact rational inverse for rational chart values."""
        z = [Fraction(0)] * self.tree.r
        for label, q in self.leaf_offsets.items():
            total = Fraction(0)
            for key, c in q.terms.items():
                if not c.is_rational():
                    raise ValueError("inverse polynomials must be rational")
                w = c.rational_value()
                for (e, _lp), v in zip(key, q.vars):
                    if v == XVAR or e == 0:
                        continue
                    w *= coords[v] ** e
                total += w
            z[label - 1] = z_anchor + coords[XVAR] * total
        return z


@lru_cache(maxsize=256)
def _build(fmt: str) -> CoordinateSystem:
    from .tree import parse_tree

    a = parse_tree(fmt)
    an = analyze(a)
    zeta_vars = tuple(edge_var(d) for (_u, d) in an.edges)
    vars = zeta_vars + (XVAR,)

    # x_v = x * prod of edge variables along the root-to-v path.
    path_monomials: dict[str, dict[str, int]] = {}
    for v in an.vertices:
        mono: dict[str, int] = {}
        for k in range(1, len(v) + 1):
            prefix = v[:k]
            if edge_var(prefix) in zeta_vars:
                mono[edge_var(prefix)] = 1
        path_monomials[v] = mono

    # Leaf offsets z_l = z_A + x * Q_l: the rightmost leaf has Q = 0 and any
    # other leaf l satisfies z_l = z_{R(w)} + x_w where w is the parent of the
    # highest node whose rightmost descendant is l.
    parent_of_highest: dict[int, str] = {}
    order = a.leaf_labels()
    node_rightmost: dict[str, int] = {}

    def walk(path: str) -> int:
        node = a.node_at(path)
        if node.is_leaf:
            node_rightmost[path] = node.label
            return node.label
        walk(path + "L")
        rr = walk(path + "R")
        node_rightmost[path] = rr
        return rr

    walk("")
    for label in order:
        # find the highest ancestor-path whose rightmost leaf is this label
        leaf_path = _leaf_path(a, label)
        best = leaf_path
        while best and node_rightmost[best[:-1]] == label:
            best = best[:-1]
        if best:
            parent_of_highest[label] = best[:-1]

    leaf_offsets: dict[int, LogPuiseuxSeries] = {}

    def offset(label: int) -> LogPuiseuxSeries:
        if label in leaf_offsets:
            return leaf_offsets[label]
        if label == an.r_A:
            q = LogPuiseuxSeries(vars, {}, None, XVAR)
        else:
            w = parent_of_highest[label]
            q = offset(an.R[w]) + LogPuiseuxSeries.monomial(
                vars, path_monomials[w], xvar=XVAR
            )
        leaf_offsets[label] = q
        return q

    for label in order:
        offset(label)
    return CoordinateSystem(a, an, zeta_vars, vars, leaf_offsets, path_monomials)


def build_coordinates(a: Tree) -> CoordinateSystem:
    if a.r < 2:
        raise TreeError("coordinates need at least two leaves")
    return _build(a.format())


def _leaf_path(a: Tree, label: int) -> str:
    def walk(node, path):
        if node.is_leaf:
            return path if node.label == label else None
        return walk(node.left, path + "L") or walk(node.right, path + "R")

    return walk(a.root, "")


@lru_cache(maxsize=4096)
def _factored_difference_cached(fmt: str, i: int, j: int) -> FactoredDifference:
    cs = _build(fmt)
    qi, qj = cs.leaf_offsets[i], cs.leaf_offsets[j]
    diff = qi - qj
    if diff.is_zero():
        raise ValueError("zero difference")
    c, mkey, h = diff.factor_leading()
    if not c.is_rational() or abs(c.rational_value()) != 1:
        raise AssertionError("difference leading coefficient must be +-1")
    sign = int(c.rational_value())
    mono = {
        v: int(e)
        for (e, _lp), v in zip(mkey, diff.vars)
        if e and v != XVAR
    }
    return FactoredDifference((i, j), sign, mono, h.with_order(None))


def _factored_difference(cs: CoordinateSystem, i: int, j: int) -> FactoredDifference:
    r = cs.tree.r
    if not (1 <= i <= r and 1 <= j <= r) or i == j:
        raise ValueError(f"bad leaf pair ({i}, {j})")
    return _factored_difference_cached(cs.tree.format(), i, j)


# -- the expansion homomorphism -----------------------------------------------------


def expand(f: RationalFunction, a: Tree, order: int) -> LogPuiseuxSeries:
    """Expand a translation-invariant function in the chart of ``a``.

    Each difference (z_i - z_j)^k = (x c M (1+h))^k is expanded binomially;
    products and sums are exact at the requested truncation order.
    """
    cs = build_coordinates(a)
    vars = cs.vars
    used = f.variables()
    if used and max(used) > a.r:
        raise ValueError("function uses a point index beyond the tree's leaves")
    total = LogPuiseuxSeries(vars, {}, order, XVAR)
    for key, c in f.terms:
        term = LogPuiseuxSeries.constant(c, vars, order, XVAR)
        for (i, j), k in key:
            fd = cs.difference(i, j)
            base = fd.polynomial() * LogPuiseuxSeries.monomial(vars, {XVAR: 1}, xvar=XVAR)
            term = term * base.pow(Fraction(k), order=order)
        total = total + term.with_order(order)
    return total.with_order(order)


def expand_log(i: int, j: int, a: Tree, order: int) -> LogPuiseuxSeries:
    """log(z_i - z_j) = log x + log c + sum deg * log zeta_e + log(1 + h).

    The constant c is +-1; log(-1) resolves to +i*pi (the branch reached
    from above the cut).
    """
    cs = build_coordinates(a)
    fd = cs.difference(i, j)
    vars = cs.vars
    out = LogPuiseuxSeries.monomial(vars, {}, logs={XVAR: 1}, xvar=XVAR).with_order(order)
    if fd.sign == -1:
        out = out + LogPuiseuxSeries.constant(
            Coefficient.lam_symbol(), vars, order, XVAR
        )
    for v, d in sorted(fd.monomial.items()):
        if d:
            out = out + LogPuiseuxSeries.monomial(
                vars, {}, coeff=Fraction(d), logs={v: 1}, xvar=XVAR
            ).with_order(order)
    out = out + fd.tail.with_order(order).log1p_of(order)
    return out.with_order(order)


# -- degree map ----------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeResult:
    value: int | None  # None encodes +infinity
    certified: bool
    note: str

    @property
    def is_infinite(self) -> bool:
        return self.value is None


def degree(f: RationalFunction, a: Tree, edge: str, order: int = 8) -> DegreeResult:
    """Minimal exponent of the edge variable in the expansion of ``f``.

    Exact for single Laurent terms and for sums whose minimum is achieved by
    a unique term (no cancellation is possible at the leading level);
    otherwise computed from a truncated expansion and flagged.
    """
    cs = build_coordinates(a)
    var = edge_var(edge)
    if var not in cs.zeta_vars:
        raise ValueError(f"unknown edge {edge!r}")
    if f.is_zero():
        return DegreeResult(None, True, "zero function")
    per_term = []
    for key, _c in f.terms:
        d = 0
        for (i, j), k in key:
            d += k * cs.difference(i, j).monomial.get(var, 0)
        per_term.append(d)
    dmin = min(per_term)
    if per_term.count(dmin) == 1:
        return DegreeResult(dmin, True, "unique minimal term")
    s = expand(f, a, order)
    if s.is_zero():
        return DegreeResult(None, False, f"expansion vanishes through order {order}")
    idx = s.vars.index(var)
    found = min(key[idx][0] for key in s.terms)
    if found == dmin:
        return DegreeResult(dmin, True, "leading level survives cancellation")
    return DegreeResult(int(found), False, f"computed at finite order {order}")


# -- admissibility ---------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityCertificate:
    verdict: str  # "certified-admissible" | "not-admissible" | "unknown"
    inequalities: tuple[str, ...]
    violations: tuple[str, ...]

    def format(self) -> str:
        lines = [self.verdict]
        lines += [f"  require {s}" for s in self.inequalities]
        lines += [f"  violated: {s}" for s in self.violations]
        return "\n".join(lines)


def _tail_bound_expr(fd: FactoredDifference, radii: dict[str, Fraction]) -> tuple[Fraction, str]:
    """Sum of |coeff| * prod p^deg over the tail, with a printable form."""
    total = Fraction(0)
    parts: list[str] = []
    for key, c in sorted(fd.tail.terms.items(), key=lambda kv: kv[0]):
        w = abs(c.rational_value())
        factors = []
        for (e, _lp), v in zip(key, fd.tail.vars):
            if v == XVAR or not e:
                continue
            w *= radii[v] ** int(e)
            factors.append(f"p[{v}]" if e == 1 else f"p[{v}]^{int(e)}")
        total += w
        parts.append("*".join(factors) if factors else str(abs(c.rational_value())))
    expr = " + ".join(parts) if parts else "0"
    return total, expr


def admissible(a: Tree, radii: dict[str, Fraction | float] | Fraction | float) -> AdmissibilityCertificate:
    """Sufficient admissibility test for polydisk radii in the chart of ``a``.

    certified-admissible: for every pair (i, j) the tail bound
    sum |coeff| prod p^deg is < 1, so no difference vanishes on the punctured
    polydisk.  not-admissible: a sign pattern makes all tail monomials
    negative with total >= 1, exhibiting an exact zero inside the closed
    polydisk.  unknown otherwise.
    """
    cs = build_coordinates(a)
    if not isinstance(radii, dict):
        radii = {v: radii for v in cs.zeta_vars}
    p = {v: Fraction(radii[v]).limit_denominator(10**9) if not isinstance(radii[v], Fraction) else radii[v] for v in cs.zeta_vars}
    if any(q <= 0 for q in p.values()):
        raise ValueError("radii must be positive")
    inequalities: list[str] = []
    violations: list[str] = []
    seen: set[str] = set()
    all_ok = True
    r = a.r
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            fd = cs.difference(i, j)
            if fd.tail.is_zero():
                continue
            bound, expr = _tail_bound_expr(fd, p)
            stmt = f"{expr} < 1"
            if stmt not in seen:
                seen.add(stmt)
                inequalities.append(f"{stmt}   [= {bound}]")
            if bound >= 1:
                all_ok = False
                if _has_negative_pattern(fd, p):
                    violations.append(
                        f"(z{i}-z{j}) vanishes inside the closed polydisk: {expr} = {bound} >= 1"
                    )
    if all_ok:
        return AdmissibilityCertificate(
            "certified-admissible", tuple(inequalities), ()
        )
    if violations:
        return AdmissibilityCertificate("not-admissible", tuple(inequalities), tuple(violations))
    return AdmissibilityCertificate("unknown", tuple(inequalities), ())


def _has_negative_pattern(fd: FactoredDifference, p: dict[str, Fraction]) -> bool:
    """Is there a sign choice per variable making every tail monomial negative?

    If so, scaling all radii by s in (0, 1] sweeps the tail continuously from
    0 to -(total) <= -1, so it hits exactly -1 inside the closed polydisk.
    """
    from itertools import product

    vars = [v for v in fd.tail.vars if v != XVAR]
    terms = []
    for key, c in fd.tail.terms.items():
        exps = {v: int(e) for (e, _lp), v in zip(key, fd.tail.vars) if v != XVAR and e}
        terms.append((exps, c.rational_value()))
    for signs in product((1, -1), repeat=len(vars)):
        s = dict(zip(vars, signs))
        if all(
            coeff * _sign_of_monomial(exps, s) < 0 for exps, coeff in terms
        ):
            return True
    return False


def _sign_of_monomial(exps: dict[str, int], signs: dict[str, int]) -> int:
    out = 1
    for v, e in exps.items():
        out *= signs[v] ** (e % 2)
    return out


# -- base points --------------------------------------------------------------------


@dataclass(frozen=True)
class BasePoint:
    """A real configuration inside a certified chart domain."""

    tree: Tree
    z: tuple[Fraction, ...]
    radii: dict[str, Fraction]
    coords: dict[str, Fraction]


def base_point(a: Tree, ratio: Fraction = Fraction(1, 10)) -> BasePoint:
    """A real configuration ordered like the tree's leaves.

    Consecutive leaves (left to right) are separated by ratio^depth of their
    meet vertex, so the left-to-right leaf order maps to decreasing real
    values with the rightmost leaf at 0 and every zeta value real positive
    near ``ratio``.  Membership is certified through :func:`admissible`.
    """
    if a.r == 0:
        return BasePoint(a, (), {}, {})
    if a.r == 1:
        return BasePoint(a, (Fraction(0),), {}, {})
    order = a.leaf_labels()
    depth = _meet_depths(a)
    gaps = [ratio ** depth[k] for k in range(len(order) - 1)]
    pos = [Fraction(0)] * len(order)
    for k in range(len(order) - 2, -1, -1):
        pos[k] = pos[k + 1] + gaps[k]
    z = [Fraction(0)] * a.r
    for k, label in enumerate(order):
        z[label - 1] = pos[k]
    cs = build_coordinates(a)
    coords = _exact_coords(cs, z)
    radius = Fraction(3, 20)
    while True:
        cert = admissible(a, radius)
        if cert.verdict == "certified-admissible" and all(
            0 < coords[v] < radius for v in cs.zeta_vars
        ):
            break
        radius /= 2
        if radius < Fraction(1, 10**6):
            raise RuntimeError("could not certify a base point radius")
    assert coords[XVAR] > 0
    return BasePoint(a, tuple(z), {v: radius for v in cs.zeta_vars}, coords)


def _meet_depths(a: Tree) -> dict[int, int]:
    """Depth of the meet of consecutive leaves k, k+1 (by position)."""
    out: dict[int, int] = {}
    counter = [0]

    def walk(node, d):
        if node.is_leaf:
            counter[0] += 1
            return
        walk(node.left, d + 1)
        out[counter[0] - 1] = d
        walk(node.right, d + 1)

    walk(a.root, 0)
    return out


def _exact_coords(cs: CoordinateSystem, z: list[Fraction]) -> dict[str, Fraction]:
    an = cs.analysis
    xv = {v: z[an.L[v] - 1] - z[an.R[v] - 1] for v in an.vertices}
    out = {edge_var(d): xv[d] / xv[u] for (u, d) in an.edges}
    out[XVAR] = xv[""]
    return out
