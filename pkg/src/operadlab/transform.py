"""Crossing and reassociation moves on expansions, with numeric ground truth.

The half-turn crossing at a vertex v0 swaps the two subtrees below it and
acts on series by an exact change of variables decorated with monodromy
phases: writing x for the old and y for the new vertex differences,

    x_{v0} = -y_{v0},
    x_w    = y_w - y_{v0}   for ancestors w of v0 reached by right-child steps,
    x_q    = y_q + y_{v0}   for the parent q of the topmost such ancestor,
    x_w    = y_w            otherwise.

Every old chart quantity is therefore (+-1) * (new variable) * product of
(1 +- small monomial) factors; the -1 coming from x_{v0} resolves to the
phase e^{+i pi r} when x_{v0} sits in a numerator and e^{-i pi r} in a
denominator (and to +-i pi additively on logs), the orientation fixed by the
counterclockwise half-turn path that moves the left block over the right.

Reassociation acts by the corresponding rational substitutions with no
phases at all (it is a topologically trivial move), and the module closes
the loop with brute-force analytic continuation along sampled paths:
argument-unwrapped logarithms give branch-true endpoint values to compare
against the algebraic transforms.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .coeff import Coefficient
from .configspace import (
    XVAR,
    CoordinateSystem,
    RationalFunction,
    build_coordinates,
    edge_var,
    expand,
)
from .series import LogPuiseuxSeries, binomial
from .tree import Tree, TreeError, alpha_target, alpha_target_at_vertex, analyze, sigma_target


class TransformError(ValueError):
    pass


# -- substitution rules -----------------------------------------------------------


@dataclass(frozen=True)
class SubstitutionRule:
    """old_var = phase-sign * prod new_var^e * prod (1 + s*m)^{eps}.

    ``phase`` in {-1, 0, +1} records a factor (-1) resolved as e^{phase*i*pi};
    ``base`` maps new variable names to integer exponents; ``factors`` is a
    list of (sign, monomial, eps) with eps = +-1.
    """

    phase: int
    base: dict[str, int]
    factors: tuple[tuple[int, dict[str, int], int], ...]

    def power(
        self, r: Fraction, vars: tuple[str, ...], xvar: str | None, order: int
    ) -> LogPuiseuxSeries:
        out = LogPuiseuxSeries.monomial(
            vars, {v: Fraction(e) * r for v, e in self.base.items()}, xvar=xvar
        ).with_order(None)
        if self.phase:
            out = out * Coefficient.phase(Fraction(self.phase) * r)
        for sign, mono, eps in self.factors:
            out = out * _binomial_factor(sign, mono, Fraction(eps) * r, vars, xvar, order)
            out = out.with_order(None)
        return out.with_order(order)

    def log(self, vars: tuple[str, ...], xvar: str | None, order: int) -> LogPuiseuxSeries:
        out = LogPuiseuxSeries(vars, {}, order, xvar)
        if self.phase:
            out = out + LogPuiseuxSeries.constant(
                Coefficient.lam_symbol().scale(self.phase), vars, order, xvar
            )
        for v, e in self.base.items():
            if e:
                out = out + LogPuiseuxSeries.monomial(
                    vars, {}, coeff=Fraction(e), logs={v: 1}, xvar=xvar
                ).with_order(order)
        for sign, mono, eps in self.factors:
            h = LogPuiseuxSeries.monomial(vars, mono, coeff=sign, xvar=xvar).with_order(order)
            out = out + h.log1p_of(order) * Coefficient.coerce(Fraction(eps))
        return out


def _binomial_factor(
    sign: int,
    mono: Mapping[str, int],
    exponent: Fraction,
    vars: tuple[str, ...],
    xvar: str | None,
    order: int,
) -> LogPuiseuxSeries:
    """(1 + sign * mono)^exponent expanded to the truncation order."""
    h = LogPuiseuxSeries.monomial(vars, mono, coeff=sign, xvar=xvar)
    d = h.min_zeta_degree()
    acc = LogPuiseuxSeries.constant(1, vars, order, xvar)
    hpow = LogPuiseuxSeries.constant(1, vars, order, xvar)
    n = 1
    while d is not None and n * d <= order:
        hpow = (hpow * h).with_order(order)
        acc = acc + hpow * Coefficient.coerce(1).scale(binomial(exponent, n))
        n += 1
    return acc


def _apply_rules(
    s: LogPuiseuxSeries,
    rules: dict[str, SubstitutionRule],
    vars: tuple[str, ...],
    xvar: str | None,
    order: int,
) -> LogPuiseuxSeries:
    """Substitute every variable of ``s`` according to ``rules``."""
    pow_cache: dict[tuple[str, Fraction], LogPuiseuxSeries] = {}
    log_cache: dict[str, LogPuiseuxSeries] = {}
    total = LogPuiseuxSeries(vars, {}, order, xvar)
    for key, c in s.terms.items():
        term = LogPuiseuxSeries.constant(c, vars, order, xvar)
        for (e, lp), v in zip(key, s.vars):
            rule = rules[v]
            if e:
                cached = pow_cache.get((v, e))
                if cached is None:
                    cached = rule.power(e, vars, xvar, order)
                    pow_cache[(v, e)] = cached
                term = term * cached
            if lp:
                lg = log_cache.get(v)
                if lg is None:
                    lg = rule.log(vars, xvar, order)
                    log_cache[v] = lg
                term = term * lg.pow(lp, order=order)
        total = total + term
    return total.with_order(order)


# -- the crossing transform ----------------------------------------------------------


def _right_chain(v0: str) -> tuple[list[str], str | None]:
    """Ancestors of v0 reached by right-child steps, plus the odd parent out.

    Returns (chain, q): ``chain`` lists v0 and every ancestor whose rightmost
    descendants pass through v0; ``q`` is the parent of the chain's top, the
    single vertex whose left-child rightmost leaf changes (None at the root).
    """
    chain = [v0]
    cur = v0
    while cur and cur.endswith("R"):
        cur = cur[:-1]
        chain.append(cur)
    q = cur[:-1] if cur else None
    return chain, q


def _swap_path(path: str, v0: str) -> str:
    """Vertex correspondence under the child swap at v0."""
    if path.startswith(v0) and len(path) > len(v0):
        step = path[len(v0)]
        rest = path[len(v0) + 1 :]
        return v0 + ("R" if step == "L" else "L") + rest
    return path


def sigma_var_map(a: Tree, v0: str) -> dict[str, str]:
    """Old chart variable -> corresponding new chart variable."""
    an = analyze(a)
    out = {XVAR: XVAR}
    for (_u, d) in an.edges:
        out[edge_var(d)] = edge_var(_swap_path(d, v0))
    return out


def sigma_rules(a: Tree, v0: str) -> tuple[dict[str, SubstitutionRule], Tree]:
    """Substitution rules for the crossing at v0, and the target tree."""
    an = analyze(a)
    if v0 not in an.vertices:
        raise TransformError(f"{v0!r} is not an internal vertex")
    target = sigma_target(a, v0)
    chain, q = _right_chain(v0)
    chain_set = set(chain)

    def path_monomial(w: str) -> dict[str, int]:
        # product of new-chart edge variables from w down to v0; these edges
        # keep their names (prefixes of v0 are outside the swapped subtree).
        mono: dict[str, int] = {}
        for k in range(len(w) + 1, len(v0) + 1):
            mono[edge_var(v0[:k])] = 1
        return mono

    def x_factor(w: str) -> tuple[int, tuple[tuple[int, dict[str, int], int], ...]]:
        """x_w = (-1)^phase_flag * y_w * (1 + s*m)^1 data (phase, factors)."""
        if w == v0:
            return 1, ()
        if w in chain_set:
            return 0, ((-1, path_monomial(w), 1),)
        if q is not None and w == q:
            return 0, ((1, path_monomial(w), 1),)
        return 0, ()

    rules: dict[str, SubstitutionRule] = {}
    for (u, d) in an.edges:
        ph_n, fac_n = x_factor(d)
        ph_d, fac_d = x_factor(u)
        phase = 0
        if d == v0:
            phase = +1
        elif u == v0:
            phase = -1
        factors = fac_n + tuple((s, m, -eps) for (s, m, eps) in fac_d)
        rules[edge_var(d)] = SubstitutionRule(
            phase, {edge_var(_swap_path(d, v0)): 1}, factors
        )
    ph, fac = x_factor("")
    rules[XVAR] = SubstitutionRule(+1 if v0 == "" else 0, {XVAR: 1}, fac)
    return rules, target


def sigma_transform(
    s: LogPuiseuxSeries, a: Tree, v0: str, order: int
) -> LogPuiseuxSeries:
    """Continue a chart expansion through the half-turn crossing at v0.

    The result is an expansion in the swapped tree's chart whose principal-
    branch values on the far side of the turn agree with the continued
    series (checked numerically by :func:`continue_along_path`).
    """
    cs_target = build_coordinates(sigma_target(a, v0))
    rules, _ = sigma_rules(a, v0)
    return _apply_rules(s, rules, cs_target.vars, XVAR, order)


def double_twist(s: LogPuiseuxSeries, a: Tree, v0: str) -> LogPuiseuxSeries:
    """The full twist at v0: x_{v0}^r -> e^{2 pi i r} x_{v0}^r on sectors.

    In chart variables the x_{v0}-exponent of a term is the balance of its
    edge exponents at v0 (plus the top exponent when v0 is the root), and
    2*pi*i is added to each logarithm involving x_{v0}.
    """
    an = analyze(a)
    if v0 not in an.vertices:
        raise TransformError(f"{v0!r} is not an internal vertex")
    down = {edge_var(d) for (u, d) in an.edges if d == v0}
    up = {edge_var(d) for (u, d) in an.edges if u == v0}
    include_x = v0 == ""
    two_lam = Coefficient.lam_symbol().scale(2)
    out = LogPuiseuxSeries(s.vars, {}, s.order, s.xvar)
    for key, c in s.terms.items():
        n = Fraction(0)
        term = LogPuiseuxSeries.monomial(
            s.vars,
            {v: e for (e, _), v in zip(key, s.vars)},
            coeff=c,
            xvar=s.xvar,
        ).with_order(s.order)
        for (e, lp), v in zip(key, s.vars):
            if v in down or (include_x and v == s.xvar):
                n += e
                lam_sign = 1
            elif v in up:
                n -= e
                lam_sign = -1
            else:
                lam_sign = 0
            if lp:
                base = LogPuiseuxSeries.monomial(
                    s.vars, {}, logs={v: 1}, xvar=s.xvar
                ).with_order(s.order)
                if lam_sign:
                    base = base + LogPuiseuxSeries.constant(
                        two_lam.scale(lam_sign), s.vars, s.order, s.xvar
                    )
                term = term * base.pow(lp, order=s.order)
        out = out + term * Coefficient.phase(2 * n)
    return out


# -- reassociation -----------------------------------------------------------------


def _alpha_site(a: Tree, edge_or_vertex: str) -> str:
    """Resolve an edge lower path (or vertex) to the pattern-root vertex."""
    node = a.node_at(edge_or_vertex)
    if not node.is_leaf and not node.right.is_leaf:
        return edge_or_vertex
    if edge_or_vertex and edge_or_vertex.endswith("R"):
        up = edge_or_vertex[:-1]
        if not a.node_at(up).right.is_leaf:
            return up
    raise TreeError(f"{edge_or_vertex!r} does not address an alpha site")


def alpha_var_map(a: Tree, site: str, inverse: bool = False) -> dict[str, str]:
    """Variable correspondence between the charts of A and alpha(A)."""
    v = site
    fwd = {
        XVAR: XVAR,
        edge_var(v + "L"): edge_var(v + "LL"),
        edge_var(v + "RL"): edge_var(v + "LR"),
        edge_var(v + "RR"): edge_var(v + "R"),
        edge_var(v + "R"): edge_var(v + "L"),
    }

    def rename(d: str) -> str:
        for old, new in (
            (v + "RL", v + "LR"),
            (v + "RR", v + "R"),
            (v + "L", v + "LL"),
        ):
            if d.startswith(old):
                return new + d[len(old):]
        return d

    an = analyze(a)
    out = {XVAR: XVAR}
    for (_u, d) in an.edges:
        ev = edge_var(d)
        out[ev] = fwd.get(ev, edge_var(rename(d)))
    if inverse:
        return {v2: v1 for v1, v2 in out.items()}
    return out


def alpha_rules(
    a: Tree, site: str, inverse: bool = False
) -> tuple[dict[str, SubstitutionRule], Tree]:
    """Substitution rules for the reassociation at a pattern-root vertex.

    Forward rules express old chart quantities in the new chart; with
    ``inverse`` they express the new chart in the old one (used for
    round-trip checks).  No phases occur: the move is topologically trivial.
    """
    v = _alpha_site(a, site)
    target = alpha_target_at_vertex(a, v)
    an = analyze(a)
    vmap = alpha_var_map(a, v)
    a_v, b_v, c_v, d_v = (
        edge_var(v + "L"),
        edge_var(v + "RL"),
        edge_var(v + "RR"),
        edge_var(v + "R"),
    )
    a_p, b_p, c_p, d_p = (
        edge_var(v + "LL"),
        edge_var(v + "LR"),
        edge_var(v + "R"),
        edge_var(v + "L"),
    )
    e_v = edge_var(v)  # present iff v is not the root
    has_edge = {edge_var(d) for (_u, d) in an.edges}

    rules: dict[str, SubstitutionRule] = {}
    if not inverse:
        for var in has_edge | {XVAR}:
            if var == a_v:
                rules[var] = SubstitutionRule(0, {a_p: 1, d_p: 1}, ((1, {d_p: 1}, -1),))
            elif var == b_v:
                rules[var] = SubstitutionRule(0, {b_p: 1, d_p: 1}, ())
            elif var == d_v:
                rules[var] = SubstitutionRule(0, {}, ((1, {d_p: 1}, -1),))
            elif var == XVAR and v == "":
                rules[var] = SubstitutionRule(0, {XVAR: 1}, ((1, {d_p: 1}, 1),))
            elif var == e_v and v != "":
                rules[var] = SubstitutionRule(0, {vmap[var]: 1}, ((1, {d_p: 1}, 1),))
            else:
                rules[var] = SubstitutionRule(0, {vmap[var]: 1}, ())
        return rules, target

    inv_map = alpha_var_map(a, v, inverse=True)
    an_t = analyze(target)
    has_edge_t = {edge_var(d) for (_u, d) in an_t.edges}
    for var in has_edge_t | {XVAR}:
        if var == a_p:
            rules[var] = SubstitutionRule(0, {a_v: 1}, ((-1, {d_v: 1}, -1),))
        elif var == b_p:
            rules[var] = SubstitutionRule(0, {b_v: 1, d_v: 1}, ((-1, {d_v: 1}, -1),))
        elif var == d_p:
            rules[var] = SubstitutionRule(0, {d_v: -1}, ((-1, {d_v: 1}, 1),))
        elif var == XVAR and v == "":
            rules[var] = SubstitutionRule(0, {XVAR: 1, d_v: 1}, ())
        elif var == edge_var(v) and v != "":
            rules[var] = SubstitutionRule(0, {d_v: 1, edge_var(v): 1}, ())
        else:
            rules[var] = SubstitutionRule(0, {inv_map[var]: 1}, ())
    return rules, target


def alpha_substitute(
    s: LogPuiseuxSeries, a: Tree, edge: str, order: int, inverse: bool = False
) -> LogPuiseuxSeries:
    """Formal reassociation substitution on a truncated series.

    The result is tagged with validity order = input order; truncation does
    not commute with the substitution in the rewritten-edge direction (its
    variable maps to expressions of zeta-degree zero), so the tag is a
    working order, not a certified one.  Expansions of honest global
    functions should instead be compared through :func:`alpha_reexpand`.
    """
    rules, target = alpha_rules(a, edge, inverse=inverse)
    cs = build_coordinates(a if inverse else target)
    return _apply_rules(s, rules, cs.vars, XVAR, order)


def alpha_reexpand(
    f: RationalFunction, a: Tree, edge: str, order: int
) -> tuple[LogPuiseuxSeries, LogPuiseuxSeries]:
    """Expansions of one global function in the charts on both sides of an
    alpha move; they agree numerically on the chart overlap."""
    site = _alpha_site(a, edge)
    target = alpha_target_at_vertex(a, site)
    return expand(f, a, order), expand(f, target, order)


def alpha_overlap_point(
    a: Tree, edge: str, small: Fraction = Fraction(1, 100)
) -> list[Fraction]:
    """A real configuration in both chart domains of an alpha move.

    All chart ratios are set to ``small`` except the rewritten edge's, which
    is 2/3 (the value making both charts comfortable: the new chart then
    sees (1 - 2/3)/(2/3) = 1/2).
    """
    site = _alpha_site(a, edge)
    cs = build_coordinates(a)
    coords = {v: small for v in cs.zeta_vars}
    coords[edge_var(site + "R")] = Fraction(2, 3)
    coords[XVAR] = Fraction(1)
    return cs.inverse_exact(coords)


# -- numeric continuation ------------------------------------------------------------


@dataclass
class PathSpec:
    """A path in configuration space, sampled or given by a formula.

    ``point(t)`` returns the configuration at t in [0, 1].  Consecutive
    samples are refined until they stay within half the distance to the
    nearest diagonal and until every tracked chart quantity turns by less
    than pi/2 per step.
    """

    point: Callable[[float], list[complex]]
    samples: int = 64
    max_samples: int = 1 << 16

    @staticmethod
    def from_samples(samples: list[list[complex]], n: int | None = None) -> PathSpec:
        if len(samples) < 2:
            raise TransformError("a sampled path needs at least two configurations")
        pts = [list(map(complex, row)) for row in samples]

        def interp(t: float) -> list[complex]:
            if t >= 1.0:
                return pts[-1]
            u = t * (len(pts) - 1)
            k = int(u)
            frac = u - k
            return [p + (q - p) * frac for p, q in zip(pts[k], pts[k + 1])]

        return PathSpec(interp, n or max(64, 4 * len(pts)))

    @staticmethod
    def gamma_v(a: Tree, v0: str, base: list[complex] | None = None, samples: int = 64) -> PathSpec:
        """The half-turn path swapping the two leaf blocks under v0.

        Leaves of the left subtree move by +(e^{i pi t}-1)/2 * x_{v0}(0), the
        right subtree's by the opposite amount, everything else stays put;
        x_{v0} turns counterclockwise through the upper half plane.
        """
        from .configspace import base_point
        from .tree import _labels_under

        node = a.node_at(v0)
        if node.is_leaf:
            raise TransformError(f"{v0!r} is not an internal vertex")
        if base is None:
            base = [complex(q) for q in base_point(a).z]
        an = analyze(a)
        x0 = base[an.L[v0] - 1] - base[an.R[v0] - 1]
        left = set(_labels_under(node.left))
        right = set(_labels_under(node.right))

        def point(t: float) -> list[complex]:
            shift = (cmath.exp(1j * cmath.pi * t) - 1) / 2 * x0
            out = []
            for label, z in enumerate(base, start=1):
                if label in left:
                    out.append(z + shift)
                elif label in right:
                    out.append(z - shift)
                else:
                    out.append(z)
            return out

        return PathSpec(point, samples)


@dataclass
class ContinuationResult:
    endpoint: list[complex]
    branch_logs: dict[str, complex]
    windings: dict[str, int]
    value: complex
    steps: int


def _min_diagonal_gap(z: list[complex]) -> float:
    return min(
        abs(z[i] - z[j]) for i in range(len(z)) for j in range(i + 1, len(z))
    )


def continue_along_path(
    s: LogPuiseuxSeries, a: Tree, path: PathSpec
) -> ContinuationResult:
    """Analytically continue a chart expansion along a path.

    Tracks a continuous logarithm for every chart quantity by argument
    unwrapping with adaptive step halving, then evaluates the series at the
    endpoint on the continued branches.  Also reports the accumulated
    2*pi*i winding of each variable relative to the principal branch.
    """
    cs = build_coordinates(a)
    t = 0.0
    z = path.point(0.0)
    coords = cs.forward(z)
    for v, val in coords.items():
        if val == 0:
            raise TransformError("path starts on a chart degeneracy")
        if val.real <= 0 and val.imag == 0:
            raise TransformError(f"start point lies on the branch cut of {v!r}")
    logs = {v: cmath.log(val) for v, val in coords.items()}
    steps = 0
    dt = 1.0 / path.samples
    while t < 1.0:
        step = min(dt, 1.0 - t)
        while True:
            t_next = t + step
            z_next = path.point(t_next)
            gap = _min_diagonal_gap(z_next)
            if gap == 0:
                raise TransformError("path hits a diagonal")
            move = max(abs(u - w) for u, w in zip(z, z_next))
            coords_next = cs.forward(z_next)
            if any(val == 0 for val in coords_next.values()):
                raise TransformError("path hits a chart degeneracy")
            jumps = [
                abs(cmath.phase(coords_next[v] / coords[v])) for v in coords
            ]
            if move <= 0.5 * min(_min_diagonal_gap(z), gap) and max(jumps) < cmath.pi / 2:
                break
            step /= 2
            if step * path.max_samples < 1.0:
                raise TransformError("adaptive refinement exceeded the sample cap")
        for v in coords:
            logs[v] += cmath.log(coords_next[v] / coords[v])
        t, z, coords = t_next, z_next, coords_next
        steps += 1
    windings = {}
    for v, val in coords.items():
        principal = cmath.phase(val)
        windings[v] = round((logs[v].imag - principal) / (2 * cmath.pi))
    value = s.evaluate({}, branch_logs=logs)
    return ContinuationResult(z, logs, windings, value, steps)
