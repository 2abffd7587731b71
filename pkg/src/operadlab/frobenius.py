"""Series solutions of regular-singular equations in Euler-operator form.

An operator theta^N + sum_{k<N} f_k(xi) theta^k with theta = xi d/dxi and
coefficients holomorphic at 0 acts on sectors xi^{h+l} (log xi)^m.  Writing
a_{k,t} for the xi^t-coefficient of f_k (with f_N = 1), the polynomials
P_t(l) = sum_k l^k a_{k,t} drive the coefficient recursion

    P_0(h+p) c_p = b_p - sum_{l<p} P_{p-l}(h+l) c_l,

with P_0 the indicial polynomial; the recursion is exact over rationals and
fails only at resonances, i.e. roots of P_0 at h + positive integers.
The majorant argument comparing against (B^{-1}+(1-xi)Q(xi)) /
(1-(1+N/B)xi) certifies absolute convergence on |xi| < R/(1+N/B) whenever
the coefficient data is bounded by C on the circle of radius R and
|P_0(l)| >= B*C*l^{N-1} beyond some index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Complex

# Coefficients may be exact rationals or floats/complex; arithmetic follows
# the inputs.
Scalar = Fraction | int | float | complex


class FrobeniusError(ValueError):
    pass


class ResonanceError(FrobeniusError):
    def __init__(self, index: int, root: Scalar):
        super().__init__(
            f"resonance: the shifted indicial polynomial vanishes at integer offset {index}"
        )
        self.index = index
        self.root = root


@dataclass(frozen=True)
class EulerOperator:
    """theta^N + sum_{k<N} f_k(xi) theta^k (+ optional right-hand side).

    ``f[k]`` lists the xi-power coefficients of f_k, constant term first;
    only non-negative xi-powers are allowed (regular singularity at 0).
    ``g`` is an optional inhomogeneity read relative to the solution's
    leading exponent.
    """

    n: int
    f: tuple[tuple[Scalar, ...], ...]
    g: tuple[Scalar, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise FrobeniusError("operator order must be >= 1")
        if len(self.f) != self.n:
            raise FrobeniusError(f"expected {self.n} coefficient series, got {len(self.f)}")

    def a(self, k: int, t: int) -> Scalar:
        """The xi^t-coefficient of f_k, with f_N = 1."""
        if k == self.n:
            return 1 if t == 0 else 0
        series = self.f[k]
        return series[t] if t < len(series) else 0

    def p_poly(self, t: int, l: Scalar) -> Scalar:
        """P_t(l) = sum_{k=0}^{N} l^k a_{k,t}."""
        total: Scalar = 0
        power: Scalar = 1
        for k in range(self.n + 1):
            total = total + power * self.a(k, t)
            power = power * l
        return total

    def indicial(self, l: Scalar) -> Scalar:
        return self.p_poly(0, l)

    def coefficient_order(self) -> int:
        """Highest xi-power carried by the stored coefficient data."""
        top = max((len(series) - 1 for series in self.f), default=0)
        if self.g is not None:
            top = max(top, len(self.g) - 1)
        return top

    def to_json(self) -> dict:
        def enc(series):
            return [str(Fraction(c)) if isinstance(c, (int, Fraction)) else repr(c) for c in series]

        return {
            "N": self.n,
            "f": [enc(series) for series in self.f],
            "g": enc(self.g) if self.g is not None else None,
        }

    @staticmethod
    def from_json(data: dict) -> EulerOperator:
        def dec(series):
            return tuple(Fraction(tok) for tok in series)

        g = data.get("g")
        return EulerOperator(
            int(data["N"]),
            tuple(dec(series) for series in data["f"]),
            dec(g) if g is not None else None,
        )


@dataclass(frozen=True)
class IndicialData:
    """The polynomials P_t(l); P_0 is the indicial polynomial."""

    operator: EulerOperator

    def p0_coeffs(self) -> tuple[Scalar, ...]:
        return tuple(self.operator.a(k, 0) for k in range(self.operator.n + 1))

    def __call__(self, t: int, l: Scalar) -> Scalar:
        return self.operator.p_poly(t, l)


@dataclass(frozen=True)
class FrobeniusSolution:
    """xi^h * sum_l c[l] xi^l."""

    h: Fraction
    c: tuple[Scalar, ...]

    def __len__(self) -> int:
        return len(self.c)

    def evaluate(self, xi: complex) -> complex:
        base = complex(xi) ** complex(self.h)
        return base * sum(complex(cl) * complex(xi) ** l for l, cl in enumerate(self.c))

    def terms(self) -> list[tuple[Fraction, int, Scalar]]:
        return [(self.h + l, 0, cl) for l, cl in enumerate(self.c)]


def solve(
    op: EulerOperator,
    h: Fraction | int,
    c0: Scalar | None = None,
    order: int = 16,
) -> FrobeniusSolution:
    """Power-sector solution xi^h sum c_l xi^l by the coefficient recursion.

    Requires non-resonance: the indicial polynomial shifted by h may not
    vanish at 1..order.  A homogeneous problem additionally needs h to be an
    indicial root (otherwise c_0 would be forced to zero); an inhomogeneous
    one derives c_0 when the indicial value is invertible.
    """
    h = Fraction(h)
    b = list(op.g) if op.g is not None else []

    def bval(p: int) -> Scalar:
        return b[p] if p < len(b) else 0

    p0_at_h = op.indicial(h)
    c: list[Scalar] = []
    if _is_zero(p0_at_h):
        if op.g is not None and not _is_zero(bval(0)):
            raise FrobeniusError("inconsistent: indicial root with nonzero constant forcing")
        c.append(1 if c0 is None else c0)
    else:
        if op.g is None:
            raise FrobeniusError(
                f"h = {h} is not an indicial root (P_0(h) = {p0_at_h}); "
                "the homogeneous recursion forces c_0 = 0"
            )
        forced = _divide(bval(0), p0_at_h)
        if c0 is not None and not _is_zero(_sub(forced, c0)):
            raise FrobeniusError("given c_0 contradicts the forced value")
        c.append(forced)
    for p in range(1, order + 1):
        lead = op.indicial(h + p)
        if _is_zero(lead):
            raise ResonanceError(p, h + p)
        rhs: Scalar = bval(p)
        for l in range(p):
            if not _is_zero(c[l]):
                rhs = _sub(rhs, op.p_poly(p - l, h + l) * c[l])
        c.append(_divide(rhs, lead))
    return FrobeniusSolution(h, tuple(c))


def _is_zero(x: Scalar) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return abs(x) < 1e-14


def _sub(x: Scalar, y: Scalar) -> Scalar:
    return x - y


def _divide(x: Scalar, y: Scalar) -> Scalar:
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        return Fraction(x) / Fraction(y)
    return x / y


# -- residual verification -------------------------------------------------------


# A log-sector series: maps (exponent offset l, log power m) -> coefficient,
# understood relative to a leading exponent h.
LogSectorSeries = dict[tuple[int, int], Scalar]


def candidate_from_solution(sol: FrobeniusSolution) -> tuple[Fraction, LogSectorSeries]:
    return sol.h, {(l, 0): cl for l, cl in enumerate(sol.c) if not _is_zero(cl)}


def apply_operator(
    op: EulerOperator, h: Fraction, series: LogSectorSeries, order: int
) -> LogSectorSeries:
    """Apply the operator to xi^h * sum series[(l, m)] xi^l (log xi)^m.

    theta acts by theta(xi^s (log xi)^m) = s xi^s (log xi)^m
    + m xi^s (log xi)^{m-1}; multiplication by f_k shifts l by the
    coefficient index.  Terms beyond ``order`` are dropped.
    """
    out: LogSectorSeries = {}

    def add(l: int, m: int, val: Scalar) -> None:
        if _is_zero(val) or l > order:
            return
        key = (l, m)
        cur = out.get(key, 0)
        new = cur + val
        if _is_zero(new):
            out.pop(key, None)
        else:
            out[key] = new

    for (l, m), coeff in series.items():
        if l > order:
            continue
        # theta^k applied to the sector, tracked as a dict logpow -> coeff
        theta_pow: dict[int, Scalar] = {m: coeff}
        for k in range(op.n + 1):
            # contribution of f_k * theta^k
            for mm, cc in theta_pow.items():
                if k == op.n:
                    add(l, mm, cc)
                else:
                    for t in range(0, order - l + 1):
                        a = op.a(k, t)
                        if not _is_zero(a):
                            add(l + t, mm, a * cc)
            # advance theta_pow -> theta^{k+1}
            nxt: dict[int, Scalar] = {}
            for mm, cc in theta_pow.items():
                s = h + l
                v = nxt.get(mm, 0) + s * cc
                if not _is_zero(v):
                    nxt[mm] = v
                elif mm in nxt:
                    del nxt[mm]
                if mm > 0:
                    v2 = nxt.get(mm - 1, 0) + mm * cc
                    if not _is_zero(v2):
                        nxt[mm - 1] = v2
                    elif mm - 1 in nxt:
                        del nxt[mm - 1]
            theta_pow = nxt
    return out


@dataclass(frozen=True)
class ResidualReport:
    residual_order: Fraction | None  # exponent h+l of the lowest surviving term; None if clean
    checked_order: int
    passed: bool

    def format(self) -> str:
        if self.passed:
            return f"residual vanishes through order {self.checked_order}"
        return f"residual appears at exponent {self.residual_order}"


def verify_residual(
    op: EulerOperator,
    h: Fraction | int,
    series: LogSectorSeries,
    order: int,
) -> ResidualReport:
    """Apply the operator to a candidate and report the lowest surviving term.

    A valid truncated solution leaves no residual at exponents h..h+order.
    The right-hand side (if any) is subtracted before measuring.
    """
    h = Fraction(h)
    res = apply_operator(op, h, series, order)
    if op.g is not None:
        for t, gval in enumerate(op.g):
            if t > order or _is_zero(gval):
                continue
            key = (t, 0)
            cur = res.get(key, 0)
            new = cur - gval
            if _is_zero(new):
                res.pop(key, None)
            else:
                res[key] = new
    if not res:
        return ResidualReport(None, order, True)
    lmin = min(l for (l, _m) in res)
    return ResidualReport(h + lmin, order, False)


# -- convergence radius -----------------------------------------------------------


def radius_bound(
    n: int,
    radius: Fraction | float,
    bound_c: Fraction | float,
    b: Fraction | float,
    m: int | None = None,
) -> Fraction:
    """Certified lower bound R/(1 + N/B) for the radius of convergence.

    Valid when ``bound_c`` dominates |f_k| and |g| on the circle of radius R
    and |P_0(l)| >= B * C * l^{N-1} for l beyond some threshold (recorded as
    ``m``); the bound's value depends only on N, R, B.
    """
    if n < 1:
        raise FrobeniusError("operator order must be >= 1")
    R, B, C = Fraction(radius), Fraction(b), Fraction(bound_c)
    if R <= 0 or B <= 0 or C <= 0:
        raise FrobeniusError("radius, B, and C must be positive")
    if m is not None and m < 0:
        raise FrobeniusError("threshold index must be non-negative")
    return R / (1 + Fraction(n) / B)


def estimate_sup_bound(op: EulerOperator, radius: Fraction) -> Fraction:
    """Heuristic C: sum of |coefficient| R^t over the stored truncations.

    Upper-bounds the sup on |xi| = R only if the truncations are the whole
    series; callers wanting a certificate must supply their own C.
    """
    best = Fraction(0)
    seriess = list(op.f) + ([op.g] if op.g is not None else [])
    for series in seriess:
        total = Fraction(0)
        for t, coeff in enumerate(series):
            total += abs(Fraction(coeff)) * radius**t
        best = max(best, total)
    return best


def best_radius_bound(
    op: EulerOperator, radius: Fraction, b_grid: list[Fraction] | None = None
) -> tuple[Fraction, Fraction, Fraction]:
    """Maximize the bound over a grid of B values with the heuristic C.

    Returns (bound, B, C).  The bound is increasing in B (larger B weakens
    the tail comparison but the threshold index absorbs it), so the grid's
    largest entry wins; the grid is kept for callers probing specific B.
    """
    c = estimate_sup_bound(op, radius)
    if c == 0:
        c = Fraction(1)
    grid = b_grid or [Fraction(k) for k in (1, 2, 5, 10, 100)]
    best = None
    for b in grid:
        val = radius_bound(op.n, radius, c, b)
        if best is None or val > best[0]:
            best = (val, b, c)
    return best
