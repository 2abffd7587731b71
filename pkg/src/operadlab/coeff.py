"""Exact coefficient ring for monodromy computations.

A :class:`Coefficient` is a polynomial in one formal symbol ``L`` (standing
for i*pi) whose coefficients are cyclotomic numbers, i.e. elements of
Q(zeta_m) for the primitive m-th root of unity zeta_m = e^{2 pi i/m}.
This ring contains every half-turn phase e^{i pi q} (q rational) together
with the additive constants +-i*pi and 2*pi*i picked up by logarithms under
analytic continuation, and it has decidable equality: elements are kept
reduced modulo the m-th cyclotomic polynomial, so two coefficients are equal
exactly when their complex values agree.

The symbol ``L`` is treated as transcendental over the cyclotomic field
(pi is transcendental), so no relations are imposed on it.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

Rational = Fraction | int


def _poly_trim(c: list[Fraction]) -> tuple[Fraction, ...]:
    end = len(c)
    while end > 0 and c[end - 1] == 0:
        end -= 1
    return tuple(c[:end])


def _poly_divmod(num: tuple, den: tuple) -> tuple[tuple, tuple]:
    """Division with remainder in Q[x], dense low-to-high coefficients."""
    num_l = [Fraction(a) for a in num]
    q = [Fraction(0)] * max(1, len(num_l) - len(den) + 1)
    inv_lead = 1 / Fraction(den[-1])
    for i in range(len(num_l) - len(den), -1, -1):
        c = num_l[i + len(den) - 1] * inv_lead
        if c:
            q[i] = c
            for j, d in enumerate(den):
                num_l[i + j] -= c * Fraction(d)
    return _poly_trim(q), _poly_trim(num_l)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[Fraction, ...]:
    """The m-th cyclotomic polynomial as a dense coefficient tuple."""
    if m < 1:
        raise ValueError("m must be positive")
    # x^m - 1 divided by the product of Phi_d over proper divisors d of m.
    num: tuple = tuple([Fraction(-1)] + [Fraction(0)] * (m - 1) + [Fraction(1)])
    for d in range(1, m):
        if m % d == 0:
            num, rem = _poly_divmod(num, cyclotomic_polynomial(d))
            assert not rem, "cyclotomic division must be exact"
    return num


@lru_cache(maxsize=None)
def _reduction_table(m: int) -> list[tuple[Fraction, ...]]:
    """x^k mod Phi_m for k = 0 .. m-1, as vectors of length deg(Phi_m)."""
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    table: list[tuple[Fraction, ...]] = []
    cur = [Fraction(0)] * deg
    if deg > 0:
        cur[0] = Fraction(1)
    table.append(tuple(cur))
    for _ in range(1, m):
        nxt = [Fraction(0)] + cur[:]
        if len(nxt) > deg:
            lead = nxt.pop()
            if lead:
                for j in range(deg):
                    nxt[j] -= lead * phi[j]
        cur = nxt[:deg] + [Fraction(0)] * (deg - len(nxt))
        table.append(tuple(cur))
    return table


class Cyclotomic:
    """An element of Q(zeta_m), reduced modulo the m-th cyclotomic polynomial.

    Stored as a vector of rationals in the power basis 1, zeta, ..,
    zeta^{deg(Phi_m)-1}.  The conductor m is not minimised; equality first
    lifts both operands into a common Q(zeta_lcm).
    """

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs: tuple[Fraction, ...]):
        self.m = m
        self.coeffs = coeffs

    @staticmethod
    def from_rational(q: Rational) -> Cyclotomic:
        q = Fraction(q)
        return Cyclotomic(1, (q,) if q else ())

    @staticmethod
    def root_of_unity(m: int, k: int) -> Cyclotomic:
        """zeta_m^k."""
        vec = _reduction_table(m)[k % m]
        return Cyclotomic(m, _poly_trim(list(vec)))

    def lift(self, big_m: int) -> Cyclotomic:
        if big_m == self.m:
            return self
        if big_m % self.m != 0:
            raise ValueError("can only lift to a multiple conductor")
        step = big_m // self.m
        table = _reduction_table(big_m)
        deg = len(cyclotomic_polynomial(big_m)) - 1
        out = [Fraction(0)] * deg
        for k, c in enumerate(self.coeffs):
            if c:
                for j, t in enumerate(table[(k * step) % big_m]):
                    out[j] += c * t
        return Cyclotomic(big_m, _poly_trim(out))

    def _common(self, other: Cyclotomic) -> tuple[Cyclotomic, Cyclotomic]:
        m = math.lcm(self.m, other.m)
        return self.lift(m), other.lift(m)

    def __add__(self, other: Cyclotomic) -> Cyclotomic:
        a, b = self._common(other)
        n = max(len(a.coeffs), len(b.coeffs))
        out = [Fraction(0)] * n
        for i, c in enumerate(a.coeffs):
            out[i] += c
        for i, c in enumerate(b.coeffs):
            out[i] += c
        return Cyclotomic(a.m, _poly_trim(out))

    def __neg__(self) -> Cyclotomic:
        return Cyclotomic(self.m, tuple(-c for c in self.coeffs))

    def __sub__(self, other: Cyclotomic) -> Cyclotomic:
        return self + (-other)

    def __mul__(self, other: Cyclotomic) -> Cyclotomic:
        a, b = self._common(other)
        if not a.coeffs or not b.coeffs:
            return Cyclotomic(a.m, ())
        table = _reduction_table(a.m)
        deg = len(cyclotomic_polynomial(a.m)) - 1
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, c in enumerate(a.coeffs):
            if c:
                for j, d in enumerate(b.coeffs):
                    if d:
                        prod[i + j] += c * d
        out = [Fraction(0)] * deg
        for k, c in enumerate(prod):
            if c:
                if k < deg:
                    out[k] += c
                else:
                    for j, t in enumerate(table[k % a.m]):
                        out[j] += c * t
        return Cyclotomic(a.m, _poly_trim(out))

    def scale(self, q: Rational) -> Cyclotomic:
        q = Fraction(q)
        if not q:
            return Cyclotomic(self.m, ())
        return Cyclotomic(self.m, _poly_trim([c * q for c in self.coeffs]))

    def inverse(self) -> Cyclotomic:
        """Field inverse via the extended Euclidean algorithm in Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        phi = cyclotomic_polynomial(self.m)
        # Invariant: r = s * self (mod Phi_m); stop when r is a unit.
        r0, r1 = phi, self.coeffs
        s0, s1 = (), (Fraction(1),)
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            # s_next = s0 - q*s1
            prod = [Fraction(0)] * (len(q) + len(s1))
            for i, a in enumerate(q):
                for j, b in enumerate(s1):
                    prod[i + j] += a * b
            n = max(len(s0), len(prod))
            s = [Fraction(0)] * n
            for i, a in enumerate(s0):
                s[i] += a
            for i, a in enumerate(prod):
                s[i] -= a
            r0, r1, s0, s1 = r1, r, s1, _poly_trim(s)
        inv_c = 1 / r1[0]
        deg = len(phi) - 1
        out = [c * inv_c for c in s1][:deg]
        out += [Fraction(0)] * (deg - len(out))
        return Cyclotomic(self.m, _poly_trim(out))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return len(self.coeffs) <= 1

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational element")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        # Hash through the numeric embedding would be unstable; use the
        # reduced vector at the stored conductor lifted to a canonical one.
        return hash((self.m, self.coeffs)) if len(self.coeffs) != 1 else hash(self.coeffs[0])

    def numeric(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.m)
        return sum((complex(c) * z**k for k, c in enumerate(self.coeffs)), 0j)

    def __repr__(self) -> str:
        if self.is_rational():
            return str(self.rational_value())
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                atom = "1" if k == 0 else f"E({Fraction(k, self.m)})"
                parts.append(atom if c == 1 and k else f"{c}" if k == 0 else f"{c}*{atom}")
        return "(" + " + ".join(parts) + ")"


def _nth_root_exact(q: Fraction, n: int) -> Fraction | None:
    """The exact n-th root of a positive rational, or None if irrational."""
    if q <= 0:
        return None

    def iroot(a: int) -> int | None:
        r = round(a ** (1.0 / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**n == a:
                return cand
        return None

    num, den = iroot(q.numerator), iroot(q.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


class Coefficient:
    """Polynomial in the formal symbol L = i*pi over a cyclotomic field."""

    __slots__ = ("lam",)

    def __init__(self, lam: tuple[Cyclotomic, ...]):
        end = len(lam)
        while end > 0 and lam[end - 1].is_zero():
            end -= 1
        self.lam = lam[:end]

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rational(q: Rational) -> Coefficient:
        return Coefficient((Cyclotomic.from_rational(q),))

    @staticmethod
    def zero() -> Coefficient:
        return Coefficient(())

    @staticmethod
    def one() -> Coefficient:
        return Coefficient.from_rational(1)

    @staticmethod
    def lam_symbol() -> Coefficient:
        """The formal symbol L, numerically i*pi."""
        return Coefficient((Cyclotomic.from_rational(0), Cyclotomic.from_rational(1)))

    @staticmethod
    def phase(q: Rational) -> Coefficient:
        """The half-turn phase e^{i pi q} for rational q."""
        q = Fraction(q)
        m = 2 * q.denominator
        return Coefficient((Cyclotomic.root_of_unity(m, q.numerator % m),))

    @staticmethod
    def coerce(value: "CoeffLike") -> Coefficient:
        if isinstance(value, Coefficient):
            return value
        return Coefficient.from_rational(value)

    # -- ring operations ----------------------------------------------

    def __add__(self, other: CoeffLike) -> Coefficient:
        other = Coefficient.coerce(other)
        n = max(len(self.lam), len(other.lam))
        zero = Cyclotomic.from_rational(0)
        out = []
        for i in range(n):
            a = self.lam[i] if i < len(self.lam) else zero
            b = other.lam[i] if i < len(other.lam) else zero
            out.append(a + b)
        return Coefficient(tuple(out))

    __radd__ = __add__

    def __neg__(self) -> Coefficient:
        return Coefficient(tuple(-c for c in self.lam))

    def __sub__(self, other: CoeffLike) -> Coefficient:
        return self + (-Coefficient.coerce(other))

    def __rsub__(self, other: CoeffLike) -> Coefficient:
        return Coefficient.coerce(other) + (-self)

    def __mul__(self, other: CoeffLike) -> Coefficient:
        other = Coefficient.coerce(other)
        if not self.lam or not other.lam:
            return Coefficient(())
        zero = Cyclotomic.from_rational(0)
        out = [zero] * (len(self.lam) + len(other.lam) - 1)
        for i, a in enumerate(self.lam):
            if not a.is_zero():
                for j, b in enumerate(other.lam):
                    if not b.is_zero():
                        out[i + j] = out[i + j] + a * b
        return Coefficient(tuple(out))

    __rmul__ = __mul__

    def scale(self, q: Rational) -> Coefficient:
        return Coefficient(tuple(c.scale(q) for c in self.lam))

    def inverse(self) -> Coefficient:
        if self.lam_degree() > 0:
            raise ValueError("cannot invert a coefficient involving the i*pi symbol")
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero coefficient")
        return Coefficient((self.lam[0].inverse(),))

    def __pow__(self, n: int) -> Coefficient:
        if n < 0:
            return self.inverse() ** (-n)
        acc, base = Coefficient.one(), self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def rational_power(self, k: Fraction) -> Coefficient:
        """c^k for rational k; c must be (positive rational) * (root of unity).

        The root-of-unity factor zeta^j is raised using the principal
        convention e^{2 pi i j/m} |-> e^{2 pi i jk/m}.
        """
        k = Fraction(k)
        if k.denominator == 1:
            return self ** int(k)
        if self.lam_degree() > 0 or self.is_zero():
            raise ValueError("rational power needs a nonzero constant without i*pi part")
        c = self.lam[0].lift(math.lcm(self.lam[0].m, 2))
        for j in range(c.m):
            test = c * Cyclotomic.root_of_unity(c.m, -j % c.m)
            if test.is_rational():
                rho = test.rational_value()
                if rho > 0:
                    root = _nth_root_exact(rho**k.numerator, k.denominator)
                    if root is None:
                        raise ValueError(f"{rho}^{k} is not rational")
                    return Coefficient.from_rational(root) * Coefficient.phase(Fraction(2 * j, c.m) * k)
        raise ValueError("coefficient is not a rational multiple of a root of unity")

    def log_exact(self) -> Coefficient:
        """log(c) for c a pure phase: log(e^{i pi q}) = q*L with q in (-1, 1].

        The value q is reduced into (-1, 1], matching the principal branch
        approached from above the cut at q = 1.
        """
        if self.lam_degree() > 0 or self.is_zero():
            raise ValueError("exact log needs a nonzero constant without i*pi part")
        c = self.lam[0].lift(math.lcm(self.lam[0].m, 2))
        for j in range(c.m):
            if c == Cyclotomic.root_of_unity(c.m, j):
                q = Fraction(2 * j, c.m)  # phase e^{i pi q}
                q = Fraction((q.numerator % (2 * q.denominator)), q.denominator)
                if q > 1:
                    q -= 2
                return Coefficient.lam_symbol().scale(q)
        raise ValueError("exact log only defined for roots of unity")

    # -- predicates & output ------------------------------------------

    def lam_degree(self) -> int:
        return len(self.lam) - 1 if self.lam else 0

    def is_zero(self) -> bool:
        return not self.lam

    def is_rational(self) -> bool:
        return not self.lam or (len(self.lam) == 1 and self.lam[0].is_rational())

    def rational_value(self) -> Fraction:
        if not self.lam:
            return Fraction(0)
        if len(self.lam) > 1:
            raise ValueError("not rational")
        return self.lam[0].rational_value()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Coefficient.from_rational(other)
        if not isinstance(other, Coefficient):
            return NotImplemented
        if len(self.lam) != len(other.lam):
            return False
        return all(a == b for a, b in zip(self.lam, other.lam))

    def __hash__(self) -> int:
        return hash(tuple(self.lam))

    def numeric(self) -> complex:
        ipi = 1j * cmath.pi
        return sum((c.numeric() * ipi**k for k, c in enumerate(self.lam)), 0j)

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.lam):
            if c.is_zero():
                continue
            body = repr(c)
            if k == 0:
                parts.append(body)
            else:
                lpow = "L" if k == 1 else f"L^{k}"
                parts.append(lpow if body == "1" else f"{body}*{lpow}")
        return " + ".join(parts)

    # -- JSON ----------------------------------------------------------

    def to_json(self) -> list[dict]:
        out = []
        for k, c in enumerate(self.lam):
            if c.is_zero():
                continue
            deg = max(1, len(cyclotomic_polynomial(c.m)) - 1)
            vec = list(c.coeffs) + [Fraction(0)] * (deg - len(c.coeffs))
            out.append(
                {
                    "lambda_deg": k,
                    "coeffs": [[f.numerator, f.denominator] for f in vec],
                    "m": c.m,
                }
            )
        return out

    @staticmethod
    def from_json(data: list[dict]) -> Coefficient:
        if not data:
            return Coefficient.zero()
        top = max(item["lambda_deg"] for item in data)
        lam = [Cyclotomic.from_rational(0)] * (top + 1)
        for item in data:
            vec = tuple(Fraction(n, d) for n, d in item["coeffs"])
            lam[item["lambda_deg"]] = Cyclotomic(item["m"], _poly_trim(list(vec)))
        return Coefficient(tuple(lam))


CoeffLike = Coefficient | Fraction | int


def numeric_value(c: CoeffLike) -> complex:
    """Evaluate a coefficient in double precision (zeta_m -> e^{2 pi i/m}, L -> i*pi)."""
    return Coefficient.coerce(c).numeric()
