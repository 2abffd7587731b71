"""Truncated formal series with rational exponents and logarithms.

A :class:`LogPuiseuxSeries` is a finite sum of sectors

    prod_e zeta_e^{s_e} (log zeta_e)^{k_e} * x^{a} (log x)^{b}

over a named set of variables, with exact :class:`~operadlab.coeff.Coefficient`
coefficients.  The exponents ``s_e`` are rational, the log powers are
non-negative integers.  One variable may be distinguished as the "top"
variable ``x``; it is exempt from the truncation grading, which bounds the
total exponent summed over the remaining (zeta) variables only.

Truncation semantics: ``order = N`` asserts that every term of total
zeta-exponent <= N is correctly represented.  Arithmetic propagates the
tightest honest bound; in particular multiplying by a monomial of negative
degree lowers the effective order.  ``order = None`` marks an exact
(untruncated) element such as a Laurent polynomial.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Iterable, Mapping

from .coeff import Coefficient, CoeffLike

# A term key assigns to every variable (zeta variables first, then the
# distinguished variable if any) a pair (exponent, log power).
TermKey = tuple[tuple[Fraction, int], ...]


def binomial(n: Fraction | int, k: int) -> Fraction:
    """Generalized binomial coefficient C(n, k) for integer or rational n."""
    if k < 0:
        return Fraction(0)
    n = Fraction(n)
    num = Fraction(1)
    for i in range(k):
        num *= n - i
    den = 1
    for i in range(1, k + 1):
        den *= i
    return num / den


def _min_order(*orders: int | None) -> int | None:
    finite = [o for o in orders if o is not None]
    return min(finite) if finite else None


class LogPuiseuxSeries:
    """Finite sum of log-Puiseux sectors over a fixed variable tuple."""

    __slots__ = ("vars", "xvar", "terms", "order")

    def __init__(
        self,
        vars: tuple[str, ...],
        terms: dict[TermKey, Coefficient],
        order: int | None,
        xvar: str | None = None,
    ):
        self.vars = tuple(vars)
        self.xvar = xvar
        if xvar is not None and (not self.vars or self.vars[-1] != xvar):
            raise ValueError("the distinguished variable must be last in vars")
        self.order = order
        clean: dict[TermKey, Coefficient] = {}
        for key, c in terms.items():
            c = Coefficient.coerce(c)
            if c.is_zero():
                continue
            if order is not None and self._key_degree(key) > order:
                continue
            clean[key] = c
        self.terms = clean

    # -- basic structure ------------------------------------------------

    def _nzeta(self) -> int:
        return len(self.vars) - (1 if self.xvar else 0)

    def _key_degree(self, key: TermKey) -> Fraction:
        n = self._nzeta()
        return sum((key[i][0] for i in range(n)), Fraction(0))

    def min_zeta_degree(self) -> Fraction | None:
        """Minimal total zeta-exponent over stored terms, None for the zero series."""
        if not self.terms:
            return None
        return min(self._key_degree(k) for k in self.terms)

    def zero_key(self) -> TermKey:
        return tuple((Fraction(0), 0) for _ in self.vars)

    @staticmethod
    def constant(
        value: CoeffLike,
        vars: tuple[str, ...],
        order: int | None = None,
        xvar: str | None = None,
    ) -> LogPuiseuxSeries:
        s = LogPuiseuxSeries(vars, {}, order, xvar)
        c = Coefficient.coerce(value)
        if not c.is_zero():
            s.terms[s.zero_key()] = c
        return s

    @staticmethod
    def monomial(
        vars: tuple[str, ...],
        exponents: Mapping[str, Fraction | int],
        coeff: CoeffLike = 1,
        logs: Mapping[str, int] | None = None,
        order: int | None = None,
        xvar: str | None = None,
    ) -> LogPuiseuxSeries:
        logs = logs or {}
        key = tuple(
            (Fraction(exponents.get(v, 0)), int(logs.get(v, 0))) for v in vars
        )
        return LogPuiseuxSeries(vars, {key: Coefficient.coerce(coeff)}, order, xvar)

    def is_zero(self) -> bool:
        return not self.terms

    def with_order(self, order: int | None) -> LogPuiseuxSeries:
        return LogPuiseuxSeries(self.vars, dict(self.terms), order, self.xvar)

    def align(self, vars: tuple[str, ...], xvar: str | None = None) -> LogPuiseuxSeries:
        """Re-express over a superset variable tuple."""
        if vars == self.vars and xvar == self.xvar:
            return self
        pos = {v: i for i, v in enumerate(vars)}
        for v in self.vars:
            if v not in pos:
                raise ValueError(f"variable {v!r} missing from target tuple")
        terms: dict[TermKey, Coefficient] = {}
        for key, c in self.terms.items():
            new = [(Fraction(0), 0)] * len(vars)
            for v, pair in zip(self.vars, key):
                new[pos[v]] = pair
            terms[tuple(new)] = c
        return LogPuiseuxSeries(vars, terms, self.order, xvar)

    def _common(self, other: LogPuiseuxSeries) -> tuple[LogPuiseuxSeries, LogPuiseuxSeries]:
        if self.vars == other.vars and self.xvar == other.xvar:
            return self, other
        if self.xvar and other.xvar and self.xvar != other.xvar:
            raise ValueError("incompatible distinguished variables")
        xvar = self.xvar or other.xvar
        merged = [v for v in self.vars if v != xvar]
        merged += [v for v in other.vars if v != xvar and v not in merged]
        if xvar:
            merged.append(xvar)
        vt = tuple(merged)
        return self.align(vt, xvar), other.align(vt, xvar)

    # -- ring operations --------------------------------------------------

    def __add__(self, other: LogPuiseuxSeries | CoeffLike) -> LogPuiseuxSeries:
        if not isinstance(other, LogPuiseuxSeries):
            other = LogPuiseuxSeries.constant(other, self.vars, None, self.xvar)
        a, b = self._common(other)
        order = _min_order(a.order, b.order)
        terms = dict(a.terms)
        for key, c in b.terms.items():
            cur = terms.get(key)
            terms[key] = c if cur is None else cur + c
        return LogPuiseuxSeries(a.vars, terms, order, a.xvar)

    __radd__ = __add__

    def __neg__(self) -> LogPuiseuxSeries:
        return LogPuiseuxSeries(
            self.vars, {k: -c for k, c in self.terms.items()}, self.order, self.xvar
        )

    def __sub__(self, other: LogPuiseuxSeries | CoeffLike) -> LogPuiseuxSeries:
        return self + (-other if isinstance(other, LogPuiseuxSeries)
                        else -Coefficient.coerce(other))

    def __mul__(self, other: LogPuiseuxSeries | CoeffLike) -> LogPuiseuxSeries:
        if not isinstance(other, LogPuiseuxSeries):
            c = Coefficient.coerce(other)
            return LogPuiseuxSeries(
                self.vars, {k: v * c for k, v in self.terms.items()}, self.order, self.xvar
            )
        a, b = self._common(other)
        # Honest truncation: a is trusted up to order(a), so products with b's
        # minimal part are trusted up to order(a) + mindeg(b), and symmetrically.
        da, db = a.min_zeta_degree(), b.min_zeta_degree()
        bounds = []
        if a.order is not None:
            bounds.append(None if db is None else a.order + db)
        if b.order is not None:
            bounds.append(None if da is None else b.order + da)
        import math as _math

        order = _min_order(*[None if x is None else _math.floor(x) for x in bounds])
        terms: dict[TermKey, Coefficient] = {}
        n = len(a.vars)
        for k1, c1 in a.terms.items():
            for k2, c2 in b.terms.items():
                key = tuple((k1[i][0] + k2[i][0], k1[i][1] + k2[i][1]) for i in range(n))
                if order is not None and a._key_degree(key) > order:
                    continue
                c = c1 * c2
                cur = terms.get(key)
                terms[key] = c if cur is None else cur + c
        return LogPuiseuxSeries(a.vars, terms, order, a.xvar)

    __rmul__ = __mul__

    # -- leading factorisation and powers ---------------------------------

    def factor_leading(self) -> tuple[Coefficient, TermKey, LogPuiseuxSeries]:
        """Write the series as c * M * (1 + h) with M a log-free monomial.

        The monomial M is the unique term of minimal total zeta-exponent;
        h has strictly positive zeta-degree.  Raises ValueError when no such
        factorisation exists (several minimal terms, or a log factor in the
        minimal term).
        """
        if self.is_zero():
            raise ValueError("cannot factor the zero series")
        dmin = self.min_zeta_degree()
        lead = [(k, c) for k, c in self.terms.items() if self._key_degree(k) == dmin]
        if len(lead) != 1:
            raise ValueError("leading part is not a single monomial")
        mkey, c = lead[0]
        if any(lp for (_, lp) in mkey):
            raise ValueError("leading monomial carries a logarithm")
        cinv = c.inverse()
        n = len(self.vars)
        hterms: dict[TermKey, Coefficient] = {}
        for k, v in self.terms.items():
            if k == mkey:
                continue
            shifted = tuple((k[i][0] - mkey[i][0], k[i][1]) for i in range(n))
            hterms[shifted] = v * cinv
        horder = None
        if self.order is not None:
            horder = self.order - int(dmin) if dmin == int(dmin) else self.order
        h = LogPuiseuxSeries(self.vars, hterms, horder, self.xvar)
        return c, mkey, h

    def _monomial_power(self, mkey: TermKey, k: Fraction) -> LogPuiseuxSeries:
        key = tuple((e * k, 0) for (e, _) in mkey)
        return LogPuiseuxSeries(self.vars, {key: Coefficient.one()}, None, self.xvar)

    def pow(self, k: Fraction | int, order: int | None = None) -> LogPuiseuxSeries:
        """Raise to a rational power, using the principal sector for M^k.

        Integer k >= 0 works for any series; other exponents require a
        factorisation c*M*(1+h) (see :meth:`factor_leading`), expand
        (1+h)^k binomially, and use exponent multiplication for M^k.
        """
        k = Fraction(k)
        if k.denominator == 1 and k >= 0:
            n = int(k)
            start_order = order if order is not None else (self.order if n else None)
            acc = LogPuiseuxSeries.constant(1, self.vars, start_order, self.xvar)
            if n == 0:
                return acc
            base = self if order is None else self.with_order(min(o for o in (order, self.order) if o is not None))
            while True:
                if n & 1:
                    acc = acc * base
                n >>= 1
                if not n:
                    return acc if order is None else acc.with_order(order)
                base = base * base
        c, mkey, h = self.factor_leading()
        ck = c.rational_power(k)
        mk = self._monomial_power(mkey, k)
        if h.is_zero():
            out = mk * ck
            return out.with_order(order if order is not None else self.order)
        # order bookkeeping: (1+h)^k is trusted to the order h is trusted to.
        cap = order
        if cap is None:
            if h.order is None:
                raise ValueError("pow of an exact series with infinite expansion needs an order")
            cap = h.order
        elif h.order is not None:
            cap = min(cap, h.order)
        dh = h.min_zeta_degree()
        if dh is None or dh <= 0:
            raise ValueError("higher part must have strictly positive zeta-degree")
        acc = LogPuiseuxSeries.constant(1, self.vars, cap, self.xvar)
        hpow = LogPuiseuxSeries.constant(1, self.vars, cap, self.xvar)
        n = 1
        while n * dh <= cap:
            hpow = (hpow * h).with_order(cap)
            term = hpow * Coefficient.coerce(1).scale(binomial(k, n))
            acc = acc + term
            n += 1
        out = (mk * ck) * acc
        # shift trusted order by the degree change of the monomial part
        import math as _math

        dm = sum((e for (e, _) in mkey[: self._nzeta()]), Fraction(0))
        final = _math.floor(cap + dm * k) if order is None else order
        return out.with_order(final)

    def log1p_of(self, order: int | None = None) -> LogPuiseuxSeries:
        """log(1 + self) for a series of strictly positive zeta-degree."""
        d = self.min_zeta_degree()
        if d is None:
            return LogPuiseuxSeries(self.vars, {}, self.order, self.xvar)
        if d <= 0:
            raise ValueError("log(1+h) needs h of positive zeta-degree")
        cap = order if order is not None else self.order
        if cap is None:
            raise ValueError("log of an exact series needs an order")
        acc = LogPuiseuxSeries(self.vars, {}, cap, self.xvar)
        hpow = LogPuiseuxSeries.constant(1, self.vars, cap, self.xvar)
        n = 1
        while n * d <= cap:
            hpow = (hpow * self).with_order(cap)
            acc = acc + hpow * Coefficient.coerce(1).scale(Fraction((-1) ** (n + 1), n))
            n += 1
        return acc

    # -- calculus ---------------------------------------------------------

    def differentiate(self, var: str) -> LogPuiseuxSeries:
        """Termwise d/dvar: d(z^s) = s z^{s-1}, d((log z)^k) = k z^{-1} (log z)^{k-1}."""
        idx = self.vars.index(var)
        terms: dict[TermKey, Coefficient] = {}

        def put(key: TermKey, c: Coefficient) -> None:
            if c.is_zero():
                return
            cur = terms.get(key)
            s = c if cur is None else cur + c
            if s.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = s

        for key, c in self.terms.items():
            e, lp = key[idx]
            if e:
                k1 = list(key)
                k1[idx] = (e - 1, lp)
                put(tuple(k1), c.scale(e))
            if lp:
                k2 = list(key)
                k2[idx] = (e - 1, lp - 1)
                put(tuple(k2), c.scale(lp))
        order = self.order
        if order is not None and idx < self._nzeta():
            order -= 1
        return LogPuiseuxSeries(self.vars, terms, order, self.xvar)

    # -- numerics -----------------------------------------------------------

    def evaluate(
        self,
        point: Mapping[str, complex],
        require_cut: bool = True,
        branch_logs: Mapping[str, complex] | None = None,
    ) -> complex:
        """Evaluate at a point using principal branches.

        ``branch_logs`` may supply a continued logarithm per variable, in
        which case z^s = exp(s*log z) and log z use that value instead of the
        principal branch (used by analytic continuation along paths).
        """
        logs: dict[str, complex] = {}
        for v in self.vars:
            if branch_logs and v in branch_logs:
                logs[v] = complex(branch_logs[v])
                continue
            z = complex(point[v])
            if z == 0:
                if any(key[self.vars.index(v)][0] < 0 or key[self.vars.index(v)][1] > 0
                       for key in self.terms):
                    raise ValueError(f"zero value for variable {v!r} with singular term")
                logs[v] = 0.0
                continue
            if require_cut and z.real <= 0 and z.imag == 0:
                raise ValueError(f"value of {v!r} lies on the branch cut")
            logs[v] = cmath.log(z)
        total = 0j
        for key, c in self.terms.items():
            w = c.numeric()
            for (e, lp), v in zip(key, self.vars):
                lg = logs[v]
                if e:
                    w *= cmath.exp(float(e) * lg)
                if lp:
                    w *= lg**lp
            total += w
        return total

    # -- equality, display, JSON --------------------------------------------

    def same_terms(self, other: LogPuiseuxSeries) -> bool:
        a, b = self._common(other)
        return a.terms == b.terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogPuiseuxSeries):
            return NotImplemented
        return self.same_terms(other)

    def __hash__(self):
        raise TypeError("unhashable")

    def sorted_terms(self) -> list[tuple[TermKey, Coefficient]]:
        return sorted(
            self.terms.items(),
            key=lambda kv: (
                self._key_degree(kv[0]),
                [(float(e), lp) for (e, lp) in kv[0]],
            ),
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.sorted_terms():
            factors = []
            for (e, lp), v in zip(key, self.vars):
                if e:
                    factors.append(f"{v}^{e}" if e != 1 else v)
                if lp:
                    factors.append(f"log({v})" + (f"^{lp}" if lp > 1 else ""))
            cs = repr(c)
            if factors:
                body = "*".join(factors)
                parts.append(body if cs == "1" else f"{cs}*{body}" if "+" not in cs else f"({cs})*{body}")
            else:
                parts.append(cs if "+" not in cs else f"({cs})")
        s = " + ".join(parts)
        return s + (f"  (order {self.order})" if self.order is not None else "")

    def to_json(self) -> dict:
        terms = []
        for key, c in self.sorted_terms():
            exp = {v: str(e) for (e, _), v in zip(key, self.vars) if e}
            log = {v: lp for (_, lp), v in zip(key, self.vars) if lp}
            terms.append({"exp": exp, "log": log, "coeff": c.to_json()})
        return {
            "order": self.order,
            "vars": list(self.vars),
            "xvar": self.xvar,
            "terms": terms,
        }

    @staticmethod
    def from_json(data: dict) -> LogPuiseuxSeries:
        vars = tuple(data["vars"])
        xvar = data.get("xvar")
        terms: dict[TermKey, Coefficient] = {}
        for item in data["terms"]:
            key = tuple(
                (Fraction(item["exp"].get(v, "0")), int(item["log"].get(v, 0)))
                for v in vars
            )
            terms[key] = Coefficient.from_json(item["coeff"])
        return LogPuiseuxSeries(vars, terms, data.get("order"), xvar)


def series_arith(
    op: str,
    a: LogPuiseuxSeries,
    b: LogPuiseuxSeries | Fraction | None = None,
    order: int | None = None,
) -> LogPuiseuxSeries:
    """Dispatch helper: op in {"add", "mul", "pow"}."""
    if op == "add":
        assert isinstance(b, LogPuiseuxSeries)
        return a + b
    if op == "mul":
        assert isinstance(b, LogPuiseuxSeries)
        return a * b
    if op == "pow":
        assert b is not None and not isinstance(b, LogPuiseuxSeries)
        return a.pow(Fraction(b), order=order)
    raise ValueError(f"unknown series operation {op!r}")
