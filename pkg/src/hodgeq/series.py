"""Exact arithmetic for truncated q-power series.

Coefficients are integer (or rational) Laurent polynomials in two variables
x, y; everything in the exact path is bit-exact big-integer arithmetic.
These series are the brute-force oracle that the analytic formulas elsewhere
in the package are tested against, so no floating point is allowed here
except in the explicit specialization step.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, lcm
from typing import Iterable, Mapping

from mpmath import mp, mpc

from .errors import NonUnitConstantTerm

Exponent = tuple[int, int]


class LaurentPoly:
    """Integer/rational Laurent polynomial sum(c[a,b] * x^a * y^b).

    Stored as a dict keyed by the exponent pair; zero coefficients are never
    stored, so the zero polynomial is the empty dict.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Exponent, int] | None = None):
        self.terms: dict[Exponent, int] = {}
        if terms:
            for key, val in terms.items():
                if val:
                    self.terms[key] = val

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls({(0, 0): c} if c else None)

    @classmethod
    def monomial(cls, c, a: int, b: int) -> "LaurentPoly":
        return cls({(a, b): c} if c else None)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or self.terms.keys() == {(0, 0)}

    def constant_value(self):
        return self.terms.get((0, 0), 0)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (a, b), c in sorted(self.terms.items()):
            mono = f"x^{a}*y^{b}" if (a, b) != (0, 0) else ""
            bits.append(f"{c}{'*' if mono else ''}{mono}")
        return " + ".join(bits)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for key, val in other.terms.items():
            s = out.get(key, 0) + val
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        res = LaurentPoly()
        res.terms = out
        return res

    def __neg__(self) -> "LaurentPoly":
        res = LaurentPoly()
        res.terms = {k: -v for k, v in self.terms.items()}
        return res

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.terms or not other.terms:
            return LaurentPoly()
        # single-monomial factors dominate the product expansions; keep them O(n)
        if len(other.terms) == 1:
            ((oa, ob), oc), = other.terms.items()
            if (oa, ob) == (0, 0):
                return self.scale(oc)
            res = LaurentPoly()
            res.terms = {(a + oa, b + ob): c * oc for (a, b), c in self.terms.items()}
            return res
        if len(self.terms) == 1:
            return other * self
        out: dict[Exponent, int] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                s = out.get(key, 0) + c1 * c2
                if s:
                    out[key] = s
                else:
                    del out[key]
        res = LaurentPoly()
        res.terms = out
        return res

    def scale(self, c) -> "LaurentPoly":
        if not c:
            return LaurentPoly()
        res = LaurentPoly()
        res.terms = {k: v * c for k, v in self.terms.items()}
        return res

    def swap_vars(self) -> "LaurentPoly":
        res = LaurentPoly()
        res.terms = {(b, a): c for (a, b), c in self.terms.items()}
        return res

    def invert_vars(self) -> "LaurentPoly":
        res = LaurentPoly()
        res.terms = {(-a, -b): c for (a, b), c in self.terms.items()}
        return res

    def filter_exponents(self, res_x: int, mod_x: int, res_y: int, mod_y: int):
        """Sum of coefficients over terms with a = res_x (mod_x), b = res_y (mod_y)."""
        total = 0
        for (a, b), c in self.terms.items():
            if (a - res_x) % mod_x == 0 and (b - res_y) % mod_y == 0:
                total += c
        return total

    def bucket_by_mod(self, mod_x: int, mod_y: int) -> dict[Exponent, int]:
        """Exponents reduced mod (mod_x, mod_y) with exact integer bucket sums."""
        out: dict[Exponent, int] = {}
        for (a, b), c in self.terms.items():
            key = (a % mod_x, b % mod_y)
            out[key] = out.get(key, 0) + c
        return out

    def evaluate(self, x0, y0, xpow: dict | None = None, ypow: dict | None = None):
        """Value at (x0, y0); power caches may be shared across many calls."""
        if xpow is None:
            xpow = {}
        if ypow is None:
            ypow = {}
        total = mpc(0)
        for (a, b), c in self.terms.items():
            xa = xpow.get(a)
            if xa is None:
                xa = xpow[a] = x0 ** a
            yb = ypow.get(b)
            if yb is None:
                yb = ypow[b] = y0 ** b
            total += c * xa * yb
        return total


class LaurentQSeries:
    """Truncated power series in q with LaurentPoly coefficients.

    The truncation order is explicit state; binary operations silently
    truncate to the smaller of the two orders.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[LaurentPoly]):
        self.coeffs: list[LaurentPoly] = list(coeffs)
        if not self.coeffs:
            raise ValueError("series needs at least the constant coefficient")

    @property
    def trunc(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, trunc: int) -> "LaurentQSeries":
        return cls([LaurentPoly.const(1)] + [LaurentPoly.zero() for _ in range(trunc)])

    @classmethod
    def zero(cls, trunc: int) -> "LaurentQSeries":
        return cls([LaurentPoly.zero() for _ in range(trunc + 1)])

    @classmethod
    def from_scalars(cls, values: Iterable) -> "LaurentQSeries":
        return cls([LaurentPoly.const(v) for v in values])

    def scalar_list(self) -> list | None:
        """Plain coefficient list when every coefficient is constant, else None."""
        out = []
        for p in self.coeffs:
            if not p.is_constant():
                return None
            out.append(p.constant_value())
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentQSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"LaurentQSeries(trunc={self.trunc}, coeffs={self.coeffs!r})"

    def __add__(self, other: "LaurentQSeries") -> "LaurentQSeries":
        n = min(self.trunc, other.trunc)
        return LaurentQSeries([self.coeffs[i] + other.coeffs[i] for i in range(n + 1)])

    def __neg__(self) -> "LaurentQSeries":
        return LaurentQSeries([-p for p in self.coeffs])

    def __sub__(self, other: "LaurentQSeries") -> "LaurentQSeries":
        return self + (-other)

    def __mul__(self, other: "LaurentQSeries") -> "LaurentQSeries":
        return series_mul(self, other)


def series_mul(a: LaurentQSeries, b: LaurentQSeries) -> LaurentQSeries:
    """Cauchy product truncated at min(trunc); exact arithmetic throughout."""
    n = min(a.trunc, b.trunc)
    sa, sb = a.scalar_list(), b.scalar_list()
    if sa is not None and sb is not None:
        out = [0] * (n + 1)
        for i, ca in enumerate(sa[: n + 1]):
            if not ca:
                continue
            for j in range(n + 1 - i):
                cb = sb[j]
                if cb:
                    out[i + j] += ca * cb
        return LaurentQSeries.from_scalars(out)
    coeffs = [LaurentPoly.zero() for _ in range(n + 1)]
    for i in range(n + 1):
        pa = a.coeffs[i]
        if pa.is_zero():
            continue
        for j in range(n + 1 - i):
            pb = b.coeffs[j]
            if not pb.is_zero():
                coeffs[i + j] = coeffs[i + j] + pa * pb
    return LaurentQSeries(coeffs)


def series_inverse(a: LaurentQSeries) -> LaurentQSeries:
    """Multiplicative inverse to the truncation order of `a`.

    The constant term must be a unit: +-1 for integer coefficients, any
    nonzero rational otherwise.
    """
    c0 = a.coeffs[0]
    if not c0.is_constant() or not c0.constant_value():
        raise NonUnitConstantTerm(f"constant term {c0!r} is not invertible")
    u = c0.constant_value()
    sa = a.scalar_list()
    if sa is not None:
        if u in (1, -1):
            inv_u = u
        elif isinstance(u, Fraction) or any(isinstance(v, Fraction) for v in sa):
            inv_u = Fraction(1, 1) / u
        else:
            raise NonUnitConstantTerm(f"integer constant term {u} is not a unit")
        n = a.trunc
        out = [inv_u] + [0] * n
        for m in range(1, n + 1):
            s = 0
            for i in range(1, m + 1):
                if sa[i]:
                    s += sa[i] * out[m - i]
            out[m] = -inv_u * s
        return LaurentQSeries.from_scalars(out)
    if u not in (1, -1):
        raise NonUnitConstantTerm(f"constant term {u} is not a unit")
    n = a.trunc
    coeffs = [LaurentPoly.const(u)] + [LaurentPoly.zero()] * n
    for m in range(1, n + 1):
        acc = LaurentPoly.zero()
        for i in range(1, m + 1):
            if not a.coeffs[i].is_zero():
                acc = acc + a.coeffs[i] * coeffs[m - i]
        coeffs[m] = acc.scale(-u)
    return LaurentQSeries(coeffs)


def product_factor_pow(a: int, b: int, m: int, e: int, trunc: int) -> LaurentQSeries:
    """Expansion of (1 - x^a * y^b * q^m)^e to order q^trunc, m >= 1.

    Nonnegative powers come from the binomial theorem; negative powers invert
    the corresponding positive power.
    """
    if m < 1:
        raise ValueError("q-exponent m must be >= 1")
    if e < 0:
        return series_inverse(product_factor_pow(a, b, m, -e, trunc))
    coeffs = [LaurentPoly.zero() for _ in range(trunc + 1)]
    coeffs[0] = LaurentPoly.const(1)
    for j in range(1, min(e, trunc // m) + 1):
        coeffs[m * j] = LaurentPoly.monomial((-1) ** j * comb(e, j), a * j, b * j)
    return LaurentQSeries(coeffs)


class ComplexQSeries:
    """Truncated series with complex coefficients on a rational exponent grid.

    Term i carries the exponent q_offset + i/grid_den, so fractional powers
    of q (eta-type prefactors) are represented exactly.
    """

    __slots__ = ("coeffs", "q_offset", "grid_den")

    def __init__(self, coeffs: Iterable, q_offset: Fraction = Fraction(0), grid_den: int = 1):
        self.coeffs = [mpc(c) for c in coeffs]
        if not self.coeffs:
            raise ValueError("series needs at least one coefficient")
        self.q_offset = Fraction(q_offset)
        self.grid_den = int(grid_den)
        if self.grid_den < 1:
            raise ValueError("grid denominator must be >= 1")

    @property
    def trunc(self) -> int:
        return len(self.coeffs) - 1

    def exponent(self, i: int) -> Fraction:
        return self.q_offset + Fraction(i, self.grid_den)

    def __mul__(self, other: "ComplexQSeries") -> "ComplexQSeries":
        if self.grid_den != other.grid_den:
            den = lcm(self.grid_den, other.grid_den)
            return self.regrid(den) * other.regrid(den)
        n = min(self.trunc, other.trunc)
        out = [mpc(0) for _ in range(n + 1)]
        for i in range(n + 1):
            ca = self.coeffs[i]
            if ca == 0:
                continue
            for j in range(n + 1 - i):
                cb = other.coeffs[j]
                if cb != 0:
                    out[i + j] += ca * cb
        return ComplexQSeries(out, self.q_offset + other.q_offset, self.grid_den)

    def scale(self, c) -> "ComplexQSeries":
        return ComplexQSeries([c * v for v in self.coeffs], self.q_offset, self.grid_den)

    def regrid(self, den: int) -> "ComplexQSeries":
        """Re-index onto a finer exponent grid (den must be a multiple)."""
        if den == self.grid_den:
            return self
        if den % self.grid_den:
            raise ValueError("new grid denominator must be a multiple of the old one")
        step = den // self.grid_den
        out = [mpc(0) for _ in range(self.trunc * step + 1)]
        for i, c in enumerate(self.coeffs):
            out[i * step] = c
        return ComplexQSeries(out, self.q_offset, den)

    def eval_at_tau(self, tau):
        """Sum of c_i * exp(2*pi*i*tau*(q_offset + i/grid_den))."""
        two_pi_i = 2j * mp.pi
        w = mp.exp(two_pi_i * tau / self.grid_den)
        head = mp.exp(two_pi_i * tau * mp.mpf(self.q_offset.numerator) / self.q_offset.denominator) \
            if self.q_offset else mpc(1)
        total = mpc(0)
        wp = mpc(1)
        for c in self.coeffs:
            if c != 0:
                total += c * wp
            wp *= w
        return head * total


def specialize(s: LaurentQSeries, x0, y0, precision_bits: int = 53) -> ComplexQSeries:
    """Evaluate every Laurent coefficient at (x0, y0) at the requested precision."""
    if precision_bits < 53:
        raise ValueError("precision_bits must be at least 53")
    with mp.workprec(precision_bits):
        x0 = mpc(x0)
        y0 = mpc(y0)
        xpow: dict = {}
        ypow: dict = {}
        vals = [p.evaluate(x0, y0, xpow, ypow) for p in s.coeffs]
        return ComplexQSeries(vals)
