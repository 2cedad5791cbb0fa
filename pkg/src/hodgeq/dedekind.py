"""Dedekind eta, generalized eta functions, sawtooth sums, and multipliers.

The generalized eta function with characteristics (u, v) mod N is the
weight-zero product

    eta_{(u,v,N)}(tau) = alpha_N(u,v) * e^{i*pi*P2(u/N)*tau}
        * prod_{m>0, m=u mod N} (1 - zeta_N^v  * e^{2*pi*i*tau*m/N})
        * prod_{m>0, m=-u mod N}(1 - zeta_N^-v * e^{2*pi*i*tau*m/N}),

with P2 the periodic second Bernoulli function and alpha_N a normalizing
constant.  Raised to the power 12*N^2/gcd(6,N) it is invariant on the
principal congruence group of level N, which the tests check numerically.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import NamedTuple

from mpmath import mp, mpc, mpf

from ._num import frac_mpf, unit_phase
from .series import ComplexQSeries, LaurentQSeries


# ---------------------------------------------------------------------------
# sawtooth functions
# ---------------------------------------------------------------------------

def P1(x):
    """Periodic first Bernoulli function {x} - 1/2 (exact on rationals)."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return x - (x.numerator // x.denominator) - Fraction(1, 2)
    return mp.frac(x) - mp.mpf(1) / 2


def P2(x):
    """Periodic second Bernoulli function {x}^2 - {x} + 1/6 (exact on rationals)."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        f = x - (x.numerator // x.denominator)
        return f * f - f + Fraction(1, 6)
    f = mp.frac(x)
    return f * f - f + mp.mpf(1) / 6


def sawtooth(x):
    """((x)): the sawtooth that is P1(x) off the integers and 0 on them."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x.denominator == 1:
            return Fraction(0)
        return P1(x)
    if mp.frac(x) == 0:
        return mp.mpf(0)
    return P1(x)


# ---------------------------------------------------------------------------
# Dedekind sums
# ---------------------------------------------------------------------------

def dedekind_sum_direct(h: int, k: int) -> Fraction:
    """Classical Dedekind sum by its defining O(k) sum; the slow oracle."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if gcd(h, k) != 1:
        raise ValueError("h and k must be coprime")
    return sum((sawtooth(Fraction(lam, k)) * sawtooth(Fraction(h * lam, k))
                for lam in range(1, k)), Fraction(0))


def dedekind_sum(h: int, k: int) -> Fraction:
    """Classical Dedekind sum s(h, k), exact, via the reciprocity recursion."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if gcd(h, k) != 1:
        raise ValueError("h and k must be coprime")
    h %= k
    s = Fraction(0)
    sign = 1
    # s(h,k) = -1/4 + (h/k + k/h + 1/(h k))/12 - s(k mod h, h)
    while h:
        s += sign * (Fraction(-1, 4)
                     + Fraction(h * h + k * k + 1, 12 * h * k))
        sign = -sign
        h, k = k % h, h
    # the recursion bottoms out at s(0, 1) = 0
    return s


def gen_dedekind_sum(r: int, ell: int, h: int, k: int) -> Fraction:
    """Generalized Dedekind sum sum_l ((l/k)) ((h*l/k + r/ell)), exact.

    Computed with a single integer loop: with u = (h*l*ell + r*k) mod (k*ell),
    the second sawtooth is (2u - k*ell)/(2*k*ell) away from its zero set.
    """
    if k < 1 or ell < 1:
        raise ValueError("k and ell must be >= 1")
    if gcd(h, k) != 1:
        raise ValueError("h and k must be coprime")
    kl = k * ell
    num = 0
    for lam in range(1, k):
        u = (h * lam * ell + r * k) % kl
        if u:
            num += (2 * lam - k) * (2 * u - kl)
    return Fraction(num, 4 * k * kl)


def omega_multiplier(h: int, k: int, chi: int, sigma: int, r: int, ell: int) -> mpc:
    """Root of unity exp(-i*pi/4 * (2(chi-sigma) s(h,k) + (chi+sigma) s_{(r,ell)}(h,k)))."""
    return unit_phase(omega_phase(h, k, chi, sigma, r, ell))


def omega_phase(h: int, k: int, chi: int, sigma: int, r: int, ell: int) -> Fraction:
    """Exact exponent-of-(i*pi) of the omega multiplier."""
    return -Fraction(1, 4) * (2 * (chi - sigma) * dedekind_sum(h, k)
                              + (chi + sigma) * gen_dedekind_sum(r, ell, h, k))


def eta_multiplier_phase(a: int, b: int, c: int, d: int) -> Fraction:
    """Exponent-of-(i*pi) in the eta multiplier for (a b; c d), c > 0.

    eta((a*tau+b)/(c*tau+d)) = e^{i*pi*phi} * (c*tau+d)^(1/2) * eta(tau)
    with phi = (a+d)/(12c) - s(d,c) - 1/4 and the principal square root.
    """
    if c <= 0:
        raise ValueError("lower-left entry must be positive")
    if a * d - b * c != 1:
        raise ValueError("matrix must have determinant 1")
    return Fraction(a + d, 12 * c) - dedekind_sum(d % c, c) - Fraction(1, 4)


# ---------------------------------------------------------------------------
# q-expansions
# ---------------------------------------------------------------------------

class EtaTriple(NamedTuple):
    """Characteristics (u, v) mod N of one generalized eta factor."""

    u: int
    v: int
    N: int

    def reduced(self) -> "EtaTriple":
        return EtaTriple(self.u % self.N, self.v % self.N, self.N)

    def is_degenerate(self) -> bool:
        """(u, v) = (0, 0) mod N: the factor collapses to eta squared."""
        return self.u % self.N == 0 and self.v % self.N == 0


class OffsetSeries(NamedTuple):
    """A q-series together with the exact rational exponent of its leading q-power."""

    series: LaurentQSeries
    q_offset: Fraction


def euler_product_series(trunc: int) -> LaurentQSeries:
    """prod_{m>=1} (1 - q^m) truncated at q^trunc, exact integers."""
    coeffs = [1] + [0] * trunc
    for m in range(1, trunc + 1):
        for i in range(trunc - m, -1, -1):
            if coeffs[i]:
                coeffs[i + m] -= coeffs[i]
    return LaurentQSeries.from_scalars(coeffs)


def eta_expansion(trunc: int) -> OffsetSeries:
    """Integer coefficients of eta = q^(1/24) prod (1 - q^n), offset recorded exactly."""
    return OffsetSeries(euler_product_series(trunc), Fraction(1, 24))


def alpha_const(u: int, v: int, N: int, precision_bits: int = 53) -> mpc:
    """Normalizing constant of the generalized eta function.

    (1 - zeta_N^-v) e^{i*pi*P1(v/N)} when u = 0, v != 0 mod N; otherwise 1.
    For u = 0 the value collapses to the positive real 2*sin(pi*v/N).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    with mp.workprec(precision_bits):
        if u % N == 0 and v % N != 0:
            return mpc(2 * mp.sinpi(mp.mpf(v % N) / N))
        return mpc(1)


def gen_eta_expansion(u: int, v: int, N: int, steps: int,
                      precision_bits: int = 64) -> ComplexQSeries:
    """Expansion of the generalized eta function on the q^(1/N) grid.

    `steps` counts grid steps of 1/N, so the highest retained exponent is
    P2(u/N)/2 + steps/N.  Coefficients include the alpha normalizing
    constant; the leading exponent is recorded exactly.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    u %= N
    with mp.workprec(precision_bits):
        zeta_v = unit_phase(Fraction(2 * v, N))
        coeffs = [mpc(0)] * (steps + 1)
        coeffs[0] = mpc(1)

        def fold(c, m0):
            # multiply in prod_{m == m0 mod N, m > 0} (1 - c * W^m), W = q^(1/N)
            m = m0 if m0 > 0 else N
            while m <= steps:
                for i in range(steps - m, -1, -1):
                    if coeffs[i] != 0:
                        coeffs[i + m] -= c * coeffs[i]
                m += N

        fold(zeta_v, u)
        fold(mp.conj(zeta_v), (-u) % N)
        alpha = alpha_const(u, v, N, precision_bits)
        return ComplexQSeries([alpha * c for c in coeffs],
                              q_offset=P2(Fraction(u, N)) / 2, grid_den=N)


# ---------------------------------------------------------------------------
# numerical evaluation in the upper half-plane
# ---------------------------------------------------------------------------

def _eta_product_tail_len(im_tau, precision_bits: int) -> int:
    # |log prod_{n>M}(1-q^n)| <= |q|^(M+1)/(1-|q|)^2; solve for 2^-(prec+8)
    t = 2 * mp.pi * im_tau
    need = (precision_bits + 16) * mp.log(2)
    return max(4, int(mp.ceil((need + 2 * abs(mp.log(-mp.expm1(-t)))) / t)))


def eta_numeric(tau, precision_bits: int = 64) -> mpc:
    """Dedekind eta at tau, any Im(tau) > 0.

    Near the real axis the raw product loses all precision, so tau is first
    pulled into the fundamental domain with the two generator laws
    eta(tau+1) = e^{i*pi/12} eta(tau) and eta(-1/tau) = sqrt(-i*tau) eta(tau).
    """
    with mp.workprec(precision_bits + 32):
        tau = mpc(tau)
        if mp.im(tau) <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        factor = mpc(1)
        phase24 = Fraction(0)  # accumulated exponent of e^{i*pi/12}
        while True:
            shift = int(mp.nint(mp.re(tau)))
            if shift:
                tau -= shift
                phase24 += Fraction(shift, 12)
            if abs(tau) >= 1 - mp.mpf(2) ** (-precision_bits // 2):
                break
            tau = -1 / tau
            factor *= mp.sqrt(-1j * tau)
        factor *= unit_phase(phase24)
        q = mp.exp(2j * mp.pi * tau)
        prod = mpc(1)
        qn = q
        for _ in range(_eta_product_tail_len(mp.im(tau), precision_bits)):
            prod *= 1 - qn
            qn *= q
        return factor * mp.exp(2j * mp.pi * tau / 24) * prod


def gen_eta_numeric(u: int, v: int, N: int, tau, precision_bits: int = 64) -> mpc:
    """Generalized eta at tau by its raw product.

    No modular reduction is attempted: accuracy requires Im(tau) to be a
    reasonable distance from the real axis (the term count scales like
    N * precision / Im(tau)).
    """
    with mp.workprec(precision_bits + 32):
        tau = mpc(tau)
        y = mp.im(tau)
        if y <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        u %= N
        w = mp.exp(2j * mp.pi * tau / N)
        zeta_v = unit_phase(Fraction(2 * v, N))
        zeta_vc = mp.conj(zeta_v)
        m_max = N * _eta_product_tail_len(y, precision_bits)
        total = mpc(1)
        for m in range(1, m_max + 1):
            rm = m % N
            if rm == u:
                total *= 1 - zeta_v * w ** m
            if rm == (-u) % N:
                total *= 1 - zeta_vc * w ** m
        alpha = alpha_const(u, v, N, precision_bits + 32)
        head = mp.exp(1j * mp.pi * frac_mpf(P2(Fraction(u, N))) * tau)
        return alpha * head * total


def gen_eta_invariance_power(N: int) -> int:
    """Power N1 = 12 N^2 / gcd(6, N) making the generalized eta level-N invariant."""
    return 12 * N * N // gcd(6, N)
