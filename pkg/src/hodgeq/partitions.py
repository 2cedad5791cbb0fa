"""The partition function by three routes, plus |P(q)| near roots of unity.

Routes implemented and cross-checked against one another:

  * the pentagonal-number recurrence (exact, the oracle),
  * coefficients of 1/prod(1 - q^n) via the exact series core,
  * the convergent circle-method series
        p(n) = 2*pi*(24n-1)^(-3/4) * sum_k (A_k(n)/k) * I_{3/2}(pi*sqrt(24n-1)/(6k))
    with A_k(n) the half-integral-weight Kloosterman sum.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from mpmath import mp, mpc, mpf

from ._num import unit_phase
from .dedekind import eta_numeric
from .errors import InsufficientPrecision
from .series import LaurentQSeries, series_inverse


def partition_table_recurrence(n_max: int) -> list[int]:
    """p(0..n_max) by the pentagonal-number recurrence, exact."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    p = [0] * (n_max + 1)
    p[0] = 1
    for n in range(1, n_max + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > n:
                break
            sign = -1 if k % 2 == 0 else 1
            total += sign * p[n - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return p


def partition_table_euler(n_max: int) -> list[int]:
    """p(0..n_max) as coefficients of the inverted Euler product, exact."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    coeffs = [1] + [0] * n_max
    for m in range(1, n_max + 1):
        for i in range(n_max - m, -1, -1):
            if coeffs[i]:
                coeffs[i + m] -= coeffs[i]
    inv = series_inverse(LaurentQSeries.from_scalars(coeffs))
    return inv.scalar_list()


def check_ramanujan_congruences(n_max: int) -> list[tuple[int, int]]:
    """Violations (n, modulus) of the three classical congruences up to n_max.

    Checks p(5n+4) = 0 (5), p(7n+5) = 0 (7), p(11n+6) = 0 (11); the returned
    list is expected to be empty.
    """
    if n_max < 6:
        raise ValueError("need n_max >= 6 to see all three congruences")
    p = partition_table_recurrence(n_max)
    violations = []
    for step, offset, modulus in ((5, 4, 5), (7, 5, 7), (11, 6, 11)):
        for n in range(offset, n_max + 1, step):
            if p[n] % modulus:
                violations.append((n, modulus))
    return violations


# ---------------------------------------------------------------------------
# Kronecker symbol and Kloosterman sums
# ---------------------------------------------------------------------------

def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a/n) by the standard multiplicative algorithm."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    # factor out powers of two using (a/2) = 0, 1, -1 for a even, +-1, +-3 mod 8
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    # Jacobi-style reciprocity loop for the odd part
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    if n != 1:
        return 0
    return result


_root_table_cache: dict[int, dict[int, list[int]]] = {}


def _square_roots_mod_24k(k: int) -> dict[int, list[int]]:
    # d -> d^2 buckets, reused across all n for a fixed k
    table = _root_table_cache.get(k)
    if table is None:
        mod = 24 * k
        table = {}
        for d in range(mod):
            table.setdefault(d * d % mod, []).append(d)
        _root_table_cache[k] = table
    return table


def kloosterman_sum_a(k: int, n: int, precision_bits: int = 64) -> mpf:
    """A_k(n) = (1/2) sqrt(k/12) sum_{d^2 = 1-24n mod 24k} (12/d) e^{2*pi*i*d/(12k)}.

    The d <-> -d symmetry makes the sum real; the imaginary part is checked
    against 2^-(precision_bits/2) before being dropped.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    with mp.workprec(precision_bits + 16):
        target = (1 - 24 * n) % (24 * k)
        total = mpc(0)
        for d in _square_roots_mod_24k(k).get(target, ()):
            total += kronecker_symbol(12, d) * unit_phase(Fraction(d, 6 * k))
        value = mp.sqrt(mp.mpf(k) / 12) / 2 * total
        if abs(value.imag) >= mpf(2) ** (-(precision_bits // 2)) * max(1, abs(value.real)):
            raise ArithmeticError(f"A_{k}({n}) not numerically real: {value}")
        return value.real


def bessel_i32(x: mpf) -> mpf:
    """I_{3/2}(x) by its closed form sqrt(2/(pi x)) (cosh x - sinh x / x)."""
    x = mp.mpf(x)
    if x <= 0:
        raise ValueError("argument must be positive")
    return mp.sqrt(2 / (mp.pi * x)) * (mp.cosh(x) - mp.sinh(x) / x)


def default_precision_bits(n: int) -> int:
    """Working precision rule: about as many bits as p(n) plus headroom."""
    return int(mp.ceil(mp.pi * mp.sqrt(mp.mpf(2 * n) / 3) / mp.log(2))) + 64


def rademacher_terms(n: int, k_max: int, precision_bits: int | None = None) -> list[dict]:
    """Per-k data of the circle-method series: A_k, Bessel argument, term value."""
    if n < 1 or k_max < 1:
        raise ValueError("need n >= 1 and k_max >= 1")
    if precision_bits is None:
        precision_bits = default_precision_bits(n)
    with mp.workprec(precision_bits):
        mu = mp.pi * mp.sqrt(mp.mpf(24 * n - 1))
        front = 2 * mp.pi * mp.power(mp.mpf(24 * n - 1), mp.mpf(-3) / 4)
        out = []
        for k in range(1, k_max + 1):
            a_k = kloosterman_sum_a(k, n, precision_bits)
            arg = mu / (6 * k)
            term = front * a_k / k * bessel_i32(arg)
            out.append({"k": k, "A_k": a_k, "bessel_arg": arg, "term": term})
        return out


def _tail_estimate(n: int, k_from: int, precision_bits: int) -> mpf:
    # crude numeric tail: sum the k^-1 I_{3/2} envelope well past the cutoff;
    # the summand decays like k^(-5/2) so the window is generous
    with mp.workprec(precision_bits):
        mu = mp.pi * mp.sqrt(mp.mpf(24 * n - 1))
        front = 2 * mp.pi * mp.power(mp.mpf(24 * n - 1), mp.mpf(-3) / 4)
        total = mp.mpf(0)
        k_to = 4 * k_from + 400
        for k in range(k_from, k_to + 1):
            total += front / k * bessel_i32(mu / (6 * k))
        # geometric continuation of the k^(-5/2) decay beyond the window
        last = front / k_to * bessel_i32(mu / (6 * k_to))
        total += last * k_to * mp.mpf(2) / 3
        return total


def rademacher_partition(n: int, k_max: int | None = None,
                         precision_bits: int | None = None) -> tuple[mpf, int]:
    """Truncated circle-method value of p(n) and its integer rounding.

    Raises InsufficientPrecision when the crude tail estimate is too large to
    certify rounding to the nearest integer.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if k_max is None:
        k_max = int(mp.ceil(2 * mp.sqrt(n)))
    if precision_bits is None:
        precision_bits = default_precision_bits(n)
    terms = rademacher_terms(n, k_max, precision_bits)
    with mp.workprec(precision_bits):
        # ascending k, fixed order: reruns are bit-identical
        value = mp.mpf(0)
        for rec in terms:
            value += rec["term"]
        bound = _tail_estimate(n, k_max + 1, precision_bits)
        rounded = int(mp.nint(value))
        if bound >= mp.mpf(1) / 4:
            raise InsufficientPrecision(
                f"tail bound {mp.nstr(bound, 5)} too large to round p({n}) at k_max={k_max}")
        return value, rounded


def hardy_ramanujan_main_term(n: int, precision_bits: int = 64) -> mpf:
    """Leading asymptotic e^{pi sqrt(2n/3)} / (4 n sqrt(3))."""
    with mp.workprec(precision_bits):
        return mp.exp(mp.pi * mp.sqrt(mp.mpf(2 * n) / 3)) / (4 * n * mp.sqrt(3))


# ---------------------------------------------------------------------------
# |P(q)| near roots of unity
# ---------------------------------------------------------------------------

def abs_p_near_root(h: int, k: int, t, precision_bits: int = 64) -> mpf:
    """|P(zeta e^{-t})| for zeta = e^{2*pi*i*h/k} and radial distance t > 0.

    For t >= 0.05 the Euler product converges comfortably and is used with a
    rigorous tail cutoff; closer to the unit circle the value is routed
    through eta and its modular reduction, where accuracy is uniform.
    """
    if k < 1 or gcd(h, k) != 1:
        raise ValueError("need k >= 1 and gcd(h, k) = 1")
    with mp.workprec(precision_bits + 32):
        t = mp.mpf(t)
        if t <= 0:
            raise ValueError("t must be positive")
        tau = mp.mpf(h) / k + 1j * t / (2 * mp.pi)
        if t >= mp.mpf("0.05"):
            q = mp.exp(2j * mp.pi * tau)
            # |log prod_{n>M}| <= |q|^{M+1} / (1-|q|)^2
            m_len = int(mp.ceil(((precision_bits + 16) * mp.log(2)
                                 + 2 * abs(mp.log(-mp.expm1(-t)))) / t)) + 4
            prod = mpc(1)
            qn = mpc(1)
            for _ in range(m_len):
                qn *= q
                prod *= 1 - qn
            return abs(1 / prod)
        # P(q) = q^{1/24} / eta(tau)
        return mp.exp(-t / 24) / abs(eta_numeric(tau, precision_bits + 32))


def p_near_root_table(precision_bits: int = 64) -> list[dict]:
    """The survey grid of |P| values near the first few roots of unity."""
    roots = [("1", 0, 1), ("-1", 1, 2), ("zeta3", 1, 3), ("i", 1, 4)]
    rows = []
    for t in (mp.mpf("0.5"), mp.mpf("0.3"), mp.mpf("0.1"), mp.mpf("0.01")):
        row = {"t": t}
        for label, h, k in roots:
            row[label] = abs_p_near_root(h, k, t, precision_bits)
        rows.append(row)
    return rows
