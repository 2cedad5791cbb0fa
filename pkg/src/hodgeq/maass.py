"""Partition numbers as traces of a weak Maass form at CM points.

The finite algebraic formula evaluates p(n) = Tr(n)/(24n-1), where Tr(n)
sums the values of the weight-raised eta-quotient Eisenstein form

    F = (1/2) (E2(tau) - 2 E2(2 tau) - 3 E2(3 tau) + 6 E2(6 tau))
            / (eta(tau) eta(2 tau) eta(3 tau) eta(6 tau))^2
      = q^{-1} - 10 - 29 q - ...

    P(tau) = -((1/(2 pi i)) d/dtau + 1/(2 pi y)) F(tau)

over CM points alpha_Q of the discriminant 1-24n positive definite binary
quadratic forms [a, b, c] with 6 | a, b = 1 mod 12, one per level-6 class.
P is invariant under the level-6 congruence group, so each value may be
computed at the orbit point of largest imaginary part.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from mpmath import mp, mpc, mpf

from .errors import ConvergenceFailure
from .series import LaurentQSeries, series_inverse


# ---------------------------------------------------------------------------
# binary quadratic forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BQF:
    """Positive definite integral binary quadratic form a x^2 + b x y + c y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def value(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def apply(self, alpha: int, beta: int, gamma: int, delta: int) -> "BQF":
        """Form composed with (x, y) -> (alpha x + beta y, gamma x + delta y)."""
        if alpha * delta - beta * gamma != 1:
            raise ValueError("matrix must have determinant 1")
        a2 = self.value(alpha, gamma)
        c2 = self.value(beta, delta)
        b2 = (2 * self.a * alpha * beta + self.b * (alpha * delta + beta * gamma)
              + 2 * self.c * gamma * delta)
        return BQF(a2, b2, c2)

    def reduced(self) -> "BQF":
        """The unique reduced representative of the full modular orbit."""
        a, b, c = self.a, self.b, self.c
        if a <= 0 or self.disc >= 0:
            raise ValueError("form must be positive definite")
        while True:
            if c < a:
                a, b, c = c, -b, a
                continue
            if b > a or b <= -a:
                # translate b into (-a, a]
                t = (a - b) // (2 * a)
                b2 = b + 2 * a * t
                c = a * t * t + b * t + c
                b = b2
                continue
            break
        if a == c and b < 0:
            b = -b
        return BQF(a, b, c)

    def cm_point(self, precision_bits: int = 64) -> mpc:
        """Root (-b + i sqrt(|disc|))/(2a) in the upper half-plane."""
        with mp.workprec(precision_bits):
            return (-self.b + 1j * mp.sqrt(-self.disc)) / (2 * self.a)


def reduced_forms(disc: int) -> list[BQF]:
    """All reduced positive definite forms of the given negative discriminant."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError("need a negative discriminant = 0, 1 mod 4")
    out = []
    b = disc % 2
    while b * b <= -disc // 3:
        quarter = (b * b - disc) // 4
        for a in range(max(b, 1), isqrt(quarter) + 1):
            if quarter % a == 0:
                c = quarter // a
                if a <= c:
                    out.append(BQF(a, b, c))
                    if 0 < b < a < c:
                        out.append(BQF(a, -b, c))
        b += 2
    return sorted(out, key=lambda Q: (Q.a, Q.b, Q.c))


def class_number(disc: int) -> int:
    """h(disc) by direct reduced-form enumeration."""
    return len(reduced_forms(disc))


def _normalize_level6(Q: BQF, coeff_bound: int = 50) -> BQF:
    """Equivalent form with 6 | a and b = 1 mod 12, by bounded search."""
    best = None
    for gamma in range(-coeff_bound, coeff_bound + 1):
        for alpha in range(-coeff_bound, coeff_bound + 1):
            if gcd(alpha, gamma) != 1:
                continue
            a2 = Q.value(alpha, gamma)
            if a2 % 6 or (best is not None and a2 >= best.a):
                continue
            # complete to determinant one and test b mod 12 (translations
            # move b by multiples of 2 a2 = 0 mod 12, so one test suffices)
            g, delta, mbeta = _bezout(alpha, gamma)
            cand = Q.apply(alpha, -mbeta, gamma, delta)
            if cand.b % 12 == 1:
                best = cand
    if best is None:
        raise ArithmeticError(f"no level-6 normalization of {Q} within bound")
    return best


def _bezout(x: int, y: int) -> tuple[int, int, int]:
    """(g, u, v) with u*x + v*y = g = gcd(x, y)."""
    if y == 0:
        return (abs(x), 1 if x > 0 else -1, 0)
    g, u1, v1 = _bezout(y, x % y)
    return (g, v1, u1 - (x // y) * v1)


def _translate(Q: BQF, t: int) -> BQF:
    return BQF(Q.a, Q.b + 2 * Q.a * t, Q.a * t * t + Q.b * t + Q.c)


def quadratic_form_classes(n: int, coeff_bound: int = 50) -> list[BQF]:
    """One level-6 normalized representative per class of discriminant 1 - 24n.

    Distinct full-modular-group classes stay distinct at level 6, and for
    these discriminants every class is reached; both facts are certified by
    the class-number and trace invariants in the test suite rather than
    assumed silently.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    disc = 1 - 24 * n
    return [_normalize_level6(Q, coeff_bound) for Q in reduced_forms(disc)]


def reduce_level6(Q: BQF) -> BQF:
    """Level-6 equivalent form with smallest leading coefficient.

    Scans first columns (alpha, gamma) with 6 | gamma inside the value
    ellipse; used to push CM points as high as possible before evaluating.
    """
    best = Q
    disc = Q.disc
    improved = True
    while improved:
        improved = False
        gmax = isqrt(4 * best.a * best.a // -disc) + 1
        for gamma in range(-6 * gmax, 6 * gmax + 1, 6):
            lo, hi = _alpha_range(best, gamma, best.a)
            for alpha in range(lo, hi + 1):
                if gcd(alpha, gamma) != 1:
                    continue
                val = best.value(alpha, gamma)
                if 0 < val < best.a:
                    g, delta, mbeta = _bezout(alpha, gamma)
                    cand = best.apply(alpha, -mbeta, gamma, delta)
                    t = -(cand.b // (2 * cand.a))
                    best = _translate(cand, t)
                    improved = True
    return best


def _alpha_range(Q: BQF, gamma: int, bound: int) -> tuple[int, int]:
    # alpha with Q(alpha, gamma) <= bound: quadratic in alpha
    a, b, c = Q.a, Q.b, Q.c
    disc = b * b * gamma * gamma - 4 * a * (c * gamma * gamma - bound)
    if disc < 0:
        return (1, 0)
    root = isqrt(disc)
    lo = (-b * gamma - root) // (2 * a) - 1
    hi = (-b * gamma + root) // (2 * a) + 1
    return lo, hi


# ---------------------------------------------------------------------------
# the weak Maass form
# ---------------------------------------------------------------------------

def eisenstein_e2(trunc: int) -> list[int]:
    """Coefficients of E2 = 1 - 24 sum sigma_1(n) q^n."""
    sigma1 = [0] * (trunc + 1)
    for d in range(1, trunc + 1):
        for m in range(d, trunc + 1, d):
            sigma1[m] += d
    return [1] + [-24 * sigma1[n] for n in range(1, trunc + 1)]


def f_series_coefficients(trunc: int) -> list[int]:
    """Coefficients c_m, m = -1..trunc, of the weight -2 eta-quotient form.

    Exact integers; index i of the returned list holds c_{i-1}.
    """
    n_terms = trunc + 2
    e2 = eisenstein_e2(n_terms)
    num = [0] * (n_terms + 1)
    for m in range(n_terms + 1):
        val = e2[m]
        if m % 2 == 0:
            val -= 2 * e2[m // 2]
        if m % 3 == 0:
            val -= 3 * e2[m // 3]
        if m % 6 == 0:
            val += 6 * e2[m // 6]
        assert val % 2 == 0
        num[m] = val // 2
    # eta-tail product prod_{d in 1,2,3,6} prod_m (1 - q^{d m})^2, exact
    coeffs = [0] * (n_terms + 1)
    coeffs[0] = 1
    for d in (1, 2, 3, 6):
        for _ in range(2):
            for m in range(d, n_terms + 1, d):
                for i in range(n_terms - m, -1, -1):
                    if coeffs[i]:
                        coeffs[i + m] -= coeffs[i]
    den = LaurentQSeries.from_scalars(coeffs)
    inv = series_inverse(den).scalar_list()
    out = [0] * (n_terms + 1)
    for i, cn in enumerate(num):
        if cn:
            for j in range(n_terms + 1 - i):
                if inv[j]:
                    out[i + j] += cn * inv[j]
    return out[: trunc + 2]


_f_coeff_cache: list[int] = []


def _f_coeffs(trunc: int) -> list[int]:
    global _f_coeff_cache
    if len(_f_coeff_cache) < trunc + 2:
        _f_coeff_cache = f_series_coefficients(max(trunc, 2 * len(_f_coeff_cache), 128))
    return _f_coeff_cache


def maass_form_value(tau, trunc: int | None = None,
                     precision_bits: int = 256) -> mpc:
    """Value of the weight-raised form P at tau.

    Termwise from the expansion of F: the coefficient c_m contributes
    (-m - 1/(2 pi y)) c_m q^m.  The truncation point accounts for the
    e^{4 pi sqrt(m)} growth of the c_m; ConvergenceFailure signals that the
    requested accuracy is unreachable at this height.
    """
    with mp.workprec(precision_bits + 32):
        tau = mpc(tau)
        y = mp.im(tau)
        if y <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        target = (precision_bits / 2 + 16) * mp.log(2)

        def tail_log(m):
            return 4 * mp.pi * mp.sqrt(m) - 2 * mp.pi * y * m + mp.log(m + 1)

        m_cut = 16
        while tail_log(m_cut) > -target:
            m_cut *= 2
            if m_cut > 200000:
                raise ConvergenceFailure(
                    f"cannot reach 2^-{precision_bits // 2} at Im tau = {mp.nstr(y, 6)}")
        if trunc is None:
            trunc = m_cut
        elif trunc < m_cut:
            raise ConvergenceFailure(
                f"need {m_cut} terms at Im tau = {mp.nstr(y, 6)}, got {trunc}")
        coeffs = _f_coeffs(trunc)
        q = mp.exp(2j * mp.pi * tau)
        inv_2py = 1 / (2 * mp.pi * y)
        total = coeffs[0] * (1 - inv_2py) / q
        qm = mpc(1)
        for m in range(0, trunc + 1):
            cm = coeffs[m + 1]
            if cm:
                total += cm * (-m - inv_2py) * qm
            qm *= q
        return total


def singular_moduli_trace(n: int, precision_bits: int = 256) -> tuple[mpc, mpf]:
    """(Tr(n), Tr(n)/(24n-1)); the second entry approximates p(n).

    Classes are evaluated in deterministic order at level-6 reduced points;
    the trace must come out real (checked to 1e-6 by the callers/tests).
    """
    classes = quadratic_form_classes(n)
    with mp.workprec(precision_bits + 32):
        total = mpc(0)
        for Q in sorted(classes, key=lambda f: (f.a, f.b, f.c)):
            Qr = reduce_level6(Q)
            total += maass_form_value(Qr.cm_point(precision_bits + 32),
                                      precision_bits=precision_bits)
        return total, total.real / (24 * n - 1)
