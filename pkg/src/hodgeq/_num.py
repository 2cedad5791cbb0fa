"""Small numeric helpers shared by the analytic modules."""

from __future__ import annotations

from fractions import Fraction

from mpmath import mp, mpc, mpf


def frac_mpf(x: Fraction) -> mpf:
    """Exactly rounded mpf of a Fraction at the current working precision."""
    return mp.mpf(x.numerator) / x.denominator


def unit_phase(exponent_of_pi: Fraction) -> mpc:
    """exp(i*pi*r) for exact rational r, reduced mod 2 before rounding."""
    r = exponent_of_pi % 2
    # quarter turns stay exact so phase bookkeeping cannot drift
    if r.denominator == 1:
        return mpc(1) if r == 0 else mpc(-1)
    if r.denominator == 2:
        return mpc(0, 1) if r == Fraction(1, 2) else mpc(0, -1)
    return mp.expjpi(frac_mpf(r))


def rel_err(a, b) -> mpf:
    """Relative difference |a-b| / max(|a|, |b|), zero-safe."""
    denom = max(abs(mpc(a)), abs(mpc(b)))
    if denom == 0:
        return mp.mpf(0)
    return abs(mpc(a) - mpc(b)) / denom
