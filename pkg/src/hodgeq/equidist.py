"""Equidistribution of Hodge numbers of Hilbert schemes across residue classes.

Decides, for a surface S with chi >= sigma and moduli (l1, l2), whether the
congruence-restricted signed Hodge sums become asymptotically equal on a
residue set R and vanish identically off it, by the case analysis on
(h^{1,0}, h^{2,0}, chi, sigma) together with the growth functional

    Lambda(x, y) = h^{1,0} (P2(x) + P2(y)) - h^{0,0} P2(x+y) - h^{2,0} P2(x-y).

Empirical proportions Theta are computed from the exact integer route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .dedekind import P2
from .errors import HypothesisViolation, ZeroDenominator
from .goettsche import HodgeDiamond, restricted_hodge_sum


def growth_functional(S: HodgeDiamond, x, y) -> Fraction:
    """Lambda(x, y), exact rational for rational arguments."""
    x = Fraction(x)
    y = Fraction(y)
    return (S.h10 * (P2(x) + P2(y)) - P2(x + y) - S.h20 * P2(x - y))


def lambda_profile(S: HodgeDiamond, l1: int, l2: int) -> dict[tuple[int, int], Fraction]:
    """Diagnostic dump of Lambda(j1/l1, j2/l2) over all residue pairs.

    Exposed for inspection only; the classifier verdict never reads it
    beyond the case-7 minimum test.
    """
    return {(j1, j2): growth_functional(S, Fraction(j1, l1), Fraction(j2, l2))
            for j1 in range(l1) for j2 in range(l2)}


@dataclass
class EquidistVerdict:
    """Outcome of the classifier: all matching cases and the residue set."""

    equidistributed: bool
    case_label: int | None
    cases: list[int] = field(default_factory=list)
    R: set[tuple[int, int]] = field(default_factory=set)
    lambda_min_witness: tuple[int, int] | None = None


def classify(S: HodgeDiamond, l1: int, l2: int) -> EquidistVerdict:
    """Case analysis for (l1, l2)-equidistribution, applied verbatim.

    Every matching case is recorded; their residue sets agree whenever
    several match at once (checked).  An empty verdict means no case holds
    and the surface is not (l1, l2)-equidistributed.
    """
    if min(l1, l2) < 1:
        raise ValueError("moduli must be >= 1")
    chi, sigma = S.chi, S.sigma
    if chi < sigma:
        raise HypothesisViolation(f"need chi >= sigma, got chi={chi}, sigma={sigma}")

    all_pairs = {(r1, r2) for r1 in range(l1) for r2 in range(l2)}
    cases: list[tuple[int, set]] = []
    if S.h10 == 0 and S.h20 == 0:
        g = gcd(l1, l2)
        cases.append((1, {(r1, r2) for (r1, r2) in all_pairs if (r1 - r2) % g == 0}))
    if S.h10 == 0 and S.h20 > 0:
        g = gcd(gcd(l1, l2), 2)
        cases.append((2, {(r1, r2) for (r1, r2) in all_pairs if (r1 - r2) % g == 0}))
    if chi + sigma == 0 and chi != 0 and min(l1, l2) == 1:
        cases.append((3, {(0, 0)}))
    if chi + sigma == 0 and chi == 0 and min(l1, l2) == 1:
        cases.append((4, set()))
    if chi != 0 and l1 == 1 and l2 == 1:
        cases.append((5, {(0, 0)}))
    if chi == 0 and l1 == 1 and l2 == 1:
        cases.append((6, set()))

    witness = None
    if S.h10 > 0 and chi + sigma > 0:
        lam0 = growth_functional(S, 0, 0)
        strict = True  # vacuously so when l1 = l2 = 1
        best = None
        for (j1, j2) in sorted(all_pairs - {(0, 0)}):
            val = growth_functional(S, Fraction(j1, l1), Fraction(j2, l2))
            if best is None or val < best[0]:
                best = (val, (j1, j2))
            if val <= lam0:
                strict = False
        if best is not None:
            witness = best[1]
        if strict:
            cases.append((7, set(all_pairs)))

    if not cases:
        return EquidistVerdict(False, None, [], set(), witness)
    sets = [rs for _, rs in cases]
    if any(rs != sets[0] for rs in sets):
        raise AssertionError(f"matching cases disagree on R: {cases}")
    labels = sorted(label for label, _ in cases)
    return EquidistVerdict(True, labels[0], labels, sets[0], witness)


def theta(S: HodgeDiamond, r1: int, l1: int, r2: int, l2: int, n: int,
          trunc: int | None = None) -> Fraction:
    """Proportion of the (r1, r2) residue pair at order n, exact rational."""
    total = sum(restricted_hodge_sum(S, j1, l1, j2, l2, n, trunc)
                for j1 in range(l1) for j2 in range(l2))
    if total == 0:
        raise ZeroDenominator(f"all residue sums vanish at n={n}")
    return Fraction(restricted_hodge_sum(S, r1, l1, r2, l2, n, trunc), total)


def convergence_report(S: HodgeDiamond, l1: int, l2: int,
                       n_list: list[int]) -> dict:
    """Theta values over n for every residue pair, with uniformity gap.

    The returned dict has `pairs` mapping (r1, r2) to the list of exact
    proportions, and `max_deviation` mapping n to the largest distance of an
    on-R proportion from 1/|R| (None when R is empty).
    """
    verdict = classify(S, l1, l2)
    trunc = max(n_list)
    pairs = {(r1, r2): [theta(S, r1, l1, r2, l2, n, trunc) for n in n_list]
             for r1 in range(l1) for r2 in range(l2)}
    max_dev: dict[int, Fraction | None] = {}
    if verdict.R:
        target = Fraction(1, len(verdict.R))
        for idx, n in enumerate(n_list):
            max_dev[n] = max(abs(pairs[p][idx] - target) for p in verdict.R)
    else:
        for n in n_list:
            max_dev[n] = None
    return {"verdict": verdict, "n_list": list(n_list),
            "pairs": pairs, "max_deviation": max_dev}
