"""Parameterized experiment families used by the CLI sweeps and the
acceptance suite.

The biased cheating family here keeps every answer register in the uniform
superposition (so the answer step of the uniformity test always yields zero)
and skews the question amplitudes: alpha_q proportional to (1 + theta) on the
first question and 1 elsewhere.  At theta = 0 the state passes the test with
certainty; as theta grows the failure probability sweeps up from 0 while the
measured question distribution drifts away from the uniform-mixture family.
All probabilities stay rational in theta, so the LP distance is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError


def biased_question_probs(Q: int, theta: Fraction) -> list[Fraction]:
    """Per-copy question probabilities of the biased family."""
    weights = [1 + Fraction(theta)] + [Fraction(1)] * (Q - 1)
    total = sum(w * w for w in weights)
    return [w * w / total for w in weights]


def biased_question_distribution(
    Q: int, k: int, theta: Fraction
) -> dict[tuple[int, ...], Fraction]:
    """Product question distribution over [Q]^k for the biased family."""
    per_copy = biased_question_probs(Q, theta)
    out = {}
    for tup in itertools.product(range(Q), repeat=k):
        out[tup] = math.prod((per_copy[q] for q in tup), start=Fraction(1))
    return out


def biased_failure_prob(Q: int, k: int, theta: Fraction) -> Fraction:
    """Exact uniformity-test failure probability of the biased family.

    Answer registers are uniform superpositions, so every copy lands in Z and
    the threshold step always passes; the test then succeeds iff all k
    question registers Fourier-measure to zero, each with probability
    (sum_q w_q)^2 / (Q * sum_q w_q^2).
    """
    weights = [1 + Fraction(theta)] + [Fraction(1)] * (Q - 1)
    overlap_sq = sum(weights) ** 2 / (Q * sum(w * w for w in weights))
    return 1 - overlap_sq**k

def find_bias_for_failure(
    Q: int, k: int, target_eps: float, tol: float = 1e-12
) -> Fraction:
    """Bisect the bias theta so the family's failure probability hits
    target_eps; returns a rational theta (achieved eps within ~1e-9)."""
    if not 0 < target_eps < 1:
        raise InputError("target failure probability must lie in (0, 1)")
    lo, hi = 0.0, 1.0
    while float(biased_failure_prob(Q, k, Fraction(hi).limit_denominator(10**6))) < target_eps:
        hi *= 2
        if hi > 1e6:
            raise InputError(f"failure probability {target_eps} unreachable")
    for _ in range(200):
        mid = (lo + hi) / 2
        if float(biased_failure_prob(Q, k, Fraction(mid).limit_denominator(10**9))) < target_eps:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return Fraction((lo + hi) / 2).limit_denominator(10**9)


def biased_state_amplitudes(Q: int, K_prime: int, k: int, theta: Fraction):
    """Dense amplitudes of the biased family on the (Q, K')^k layout."""
    import numpy as np

    weights = np.array([1 + float(theta)] + [1.0] * (Q - 1))
    weights /= np.linalg.norm(weights)
    per_copy = np.kron(weights, np.full(K_prime, 1 / math.sqrt(K_prime)))
    amp = per_copy
    for _ in range(k - 1):
        amp = np.kron(amp, per_copy)
    return amp


def honest_uniformity_formula(k: int, K_prime: int, eta: float) -> Fraction:
    """Independent binomial oracle for honest uniformity acceptance:
    sum over z >= ceil(k(1-eta)/K') of C(k, z) (1/K')^z (1 - 1/K')^(k-z)."""
    threshold = math.ceil(Fraction(k) * (1 - Fraction(eta)) / K_prime)
    p = Fraction(1, K_prime)
    return sum(
        (
            Fraction(math.comb(k, z)) * p**z * (1 - p) ** (k - z)
            for z in range(threshold, k + 1)
        ),
        Fraction(0),
    )


@dataclass
class TvSweepPoint:
    eps_target: float
    theta: Fraction
    eps_achieved: float
    tv_distance: float


def tv_sweep(
    Q: int,
    k: int,
    eta: float,
    K_prime: int,
    eps_values: list[float],
) -> list[TvSweepPoint]:
    """The failure-probability versus mixture-distance sweep."""
    from .analysis import tv_to_mixture_family

    t_min = math.ceil(Fraction(k) * (1 - Fraction(eta)) / K_prime)
    points = []
    for eps in eps_values:
        theta = find_bias_for_failure(Q, k, eps)
        achieved = float(biased_failure_prob(Q, k, theta))
        mu = biased_question_distribution(Q, k, theta)
        distance, _ = tv_to_mixture_family(mu, Q, k, t_min)
        points.append(TvSweepPoint(eps, theta, achieved, distance))
    return points


def loglog_slope(xs: list[float], ys: list[float]) -> float:
    """Ordinary least-squares slope of log(y) against log(x)."""
    pairs = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pairs) < 2:
        raise InputError("need at least two positive points for a slope fit")
    n = len(pairs)
    mx = sum(p[0] for p in pairs) / n
    my = sum(p[1] for p in pairs) / n
    num = sum((px - mx) * (py - my) for px, py in pairs)
    den = sum((px - mx) ** 2 for px, py in pairs)
    return num / den
