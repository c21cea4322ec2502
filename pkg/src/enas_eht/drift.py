"""Distance-class distributions, average-drift bounds, and the EHT lower bounds.

The four bound operations share one shape: expected initial distance divided by
an upper bound on the average one-generation drift of the population's minimum
distance, conditioned on not having hit the optimum yet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .genotype import (
    SearchSpaceParams,
    count_population_class,
    count_population_subspace,
    population_space_size,
)
from .operators import MutationOp
from .transition import min_tail_table

__all__ = [
    "DistanceDistribution",
    "ClassGammaWeights",
    "EhtBoundReport",
    "uniform_initial_distribution",
    "gaussian_fit_distribution",
    "empirical_distance_distribution",
    "class_gamma_weights",
    "empirical_class_gamma_weights",
    "expected_initial_distance",
    "eht_lower_bound_m1",
    "eht_lower_bound_m2",
    "eht_lower_bound_m3",
    "eht_lower_bound_m4",
    "case_study_bounds",
]


@dataclass(frozen=True)
class DistanceDistribution:
    """Probability per distance class d in [0, n]; index d of ``masses``."""

    masses: tuple
    provenance: str
    mu: Optional[float] = None
    sigma: Optional[float] = None

    @property
    def n(self) -> int:
        return len(self.masses) - 1

    def mass(self, d: int):
        return self.masses[d]

    def total(self) -> float:
        return float(sum(self.masses))


@dataclass(frozen=True)
class ClassGammaWeights:
    """Within-class weights w(d, gamma): P(gamma members attain the minimum | class d)."""

    lam: int
    weights: dict  # (d, gamma) -> weight; rows sum to 1 per d

    def weight(self, d: int, gamma: int):
        return self.weights.get((d, gamma), 0)

    def mean_gamma(self, d: int) -> float:
        return float(sum(g * self.weights[(dd, g)] for dd, g in self.weights if dd == d))


@dataclass(frozen=True)
class EhtBoundReport:
    operator: MutationOp
    lam: int
    expected_initial_distance: float
    average_drift_upper: float
    eht_lower_bound: float


def uniform_initial_distribution(p: SearchSpaceParams, lam: int, conditioned: bool = True) -> DistanceDistribution:
    """Distance-class law of a uniform random population.

    conditioned=True divides by the number of non-optimal populations (mass 0
    at d = 0); conditioned=False divides by the full population-space size and
    keeps the optimal-class mass at d = 0.
    """
    counts = [count_population_subspace(p, lam, i) for i in range(1, p.n + 1)]
    total = population_space_size(p, lam)
    if conditioned:
        den = sum(counts)
        masses = [Fraction(0)] + [Fraction(c, den) for c in counts]
    else:
        masses = [Fraction(total - sum(counts), total)] + [Fraction(c, total) for c in counts]
    return DistanceDistribution(masses=tuple(masses), provenance="uniform")


def gaussian_fit_distribution(samples: Sequence[float], n: int) -> DistanceDistribution:
    """Moment-fit a Gaussian to observed distances, discretized on d in [1, n]."""
    arr = np.asarray(samples, dtype=float)
    if arr.size < 2:
        raise ValueError("need at least 2 samples to fit a Gaussian")
    mu = float(arr.mean())
    sigma = float(arr.std())
    if sigma == 0.0:
        raise ValueError("zero-variance samples: use an empirical distribution instead")
    d = np.arange(1, n + 1)
    dens = np.exp(-((d - mu) ** 2) / (2 * sigma**2))
    dens /= dens.sum()
    masses = (0.0,) + tuple(float(v) for v in dens)
    return DistanceDistribution(masses=masses, provenance="gaussian-fit", mu=mu, sigma=sigma)


def empirical_distance_distribution(samples: Sequence[int], n: int) -> DistanceDistribution:
    """Histogram of observed distances on [1, n] (pre-hitting states carry d >= 1)."""
    arr = np.asarray(samples, dtype=int)
    if arr.size == 0:
        raise ValueError("no samples")
    if arr.min() < 1 or arr.max() > n:
        raise ValueError(f"samples outside [1, {n}]")
    counts = np.bincount(arr, minlength=n + 1)
    masses = tuple(float(c) / arr.size for c in counts)
    return DistanceDistribution(masses=masses, provenance="empirical")


@lru_cache(maxsize=None)
def class_gamma_weights(p: SearchSpaceParams, lam: int) -> ClassGammaWeights:
    """Combinatorial weights w(d, gamma) = |chi_d^gamma| / |chi_d|."""
    weights: dict = {}
    for d in range(1, p.n + 1):
        total = count_population_subspace(p, lam, d)
        for g in range(1, lam + 1):
            c = count_population_class(p, lam, d, g)
            if c:
                weights[(d, g)] = Fraction(c, total)
    return ClassGammaWeights(lam=lam, weights=weights)


def empirical_class_gamma_weights(
    pairs: Iterable[tuple[int, int]], p: SearchSpaceParams, lam: int, fallback_gamma: Optional[int] = None
) -> ClassGammaWeights:
    """Weights measured from observed (min distance, count at minimum) states.

    Classes never observed fall back to a point mass at ``fallback_gamma``
    (default lam, the drift-maximizing and therefore bound-conservative choice).
    """
    if fallback_gamma is None:
        fallback_gamma = lam
    counts: dict = {}
    per_d: dict = {}
    for d, g in pairs:
        if not (1 <= d <= p.n and 1 <= g <= lam):
            raise ValueError(f"observed state (d={d}, gamma={g}) out of range")
        counts[(d, g)] = counts.get((d, g), 0) + 1
        per_d[d] = per_d.get(d, 0) + 1
    weights = {k: Fraction(c, per_d[k[0]]) for k, c in counts.items()}
    for d in range(1, p.n + 1):
        if d not in per_d:
            weights[(d, fallback_gamma)] = Fraction(1)
    return ClassGammaWeights(lam=lam, weights=weights)


def expected_initial_distance(pi0: DistanceDistribution) -> float:
    """E[d(xi_0)] = sum of d * pi0(chi_d)."""
    return float(sum(d * pi0.mass(d) for d in range(1, pi0.n + 1)))


def _check_pi_star(pi_t: DistanceDistribution) -> float:
    pi_star = float(pi_t.mass(0))
    if pi_star >= 1.0:
        raise ValueError("pi_t puts all mass on the optimum; drift bound undefined")
    return pi_star


def _report(op: MutationOp, lam: int, e_d0: float, drift: float) -> EhtBoundReport:
    if drift <= 0.0:
        raise ValueError("average drift upper bound is not positive")
    return EhtBoundReport(
        operator=op,
        lam=lam,
        expected_initial_distance=e_d0,
        average_drift_upper=drift,
        eht_lower_bound=e_d0 / drift,
    )


def _one_slot_bound(
    length: int,
    op: MutationOp,
    p: SearchSpaceParams,
    lam: int,
    pi_t: DistanceDistribution,
    pi0: DistanceDistribution,
    weights: Optional[ClassGammaWeights],
) -> EhtBoundReport:
    pi_star = _check_pi_star(pi_t)
    if weights is None:
        weights = class_gamma_weights(p, lam)
    e_d0 = expected_initial_distance(pi0)
    drift = sum(d * weights.mean_gamma(d) * float(pi_t.mass(d)) for d in range(1, p.n + 1))
    drift /= length * (1.0 - pi_star)
    return _report(op, lam, e_d0, drift)


def eht_lower_bound_m1(
    p: SearchSpaceParams,
    lam: int,
    pi_t: DistanceDistribution,
    pi0: DistanceDistribution,
    weights: Optional[ClassGammaWeights] = None,
) -> EhtBoundReport:
    """EHT lower bound for the one-slot bit-fair operator."""
    return _one_slot_bound(p.n, MutationOp.from_code("m1"), p, lam, pi_t, pi0, weights)


def eht_lower_bound_m2(
    p: SearchSpaceParams,
    lam: int,
    pi_t: DistanceDistribution,
    pi0: DistanceDistribution,
    weights: Optional[ClassGammaWeights] = None,
) -> EhtBoundReport:
    """EHT lower bound for the one-slot offspring-fair operator (n replaced by Q)."""
    return _one_slot_bound(p.Q, MutationOp.from_code("m2"), p, lam, pi_t, pi0, weights)


def eht_lower_bound_m3(
    p: SearchSpaceParams,
    lam: int,
    q: int,
    pi_t: DistanceDistribution,
    pi0: DistanceDistribution,
) -> EhtBoundReport:
    """EHT lower bound for q-bit mutation via minimized tail probabilities."""
    if not 1 <= q <= p.n:
        raise ValueError(f"q={q} outside [1, {p.n}]")
    pi_star = _check_pi_star(pi_t)
    op = MutationOp.from_code("m3", q=q)
    tails = min_tail_table(p, op)
    e_d0 = expected_initial_distance(pi0)
    drift = 0.0
    for d in range(1, p.n + 1):
        term = q - sum(tails[d, max(d - j, 0)] ** lam for j in range(q))
        drift += term * float(pi_t.mass(d))
    drift /= 1.0 - pi_star
    return _report(op, lam, e_d0, drift)


def eht_lower_bound_m4(
    p: SearchSpaceParams,
    lam: int,
    pi_t: DistanceDistribution,
    pi0: DistanceDistribution,
) -> EhtBoundReport:
    """EHT lower bound for bitwise mutation via minimized tail probabilities."""
    pi_star = _check_pi_star(pi_t)
    op = MutationOp.from_code("m4")
    tails = min_tail_table(p, op)
    e_d0 = expected_initial_distance(pi0)
    drift = 0.0
    for d in range(1, p.n + 1):
        term = d - sum(tails[d, D] ** lam for D in range(1, d + 1))
        drift += term * float(pi_t.mass(d))
    drift /= 1.0 - pi_star
    return _report(op, lam, e_d0, drift)


def case_study_bounds(
    p: SearchSpaceParams,
    lam: int,
    pi_t: DistanceDistribution,
    q_values: Sequence[int] = (1, 2, 3, 4, 5),
    weights: Optional[ClassGammaWeights] = None,
) -> list[EhtBoundReport]:
    """All four bounds under the case-study conventions.

    pi0 is the unconditioned uniform population law (divided by the full
    population-space size); one-slot weights default to the combinatorial
    within-class decomposition.
    """
    pi0 = uniform_initial_distribution(p, lam, conditioned=False)
    reports = [
        eht_lower_bound_m1(p, lam, pi_t, pi0, weights),
        eht_lower_bound_m2(p, lam, pi_t, pi0, weights),
    ]
    for q in q_values:
        reports.append(eht_lower_bound_m3(p, lam, q, pi_t, pi0))
    reports.append(eht_lower_bound_m4(p, lam, pi_t, pi0))
    return reports
