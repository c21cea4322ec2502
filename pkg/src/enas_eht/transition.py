"""Closed-form mutation transition probabilities over distance profiles.

All analytic distributions are exact rationals.  The q-bit and bitwise
distributions are assembled from integer numerators over the common
denominators binom(n, q) * L^n2 and n^n * L^n2 respectively, so a single
Fraction is built per mass point even at n = 26.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from .genotype import Genotype, SearchSpaceParams, distance_profile, DistanceProfile
from .operators import MutationOp

__all__ = [
    "DistanceStepDistribution",
    "p_binary_qbit",
    "p_m1",
    "p_m2",
    "p_m3",
    "p_m4",
    "step_distribution",
    "min_tail_probability",
    "min_tail_table",
    "exact_enumeration_oracle",
]


@dataclass(frozen=True)
class DistanceStepDistribution:
    """Probability over offspring distance d_y; only nonzero masses are stored."""

    masses: Mapping[int, Fraction]

    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0))

    def mass(self, d_y: int) -> Fraction:
        return self.masses.get(d_y, Fraction(0))

    def tail(self, threshold: int) -> Fraction:
        """P(d_y >= threshold)."""
        return sum((v for k, v in self.masses.items() if k >= threshold), Fraction(0))

    def as_floats(self) -> dict[int, float]:
        return {k: float(v) for k, v in sorted(self.masses.items())}


def _check_profile(p: SearchSpaceParams, d1: int, d2: int) -> None:
    if not (0 <= d1 <= p.n1 and 0 <= d2 <= p.n2):
        raise ValueError(f"infeasible profile (d1={d1}, d2={d2}) for n1={p.n1}, n2={p.n2}")


def _from_masses(masses: dict[int, Fraction]) -> DistanceStepDistribution:
    return DistanceStepDistribution(masses={k: v for k, v in masses.items() if v})


def p_binary_qbit(n: int, d_x: int, q: int) -> DistanceStepDistribution:
    """Distance step of flipping a uniform q-subset of a length-n bit string."""
    if not 0 <= d_x <= n:
        raise ValueError(f"d_x={d_x} outside [0, {n}]")
    if not 1 <= q <= n:
        raise ValueError(f"q={q} outside [1, {n}]")
    den = math.comb(n, q)
    masses: dict[int, Fraction] = {}
    for i in range(q + 1):
        if q - i > d_x or i > n - d_x:
            continue
        masses[d_x - q + 2 * i] = Fraction(math.comb(d_x, q - i) * math.comb(n - d_x, i), den)
    return _from_masses(masses)


def p_m1(p: SearchSpaceParams, prof: DistanceProfile) -> DistanceStepDistribution:
    """One-slot bit-fair mutation: d moves to d-1, d, or d+1."""
    _check_profile(p, prof.d1, prof.d2)
    d1, d2, d = prof.d1, prof.d2, prof.d
    den = p.n * p.L
    masses = {
        d - 1: Fraction(d1 * p.L + d2, den),
        d: Fraction(d2 * (p.L - 1), den),
        d + 1: Fraction(p.n - d, p.n),
    }
    return _from_masses(masses)


def p_m2(p: SearchSpaceParams, prof: DistanceProfile) -> DistanceStepDistribution:
    """One-slot offspring-fair mutation: each of the Q distinct offspring at 1/Q."""
    _check_profile(p, prof.d1, prof.d2)
    d1, d2, d = prof.d1, prof.d2, prof.d
    masses = {
        d - 1: Fraction(d, p.Q),
        d: Fraction(d2 * (p.L - 1), p.Q),
        d + 1: Fraction(p.Q - d1 - p.L * d2, p.Q),
    }
    return _from_masses(masses)


@lru_cache(maxsize=None)
def _qbit_numerators(p: SearchSpaceParams, d1: int, d2: int, q: int) -> tuple[tuple[int, int], ...]:
    """Integer numerators of the q-bit masses over binom(n, q) * L^n2.

    Sums over z changed op slots, a fixed mismatched edges, b changed
    mismatched op slots of which c land on the correct value.
    """
    n1, n2, L = p.n1, p.n2, p.L
    d_x = d1 + d2
    num: dict[int, int] = {}
    for z in range(min(q, n2) + 1):
        e = q - z  # changed edge slots
        for a in range(min(e, d1) + 1):
            if e - a > n1 - d1:
                continue
            ew = math.comb(d1, a) * math.comb(n1 - d1, e - a)
            for b in range(min(z, d2) + 1):
                if z - b > n2 - d2:
                    continue
                ow = math.comb(d2, b) * math.comb(n2 - d2, z - b)
                for c in range(b + 1):
                    w = ew * ow * math.comb(b, c) * (L - 1) ** (b - c) * L ** (n2 - b)
                    d_y = d_x + q - (2 * a + b + c)
                    num[d_y] = num.get(d_y, 0) + w
    return tuple(sorted(num.items()))


def p_m3(p: SearchSpaceParams, prof: DistanceProfile, q: int) -> DistanceStepDistribution:
    """q-bit mutation distance step."""
    _check_profile(p, prof.d1, prof.d2)
    if not 1 <= q <= p.n:
        raise ValueError(f"q={q} outside [1, {p.n}]")
    den = math.comb(p.n, q) * p.L**p.n2
    return _from_masses({d_y: Fraction(w, den) for d_y, w in _qbit_numerators(p, prof.d1, prof.d2, q)})


@lru_cache(maxsize=None)
def _p_m4_cached(p: SearchSpaceParams, d1: int, d2: int) -> DistanceStepDistribution:
    n = p.n
    den = n**n * p.L**p.n2
    num: dict[int, int] = {d1 + d2: (n - 1) ** n * p.L**p.n2}  # q = 0: no slot changes
    for q in range(1, n + 1):
        scale = (n - 1) ** (n - q)
        for d_y, w in _qbit_numerators(p, d1, d2, q):
            num[d_y] = num.get(d_y, 0) + scale * w
    return _from_masses({d_y: Fraction(w, den) for d_y, w in num.items()})


def p_m4(p: SearchSpaceParams, prof: DistanceProfile) -> DistanceStepDistribution:
    """Bitwise mutation distance step: binomial mixture of the q-bit kernels."""
    _check_profile(p, prof.d1, prof.d2)
    return _p_m4_cached(p, prof.d1, prof.d2)


def step_distribution(p: SearchSpaceParams, op: MutationOp, prof: DistanceProfile) -> DistanceStepDistribution:
    """Dispatch to the analytic distribution of the given operator."""
    if op.kind == "one_bit_bit_fair":
        return p_m1(p, prof)
    if op.kind == "one_bit_offspring_fair":
        return p_m2(p, prof)
    if op.kind == "q_bit":
        return p_m3(p, prof, op.q)
    return p_m4(p, prof)


def _profiles_with_distance_at_least(p: SearchSpaceParams, d: int):
    for d_x in range(d, p.n + 1):
        for d1 in range(max(0, d_x - p.n2), min(d_x, p.n1) + 1):
            yield DistanceProfile(d1=d1, d2=d_x - d1)


def min_tail_probability(p: SearchSpaceParams, op: MutationOp, d: int, threshold: int) -> Fraction:
    """min over d_x in [d, n] and all feasible (d1, d2) splits of P(d_y >= threshold).

    Only multi-slot operators are supported; the one-slot bounds use a
    different (gamma-weighted) form.
    """
    if op.kind not in ("q_bit", "bitwise"):
        raise ValueError("min_tail_probability applies to q_bit and bitwise operators only")
    if not 1 <= d <= p.n:
        raise ValueError(f"d={d} outside [1, {p.n}]")
    if not 0 <= threshold <= p.n:
        raise ValueError(f"threshold={threshold} outside [0, {p.n}]")
    return min(step_distribution(p, op, prof).tail(threshold) for prof in _profiles_with_distance_at_least(p, d))


@lru_cache(maxsize=None)
def min_tail_table(p: SearchSpaceParams, op: MutationOp) -> np.ndarray:
    """Float table t[d, threshold] of min_tail_probability for d in [1, n], threshold in [0, n].

    Row 0 is unused (filled with 1).  Built once per operator from the cached
    exact distributions; used by the drift bounds, which run in floats.
    """
    n = p.n
    # tails[profile, threshold] then suffix-min over profiles ordered by d_x
    per_d = np.ones((n + 1, n + 1))
    for d_x in range(n, 0, -1):
        best = per_d[d_x + 1] if d_x < n else np.ones(n + 1)
        rows = [best]
        for d1 in range(max(0, d_x - p.n2), min(d_x, p.n1) + 1):
            dist = step_distribution(p, op, DistanceProfile(d1=d1, d2=d_x - d1))
            pmf = np.zeros(n + 2)
            for d_y, v in dist.masses.items():
                pmf[d_y] = float(v)
            rows.append(np.cumsum(pmf[::-1])[::-1][: n + 1])
        per_d[d_x] = np.min(rows, axis=0)
    out = np.ones((n + 1, n + 1))
    out[1:] = per_d[1:]
    return out


def exact_enumeration_oracle(x: Genotype, p: SearchSpaceParams, op: MutationOp, opt: Genotype) -> DistanceStepDistribution:
    """Exact offspring-distance distribution by enumerating every mutation outcome.

    Supports the one-slot operators always and q_bit when
    binom(n, q) * L^q <= 1e7; bitwise is validated elsewhere as the
    binomially weighted sum of per-q oracles.
    """
    x.validate(p)
    opt.validate(p)
    masses: dict[int, Fraction] = {}

    def add(y: Genotype, w: Fraction) -> None:
        d = distance_profile(y, opt).d
        masses[d] = masses.get(d, Fraction(0)) + w

    if op.kind == "one_bit_bit_fair":
        for r in range(p.n):
            for y, w in _slot_outcomes(x, p, r, Fraction(1, p.n)):
                add(y, w)
    elif op.kind == "one_bit_offspring_fair":
        w = Fraction(1, p.Q)
        for r in range(p.n1):
            add(_flip_edge(x, r), w)
        for k in range(p.n2):
            for val in range(p.L + 1):
                if val != x.ops[k]:
                    add(_set_op(x, k, val), w)
    elif op.kind == "q_bit":
        size = math.comb(p.n, op.q) * p.L**op.q
        if size > 10**7:
            raise ValueError(f"enumeration size {size} exceeds 1e7 for q={op.q} at n={p.n}")
        base = Fraction(1, math.comb(p.n, op.q))
        for slots in itertools.combinations(range(p.n), op.q):
            for y, w in _subset_outcomes(x, p, slots, base):
                add(y, w)
    else:
        raise ValueError("bitwise enumeration is unbounded; use the per-q oracles with binomial weights")
    return _from_masses(masses)


def _flip_edge(x: Genotype, r: int) -> Genotype:
    edges = list(x.edges)
    edges[r] = 1 - edges[r]
    return Genotype(edges=tuple(edges), ops=x.ops)


def _set_op(x: Genotype, k: int, val: int) -> Genotype:
    ops = list(x.ops)
    ops[k] = val
    return Genotype(edges=x.edges, ops=tuple(ops))


def _slot_outcomes(x: Genotype, p: SearchSpaceParams, r: int, w: Fraction):
    """Outcomes of changing slot r as in bit-fair mutation, with total weight w."""
    if r < p.n1:
        yield _flip_edge(x, r), w
    else:
        k = r - p.n1
        for val in range(p.L + 1):
            if val != x.ops[k]:
                yield _set_op(x, k, val), w / p.L


def _subset_outcomes(x: Genotype, p: SearchSpaceParams, slots: tuple[int, ...], w: Fraction):
    if not slots:
        yield x, w
        return
    r, rest = slots[0], slots[1:]
    for y, wy in _slot_outcomes(x, p, r, w):
        yield from _subset_outcomes(y, p, rest, wy)
