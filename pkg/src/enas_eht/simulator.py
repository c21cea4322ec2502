"""The (lambda+lambda)-ENAS generational loop and its measurement harness.

Trial i of a config draws its RNG from the label sequence
(seed..., trial_index), so runs are reproducible bit-for-bit and trials are
independent regardless of execution order.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .benchio import DistanceLandscape, FitnessLandscape
from .drift import DistanceDistribution, empirical_distance_distribution
from .genotype import Genotype, SearchSpaceParams
from .operators import MutationOp, genotype_to_array, init_population_array, make_rng, mutate_batch

__all__ = [
    "RunConfig",
    "HittingTimeRecord",
    "HittingTimeStats",
    "EmptySampleError",
    "run_enas",
    "run_trials",
    "sample_distance_distribution",
    "sample_distance_gamma",
    "mc_transition_oracle",
]


class EmptySampleError(RuntimeError):
    """Raised when no pre-hitting states were observed (all trials hit at t=0)."""


@dataclass(frozen=True)
class RunConfig:
    params: SearchSpaceParams
    lam: int
    op: MutationOp
    landscape: FitnessLandscape
    max_generations: int
    seed: Union[int, tuple]

    def __post_init__(self) -> None:
        if self.lam < 1:
            raise ValueError("lambda must be >= 1")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")

    @property
    def seed_labels(self) -> tuple:
        return self.seed if isinstance(self.seed, tuple) else (self.seed,)


@dataclass(frozen=True)
class HittingTimeRecord:
    """One trial: hitting generation (None if censored) and the min-distance trajectory."""

    generations: Optional[int]
    censored: bool
    max_generations: int
    distance_trajectory: tuple[int, ...]


@dataclass(frozen=True)
class HittingTimeStats:
    trials: int
    mean: float  # over uncensored trials; nan if none
    std: float
    median: float
    censored_count: int
    histogram: dict


def _run(cfg: RunConfig, trial_index: int, collect_gamma: bool):
    p = cfg.params
    rng = make_rng([*cfg.seed_labels, trial_index])
    opt_row = genotype_to_array(cfg.landscape.optimum())
    fast_distance = isinstance(cfg.landscape, DistanceLandscape)

    # On the distance landscape, changing exactly q slots reaches the optimum
    # only from distance exactly q, and truncation selection keeps the lam
    # smallest distances of the combined pool -- so once every member sits
    # below q the trial provably never hits and can be censored immediately.
    trap_q = cfg.op.q if (fast_distance and cfg.op.kind == "q_bit" and cfg.op.q >= 2) else None

    pop = init_population_array(p, cfg.lam, rng)
    dist = (pop != opt_row).sum(axis=1)
    fit = (p.n - dist).astype(float) if fast_distance else cfg.landscape.evaluate_batch(pop)
    traj = [int(dist.min())]
    gammas: list[tuple[int, int]] = []
    if traj[0] == 0:
        return 0, False, traj, gammas
    if trap_q is not None and int(dist.max()) < trap_q:
        return None, True, traj, gammas
    lam = cfg.lam
    for t in range(1, cfg.max_generations + 1):
        if collect_gamma:
            m = traj[-1]
            gammas.append((m, int((dist == m).sum())))
        off = mutate_batch(pop, p, cfg.op, rng)
        off_dist = (off != opt_row).sum(axis=1)
        off_fit = (p.n - off_dist).astype(float) if fast_distance else cfg.landscape.evaluate_batch(off)
        comb_fit = np.concatenate((fit, off_fit))
        keep = np.lexsort((rng.random(2 * lam), -comb_fit))[:lam]
        pop = np.concatenate((pop, off))[keep]
        dist = np.concatenate((dist, off_dist))[keep]
        fit = comb_fit[keep]
        m = int(dist.min())
        traj.append(m)
        if m == 0:
            return t, False, traj, gammas
        if trap_q is not None and int(dist.max()) < trap_q:
            return None, True, traj, gammas
    return None, True, traj, gammas


def run_enas(cfg: RunConfig, trial_index: int = 0) -> HittingTimeRecord:
    """Run one trial: mutate each parent once, keep the best lam of 2*lam, halt on hit."""
    gens, censored, traj, _ = _run(cfg, trial_index, collect_gamma=False)
    return HittingTimeRecord(
        generations=gens,
        censored=censored,
        max_generations=cfg.max_generations,
        distance_trajectory=tuple(traj),
    )


def run_trials(cfg: RunConfig, trials: int) -> HittingTimeStats:
    """Aggregate hitting times over independent seeded trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    hits: list[int] = []
    censored = 0
    hist: dict = {}
    for i in range(trials):
        gens, was_censored, _, _ = _run(cfg, i, collect_gamma=False)
        if was_censored:
            censored += 1
        else:
            hits.append(gens)
            hist[gens] = hist.get(gens, 0) + 1
    if hits:
        mean = statistics.fmean(hits)
        std = statistics.pstdev(hits)
        median = float(statistics.median(hits))
    else:
        mean = std = median = float("nan")
    return HittingTimeStats(
        trials=trials, mean=mean, std=std, median=median, censored_count=censored, histogram=hist
    )


def sample_distance_distribution(cfg: RunConfig, trials: int) -> tuple[DistanceDistribution, list[int]]:
    """Pool min population distance over every pre-hitting generation of every trial."""
    samples: list[int] = []
    for i in range(trials):
        gens, was_censored, traj, _ = _run(cfg, i, collect_gamma=False)
        cut = len(traj) if was_censored else len(traj) - 1
        samples.extend(traj[:cut])
    if not samples:
        raise EmptySampleError("every trial hit the optimum at generation 0; no pre-hitting states")
    return empirical_distance_distribution(samples, cfg.params.n), samples


def sample_distance_gamma(cfg: RunConfig, trials: int) -> list[tuple[int, int]]:
    """Pool (min distance, members at the minimum) over pre-hitting generations.

    States are recorded at the start of each executed generation, so the pool
    matches the parent populations that mutation actually acted on.
    """
    pairs: list[tuple[int, int]] = []
    for i in range(trials):
        _, _, _, gammas = _run(cfg, i, collect_gamma=True)
        pairs.extend(gammas)
    if not pairs:
        raise EmptySampleError("every trial hit the optimum at generation 0; no pre-hitting states")
    return pairs


def mc_transition_oracle(
    x: Genotype,
    p: SearchSpaceParams,
    op: MutationOp,
    opt: Genotype,
    samples: int,
    seed: Union[int, Sequence[int]],
    chunk: int = 200_000,
) -> dict[int, float]:
    """Empirical offspring-distance frequencies over repeated independent mutations."""
    if samples < 10**4:
        raise ValueError("need at least 1e4 samples for a meaningful frequency oracle")
    rng = make_rng(seed)
    row = genotype_to_array(x)
    opt_row = genotype_to_array(opt)
    counts = np.zeros(p.n + 1, dtype=np.int64)
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        batch = np.repeat(row[None, :], m, axis=0)
        off = mutate_batch(batch, p, op, rng)
        d = (off != opt_row).sum(axis=1)
        counts += np.bincount(d, minlength=p.n + 1)
        done += m
    return {d: counts[d] / samples for d in range(p.n + 1) if counts[d]}
