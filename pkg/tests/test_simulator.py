import numpy as np
import pytest

from enas_eht import (
    Genotype,
    MutationOp,
    RunConfig,
    derive_params,
    distance_landscape,
    run_enas,
    run_trials,
    sample_distance_distribution,
)
from enas_eht.simulator import EmptySampleError, mc_transition_oracle, sample_distance_gamma

from oracles import singleton_chain_eht

P32 = derive_params(3, 2)
P72 = derive_params(7, 2)

TARGET32 = Genotype(edges=(1, 0, 1), ops=(2,))
TARGET72 = Genotype(edges=(1, 0) * 10 + (1,), ops=(0, 1, 2, 1, 0))
LAND32 = distance_landscape(P32, TARGET32)
LAND72 = distance_landscape(P72, TARGET72)


def cfg32(lam=1, op="m1", q=0, max_gens=5000, seed=(1,)):
    return RunConfig(
        params=P32,
        lam=lam,
        op=MutationOp.from_code(op, q=q),
        landscape=LAND32,
        max_generations=max_gens,
        seed=seed,
    )


class TestRunEnas:
    def test_optimal_start_is_zero(self):
        # at lam=500 on 24 solutions the initial population contains the
        # optimum except with probability (23/24)^500 ~ 6e-10
        cfg = cfg32(lam=500)
        rec = run_enas(cfg, 0)
        assert rec.generations == 0
        assert rec.distance_trajectory == (0,)

    def test_trajectory_non_increasing_on_distance_landscape(self):
        for i in range(20):
            rec = run_enas(cfg32(lam=4, seed=(2,)), i)
            traj = rec.distance_trajectory
            assert all(a >= b for a, b in zip(traj, traj[1:]))
            assert (traj[-1] == 0) == (not rec.censored)

    def test_censoring(self):
        cfg = cfg32(lam=1, max_gens=1, seed=(3,))
        recs = [run_enas(cfg, i) for i in range(50)]
        censored = [r for r in recs if r.censored]
        assert censored, "a 1-generation cap must censor some runs"
        assert all(r.generations is None for r in censored)

    def test_reproducible(self):
        a = run_enas(cfg32(lam=3, seed=(9, 9)), 7)
        b = run_enas(cfg32(lam=3, seed=(9, 9)), 7)
        assert a == b

    def test_exact_chain_agreement(self):
        cfg = cfg32(lam=1, op="m1", seed=(5,))
        stats = run_trials(cfg, 10_000)
        exact = singleton_chain_eht(P32.n1, P32.n2, P32.L, (TARGET32.edges, TARGET32.ops))
        assert stats.censored_count == 0
        assert abs(stats.mean - exact) / exact < 0.02


class TestMultiBitTrap:
    def test_censoring_is_cap_independent(self):
        # with q >= 2 on the distance landscape a trial below the q shell can
        # never hit, so the outcome must not depend on the generation cap
        for cap in (50, 5000):
            outcomes = {}
            for i in range(100):
                rec = run_enas(cfg32(lam=2, op="m3", q=2, max_gens=cap, seed=(31,)), i)
                outcomes[i] = rec.generations
            if cap == 50:
                first = outcomes
            else:
                assert outcomes == first

    def test_trapped_population_censors_quickly(self):
        import time

        cfg = cfg32(lam=3, op="m3", q=3, max_gens=10**6, seed=(32,))
        t0 = time.monotonic()
        stats = run_trials(cfg, 50)
        assert time.monotonic() - t0 < 10.0
        assert stats.censored_count > 0


class TestRunTrials:
    def test_deterministic_stats(self):
        cfg = cfg32(lam=2, seed=(11,))
        assert run_trials(cfg, 200) == run_trials(cfg, 200)

    def test_rejects_bad_trials(self):
        with pytest.raises(ValueError):
            run_trials(cfg32(), 0)

    def test_histogram_consistent(self):
        stats = run_trials(cfg32(lam=2, seed=(12,)), 300)
        assert sum(stats.histogram.values()) + stats.censored_count == stats.trials
        mean = sum(k * v for k, v in stats.histogram.items()) / sum(stats.histogram.values())
        assert abs(mean - stats.mean) < 1e-9

    def test_mean_decreases_with_lambda(self):
        means = []
        for lam in (1, 8, 32):
            cfg = RunConfig(
                params=P72,
                lam=lam,
                op=MutationOp.from_code("m1"),
                landscape=LAND72,
                max_generations=3000,
                seed=(13, lam),
            )
            means.append(run_trials(cfg, 120).mean)
        assert means[0] > means[1] > means[2]


class TestSampling:
    def test_distribution_normalized(self):
        dist, samples = sample_distance_distribution(cfg32(lam=2, seed=(21,)), 100)
        assert abs(sum(dist.masses) - 1.0) < 1e-12
        assert len(samples) > 0
        assert min(samples) >= 1

    def test_empty_sample_signal(self):
        with pytest.raises(EmptySampleError):
            sample_distance_distribution(cfg32(lam=2000, seed=(22,)), 2)

    def test_gamma_pairs_in_range(self):
        lam = 5
        cfg = cfg32(lam=lam, seed=(23,))
        pairs = sample_distance_gamma(cfg, 50)
        assert all(1 <= d <= P32.n and 1 <= g <= lam for d, g in pairs)

    def test_fitted_mean_in_range(self):
        from enas_eht import gaussian_fit_distribution

        cfg = RunConfig(
            params=P72,
            lam=20,
            op=MutationOp.from_code("m1"),
            landscape=LAND72,
            max_generations=3000,
            seed=(24,),
        )
        _, samples = sample_distance_distribution(cfg, 50)
        dist = gaussian_fit_distribution(samples, P72.n)
        assert 1.0 <= dist.mu <= P72.n


class TestMcOracle:
    def test_rejects_small_samples(self):
        x = Genotype(edges=(0, 0, 0), ops=(0,))
        with pytest.raises(ValueError):
            mc_transition_oracle(x, P32, MutationOp.from_code("m1"), TARGET32, 100, 0)

    def test_frequencies_sum_to_one(self):
        x = Genotype(edges=(0, 0, 0), ops=(0,))
        freq = mc_transition_oracle(x, P32, MutationOp.from_code("m4"), TARGET32, 20_000, 1)
        assert abs(sum(freq.values()) - 1.0) < 1e-12


class TestConfigValidation:
    def test_bad_lambda_and_cap(self):
        with pytest.raises(ValueError):
            cfg32(lam=0)
        with pytest.raises(ValueError):
            cfg32(max_gens=0)
