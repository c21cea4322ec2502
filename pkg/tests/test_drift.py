import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from enas_eht import (
    ClassGammaWeights,
    DistanceDistribution,
    MutationOp,
    case_study_bounds,
    class_gamma_weights,
    count_solutions_at_distance,
    derive_params,
    eht_lower_bound_m1,
    eht_lower_bound_m2,
    eht_lower_bound_m3,
    eht_lower_bound_m4,
    expected_initial_distance,
    gaussian_fit_distribution,
    uniform_initial_distribution,
)
from enas_eht.drift import empirical_class_gamma_weights, empirical_distance_distribution
from enas_eht.genotype import DistanceProfile
from enas_eht.transition import min_tail_probability
from enas_eht.operators import make_rng

from oracles import population_class_table_explicit

P31 = derive_params(3, 1)
P32 = derive_params(3, 2)
P72 = derive_params(7, 2)


def point_mass(n, d):
    masses = [0.0] * (n + 1)
    masses[d] = 1.0
    return DistanceDistribution(masses=tuple(masses), provenance="empirical")


class TestUniformInitial:
    def test_conditioned_masses_v3(self):
        pi0 = uniform_initial_distribution(P32, 1, conditioned=True)
        for d in range(1, 5):
            assert pi0.mass(d) == Fraction(count_solutions_at_distance(P32, d), 23)
        assert pi0.mass(0) == 0
        assert sum(pi0.masses) == 1

    def test_unconditioned_keeps_optimal_mass(self):
        pi0 = uniform_initial_distribution(P32, 1, conditioned=False)
        assert pi0.mass(0) == Fraction(1, 24)
        assert sum(pi0.masses) == 1

    def test_sampling_oracle(self):
        # distance histogram of uniform non-optimal genotypes matches the law
        rng = make_rng(41)
        pi0 = uniform_initial_distribution(P32, 1, conditioned=True)
        edges = rng.integers(0, 2, size=(200_000, P32.n1))
        ops = rng.integers(0, 3, size=(200_000, P32.n2))
        d = edges.sum(axis=1) + (ops != 0).sum(axis=1)  # optimum = all zeros
        d = d[d > 0]
        counts = np.bincount(d, minlength=P32.n + 1)[1:]
        expected = np.array([float(pi0.mass(k)) for k in range(1, P32.n + 1)]) * d.size
        assert stats.chisquare(counts, expected).pvalue > 0.01


class TestGaussianFit:
    def test_normalized_with_mode_at_mean(self):
        dist = gaussian_fit_distribution([12.8, 13.1, 13.0, 12.9, 13.2], 26)
        assert abs(sum(dist.masses) - 1.0) < 1e-12
        assert max(range(1, 27), key=dist.mass) == 13
        assert dist.mass(0) == 0.0

    def test_moment_recovery(self):
        rng = make_rng(42)
        draws = rng.normal(10.0, 3.0, size=100_000)
        dist = gaussian_fit_distribution(draws, 26)
        assert abs(dist.mu - 10.0) < 0.05
        assert abs(dist.sigma - 3.0) < 0.05

    def test_degenerate_inputs_rejected(self):
        with pytest.raises(ValueError):
            gaussian_fit_distribution([5.0], 26)
        with pytest.raises(ValueError):
            gaussian_fit_distribution([5.0, 5.0, 5.0], 26)


class TestEmpiricalDistribution:
    def test_histogram(self):
        dist = empirical_distance_distribution([1, 1, 2, 4], 4)
        assert dist.masses == (0.0, 0.5, 0.25, 0.0, 0.25)

    def test_range_checks(self):
        with pytest.raises(ValueError):
            empirical_distance_distribution([0], 4)
        with pytest.raises(ValueError):
            empirical_distance_distribution([5], 4)
        with pytest.raises(ValueError):
            empirical_distance_distribution([], 4)


class TestClassGammaWeights:
    def test_rows_sum_to_one(self):
        for lam in (1, 2, 3):
            w = class_gamma_weights(P32, lam)
            for d in range(1, P32.n + 1):
                assert sum(w.weight(d, g) for g in range(1, lam + 1)) == 1

    def test_lambda_one_trivial(self):
        w = class_gamma_weights(P32, 1)
        assert all(w.weight(d, 1) == 1 for d in range(1, P32.n + 1))

    def test_matches_multiset_enumeration(self):
        opt = ((0, 0, 0), (0,))
        table = population_class_table_explicit(3, 1, 2, 2, opt)
        w = class_gamma_weights(P32, 2)
        for d in range(1, P32.n + 1):
            total = sum(table.get((d, g), 0) for g in (1, 2))
            for g in (1, 2):
                assert w.weight(d, g) == Fraction(table.get((d, g), 0), total)

    def test_empirical_weights(self):
        pairs = [(3, 1), (3, 1), (3, 2), (5, 1)]
        w = empirical_class_gamma_weights(pairs, P72, 4)
        assert w.weight(3, 1) == Fraction(2, 3)
        assert w.weight(3, 2) == Fraction(1, 3)
        assert w.weight(5, 1) == 1
        # unobserved classes fall back to the conservative point mass at lam
        assert w.weight(7, 4) == 1
        with pytest.raises(ValueError):
            empirical_class_gamma_weights([(0, 1)], P72, 4)


class TestExpectedInitialDistance:
    def test_point_mass(self):
        assert expected_initial_distance(point_mass(8, 5)) == 5.0

    def test_uniform_v3(self):
        pi0 = uniform_initial_distribution(P32, 1, conditioned=True)
        expected = sum(d * count_solutions_at_distance(P32, d) for d in range(1, 5)) / 23
        assert abs(expected_initial_distance(pi0) - expected) < 1e-12

    def test_linearity(self):
        a, b = point_mass(8, 2), point_mass(8, 6)
        mix = DistanceDistribution(
            masses=tuple(0.25 * x + 0.75 * y for x, y in zip(a.masses, b.masses)),
            provenance="empirical",
        )
        assert abs(expected_initial_distance(mix) - (0.25 * 2 + 0.75 * 6)) < 1e-12


class TestOneSlotBounds:
    def test_degenerate_point_mass(self):
        for d in (1, 2, 4):
            pi = point_mass(P32.n, d)
            rep = eht_lower_bound_m1(P32, 1, pi, pi)
            assert abs(rep.eht_lower_bound - P32.n * d / d) < 1e-12
            assert abs(rep.eht_lower_bound - P32.n) < 1e-12

    def test_independent_recomputation(self):
        lam = 2
        pi_t = uniform_initial_distribution(P32, lam, conditioned=True)
        pi0 = pi_t
        w = class_gamma_weights(P32, lam)
        # direct transcription of the quotient, in exact arithmetic
        num = P32.n * (1 - pi_t.mass(0)) * sum(d * pi0.mass(d) for d in range(1, 5))
        den = sum(
            d * sum(g * pi_t.mass(d) * w.weight(d, g) for g in (1, 2)) for d in range(1, 5)
        )
        rep = eht_lower_bound_m1(P32, lam, pi_t, pi0)
        assert abs(rep.eht_lower_bound - float(num / den)) < 1e-9

    def test_scaling_identity(self):
        pi = gaussian_fit_distribution([2.0, 3.0, 4.0, 2.5], P32.n)
        pi0 = uniform_initial_distribution(P32, 3, conditioned=False)
        m1 = eht_lower_bound_m1(P32, 3, pi, pi0)
        m2 = eht_lower_bound_m2(P32, 3, pi, pi0)
        assert abs(m2.eht_lower_bound - m1.eht_lower_bound * P32.Q / P32.n) < 1e-9

    def test_binary_space_bounds_coincide(self):
        pi = gaussian_fit_distribution([1.0, 2.0, 2.5], P31.n)
        pi0 = uniform_initial_distribution(P31, 2, conditioned=True)
        m1 = eht_lower_bound_m1(P31, 2, pi, pi0)
        m2 = eht_lower_bound_m2(P31, 2, pi, pi0)
        assert abs(m1.eht_lower_bound - m2.eht_lower_bound) < 1e-12

    def test_report_invariant(self):
        pi = gaussian_fit_distribution([2.0, 3.0, 2.2, 3.4], P32.n)
        pi0 = uniform_initial_distribution(P32, 2, conditioned=False)
        for rep in (
            eht_lower_bound_m1(P32, 2, pi, pi0),
            eht_lower_bound_m2(P32, 2, pi, pi0),
            eht_lower_bound_m3(P32, 2, 2, pi, pi0),
            eht_lower_bound_m4(P32, 2, pi, pi0),
        ):
            assert rep.eht_lower_bound > 0
            rel = abs(rep.eht_lower_bound * rep.average_drift_upper - rep.expected_initial_distance)
            assert rel <= 1e-9 * max(1.0, rep.expected_initial_distance)

    def test_degenerate_pi_t_rejected(self):
        pi_star = DistanceDistribution(masses=(1.0,) + (0.0,) * P32.n, provenance="empirical")
        pi0 = uniform_initial_distribution(P32, 1, conditioned=True)
        with pytest.raises(ValueError):
            eht_lower_bound_m1(P32, 1, pi_star, pi0)


class TestTailBounds:
    def test_m3_independent_recomputation(self):
        lam, q = 2, 2
        pi = uniform_initial_distribution(P32, lam, conditioned=True)
        op = MutationOp.from_code("m3", q=q)
        e_d0 = float(sum(d * pi.mass(d) for d in range(1, 5)))
        drift = 0.0
        for d in range(1, P32.n + 1):
            term = q - sum(
                float(min_tail_probability(P32, op, d, max(d - j, 0))) ** lam for j in range(q)
            )
            drift += term * float(pi.mass(d))
        rep = eht_lower_bound_m3(P32, lam, q, pi, pi)
        assert abs(rep.eht_lower_bound - e_d0 / drift) < 1e-9

    def test_m4_independent_recomputation(self):
        lam = 2
        pi = uniform_initial_distribution(P32, lam, conditioned=True)
        op = MutationOp.from_code("m4")
        e_d0 = float(sum(d * pi.mass(d) for d in range(1, 5)))
        drift = 0.0
        for d in range(1, P32.n + 1):
            term = d - sum(
                float(min_tail_probability(P32, op, d, D)) ** lam for D in range(1, d + 1)
            )
            drift += term * float(pi.mass(d))
        rep = eht_lower_bound_m4(P32, lam, pi, pi)
        assert abs(rep.eht_lower_bound - e_d0 / drift) < 1e-9

    def test_q1_bound_at_least_initial_distance(self):
        pi = uniform_initial_distribution(P32, 2, conditioned=True)
        rep = eht_lower_bound_m3(P32, 2, 1, pi, pi)
        assert rep.eht_lower_bound >= expected_initial_distance(pi) - 1e-12

    def test_m3_rejects_bad_q(self):
        pi = uniform_initial_distribution(P32, 1, conditioned=True)
        with pytest.raises(ValueError):
            eht_lower_bound_m3(P32, 1, 0, pi, pi)
        with pytest.raises(ValueError):
            eht_lower_bound_m3(P32, 1, P32.n + 1, pi, pi)


class TestMonotonicityInLambda:
    def test_all_bounds_non_increasing(self):
        pi = gaussian_fit_distribution([1.5, 2.0, 2.5, 3.0, 2.2], P32.n)
        lams = [1, 2, 4, 8, 16]
        prev = {k: math.inf for k in ("m1", "m2", "m3", "m4")}
        for lam in lams:
            pi0 = uniform_initial_distribution(P32, lam, conditioned=False)
            vals = {
                "m1": eht_lower_bound_m1(P32, lam, pi, pi0).eht_lower_bound,
                "m2": eht_lower_bound_m2(P32, lam, pi, pi0).eht_lower_bound,
                "m3": eht_lower_bound_m3(P32, lam, 2, pi, pi0).eht_lower_bound,
                "m4": eht_lower_bound_m4(P32, lam, pi, pi0).eht_lower_bound,
            }
            for k, val in vals.items():
                assert val <= prev[k] + 1e-12
            prev = vals


class TestCaseStudy:
    def test_structure_and_orderings(self):
        pi = gaussian_fit_distribution([1.5, 2.0, 2.5, 3.0], P32.n)
        reports = case_study_bounds(P32, 2, pi, q_values=(1, 2))
        assert len(reports) == 5  # m1, m2, m3 at q=1 and q=2, m4
        m1, m2 = reports[0], reports[1]
        assert m1.eht_lower_bound <= m2.eht_lower_bound
        assert abs(m2.eht_lower_bound - m1.eht_lower_bound * P32.Q / P32.n) < 1e-9
