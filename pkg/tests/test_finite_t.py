"""Finite-horizon joint transform, count distribution, and component means."""
import math

import numpy as np
import pytest

from heavyclaims.finite_t import (
    CountingSpec,
    DomainError,
    LTQuery,
    TailModel,
    component_means,
    count_pmf,
    exact_joint_lt,
    integrate,
    joint_lt_result,
    pgf_derivative,
)
from heavyclaims.mixing_laws import Degenerate, Discrete, GammaLaw
from heavyclaims.tail_models import survival
from heavyclaims import montecarlo as mc
from heavyclaims.limit_lt import regime_from_name

POISSON10 = CountingSpec(Degenerate(1.0), 10.0)
# the three pinned reference configurations
CFG_B = (CountingSpec(GammaLaw(2.0, 2.0), 30.0), TailModel(2.0))
CFG_A2 = (CountingSpec(Degenerate(1.0), 50.0), TailModel(0.7))
CFG_C2 = (CountingSpec(Discrete(((1.0, 0.5), (2.0, 0.5))), 20.0), TailModel(0.5))


class TestCountDistribution:
    def test_pgf_at_one(self):
        assert pgf_derivative(POISSON10, 0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_first_derivative_is_mean_count(self):
        spec = CountingSpec(Degenerate(1.0), 100.0)
        assert pgf_derivative(spec, 1, 1.0) == pytest.approx(100.0, rel=1e-12)

    def test_poisson_pgf_value(self):
        # Q_t(z) = exp(-t(1-z)) for a pure Poisson count
        assert pgf_derivative(POISSON10, 0, 0.5) == pytest.approx(
            math.exp(-5.0), rel=1e-12)

    def test_poisson_pmf(self):
        spec = CountingSpec(Degenerate(1.0), 2.0)
        assert count_pmf(spec, 0) == pytest.approx(math.exp(-2.0), rel=1e-12)
        assert count_pmf(spec, 3) == pytest.approx(
            math.exp(-2.0) * 8.0 / 6.0, rel=1e-12)

    def test_gamma_mixed_is_geometric(self):
        # Gamma(1,1) mixer at t=1 gives P{N=k} = 2^-(k+1)
        spec = CountingSpec(GammaLaw(1.0, 1.0), 1.0)
        for k in range(6):
            assert count_pmf(spec, k) == pytest.approx(2.0 ** -(k + 1), rel=1e-11)

    @pytest.mark.parametrize(
        "spec,cutoff",
        [(POISSON10, 80), (CountingSpec(GammaLaw(2.0, 2.0), 5.0), 400),
         (CFG_C2[0], 250)],
        ids=["poisson", "negbin", "discrete-mix"],
    )
    def test_pmf_normalization(self, spec, cutoff):
        total = sum(count_pmf(spec, k) for k in range(cutoff))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_pmf_rejects_negative_index(self):
        with pytest.raises(DomainError):
            count_pmf(POISSON10, -1)


class TestJointTransform:
    @pytest.mark.parametrize("cfg", [CFG_B, CFG_A2, CFG_C2],
                             ids=["gamma-mix", "poisson-heavy", "discrete-mix"])
    @pytest.mark.parametrize("s", [0, 2])
    def test_normalization_at_origin(self, cfg, s):
        spec, model = cfg
        assert exact_joint_lt(spec, model, LTQuery(s=s)) == pytest.approx(
            1.0, abs=1e-9)

    def test_pinned_gamma_mix_value(self):
        spec, model = CFG_B
        got = exact_joint_lt(spec, model, LTQuery(u=0.3, v=0.2, w=0.1, s=1))
        assert got == pytest.approx(0.040242985256758480626, rel=5e-9)

    def test_pinned_heavy_tail_value(self):
        spec, model = CFG_A2
        got = exact_joint_lt(spec, model, LTQuery(u=0.004, v=0.002, w=0.01, s=2))
        assert got == pytest.approx(0.023443158519523360508, rel=5e-9)

    def test_pinned_discrete_mix_value(self):
        spec, model = CFG_C2
        got = exact_joint_lt(spec, model, LTQuery(u=0.005, v=0.002, w=0.01, s=0))
        assert got == pytest.approx(0.036021794368816232819, rel=5e-9)

    def test_collapse_to_total_claim_lt(self):
        # with u = v = w the triple collapses to the aggregate S, whose
        # transform is the count pgf evaluated at the single-claim LT
        model = TailModel(2.0)
        spec = CountingSpec(Degenerate(1.0), 7.0)
        u = 0.3
        tail = integrate(lambda x: np.exp(-u * x) * survival(model, x),
                         model.x_min, math.inf)
        claim_lt = math.exp(-u * model.x_min) - u * tail.value
        lhs = exact_joint_lt(spec, model, LTQuery(u=u, v=u, w=u, s=1))
        assert lhs == pytest.approx(pgf_derivative(spec, 0, claim_lt), rel=1e-8)

    def test_monotone_in_each_argument(self):
        spec, model = CFG_B
        base = LTQuery(u=0.2, v=0.2, w=0.2, s=1)
        val = exact_joint_lt(spec, model, base)
        for bump in (LTQuery(u=0.5, v=0.2, w=0.2, s=1),
                     LTQuery(u=0.2, v=0.5, w=0.2, s=1),
                     LTQuery(u=0.2, v=0.2, w=0.5, s=1)):
            assert exact_joint_lt(spec, model, bump) < val

    def test_result_reports_error_estimate(self):
        spec, model = CFG_B
        res = joint_lt_result(spec, model, LTQuery(u=0.3, v=0.2, w=0.1, s=1))
        assert res.abs_err_est < 1e-8
        assert res.evaluations > 0
        assert res.value == pytest.approx(0.040242985256758480626, rel=5e-9)

    def test_rejects_negative_arguments(self):
        with pytest.raises(DomainError):
            LTQuery(u=-0.1)
        with pytest.raises(DomainError):
            LTQuery(s=-1)

    def test_derivative_at_origin_matches_bulk_mean(self):
        spec, model = CFG_B
        h = 1e-6
        e_sig = component_means(spec, model, 1)[2]
        fd = (1.0 - exact_joint_lt(spec, model, LTQuery(w=h, s=1))) / h
        assert fd == pytest.approx(e_sig, rel=5e-4)


class TestComponentMeans:
    def test_light_tail_reference(self):
        spec, model = CFG_B
        e_lam, e_xi, e_sig, e_tot = component_means(spec, model, 1)
        assert e_lam == pytest.approx(9.1224061408195593078, rel=1e-7)
        assert e_xi == pytest.approx(4.5538788516597796539, rel=1e-7)
        assert e_sig == pytest.approx(46.323715007520661038, rel=1e-7)
        # E S = E N * mean claim, exactly t * E theta * mu here
        assert e_tot == pytest.approx(60.0, rel=1e-10)

    def test_heavy_tail_reference(self):
        spec, model = CFG_A2
        e_lam, e_xi, e_sig, e_tot = component_means(spec, model, 2)
        assert math.isinf(e_lam) and math.isinf(e_tot)
        assert e_xi == pytest.approx(119.05875824453790262, rel=1e-7)
        assert e_sig == pytest.approx(319.88211356330555013, rel=1e-7)

    def test_poisson_total(self):
        e = component_means(POISSON10, TailModel(2.0), 0)
        assert e[0] == 0.0
        assert e[3] == pytest.approx(20.0, rel=1e-12)

    def test_components_sum_to_total(self):
        spec, model = CFG_B
        for s in (0, 1, 3):
            e_lam, e_xi, e_sig, e_tot = component_means(spec, model, s)
            assert e_lam + e_xi + e_sig == pytest.approx(e_tot, rel=1e-7)

    def test_infinite_mean_gating(self):
        # alpha = 0.5, s = 1: the pivot's tail exponent alpha*(s+1) hits 1
        # exactly, so its mean diverges along with the top block, while the
        # bulk below it stays integrable
        spec, model = CFG_C2
        e_lam, e_xi, e_sig, e_tot = component_means(spec, model, 1)
        assert math.isinf(e_lam) and math.isinf(e_xi) and math.isinf(e_tot)
        assert np.isfinite(e_sig)
        # one order higher clears the boundary for the pivot
        assert np.isfinite(component_means(spec, model, 2)[1])


class TestSimulationCrossCheck:
    def test_bulk_transform_matches_paths(self):
        t = 20.0
        model, mix = TailModel(2.0), Degenerate(1.0)
        reg = regime_from_name("gt1-fixed-s", s=0)
        rng = np.random.default_rng(20240817)
        samples = mc.sample_path_triples(model, mix, t, reg, rng, 20_000)
        # samples come back normalized; undo the scales when querying Omega
        emp, se = mc.empirical_lt(samples[:3], 0.0, 0.0, 0.8)
        exact = exact_joint_lt(CountingSpec(mix, t), model, LTQuery(w=0.8 / t))
        assert abs(emp - exact) < 4 * se

    def test_joint_transform_matches_paths(self):
        t = 20.0
        model, mix = TailModel(2.0), Degenerate(1.0)
        reg = regime_from_name("gt1-fixed-s", s=0)
        rng = np.random.default_rng(7)
        samples = mc.sample_path_triples(model, mix, t, reg, rng, 20_000)
        emp, se = mc.empirical_lt(samples[:3], 0.0, 0.5, 0.8)
        exact = exact_joint_lt(
            CountingSpec(mix, t), model,
            LTQuery(v=0.5 / math.sqrt(t), w=0.8 / t))
        assert abs(emp - exact) < 4 * se


class TestValidation:
    def test_spec_requires_positive_horizon(self):
        with pytest.raises(DomainError):
            CountingSpec(Degenerate(1.0), -1.0)
        with pytest.raises(DomainError):
            CountingSpec(Degenerate(1.0), 0.0)
