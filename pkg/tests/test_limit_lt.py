"""Limiting joint transforms across the eight asymptotic regimes."""
import math

import numpy as np
import pytest

from heavyclaims.limit_lt import (
    REGIME_NAMES,
    DispatchError,
    DomainError,
    TailModel,
    check_compatible,
    default_vanishing_p,
    inner_centered_integral,
    inner_head_integral,
    inner_tail_integral,
    lt_eval,
    normalization_descriptor,
    numeric_normalizers,
    regime_from_name,
)
from heavyclaims.mixing_laws import Degenerate, Discrete, GammaLaw

ALPHA_FOR = {"lt1": 0.5, "gt1": 2.0, "ctr12": 1.5, "ctr2": 3.0}


def model_for(name: str) -> TailModel:
    return TailModel(ALPHA_FOR[name.split("-")[0]])


class TestInnerIntegrals:
    def test_tail_integral_at_zero(self):
        # integral of the bare tail z^-gamma from 1: 1/(gamma-1) = alpha/(1-alpha)
        assert inner_tail_integral(0.0, 0.5) == pytest.approx(2.0, rel=1e-13)

    def test_tail_integral_pinned(self):
        assert inner_tail_integral(1.0, 0.5) == pytest.approx(
            0.17814771178156069019, rel=1e-12)

    def test_head_integral_pinned(self):
        assert inner_head_integral(0.5, 0.3) == pytest.approx(
            0.6478203429832332, rel=1e-12)
        assert inner_head_integral(2.5, 0.7) == pytest.approx(
            6.708869237279403363468, rel=1e-12)

    def test_centered_integral_pinned(self):
        assert inner_centered_integral(0.5, 1.5) == pytest.approx(
            0.23708292792809920212, rel=1e-12)
        assert inner_centered_integral(3.0, 1.7) == pytest.approx(
            12.5657792216652147064, rel=1e-12)

    def test_head_integral_small_c_slope(self):
        # I_head(c)/c -> 1/(1-alpha) as c -> 0
        alpha = 0.3
        c = 1e-7
        assert inner_head_integral(c, alpha) / c == pytest.approx(
            1.0 / (1.0 - alpha), rel=1e-6)

    def test_centered_integral_small_c_curvature(self):
        # J(c)/c^2 -> 1/(2(2-alpha)) as c -> 0
        alpha = 1.5
        c = 1e-5
        assert inner_centered_integral(c, alpha) / c**2 == pytest.approx(
            1.0 / (2.0 * (2.0 - alpha)), rel=1e-5)

    def test_centered_integral_monotone(self):
        grid = np.linspace(0.1, 8.0, 25)
        vals = [inner_centered_integral(c, 1.5) for c in grid]
        assert np.all(np.diff(vals) > 0)


class TestNormalization:
    @pytest.mark.parametrize("name", REGIME_NAMES)
    @pytest.mark.parametrize("mix", [Degenerate(1.0), GammaLaw(2.0, 2.0)],
                             ids=["degenerate", "gamma"])
    def test_unit_at_origin(self, name, mix):
        regime = regime_from_name(name, s=1, p=0.5)
        assert lt_eval(regime, model_for(name), mix, 0.0, 0.0, 0.0) == \
            pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("name", REGIME_NAMES)
    def test_descriptor_shape(self, name):
        d = normalization_descriptor(regime_from_name(name, s=2))
        assert d.regime_name == name
        assert isinstance(d.top, str) and isinstance(d.bulk, str)
        centered = name.startswith("ctr")
        assert (d.bulk_center is not None) == centered

    def test_descriptor_strings(self):
        d = normalization_descriptor(regime_from_name("ctr2-fixed-s", s=1))
        assert (d.top, d.pivot, d.bulk) == ("U(t)", "U(t)", "sqrt(t)")
        assert d.bulk_center == "(N(t)-s-1)*mean"
        d2 = normalization_descriptor(regime_from_name("lt1-vanishing"))
        assert (d2.top, d2.pivot, d2.bulk) == (
            "U(t)", "U(1/p(t))", "t*p(t)*U(1/p(t))")

    def test_numeric_normalizers(self):
        r = regime_from_name("gt1-fixed-s", s=0)
        assert numeric_normalizers(r, TailModel(2.0), 100.0) == \
            pytest.approx((10.0, 10.0, 100.0), rel=1e-12)
        r2 = regime_from_name("ctr2-fixed-s", s=1)
        got = numeric_normalizers(r2, TailModel(3.0), 100.0)
        assert got == pytest.approx((100.0 ** (1 / 3), 100.0 ** (1 / 3), 10.0),
                                    rel=1e-12)
        r3 = regime_from_name("lt1-vanishing")
        got = numeric_normalizers(r3, TailModel(0.5), 100.0)
        # p(t) = 1/sqrt(t): pivot tracks U(1/p), bulk t*p(t)*U(1/p)
        assert got == pytest.approx((10_000.0, 100.0, 1_000.0), rel=1e-12)

    def test_default_vanishing_p(self):
        assert default_vanishing_p(100.0) == pytest.approx(0.1, rel=1e-14)


class TestPinnedValues:
    """Values frozen from an independent high-precision evaluation."""

    def test_lt1_fixed_s_degenerate(self):
        r = regime_from_name("lt1-fixed-s", s=1)
        got = lt_eval(r, TailModel(0.5), Degenerate(1.0), 0.5, 0.25, 0.75)
        assert got == pytest.approx(0.27363617893981533, rel=1e-10)

    def test_lt1_fixed_s_gamma(self):
        r = regime_from_name("lt1-fixed-s", s=1)
        got = lt_eval(r, TailModel(0.5), GammaLaw(2.0, 2.0), 0.5, 0.25, 0.75)
        assert got == pytest.approx(0.37007683840137871, rel=1e-10)

    def test_gt1_fixed_s_gamma(self):
        r = regime_from_name("gt1-fixed-s", s=1)
        got = lt_eval(r, TailModel(2.0), GammaLaw(2.0, 2.0), 0.5, 0.25, 0.75)
        assert got == pytest.approx(0.1759051649364373668, rel=1e-10)

    def test_centered_onetwo_degenerate(self):
        r = regime_from_name("ctr12-fixed-s", s=1)
        got = lt_eval(r, TailModel(1.5), Degenerate(1.0), 0.5, 0.25, 0.5)
        assert got == pytest.approx(4.0425562186621514, rel=1e-10)

    def test_centered_two_gamma(self):
        r = regime_from_name("ctr2-fixed-s", s=2)
        got = lt_eval(r, TailModel(3.0), GammaLaw(3.0, 3.0), 0.4, 0.3, 0.8)
        assert got == pytest.approx(0.45887802646674680663, rel=1e-10)

    def test_lt1_vanishing_degenerate(self):
        r = regime_from_name("lt1-vanishing")
        got = lt_eval(r, TailModel(0.5), Degenerate(1.0), 0.5, 0.25, 0.75)
        assert got == pytest.approx(0.10505049524632704368, rel=1e-10)

    def test_lt1_fixed_p_degenerate(self):
        r = regime_from_name("lt1-fixed-p", p=0.25)
        got = lt_eval(r, TailModel(0.5), Degenerate(1.0), 0.25, 0.05, 0.1)
        assert got == pytest.approx(0.13721216170518601694, rel=1e-10)

    def test_gt1_vanishing_gamma(self):
        r = regime_from_name("gt1-vanishing")
        got = lt_eval(r, TailModel(2.0), GammaLaw(2.0, 2.0), 0.3, 0.2, 0.5)
        assert got == pytest.approx(0.25269467687592032675, rel=1e-10)

    def test_gt1_fixed_p_degenerate(self):
        r = regime_from_name("gt1-fixed-p", p=0.25)
        got = lt_eval(r, TailModel(2.0), Degenerate(1.0), 0.4, 0.3, 0.6)
        # closed form collapses to a bare exponential here
        assert got == pytest.approx(math.exp(-1.6), rel=1e-12)


class TestStructuralIdentities:
    def test_degenerate_matches_one_atom_discrete(self):
        # the point-mass shortcut and the generic mixture route must agree
        one_atom = Discrete(((2.0, 1.0),))
        for name in ("lt1-fixed-s", "gt1-fixed-s", "ctr12-fixed-s"):
            r = regime_from_name(name, s=1)
            m = model_for(name)
            a = lt_eval(r, m, Degenerate(2.0), 0.4, 0.2, 0.3)
            b = lt_eval(r, m, one_atom, 0.4, 0.2, 0.3)
            assert a == pytest.approx(b, rel=1e-10)

    def test_gt1_bulk_marginal_ignores_s(self):
        # trimming any fixed number of top claims leaves the law of
        # large numbers for the bulk untouched
        vals = []
        for s in (0, 1, 5):
            r = regime_from_name("gt1-fixed-s", s=s)
            vals.append(lt_eval(r, TailModel(2.0), GammaLaw(2.0, 2.0),
                                0.0, 0.0, 0.7))
        assert vals[0] == pytest.approx(vals[1], rel=1e-10)
        assert vals[0] == pytest.approx(vals[2], rel=1e-10)

    def test_gt1_bulk_marginal_value(self):
        r = regime_from_name("gt1-fixed-s", s=0)
        got = lt_eval(r, TailModel(2.0), Degenerate(1.0), 0.0, 0.0, 1.0)
        assert got == pytest.approx(math.exp(-2.0), rel=1e-10)

    def test_gt1_vanishing_top_marginal_value(self):
        r = regime_from_name("gt1-vanishing")
        got = lt_eval(r, TailModel(2.0), Degenerate(1.0), 1.0, 0.0, 0.0)
        assert got == pytest.approx(math.exp(-2.0), rel=1e-12)

    def test_lt1_vanishing_bulk_marginal(self):
        # bulk marginal is q_0(w/(gamma-1)); degenerate mixer, gamma=2
        r = regime_from_name("lt1-vanishing")
        got = lt_eval(r, TailModel(0.5), Degenerate(1.0), 0.0, 0.0, 0.7)
        assert got == pytest.approx(math.exp(-0.7), rel=1e-12)

    def test_lt1_fixed_p_top_marginal(self):
        # stable-subordinator marginal exp(-u^alpha Gamma(1-alpha))
        r = regime_from_name("lt1-fixed-p", p=0.5)
        for u in (0.25, 1.0, 4.0):
            got = lt_eval(r, TailModel(0.5), Degenerate(1.0), u, 0.0, 0.0)
            assert got == pytest.approx(math.exp(-math.sqrt(math.pi * u)),
                                        rel=1e-12)

    @pytest.mark.parametrize("name,p,alpha", [("lt1-fixed-p", 0.25, 0.5),
                                              ("gt1-fixed-p", 0.25, 2.0)])
    def test_fixed_p_pivot_enters_as_prefactor(self, name, p, alpha):
        # the pivot converges to the deterministic quantile x_p, so v only
        # contributes exp(-v * x_p)
        r = regime_from_name(name, p=p)
        m = TailModel(alpha)
        x_p = (1.0 / p) ** (1.0 / alpha)
        with_v = lt_eval(r, m, GammaLaw(2.0, 2.0), 0.3, 0.7, 0.2)
        without = lt_eval(r, m, GammaLaw(2.0, 2.0), 0.3, 0.0, 0.2)
        assert with_v == pytest.approx(math.exp(-0.7 * x_p) * without, rel=1e-10)

    def test_ctr2_gaussian_bulk_factorizes(self):
        # degenerate mixer: the centered bulk is an independent Gaussian,
        # so the transform factorizes and the w-marginal is exp(w^2 var / 2)
        r = regime_from_name("ctr2-fixed-s", s=1)
        m = TailModel(3.0)
        full = lt_eval(r, m, Degenerate(1.0), 0.4, 0.3, 0.8)
        split = (lt_eval(r, m, Degenerate(1.0), 0.4, 0.3, 0.0)
                 * lt_eval(r, m, Degenerate(1.0), 0.0, 0.0, 0.8))
        assert full == pytest.approx(split, rel=1e-10)
        claim_var = 3.0 / 4.0
        assert lt_eval(r, m, Degenerate(1.0), 0.0, 0.0, 0.8) == pytest.approx(
            math.exp(0.8 ** 2 * claim_var / 2.0), rel=1e-10)

    @pytest.mark.parametrize("name", [n for n in REGIME_NAMES
                                      if not n.startswith("ctr")])
    def test_monotone_in_each_argument(self, name):
        r = regime_from_name(name, s=1, p=0.5)
        m = model_for(name)
        mix = GammaLaw(2.0, 2.0)
        base = lt_eval(r, m, mix, 0.3, 0.3, 0.3)
        assert lt_eval(r, m, mix, 0.9, 0.3, 0.3) < base
        assert lt_eval(r, m, mix, 0.3, 0.9, 0.3) < base
        assert lt_eval(r, m, mix, 0.3, 0.3, 0.9) < base


class TestDispatch:
    def test_regime_names_registry(self):
        assert len(REGIME_NAMES) == 8
        for name in REGIME_NAMES:
            assert regime_from_name(name, s=0, p=0.5) is not None

    def test_unknown_name(self):
        with pytest.raises(DispatchError):
            regime_from_name("subexponential")

    @pytest.mark.parametrize("name,alpha", [
        ("lt1-fixed-s", 1.0), ("lt1-fixed-s", 2.0),
        ("gt1-fixed-s", 1.0), ("gt1-fixed-s", 0.7),
        ("ctr12-fixed-s", 1.0), ("ctr12-fixed-s", 2.0),
        ("ctr2-fixed-s", 2.0), ("ctr2-fixed-s", 1.5),
    ])
    def test_incompatible_tail_raises(self, name, alpha):
        with pytest.raises(DispatchError):
            check_compatible(regime_from_name(name, s=0), TailModel(alpha))

    @pytest.mark.parametrize("name", REGIME_NAMES)
    def test_compatible_tail_passes(self, name):
        check_compatible(regime_from_name(name, s=0), model_for(name))

    def test_lt_eval_checks_compatibility(self):
        r = regime_from_name("gt1-fixed-s", s=0)
        with pytest.raises(DispatchError):
            lt_eval(r, TailModel(0.5), Degenerate(1.0), 0.1, 0.1, 0.1)

    def test_bad_fixed_p(self):
        with pytest.raises(DomainError):
            regime_from_name("lt1-fixed-p", p=0.0)
        with pytest.raises(DomainError):
            regime_from_name("gt1-fixed-p", p=1.0)
