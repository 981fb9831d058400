import math
import random

import pytest

from probegain import (
    DomainError,
    Drive,
    InvariantError,
    Pumping,
    RelaxationSet,
    UndefinedRatioError,
    critical_x,
    drive_from_kappa,
    gain_inversion_condition,
    gain_ratio,
    interference_dominance,
    pop_inversion_condition,
    saturated_pop_diff,
    saturation_kappa,
    tau_squared,
)
from probegain.critical import RegionLabel


def at(r, kappa):
    return Drive.from_kappa(kappa, r)


class TestRelaxationSet:
    def test_gamma_mn_above_gamma_m_rejected(self):
        with pytest.raises(InvariantError) as exc:
            RelaxationSet(gamma_m=3e7, gamma_n=1e7, gamma_mn=5e7, Gamma=1e7, Gamma_gn=1e7, Gamma_gm=1e7)
        assert exc.value.field == "gamma_mn"

    @pytest.mark.parametrize("field", ["gamma_m", "gamma_n", "Gamma", "Gamma_gn", "Gamma_gm"])
    def test_nonpositive_width_rejected(self, field):
        kwargs = dict(gamma_m=3e7, gamma_n=1e7, gamma_mn=0.0, Gamma=1e7, Gamma_gn=1e7, Gamma_gm=1e7)
        kwargs[field] = 0.0
        with pytest.raises(InvariantError) as exc:
            RelaxationSet(**kwargs)
        assert exc.value.field == field

    def test_cascade_allowed(self):
        r = RelaxationSet(gamma_m=3e7, gamma_n=1e7, gamma_mn=3e7, Gamma=1e7, Gamma_gn=1e7, Gamma_gm=1e7)
        assert r.is_cascade


class TestTauAndKappa:
    def test_tau_squared_neon(self, neon1):
        assert tau_squared(neon1) == pytest.approx(1.25e-15, rel=1e-12)

    def test_tau_squared_unit(self):
        r = RelaxationSet(gamma_m=1, gamma_n=1, gamma_mn=0, Gamma=1, Gamma_gn=1, Gamma_gm=1)
        assert tau_squared(r) == 2.0

    def test_tau_squared_cascade_reduces(self):
        r = RelaxationSet(gamma_m=3.0, gamma_n=7.0, gamma_mn=3.0, Gamma=2.0, Gamma_gn=1, Gamma_gm=1)
        assert tau_squared(r) == pytest.approx(1 / (3.0 * 2.0), rel=1e-15)

    def test_kappa_neon(self, neon1):
        assert saturation_kappa(8e14, neon1) == pytest.approx(2.0, rel=1e-12)
        assert saturation_kappa(0.0, neon1) == 0.0
        assert drive_from_kappa(2.0, neon1) == pytest.approx(8e14, rel=1e-12)

    def test_negative_drive(self, neon1):
        with pytest.raises(DomainError):
            saturation_kappa(-1.0, neon1)
        with pytest.raises(DomainError):
            drive_from_kappa(-0.5, neon1)

    def test_roundtrip(self, neon1):
        for k in (0.0, 1e-6, 0.37, 2.0, 1e6):
            back = Drive.from_kappa(k, neon1).kappa(neon1)
            assert back == pytest.approx(k, rel=1e-12, abs=0)


class TestPopDiff:
    def test_neon_point(self, neon1):
        assert saturated_pop_diff(neon1, at(neon1, 2.0), Pumping(1.0, 4.14)) == pytest.approx(0.08, rel=1e-9)

    def test_zero_drive(self, neon1):
        assert saturated_pop_diff(neon1, Drive(0.0), Pumping(0.3, 2.0)) == 0.3

    def test_cascade_no_effect(self):
        r = RelaxationSet(gamma_m=2e7, gamma_n=1e7, gamma_mn=2e7, Gamma=3e7, Gamma_gn=1e7, Gamma_gm=4e7)
        for g2 in (0.0, 1e12, 1e16, 1e20):
            assert saturated_pop_diff(r, Drive(g2), Pumping(0.25, 3.0)) == 0.25


class TestGainRatio:
    def test_no_field(self, neon1):
        ev = gain_ratio(neon1, Drive(0.0), Pumping(1.0, 4.14))
        assert ev.ratio == 1.0
        assert ev.region is RegionLabel.I

    def test_neon_point(self, neon1):
        ev = gain_ratio(neon1, at(neon1, 2.0), Pumping(1.0, 4.14))
        assert ev.splitting_factor == pytest.approx(3 / 7, rel=1e-12)
        assert ev.bracket == pytest.approx(-1.3, rel=1e-12)
        assert ev.ratio == pytest.approx(-3.9 / 7, rel=1e-12)
        assert ev.region is RegionLabel.II

    def test_factorization(self, neon1):
        ev = gain_ratio(neon1, at(neon1, 0.7), Pumping(2.0, 5.0))
        assert ev.ratio == pytest.approx(ev.splitting_factor * ev.bracket, rel=1e-14)
        assert 0 < ev.splitting_factor <= 1

    def test_no_upper_population(self, neon1):
        d = Drive(3e15)
        ev = gain_ratio(neon1, d, Pumping(1.0, 0.0))
        expected = neon1.Gamma_gn / (neon1.Gamma_gn + 3e15 / neon1.Gamma_gm)
        assert ev.ratio == pytest.approx(expected, rel=1e-14)
        assert ev.ratio < 1

    def test_undefined_ratio(self, neon1):
        with pytest.raises(UndefinedRatioError):
            gain_ratio(neon1, Drive(1e14), Pumping(0.0, 1.0))

    def test_opposite_sign_has_no_region(self, neon1):
        ev = gain_ratio(neon1, Drive(1e14), Pumping(1.0, -1.0))
        assert ev.region is None


class TestConditions:
    def test_pop_inversion(self, neon1):
        p = Pumping(1.0, 4.14)
        assert not pop_inversion_condition(neon1, at(neon1, 2.0), p)
        assert pop_inversion_condition(neon1, at(neon1, 10.0), p)
        assert not pop_inversion_condition(neon1, Drive(0.0), p)

    def test_gain_inversion(self, neon1):
        p = Pumping(1.0, 4.14)
        assert gain_inversion_condition(neon1, at(neon1, 2.0), p)
        assert not gain_inversion_condition(neon1, at(neon1, 0.2), p)
        ev = gain_ratio(neon1, at(neon1, 0.2), p)
        assert ev.bracket == pytest.approx(0.425, rel=1e-12)

    def test_below_x1_never_inverts(self, neon1):
        p = Pumping(1.0, 1.0)
        for k in (0.1, 1.0, 10.0, 1e3, 1e9):
            assert not gain_inversion_condition(neon1, at(neon1, k), p)

    def test_opposite_signs_rejected(self, neon1):
        with pytest.raises(DomainError):
            pop_inversion_condition(neon1, Drive(1e14), Pumping(1.0, -2.0))
        with pytest.raises(DomainError):
            gain_inversion_condition(neon1, Drive(1e14), Pumping(-1.0, 2.0))

    def test_negative_pair_same_sign(self, neon1):
        # both negative: same physics as both positive
        a = gain_inversion_condition(neon1, at(neon1, 2.0), Pumping(-1.0, -4.14))
        b = pop_inversion_condition(neon1, at(neon1, 10.0), Pumping(-1.0, -4.14))
        assert a and b

    def test_interference_dominance_presets(self, neon1, neon2):
        assert interference_dominance(neon1)
        assert interference_dominance(neon2)

    def test_interference_dominance_cascade(self):
        r = RelaxationSet(gamma_m=3e7, gamma_n=1e7, gamma_mn=3e7, Gamma=1e7, Gamma_gn=1e7, Gamma_gm=1e12)
        assert interference_dominance(r)

    def test_interference_dominance_fails_for_r_iv(self, r_iv):
        assert not interference_dominance(r_iv)
        assert critical_x(r_iv).x3 is not None


def test_bracket_limit(neon1):
    x = 4.14
    ev = gain_ratio(neon1, at(neon1, 1e9), Pumping(1.0, x))
    limit = 1 - x / critical_x(neon1).x1
    assert ev.bracket == pytest.approx(limit, rel=1e-6)


def test_monotone_in_kappa(neon1):
    p = Pumping(1.0, 2.5)
    ks = [0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0]
    evs = [gain_ratio(neon1, at(neon1, k), p) for k in ks]
    assert all(a.bracket > b.bracket for a, b in zip(evs, evs[1:]))
    assert all(a.splitting_factor > b.splitting_factor for a, b in zip(evs, evs[1:]))


def test_random_equivalences():
    rng = random.Random(7)
    for _ in range(1000):
        gm = rng.uniform(1.0, 10.0)
        r = RelaxationSet(
            gamma_m=gm, gamma_n=rng.uniform(0.1, 10), gamma_mn=gm * rng.random(),
            Gamma=rng.uniform(0.1, 10), Gamma_gn=rng.uniform(0.1, 10), Gamma_gm=rng.uniform(0.1, 10),
        )
        p = Pumping(rng.uniform(0.01, 1), rng.uniform(0.01, 10))
        d = Drive(rng.uniform(0, 10) ** 3)
        ev = gain_ratio(r, d, p)
        assert gain_inversion_condition(r, d, p) == (ev.bracket < 0)
        assert pop_inversion_condition(r, d, p) == (ev.pop_diff < 0)
        assert math.isclose(ev.ratio, ev.splitting_factor * ev.bracket, rel_tol=1e-14, abs_tol=0)
