import math

import pytest

from oracles import scan_i_max
from qsp import (QSP, UNAFFORDABLE, BoundViolation, DomainError, Flat, Linear,
                 LinearCurveSpec, OneVote, PricingParams, TargetBeyondCurve,
                 build_schedule, cost_constant, cost_general, curve_for,
                 curve_from_samples, i_max_constant, i_max_general,
                 k2_upper_bound, linear_curve, rational_buyer)
from qsp.families import random_curve, random_linear_spec
from qsp.pricing import (schedule_from_csv, schedule_from_json, schedule_to_csv,
                         schedule_to_json)

SAMPLE = curve_from_samples([0.2, 0.4, 0.8])


def random_params(rng, curve):
    v = float(rng.uniform(0.5, 50))
    k2 = float(rng.uniform(0, 1)) * (curve[-1] - curve.p0) / v
    return PricingParams(k2 if k2 > 0 else 1e-12, v)


class TestBounds:
    @pytest.mark.parametrize("p0, v, bound", [(0.2, 4, 0.2), (0, 1, 1), (0.99, 100, 1e-4)])
    def test_upper_bound(self, p0, v, bound):
        assert k2_upper_bound(p0, v) == pytest.approx(bound, rel=1e-12)

    @pytest.mark.parametrize("p0, v", [(1, 1), (1.2, 1), (0.5, 0), (0.5, -2)])
    def test_domain(self, p0, v):
        with pytest.raises(DomainError):
            k2_upper_bound(p0, v)

    def test_params_reject_non_positive(self):
        with pytest.raises(DomainError):
            PricingParams(0, 1)
        with pytest.raises(DomainError):
            PricingParams(0.1, -1)

    def test_legacy_k(self):
        assert PricingParams(0.0005, 100).legacy_k(0.01) == pytest.approx(0.05)


class TestIMax:
    def test_constant(self):
        assert i_max_constant(2, 3.7) == 7
        assert i_max_constant(0.5, 1) == 0

    def test_constant_snaps(self):
        assert 0.29 * 100 < 29  # floating product lands just below the integer
        assert i_max_constant(0.29, 100) == 29
        assert i_max_constant(0.0005 / 0.01, 100) == 5

    def test_general_reduces_to_constant(self):
        curve = linear_curve(LinearCurveSpec(0.01, 0.2, 80))
        params = PricingParams(0.0005, 100)
        assert i_max_general(curve, params) == 5 == i_max_constant(params.legacy_k(0.01), 100)

    def test_zero_target_gain(self):
        assert i_max_general(SAMPLE, PricingParams(1e-12, 1e-3)) == 0

    def test_bound_violation(self):
        with pytest.raises(BoundViolation) as err:
            i_max_general(SAMPLE, PricingParams(0.2, 4))
        assert err.value.bound == pytest.approx(0.2)

    def test_target_beyond_curve(self):
        with pytest.raises(TargetBeyondCurve):
            i_max_general(SAMPLE, PricingParams(0.19, 4))

    def test_step_function_of_v_on_referendum_curve(self):
        curve = curve_for(0.4, 100, 40)
        k2 = 0.01
        top = (curve[-1] - curve.p0) / k2
        for v in [top * f / 400 for f in range(1, 400)]:
            target = k2 * v + curve.p0
            assert i_max_general(curve, PricingParams(k2, v)) == scan_i_max(curve, target)

    def test_jumps_sit_at_knots(self):
        curve = curve_for(0.4, 100, 40)
        k2 = 0.01
        for k in range(1, 40):
            v_jump = (curve[k] - curve.p0) / k2
            assert i_max_general(curve, PricingParams(k2, v_jump * (1 + 1e-7))) == k
            assert i_max_general(curve, PricingParams(k2, v_jump * (1 - 1e-6))) == k - 1


class TestCosts:
    def test_constant(self):
        assert cost_constant(0.01, 0.05, 1) == pytest.approx(0.2)
        assert cost_constant(0.01, 0.05, 10) == pytest.approx(2.0)

    def test_general_examples(self):
        assert cost_general(SAMPLE, 0.1, 1) == pytest.approx(0.4, rel=1e-12)
        assert cost_general(SAMPLE, 0.1, 2) == pytest.approx(2.4, rel=1e-12)

    def test_general_linear_reduction(self):
        curve = linear_curve(LinearCurveSpec(0.01, 0.3, 60))
        for i in range(1, 60):
            assert cost_general(curve, 0.0005, i) == pytest.approx(0.2 * i, rel=1e-12)
            assert cost_general(curve, 0.0005, i) == pytest.approx(
                cost_constant(0.01, 0.0005 / 0.01, i), rel=1e-12)

    def test_reduction_randomized(self, rng):
        for _ in range(200):
            spec = random_linear_spec(rng)
            curve = linear_curve(spec)
            k2 = float(rng.uniform(1e-5, 1))
            k = k2 / spec.delta_p
            for i in range(1, curve.n + 1):
                assert cost_general(curve, k2, i) == pytest.approx(
                    cost_constant(spec.delta_p, k, i), rel=1e-12)

    def test_index_errors(self):
        with pytest.raises(DomainError):
            cost_general(SAMPLE, 0.1, 0)
        with pytest.raises(DomainError):
            cost_general(SAMPLE, 0.1, 3)
        with pytest.raises(DomainError):
            cost_constant(0.1, 1, 0)

    def test_price_over_marginal_strictly_increases(self, rng):
        for _ in range(100):
            curve = random_curve(rng)
            k2 = float(rng.uniform(1e-4, 1))
            ratio = [cost_general(curve, k2, i) / curve.marginal(i)
                     for i in range(1, curve.n + 1)]
            assert all(a < b for a, b in zip(ratio, ratio[1:]))


class TestSchedules:
    def test_flat(self):
        assert build_schedule(Flat(1, 3)).prices == (1, 1, 1)

    def test_one_vote(self):
        assert build_schedule(OneVote(1, 3)).prices == (1, UNAFFORDABLE, UNAFFORDABLE)

    def test_linear(self):
        sched = build_schedule(Linear(0.01, 0.05, 4))
        assert sched.prices == pytest.approx((0.2, 0.4, 0.6, 0.8))

    def test_qsp(self):
        assert build_schedule(QSP(SAMPLE, 0.1)).prices == pytest.approx((0.4, 2.4), rel=1e-12)

    @pytest.mark.parametrize("spec", [Flat(0, 3), Flat(1, 0), OneVote(-1, 2),
                                      Linear(0.1, 0, 3), QSP(SAMPLE, 0), object()])
    def test_invalid(self, spec):
        with pytest.raises(DomainError):
            build_schedule(spec)

    def test_price_lookup(self):
        sched = build_schedule(Flat(2, 2))
        assert sched.price(2) == 2
        with pytest.raises(DomainError):
            sched.price(3)

    def test_csv_round_trip(self):
        for spec in (OneVote(1.5, 4), QSP(SAMPLE, 0.1), Linear(0.01, 0.05, 9)):
            sched = build_schedule(spec)
            text = schedule_to_csv(sched)
            assert text.splitlines()[0] == "i,c"
            assert schedule_from_csv(text).prices == sched.prices
        assert "2,inf" in schedule_to_csv(build_schedule(OneVote(1, 2)))

    def test_json_round_trip(self):
        sched = build_schedule(OneVote(1.5, 4))
        back = schedule_from_json(schedule_to_json(sched))
        assert back.prices == sched.prices and back.regime == "one-vote"


class TestRationalBuyer:
    def test_flat_buys_everything(self):
        curve = linear_curve(LinearCurveSpec(0.01, 0, 21))
        trace = rational_buyer(build_schedule(Flat(0.5, 20)), curve, 100)
        assert trace.i_stop == 20

    def test_flat_too_expensive(self):
        curve = linear_curve(LinearCurveSpec(0.01, 0, 21))
        assert rational_buyer(build_schedule(Flat(2, 20)), curve, 100).i_stop == 0

    def test_one_vote(self):
        curve = linear_curve(LinearCurveSpec(0.01, 0, 21))
        trace = rational_buyer(build_schedule(OneVote(0.5, 20)), curve, 100)
        assert trace.i_stop == 1
        assert trace.decisions[-1][2] is UNAFFORDABLE

    def test_linear_matches_floor_kv(self):
        spec = LinearCurveSpec(0.01, 0.1, 90)
        curve = linear_curve(spec)
        k = 0.1
        for v in (35, 123.4, 401):
            sched = build_schedule(Linear(0.01, k, curve.n))
            assert rational_buyer(sched, curve, v).i_stop == math.floor(k * v)

    def test_tie_buys(self):
        curve = curve_from_samples([0.0, 0.25, 0.5, 0.75])
        sched = build_schedule(QSP(curve, 0.25))
        trace = rational_buyer(sched, curve, 1.0)
        i, gain, price, bought = trace.decisions[0]
        assert gain == price and bought
        assert trace.i_stop == 1 == i_max_general(curve, PricingParams(0.25, 1.0))

    def test_qsp_agrees_with_i_max(self, rng):
        for _ in range(300):
            curve = random_curve(rng, n_max=50)
            params = random_params(rng, curve)
            sched = build_schedule(QSP(curve, params.k2))
            trace = rational_buyer(sched, curve, params.v)
            assert trace.i_stop == i_max_general(curve, params)

    def test_threshold_consistency(self, rng):
        for _ in range(200):
            curve = random_curve(rng, n_max=50)
            params = random_params(rng, curve)
            sched = build_schedule(QSP(curve, params.k2))
            trace = rational_buyer(sched, curve, params.v)
            for i, gain, price, bought in trace.decisions:
                assert bought == (gain >= price)
                assert bought == (i <= trace.i_stop)

    def test_double_check_inequality(self, rng):
        for _ in range(200):
            curve = random_curve(rng, n_max=50)
            params = random_params(rng, curve)
            i_max = i_max_general(curve, params)
            for i in range(1, curve.n + 1):
                cost = cost_general(curve, params.k2, i)
                value = curve.marginal(i) * params.v
                assert (cost <= value) == (i <= i_max)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            rational_buyer(build_schedule(Flat(1, 5)), SAMPLE, 1)
