"""Direct table assemblies, checks, rate bisection, and route agreement."""

import numpy as np
import pytest

from contractcert import sampling
from contractcert.conditions import (
    ALL_CONDITIONS,
    Architecture,
    Certificate,
    ConditionId,
    Nonlinearity,
    Rate,
    RateKind,
    TimeDomain,
    assemble,
    best_rate,
    check,
    make_certificate,
)
from contractcert.errors import InfeasibleAtAllRates, InvalidRate
from contractcert.selftest import _lure_specialization

FR_CT_MONE = ConditionId(Architecture.FIRING_RATE, TimeDomain.CONTINUOUS, Nonlinearity.MONE)
FR_DT_CONE = ConditionId(Architecture.FIRING_RATE, TimeDomain.DISCRETE, Nonlinearity.CONE)
HOP_DT_CONE = ConditionId(Architecture.HOPFIELD, TimeDomain.DISCRETE, Nonlinearity.CONE)


class TestRate:
    def test_ct_rejects_negative(self):
        with pytest.raises(InvalidRate):
            Rate.ct(-0.1)

    def test_dt_range(self):
        with pytest.raises(InvalidRate):
            Rate.dt(1.0)
        with pytest.raises(InvalidRate):
            Rate.dt(-0.01)
        assert Rate.dt(0.0).value == 0.0

    def test_kind_must_match_condition(self):
        assert Rate.ct(0.5).matches(FR_CT_MONE)
        assert not Rate.dt(0.5).matches(FR_CT_MONE)


class TestAssemble:
    def test_boundary_identity_case(self):
        # W = -I, P = Q = I, c = 1 gives [[0, 0], [0, -2I]]
        out = assemble(FR_CT_MONE, -np.eye(2), np.eye(2), np.ones(2), Rate.ct(1.0))
        expect = np.block(
            [[np.zeros((2, 2)), np.zeros((2, 2))], [np.zeros((2, 2)), -2.0 * np.eye(2)]]
        )
        assert np.array_equal(out, expect)

    def test_scalar_plug_in(self):
        out = assemble(FR_CT_MONE, np.zeros((1, 1)), np.eye(1), np.array([100.0]), Rate.ct(0.99))
        assert np.allclose(out, [[-0.02, 1.0], [1.0, -200.0]])

    def test_zero_weight_discrete(self):
        out = assemble(FR_DT_CONE, np.zeros((2, 2)), np.eye(2), np.ones(2), Rate.dt(0.5))
        assert np.allclose(out, np.diag([-0.25, -0.25, 0.0, 0.0]))

    def test_rate_kind_validation(self):
        with pytest.raises(InvalidRate):
            assemble(FR_CT_MONE, np.zeros((1, 1)), np.eye(1), np.ones(1), Rate.dt(0.5))


class TestCheck:
    def test_assemble_examples_hold(self):
        holds, margin = check(FR_CT_MONE, -np.eye(2), np.eye(2), np.ones(2), Rate.ct(1.0))
        assert holds and margin == 0.0
        holds, margin = check(
            FR_CT_MONE, np.zeros((1, 1)), np.eye(1), np.array([100.0]), Rate.ct(0.99)
        )
        assert holds and margin < 0
        holds, margin = check(FR_DT_CONE, np.zeros((2, 2)), np.eye(2), np.ones(2), Rate.dt(0.5))
        assert holds and margin <= 0

    def test_skew_fails_with_identity_metric(self):
        # Schur complement is -1.8 I + (I + W^T W)/2 = 6.7 I, hand computed
        w = np.array([[0.0, 4.0], [-4.0, 0.0]])
        holds, margin = check(FR_CT_MONE, w, np.eye(2), np.ones(2), Rate.ct(0.1))
        assert not holds and margin > 0

    def test_hopfield_discrete_scalar(self):
        holds, margin = check(
            HOP_DT_CONE, np.zeros((2, 2)), np.eye(2), np.full(2, 0.5), Rate.dt(0.8)
        )
        assert holds
        assert np.isclose(margin, 0.5 - 0.64)

    def test_rejects_nonpositive_q(self):
        with pytest.raises(ValueError):
            check(FR_CT_MONE, np.zeros((1, 1)), np.eye(1), np.zeros(1), Rate.ct(0.5))


class TestBestRate:
    def test_cap_at_one(self):
        rate = best_rate(FR_CT_MONE, -np.eye(2), np.eye(2), np.ones(2))
        assert rate.kind is RateKind.CT_RATE
        assert rate.value == 1.0

    def test_symmetric_scalar_rate(self):
        # the log-optimal witness for W = 0.5 certifies exactly up to c = 0.5
        rate = best_rate(FR_CT_MONE, np.array([[0.5]]), np.eye(1), np.array([2.0]))
        assert abs(rate.value - 0.5) <= 1e-5

    def test_discrete_zero_weight(self):
        rate = best_rate(FR_DT_CONE, np.zeros((2, 2)), np.eye(2), np.ones(2))
        assert rate.kind is RateKind.DT_FACTOR
        assert rate.value == 0.0

    def test_infeasible_raises(self):
        w = np.array([[0.0, 4.0], [-4.0, 0.0]])
        with pytest.raises(InfeasibleAtAllRates):
            best_rate(FR_CT_MONE, w, np.eye(2), np.ones(2))

    def test_monotonicity_random(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            cond = ALL_CONDITIONS[int(rng.integers(0, 8))]
            cert = sampling.random_certificate(rng, cond, int(rng.integers(2, 7)))
            if cond.time is TimeDomain.CONTINUOUS:
                smaller = Rate.ct(cert.rate.value * rng.uniform(0.1, 0.9))
                assert check(cond, cert.w, cert.p, cert.q, smaller)[0]
            else:
                larger = Rate.dt(cert.rate.value + (1 - cert.rate.value) * rng.uniform(0.1, 0.9))
                assert check(cond, cert.w, cert.p, cert.q, larger)[0]


class TestRouteAgreement:
    def test_table_equals_lure_specialization_exactly(self):
        rng = np.random.default_rng(5)
        for cond in ALL_CONDITIONS:
            for _ in range(25):
                n = int(rng.integers(1, 9))
                w = rng.standard_normal((n, n))
                p = sampling.random_spd(rng, n)
                q = sampling.random_diag_pos(rng, n)
                rate = (
                    Rate.ct(rng.uniform(0.01, 1.0))
                    if cond.time is TimeDomain.CONTINUOUS
                    else Rate.dt(rng.uniform(0.0, 0.99))
                )
                direct = assemble(cond, w, p, q, rate)
                generic = _lure_specialization(cond, w, p, q, rate)
                assert np.array_equal(direct, generic), str(cond)


class TestCertificate:
    def test_certificate_validation(self):
        cert = make_certificate(FR_CT_MONE, -np.eye(2), np.eye(2), np.ones(2), Rate.ct(1.0))
        assert cert.margin == 0.0
        assert cert.n == 2

    def test_rejects_rate_mismatch(self):
        with pytest.raises(InvalidRate):
            Certificate(
                cond=FR_CT_MONE,
                w=-np.eye(2),
                p=np.eye(2),
                q=np.ones(2),
                rate=Rate.dt(0.5),
                margin=0.0,
            )

    def test_rejects_indefinite_p(self):
        with pytest.raises(ValueError):
            Certificate(
                cond=FR_CT_MONE,
                w=-np.eye(2),
                p=-np.eye(2),
                q=np.ones(2),
                rate=Rate.ct(0.5),
                margin=0.0,
            )

    def test_condition_id_parse_round_trip(self):
        for cond in ALL_CONDITIONS:
            assert ConditionId.parse(str(cond)) == cond
