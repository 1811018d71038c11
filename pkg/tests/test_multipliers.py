"""Multiplier construction and the generic Lur'e assemblies."""

import numpy as np
import pytest

from contractcert.errors import DimensionMismatch
from contractcert.multipliers import (
    LureSystem,
    MultiplierKind,
    SlopeInterval,
    assemble_lure_ct,
    assemble_lure_dt,
    imm_slope,
    m_cone,
    m_mone,
)


class TestImmSlope:
    def test_cone_interval_is_twice_m_cone(self):
        q = np.ones(2)
        m = imm_slope(q, SlopeInterval(-1.0, 1.0))
        assert np.array_equal(m.matrix, 2.0 * m_cone(q).matrix)

    def test_mone_interval_matches_m_mone(self):
        q = np.ones(2)
        m = imm_slope(q, SlopeInterval(0.0, 1.0))
        assert np.array_equal(m.matrix, m_mone(q).matrix)

    def test_general_interval_hand_value(self):
        # q = 2, slope [0.5, 1]: [[-2*0.5*1*2, 1.5*2], [1.5*2, -2*2]]
        m = imm_slope(np.array([2.0]), SlopeInterval(0.5, 1.0))
        assert np.allclose(m.matrix, [[-2.0, 3.0], [3.0, -4.0]])
        assert m.kind is MultiplierKind.GENERAL_SLOPE

    def test_structural_kinds(self):
        q = np.array([1.0, 2.0])
        mc = m_cone(q)
        assert np.all(mc.matrix[:2, 2:] == 0.0)
        mm = m_mone(q)
        assert np.all(mm.matrix[:2, :2] == 0.0)

    def test_invalid_interval(self):
        with pytest.raises(ValueError):
            SlopeInterval(1.0, 0.0)

    def test_rejects_nonpositive_q(self):
        with pytest.raises(ValueError):
            m_cone(np.array([1.0, 0.0]))


class TestLureAssembly:
    def test_ct_matches_fr_mone_table_cell(self):
        # A = -I, B = I, C = W with the monotone multiplier reproduces
        # [[-2(1-c)P, P + W^T Q], [P + QW, -2Q]]
        rng = np.random.default_rng(0)
        n = 3
        w = rng.standard_normal((n, n))
        p = np.eye(n) + 0.1 * np.ones((n, n))
        q = np.array([1.0, 2.0, 0.5])
        c = 0.3
        sys = LureSystem(a=-np.eye(n), b=np.eye(n), c=w)
        out = assemble_lure_ct(sys, p, m_mone(q), c, 1.0)
        qm = np.diag(q)
        expect = np.block(
            [[-2.0 * (1.0 - c) * p, p + w.T @ qm], [p + qm @ w, -2.0 * qm]]
        )
        assert np.allclose(out, expect, atol=1e-14)

    def test_ct_zero_multiplier_degenerate(self):
        # lam = 0, c -> 0, symmetric Hurwitz A, P = I: [[2A, B], [B^T, 0]]
        a = -np.eye(2)
        b = np.eye(2)
        sys = LureSystem(a=a, b=b, c=np.eye(2))
        out = assemble_lure_ct(sys, np.eye(2), m_mone(np.ones(2)), 0.0, 0.0)
        assert np.allclose(out, np.block([[2 * a, b], [b.T, np.zeros((2, 2))]]))
        # nsd only if B = 0: here B = I so the matrix is indefinite
        assert np.linalg.eigvalsh(out)[-1] > 0

    def test_ct_scalar_assembly(self):
        sys = LureSystem(a=[[-1.0]], b=[[1.0]], c=[[1.0]])
        out = assemble_lure_ct(sys, [[1.0]], m_mone(np.array([1.0])), 0.5, 1.0)
        assert np.allclose(out, [[-1.0, 2.0], [2.0, -2.0]])
        assert np.linalg.eigvalsh(out)[-1] > 0

    def test_dt_matches_fr_cone_table_cell(self):
        rng = np.random.default_rng(1)
        n = 2
        w = rng.standard_normal((n, n))
        p = np.eye(n)
        q = np.array([0.5, 1.5])
        rho = 0.7
        sys = LureSystem(a=np.zeros((n, n)), b=np.eye(n), c=w)
        out = assemble_lure_dt(sys, p, m_cone(q), rho, 1.0)
        qm = np.diag(q)
        expect = np.block(
            [
                [w.T @ qm @ w - rho**2 * p, np.zeros((n, n))],
                [np.zeros((n, n)), p - qm],
            ]
        )
        assert np.allclose(out, expect, atol=1e-14)

    def test_dt_zero_system_always_nsd(self):
        n = 2
        sys = LureSystem(a=np.zeros((n, n)), b=np.zeros((n, n)), c=np.eye(n))
        out = assemble_lure_dt(sys, np.eye(n), m_mone(np.ones(n)), 0.5, 0.0)
        assert np.allclose(out, np.block(
            [[-0.25 * np.eye(n), np.zeros((n, n))], [np.zeros((n, n)), np.zeros((n, n))]]
        ))
        assert np.linalg.eigvalsh(out)[-1] <= 0

    def test_dt_scalar(self):
        sys = LureSystem(a=[[0.5]], b=[[0.0]], c=[[1.0]])
        out = assemble_lure_dt(sys, [[1.0]], m_mone(np.array([1.0])), 0.6, 0.0)
        assert np.allclose(out, [[0.25 - 0.36, 0.0], [0.0, 0.0]])
        assert np.linalg.eigvalsh(out)[-1] <= 0

    def test_assembled_exactly_symmetric(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            sys = LureSystem(
                a=rng.standard_normal((n, n)),
                b=rng.standard_normal((n, n)),
                c=rng.standard_normal((n, n)),
            )
            p = rng.standard_normal((n, n))
            p = p @ p.T + np.eye(n)
            out = assemble_lure_ct(sys, p, m_mone(np.exp(rng.uniform(-1, 1, n))), 0.2, 1.0)
            assert np.array_equal(out, out.T)
            out = assemble_lure_dt(sys, p, m_cone(np.exp(rng.uniform(-1, 1, n))), 0.5, 1.0)
            assert np.array_equal(out, out.T)

    def test_dimension_mismatch(self):
        sys = LureSystem(a=-np.eye(2), b=np.eye(2), c=np.eye(2))
        with pytest.raises(DimensionMismatch):
            assemble_lure_ct(sys, np.eye(3), m_mone(np.ones(2)), 0.5, 1.0)
        with pytest.raises(DimensionMismatch):
            assemble_lure_ct(sys, np.eye(2), m_mone(np.ones(3)), 0.5, 1.0)

    def test_rejects_bad_lure_shapes(self):
        with pytest.raises(DimensionMismatch):
            LureSystem(a=np.eye(2), b=np.ones((3, 2)), c=np.ones((2, 2)))
