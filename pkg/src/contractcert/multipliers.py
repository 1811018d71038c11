"""Incremental multiplier matrices and generic Lur'e contractivity LMIs.

A slope-restricted elementwise nonlinearity admits a quadratic incremental
constraint encoded by a 2n x 2n multiplier matrix. Combining that constraint
with a weighted-norm contraction inequality for the linear part yields one
block LMI per time domain; the eight network conditions in ``conditions`` are
exact specializations of these two assemblies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch
from .linalg import as_diag_pos, as_matrix, symmetrize


class MultiplierKind(Enum):
    GENERAL_SLOPE = "general_slope"
    CONE = "cone"
    MONE = "mone"


@dataclass(frozen=True)
class SlopeInterval:
    """Slope restriction [k1, k2] of an elementwise nonlinearity."""

    k1: float
    k2: float

    def __post_init__(self):
        if not np.isfinite(self.k1) or not np.isfinite(self.k2):
            raise ValueError("slope bounds must be finite")
        if self.k1 > self.k2:
            raise ValueError(f"need k1 <= k2, got [{self.k1}, {self.k2}]")

    def contains(self, other: "SlopeInterval") -> bool:
        return self.k1 <= other.k1 and other.k2 <= self.k2


CONE_INTERVAL = SlopeInterval(-1.0, 1.0)
MONE_INTERVAL = SlopeInterval(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class MultiplierMatrix:
    """A 2n x 2n incremental multiplier matrix with its structural kind."""

    n: int
    matrix: np.ndarray
    kind: MultiplierKind
    interval: SlopeInterval | None = field(default=None)

    def __post_init__(self):
        if self.matrix.shape != (2 * self.n, 2 * self.n):
            raise DimensionMismatch(
                f"multiplier must be {2 * self.n}x{2 * self.n}, got {self.matrix.shape}"
            )

    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(M11, M12, M22) blocks, each n x n."""
        n = self.n
        return self.matrix[:n, :n], self.matrix[:n, n:], self.matrix[n:, n:]


def imm_slope(q, interval: SlopeInterval) -> MultiplierMatrix:
    """Multiplier [[-2 k1 k2 Q, (k1+k2) Q], [(k1+k2) Q, -2Q]] for slope [k1, k2].

    ``q`` is the diagonal of the positive diagonal matrix Q.
    """
    qv = as_diag_pos(q)
    qm = np.diag(qv)
    k1, k2 = interval.k1, interval.k2
    top = np.block([[(-2.0 * k1 * k2) * qm, (k1 + k2) * qm]])
    bot = np.block([[(k1 + k2) * qm, -2.0 * qm]])
    return MultiplierMatrix(
        n=qv.size,
        matrix=np.vstack([top, bot]),
        kind=MultiplierKind.GENERAL_SLOPE,
        interval=interval,
    )


def m_cone(q) -> MultiplierMatrix:
    """Multiplier [[Q, 0], [0, -Q]] for componentwise non-expansive maps."""
    qv = as_diag_pos(q)
    n = qv.size
    qm = np.diag(qv)
    z = np.zeros((n, n))
    mat = np.block([[qm, z], [z, -qm]])
    return MultiplierMatrix(n=n, matrix=mat, kind=MultiplierKind.CONE, interval=CONE_INTERVAL)


def m_mone(q) -> MultiplierMatrix:
    """Multiplier [[0, Q], [Q, -2Q]] for monotone non-expansive maps."""
    qv = as_diag_pos(q)
    n = qv.size
    qm = np.diag(qv)
    z = np.zeros((n, n))
    mat = np.block([[z, qm], [qm, -2.0 * qm]])
    return MultiplierMatrix(n=n, matrix=mat, kind=MultiplierKind.MONE, interval=MONE_INTERVAL)


@dataclass(frozen=True, eq=False)
class LureSystem:
    """Linear dynamics (A, B) in feedback with a static nonlinearity on Cx."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, "A")
        b = as_matrix(self.b, "B")
        c = as_matrix(self.c, "C")
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {a.shape}")
        m = b.shape[1]
        if b.shape != (n, m):
            raise DimensionMismatch(f"B must be {n}x{m}, got {b.shape}")
        if c.shape != (m, n):
            raise DimensionMismatch(f"C must be {m}x{n}, got {c.shape}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]


def _check_assembly_inputs(sys: LureSystem, p: np.ndarray, mult: MultiplierMatrix):
    if p.shape != (sys.n, sys.n):
        raise DimensionMismatch(f"P must be {sys.n}x{sys.n}, got {p.shape}")
    if mult.n != sys.m:
        raise DimensionMismatch(
            f"multiplier size {mult.n} does not match nonlinearity size {sys.m}"
        )


def assemble_lure_ct(sys: LureSystem, p, mult: MultiplierMatrix, c: float, lam: float) -> np.ndarray:
    """Continuous-time Lur'e LMI block matrix.

    Returns [[PA + A^T P + 2cP, PB], [B^T P, 0]] + lam * Gamma^T M Gamma with
    Gamma = blkdiag(C, I). Negative semidefiniteness of the result certifies
    contraction with rate ``c`` in the P-weighted norm.
    """
    p = symmetrize(p)
    _check_assembly_inputs(sys, p, mult)
    if c < 0:
        raise ValueError(f"rate c must be nonnegative, got {c}")
    if lam < 0:
        raise ValueError(f"multiplier scale lam must be nonnegative, got {lam}")
    a, b, cm = sys.a, sys.b, sys.c
    m11, m12, m22 = mult.blocks()
    # Blockwise evaluation keeps this path bit-identical to the direct
    # table assemblies in `conditions` for the substitutions used there.
    tl = p @ a + a.T @ p + (2.0 * c) * p + lam * ((cm.T @ m11) @ cm)
    tr = p @ b + lam * (cm.T @ m12)
    br = np.zeros((sys.m, sys.m)) + lam * m22
    out = np.block([[tl, tr], [tr.T, br]])
    return 0.5 * (out + out.T)


def assemble_lure_dt(sys: LureSystem, p, mult: MultiplierMatrix, rho: float, lam: float) -> np.ndarray:
    """Discrete-time Lur'e LMI block matrix.

    Returns [[A^T P A - rho^2 P, A^T P B], [B^T P A, B^T P B]]
    + lam * Gamma^T M Gamma. Negative semidefiniteness certifies a one-step
    Lipschitz factor ``rho`` in the P-weighted norm.
    """
    p = symmetrize(p)
    _check_assembly_inputs(sys, p, mult)
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"factor rho must lie in [0, 1), got {rho}")
    if lam < 0:
        raise ValueError(f"multiplier scale lam must be nonnegative, got {lam}")
    a, b, cm = sys.a, sys.b, sys.c
    m11, m12, m22 = mult.blocks()
    atp = a.T @ p
    tl = atp @ a - (rho * rho) * p + lam * ((cm.T @ m11) @ cm)
    tr = atp @ b + lam * (cm.T @ m12)
    br = (b.T @ p) @ b + lam * m22
    out = np.block([[tl, tr], [tr.T, br]])
    return 0.5 * (out + out.T)
