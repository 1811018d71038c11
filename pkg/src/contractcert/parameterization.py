"""Exact generator of weight matrices for the continuous monotone condition.

Every W admitting a continuous-time monotone firing-rate certificate with
rate c in [0, 1] can be written

    W = 2 sqrt(1 - c) diag(e^d) S V^T V - diag(e^(2d)) (V^T V)^2

with ||S||_2 <= 1 and V full rank; the implied witness is P = (V^T V)^2 and
Q = diag(e^(-2d)). ``generate`` evaluates the formula, ``invert`` recovers a
seed from any strictly feasible certificate, and ``squash`` / ``psd_shift``
provide the smooth unconstrained reparameterizations of S and P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conditions import (
    Architecture,
    Certificate,
    ConditionId,
    Nonlinearity,
    Rate,
    RateKind,
    TimeDomain,
    make_certificate,
)
from .errors import (
    DegenerateRate,
    DimensionMismatch,
    NumericalFailure,
    RankDeficientV,
    SlopeBoundViolated,
)
from .linalg import as_matrix, spd_sqrt, symmetrize

FR_CT_MONE = ConditionId(Architecture.FIRING_RATE, TimeDomain.CONTINUOUS, Nonlinearity.MONE)

S_NORM_SLACK = 1e-9
V_MIN_SINGULAR = 1e-8
INVERT_NORM_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class ParamSeed:
    """Free variables (d, S, V, c) of the exact parameterization."""

    d: np.ndarray
    s: np.ndarray
    v: np.ndarray
    c: float

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        s = as_matrix(self.s, "S")
        v = as_matrix(self.v, "V")
        n = d.size
        if d.ndim != 1 or s.shape != (n, n) or v.shape != (n, n):
            raise DimensionMismatch("seed components have inconsistent sizes")
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"c must lie in [0, 1], got {self.c}")
        s_norm = float(np.linalg.norm(s, 2))
        if s_norm > 1.0 + S_NORM_SLACK:
            raise SlopeBoundViolated(f"||S||_2 = {s_norm:.12g} exceeds 1")
        if float(np.linalg.svd(v, compute_uv=False)[-1]) < V_MIN_SINGULAR:
            raise RankDeficientV("V is rank deficient")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.d.size


def squash(x) -> np.ndarray:
    """Map a free matrix into the unit spectral-norm ball: X (I + X^T X)^(-1/2)."""
    x = as_matrix(x, "X")
    gram = symmetrize(x.T @ x)
    w, vecs = np.linalg.eigh(gram)
    if np.any(w < -1e-8):
        raise NumericalFailure("X^T X has significantly negative eigenvalues")
    inv_root = (vecs / np.sqrt(1.0 + np.maximum(w, 0.0))) @ vecs.T
    return x @ inv_root


def psd_shift(y, eps: float | None = None) -> np.ndarray:
    """Positive definite matrix Y^T Y + eps I from a free matrix Y.

    ``eps`` defaults to 1e-4 relative to the trace scale of Y^T Y.
    """
    y = as_matrix(y, "Y")
    gram = symmetrize(y.T @ y)
    n = gram.shape[0]
    if eps is None:
        eps = 1e-4 * max(1.0, float(np.trace(gram)) / n)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return gram + eps * np.eye(n)


def seed_from_raw(d, x, y, c: float, eps: float | None = None) -> ParamSeed:
    """Build a seed from unconstrained (d, X, Y): S = squash(X), (V^T V)^2 = psd_shift(Y)."""
    p = psd_shift(y, eps)
    p_half = spd_sqrt(p)
    v = spd_sqrt(p_half)
    return ParamSeed(d=np.asarray(d, dtype=float), s=squash(x), v=v, c=float(c))


def generate(seed: ParamSeed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate the parameterization; returns (W, P, Q-diagonal).

    The triple (W, P, Q) together with the seed's rate always satisfies the
    continuous monotone firing-rate condition, at the boundary when
    ||S||_2 = 1.
    """
    vtv = symmetrize(seed.v.T @ seed.v)
    p = symmetrize(vtv @ vtv)
    ed = np.exp(seed.d)
    w = (2.0 * math.sqrt(1.0 - seed.c)) * (ed[:, None] * (seed.s @ vtv)) - (ed ** 2)[:, None] * p
    q = np.exp(-2.0 * seed.d)
    return w, p, q


def generate_certificate(seed: ParamSeed, tol: float = 1e-8) -> Certificate:
    """Generate and package as a verified certificate."""
    w, p, q = generate(seed)
    return make_certificate(FR_CT_MONE, w, p, q, Rate.ct(seed.c), tol=tol)


def invert(cert: Certificate) -> ParamSeed:
    """Recover a seed from a strictly feasible continuous monotone FR certificate.

    Uses d = -log(q)/2, V as the SPD fourth root of P (the canonical gauge
    for the V-orthogonal-factor freedom), and
    S = Q^(-1/2) (P + Q W) P^(-1/2) / (2 sqrt(1 - c)).
    """
    if cert.cond != FR_CT_MONE:
        raise ValueError(f"invert expects a {FR_CT_MONE} certificate")
    if cert.rate.kind is not RateKind.CT_RATE:
        raise ValueError("invert expects a continuous rate")
    c = cert.rate.value
    if c >= 1.0:
        raise DegenerateRate("invert is undefined at c = 1")
    d = -0.5 * np.log(cert.q)
    p_half = spd_sqrt(cert.p)
    v = spd_sqrt(p_half)
    p_half_inv = np.linalg.inv(p_half)
    q_inv_half = np.exp(d)  # Q^(-1/2) diagonal
    target = cert.p + cert.q[:, None] * cert.w
    s = (q_inv_half[:, None] * target) @ p_half_inv / (2.0 * math.sqrt(1.0 - c))
    s_norm = float(np.linalg.norm(s, 2))
    if s_norm > 1.0 + INVERT_NORM_SLACK:
        raise SlopeBoundViolated(
            f"recovered ||S||_2 = {s_norm:.9g}; certificate is only marginally feasible"
        )
    # Round-off can leave the norm a hair above 1; rescale into the ball so
    # the seed invariant holds exactly.
    if s_norm > 1.0:
        s = s / s_norm
    return ParamSeed(d=d, s=s, v=v, c=c)


def random_seed(rng: np.random.Generator, n: int, c: float, eps: float | None = None) -> ParamSeed:
    """Seed with standard normal (d, X, Y) draws, squashed and shifted."""
    d = rng.standard_normal(n)
    x = rng.standard_normal((n, n))
    y = rng.standard_normal((n, n))
    return seed_from_raw(d, x, y, c, eps)
