"""Constructive structural relationships between the eight conditions.

Covers the nonlinearity-class inclusion, the discrete-to-continuous
inclusion, the exact firing-rate/Hopfield duality, the reduction of the
discrete non-expansive cells to Schur diagonal stability, the necessity (but
not sufficiency) of Lyapunov diagonal stability, and the boundary-tight
certificate construction for symmetric weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import conditions
from .conditions import (
    Architecture,
    Certificate,
    ConditionId,
    Nonlinearity,
    Rate,
    RateKind,
    TimeDomain,
)
from .errors import (
    AlphaOutOfRange,
    DimensionMismatch,
    InvalidRate,
    NoRealRoot,
    NotPositiveDefinite,
    ReCheckFailed,
)
from .feasibility import (
    FeasibilityProblem,
    FeasibilityStatus,
    SolverOptions,
    VarSpec,
    min_lambda_max,
)
from .linalg import eigvals_sym, spd_inv, symmetrize

# Transformed certificates must re-check at least this tightly.
RECHECK_TOL = 1e-7

# Numerical proxy for a strict matrix inequality.
STRICT_NEG = -1e-10

# The 2x2 skew weight matrix witnessing that Lyapunov diagonal stability of
# W - I does not imply contraction in any fixed weighted norm.
SKEW_W = np.array([[0.0, 4.0], [-4.0, 0.0]])


def _recheck(cond, w, p, q, rate) -> Certificate:
    holds, margin = conditions.check(cond, w, p, q, rate, tol=RECHECK_TOL)
    if not holds:
        raise ReCheckFailed(f"transformed certificate fails {cond}: margin {margin:.3e}")
    return Certificate(cond=cond, w=w, p=p, q=q, rate=rate, margin=margin)


def cone_to_mone(cert: Certificate) -> Certificate:
    """Reuse a non-expansive certificate for the monotone cell.

    The same (W, P, Q, rate) works because the monotone condition matrix
    differs from the non-expansive one by an added negative semidefinite
    term, so the margin can only improve.
    """
    if cert.cond.nonlinearity is not Nonlinearity.CONE:
        raise ValueError("cone_to_mone expects a CONE certificate")
    target = ConditionId(cert.cond.architecture, cert.cond.time, Nonlinearity.MONE)
    return _recheck(target, cert.w, cert.p, cert.q, cert.rate)


def disc_to_cts(cert: Certificate) -> Certificate:
    """Convert a discrete factor rho into a continuous rate c = (1 - rho^2)/2."""
    if cert.cond.time is not TimeDomain.DISCRETE:
        raise ValueError("disc_to_cts expects a discrete-time certificate")
    rho = cert.rate.value
    target = ConditionId(cert.cond.architecture, TimeDomain.CONTINUOUS, cert.cond.nonlinearity)
    c = (1.0 - rho * rho) / 2.0
    return _recheck(target, cert.w, cert.p, cert.q, Rate.ct(c))


@dataclass(frozen=True)
class DualityMap:
    """Record of the variable transforms applied by ``dualize`` for one cell.

    ``p_rule`` / ``q_rule`` are "inverse" or "inverse_scaled": the latter
    multiplies the inverse by rho^-2 (for P) or rho^2 (for Q). Applying the
    same map twice returns the original parameters.
    """

    source: ConditionId
    target: ConditionId
    p_rule: str
    q_rule: str


def duality_map(cond: ConditionId) -> DualityMap:
    flipped = Architecture.HOPFIELD if cond.architecture is Architecture.FIRING_RATE else Architecture.FIRING_RATE
    target = ConditionId(flipped, cond.time, cond.nonlinearity)
    if cond.time is TimeDomain.CONTINUOUS:
        p_rule, q_rule = "inverse", "inverse"
    elif cond.nonlinearity is Nonlinearity.MONE:
        p_rule, q_rule = "inverse_scaled", "inverse"
    else:
        p_rule, q_rule = "inverse", "inverse_scaled"
    return DualityMap(source=cond, target=target, p_rule=p_rule, q_rule=q_rule)


def dualize(cert: Certificate) -> Certificate:
    """Flip architecture: W transposes and (P, Q) invert, rho-scaled per cell.

    The map is an involution; both discrete cells pick up a rho power that
    cancels on the second application.
    """
    rule = duality_map(cert.cond)
    if cert.cond.time is TimeDomain.DISCRETE and cert.rate.value == 0.0:
        raise InvalidRate("duality is undefined at rho = 0")
    try:
        p_inv = spd_inv(cert.p)
    except NotPositiveDefinite as exc:
        raise ReCheckFailed(f"certificate P is numerically singular: {exc}") from exc
    q_inv = 1.0 / cert.q
    rho = cert.rate.value
    p_new = (rho ** -2) * p_inv if rule.p_rule == "inverse_scaled" else p_inv
    q_new = (rho ** 2) * q_inv if rule.q_rule == "inverse_scaled" else q_inv
    return _recheck(rule.target, cert.w.T.copy(), p_new, q_new, cert.rate)


def schur_diag_stability(
    w, rho: float, opts: SolverOptions | None = None
) -> tuple[bool, np.ndarray | None]:
    """Search for diagonal q > 0 with W^T Q W <= rho^2 Q.

    Returns (True, q) on success. (False, None) means the solver found no
    witness, which is conclusive only at desk scale; no infeasibility proof
    is attempted.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionMismatch(f"W must be square, got {w.shape}")
    if not 0.0 <= rho < 1.0:
        raise InvalidRate(f"rho must lie in [0, 1), got {rho}")
    n = w.shape[0]
    rho_sq = rho * rho

    def build(vals):
        qm = np.diag(vals["Q"])
        return (w.T @ qm) @ w - rho_sq * qm

    problem = FeasibilityProblem(
        variables=(VarSpec("Q", "diag", n),),
        assemble=build,
        normalized=("Q",),
        target_trace=float(n),
    )
    res = min_lambda_max(problem, opts or SolverOptions())
    if res.status is FeasibilityStatus.NOT_FOUND:
        return False, None
    return True, res.values["Q"]


def lemma3_fr_certificate(w, rho: float, q) -> Certificate:
    """Discrete non-expansive firing-rate certificate from a stability witness (P = Q)."""
    cond = ConditionId(Architecture.FIRING_RATE, TimeDomain.DISCRETE, Nonlinearity.CONE)
    return _recheck(cond, np.asarray(w, dtype=float), np.diag(q), np.asarray(q, dtype=float), Rate.dt(rho))


def lemma3_hopfield_certificate(w, rho: float, q) -> Certificate:
    """Discrete non-expansive Hopfield certificate from the same witness (rho^2 P = Q)."""
    if rho == 0.0:
        raise InvalidRate("the Hopfield construction needs rho > 0")
    cond = ConditionId(Architecture.HOPFIELD, TimeDomain.DISCRETE, Nonlinearity.CONE)
    p = np.diag(np.asarray(q, dtype=float) / (rho * rho))
    return _recheck(cond, np.asarray(w, dtype=float), p, np.asarray(q, dtype=float), Rate.dt(rho))


def lds_necessary(cert: Certificate) -> bool:
    """Check the Lyapunov-diagonal-stability consequence of a monotone certificate.

    Verifies W^T Q + Q W < 2Q - 2cP strictly; holds for every strictly
    feasible continuous monotone firing-rate certificate.
    """
    expected = ConditionId(Architecture.FIRING_RATE, TimeDomain.CONTINUOUS, Nonlinearity.MONE)
    if cert.cond != expected:
        raise ValueError(f"lds_necessary expects a {expected} certificate")
    qm = np.diag(cert.q)
    c = cert.rate.value
    gap = cert.w.T @ qm + qm @ cert.w - 2.0 * qm + (2.0 * c) * cert.p
    lam_max = float(eigvals_sym(gap)[-1])
    return lam_max <= STRICT_NEG


def skew_counterexample_vertices(p) -> tuple[bool, bool]:
    """Evaluate the two vertex matrices of the skew counterexample.

    For M(D) = 2P - P D W - W^T D P with W the fixed skew matrix, returns
    positive-definiteness verdicts at D = diag(1, 0) and D = diag(0, 1).
    No positive definite P makes both true.
    """
    p = symmetrize(p)
    if p.shape != (2, 2):
        raise DimensionMismatch(f"P must be 2x2, got {p.shape}")
    if eigvals_sym(p)[0] <= 0.0:
        raise NotPositiveDefinite("P must be positive definite")
    verdicts = []
    for d_diag in ((1.0, 0.0), (0.0, 1.0)):
        d = np.diag(d_diag)
        m = 2.0 * p - p @ d @ SKEW_W - SKEW_W.T @ d @ p
        verdicts.append(bool(eigvals_sym(m)[0] > 0.0))
    return verdicts[0], verdicts[1]


def spectral_abscissa(w) -> float:
    """Largest eigenvalue of a symmetric matrix."""
    return float(eigvals_sym(w)[-1])


def symmetric_construction(w) -> Certificate:
    """Boundary-tight continuous monotone certificate for symmetric weights.

    With alpha the largest eigenvalue of W: for alpha < 0 the certificate is
    (P = -W, Q = I, c = 1); for 0 < alpha < 1, P solves
    W = P^(1/2) - P/(4 alpha) with Q = 4 alpha I and c = 1 - alpha. The
    certified rate is optimal among all fixed weighted Euclidean norms.
    """
    w = symmetrize(w)
    n = w.shape[0]
    cond = ConditionId(Architecture.FIRING_RATE, TimeDomain.CONTINUOUS, Nonlinearity.MONE)
    evs, vecs = np.linalg.eigh(w)
    alpha = float(evs[-1])
    if alpha < 0.0:
        return _recheck(cond, w, -w, np.ones(n), Rate.ct(1.0))
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha(W) = {alpha:.6g} outside (-inf, 0) or (0, 1)")

    # Per eigenvalue lam of W, sqrt(P)'s eigenvalue s solves
    # s^2/(4 alpha) - s + lam = 0. Both roots are tried and the one that is
    # positive and substitutes back (s - s^2/(4 alpha) == lam) is kept; the
    # smaller root is preferred where both qualify, matching s = 2 alpha at
    # lam = alpha.
    s_vals = np.empty(n)
    for i, lam in enumerate(evs):
        disc = 1.0 - lam / alpha
        if disc < 0.0:
            raise NoRealRoot(f"eigenvalue {lam:.6g} exceeds alpha {alpha:.6g}")
        root = math.sqrt(disc)
        chosen = None
        for s in (2.0 * alpha * (1.0 - root), 2.0 * alpha * (1.0 + root)):
            if s <= 0.0:
                continue
            if abs((s - s * s / (4.0 * alpha)) - lam) <= 1e-9 * max(1.0, abs(lam)):
                chosen = s
                break
        if chosen is None:
            raise NoRealRoot(f"no consistent root for eigenvalue {lam:.6g}")
        s_vals[i] = chosen
    p = (vecs * (s_vals ** 2)) @ vecs.T
    p = 0.5 * (p + p.T)
    q = np.full(n, 4.0 * alpha)
    return _recheck(cond, w, p, q, Rate.ct(1.0 - alpha))
