"""The eight contractivity conditions for firing-rate and Hopfield networks.

Each condition is a 2n x 2n block matrix in (W, P, Q, rate) whose negative
semidefiniteness certifies contraction. The assemblies here are written
directly from the per-cell formulas; ``multipliers`` builds the same matrices
by specializing the generic Lur'e LMI, and the two routes agree entry for
entry (a regression test enforces exact equality).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, InfeasibleAtAllRates, InvalidRate, ReCheckFailed
from .linalg import as_diag_pos, as_matrix, eigvals_sym, is_nsd, symmetrize

logger = logging.getLogger(__name__)

BISECT_TOL = 1e-6

# Largest continuous rate the exact weight parameterization covers; best_rate
# stops here and logs when the condition still holds at the cap.
CT_RATE_CAP = 1.0


class Architecture(Enum):
    FIRING_RATE = "FR"
    HOPFIELD = "HOP"


class TimeDomain(Enum):
    CONTINUOUS = "CT"
    DISCRETE = "DT"


class Nonlinearity(Enum):
    CONE = "CONE"
    MONE = "MONE"


@dataclass(frozen=True)
class ConditionId:
    """One of the eight (architecture, time domain, nonlinearity) cells."""

    architecture: Architecture
    time: TimeDomain
    nonlinearity: Nonlinearity

    def __str__(self) -> str:
        return f"{self.architecture.value}/{self.time.value}/{self.nonlinearity.value}"

    @staticmethod
    def parse(text: str) -> "ConditionId":
        try:
            arch, time, nl = text.strip().upper().split("/")
            return ConditionId(Architecture(arch), TimeDomain(time), Nonlinearity(nl))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"cannot parse condition id {text!r}") from exc


ALL_CONDITIONS = tuple(
    ConditionId(arch, time, nl)
    for arch in Architecture
    for time in TimeDomain
    for nl in Nonlinearity
)


class RateKind(Enum):
    CT_RATE = "ct_rate"
    DT_FACTOR = "dt_factor"


@dataclass(frozen=True)
class Rate:
    """Contraction rate c (continuous) or one-step factor rho (discrete).

    Continuous rates admit c = 0 so the boundary of the exact weight
    parameterization stays representable; a strong contraction claim needs
    c > 0.
    """

    kind: RateKind
    value: float

    def __post_init__(self):
        v = self.value
        if not np.isfinite(v):
            raise InvalidRate(f"rate must be finite, got {v}")
        if self.kind is RateKind.CT_RATE and v < 0:
            raise InvalidRate(f"continuous rate must be >= 0, got {v}")
        if self.kind is RateKind.DT_FACTOR and not 0.0 <= v < 1.0:
            raise InvalidRate(f"discrete factor must lie in [0, 1), got {v}")

    @staticmethod
    def ct(c: float) -> "Rate":
        return Rate(RateKind.CT_RATE, float(c))

    @staticmethod
    def dt(rho: float) -> "Rate":
        return Rate(RateKind.DT_FACTOR, float(rho))

    def matches(self, cond: ConditionId) -> bool:
        if cond.time is TimeDomain.CONTINUOUS:
            return self.kind is RateKind.CT_RATE
        return self.kind is RateKind.DT_FACTOR


@dataclass(frozen=True, eq=False)
class Certificate:
    """A complete, independently checkable contraction witness.

    ``q`` stores the diagonal of the positive diagonal multiplier matrix.
    ``margin`` is the largest eigenvalue of the assembled condition matrix.
    """

    cond: ConditionId
    w: np.ndarray
    p: np.ndarray
    q: np.ndarray
    rate: Rate
    margin: float

    def __post_init__(self):
        w = as_matrix(self.w, "W")
        p = symmetrize(self.p)
        q = as_diag_pos(self.q)
        n = w.shape[0]
        if w.shape != (n, n) or p.shape != (n, n) or q.size != n:
            raise DimensionMismatch("certificate matrices have inconsistent sizes")
        if not self.rate.matches(self.cond):
            raise InvalidRate(
                f"rate kind {self.rate.kind.value} does not match condition {self.cond}"
            )
        evs = eigvals_sym(p)
        if evs[0] < 1e-12 * max(1.0, evs[-1]):
            raise ValueError("certificate P is not positive definite")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.w.shape[0]


def _validate_assemble_inputs(cond, w, p, q, rate):
    w = as_matrix(w, "W")
    n = w.shape[0]
    if w.shape != (n, n):
        raise DimensionMismatch(f"W must be square, got {w.shape}")
    p = np.asarray(p, dtype=float)
    if p.shape != (n, n):
        raise DimensionMismatch(f"P must be {n}x{n}, got {p.shape}")
    qv = np.asarray(q, dtype=float)
    if qv.ndim != 1 or qv.size != n:
        raise DimensionMismatch(f"q must be a length-{n} vector, got shape {qv.shape}")
    if not rate.matches(cond):
        raise InvalidRate(f"rate kind {rate.kind.value} invalid for {cond}")
    return w, p, qv


def assemble(cond: ConditionId, w, p, q, rate: Rate) -> np.ndarray:
    """Assemble the condition matrix for one table cell.

    Definiteness of P and positivity of q are the caller's responsibility;
    the assembly itself is affine in (P, Q) for fixed W and rate, which the
    feasibility solver relies on.
    """
    w, p, qv = _validate_assemble_inputs(cond, w, p, q, rate)
    qm = np.diag(qv)
    fr = cond.architecture is Architecture.FIRING_RATE
    cone = cond.nonlinearity is Nonlinearity.CONE

    # The continuous cells write -2(1-c)P in the expanded form -2P + 2cP so
    # the entries round identically to the generic Lur'e assembly route.
    if cond.time is TimeDomain.CONTINUOUS:
        c = rate.value
        if fr and cone:
            tl = -2.0 * p + (2.0 * c) * p + (w.T @ qm) @ w
            tr = p + np.zeros_like(p)
            br = np.zeros_like(qm) + (-qm)
        elif fr and not cone:
            tl = -2.0 * p + (2.0 * c) * p
            tr = p + w.T @ qm
            br = np.zeros_like(qm) + (-2.0 * qm)
        elif not fr and cone:
            tl = -2.0 * p + (2.0 * c) * p + qm
            tr = p @ w
            br = np.zeros_like(qm) + (-qm)
        else:
            tl = -2.0 * p + (2.0 * c) * p
            tr = p @ w + qm
            br = np.zeros_like(qm) + (-2.0 * qm)
    else:
        rho = rate.value
        if fr and cone:
            tl = -(rho * rho) * p + (w.T @ qm) @ w
            tr = np.zeros_like(p)
            br = p - qm
        elif fr and not cone:
            tl = -(rho * rho) * p
            tr = w.T @ qm
            br = p - 2.0 * qm
        elif not fr and cone:
            tl = -(rho * rho) * p + qm
            tr = np.zeros_like(p)
            br = (w.T @ p) @ w - qm
        else:
            tl = -(rho * rho) * p
            tr = qm + np.zeros_like(qm)
            br = (w.T @ p) @ w - 2.0 * qm
    return np.block([[tl, tr], [tr.T, br]])


def check(cond: ConditionId, w, p, q, rate: Rate, tol: float | None = None) -> tuple[bool, float]:
    """Check one table cell; returns (holds, margin) with margin = lambda_max."""
    as_diag_pos(q)
    mat = assemble(cond, w, p, q, rate)
    return is_nsd(mat, tol)


def make_certificate(
    cond: ConditionId, w, p, q, rate: Rate, tol: float | None = None
) -> Certificate:
    """Build a Certificate, verifying the condition holds at ``tol``."""
    holds, margin = check(cond, w, p, q, rate, tol)
    if not holds:
        raise ReCheckFailed(f"{cond} fails with margin {margin:.3e}")
    return Certificate(cond=cond, w=np.asarray(w, dtype=float), p=np.asarray(p, dtype=float),
                       q=np.asarray(q, dtype=float), rate=rate, margin=margin)


def best_rate(
    cond: ConditionId,
    w,
    p,
    q,
    tol: float | None = None,
    bisect_tol: float = BISECT_TOL,
) -> Rate:
    """Largest certified rate (continuous) or smallest factor (discrete).

    The condition matrix is monotone in c and in rho^2, so bisection is
    exact up to ``bisect_tol``. Continuous rates are capped at 1; hitting
    the cap is logged since larger rates may still be certifiable.
    """
    if cond.time is TimeDomain.CONTINUOUS:
        cap = CT_RATE_CAP
        if check(cond, w, p, q, Rate.ct(cap), tol)[0]:
            logger.info("best_rate hit the continuous cap c = %g for %s", cap, cond)
            return Rate.ct(cap)
        lo = 0.0
        if not check(cond, w, p, q, Rate.ct(lo), tol)[0]:
            raise InfeasibleAtAllRates(f"{cond} fails even as c -> 0")
        hi = cap
        while hi - lo > bisect_tol:
            mid = 0.5 * (lo + hi)
            if check(cond, w, p, q, Rate.ct(mid), tol)[0]:
                lo = mid
            else:
                hi = mid
        return Rate.ct(lo)

    if check(cond, w, p, q, Rate.dt(0.0), tol)[0]:
        return Rate.dt(0.0)
    hi = 1.0 - 1e-9
    if not check(cond, w, p, q, Rate.dt(hi), tol)[0]:
        raise InfeasibleAtAllRates(f"{cond} fails even as rho -> 1")
    lo = 0.0
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if check(cond, w, p, q, Rate.dt(mid), tol)[0]:
            hi = mid
        else:
            lo = mid
    return Rate.dt(hi)
