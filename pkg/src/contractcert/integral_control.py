"""Low-gain integral control synthesis for contracting firing-rate plants.

The reduced (slow) dynamics of the closed loop are contracting with rate c_r
whenever the gain-design LMI assembled here is negative semidefinite; the
gain is recovered as K = P^{-1} Y. A feasible design also satisfies the
classical DC-gain condition: -K C A^{-1} B is Hurwitz with A = I - W.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conditions import Certificate
from .errors import (
    DimensionMismatch,
    FeasibilityNotFound,
    NumericalFailure,
    SingularA,
    SingularP,
)
from .feasibility import (
    FeasibilityProblem,
    FeasibilityStatus,
    SolverOptions,
    VarSpec,
    min_lambda_max,
)
from .linalg import as_matrix, eigvals_sym, symmetrize
from .multipliers import SlopeInterval


@dataclass(frozen=True, eq=False)
class PlantModel:
    """Firing-rate plant x' = -x + act(W x + B u), y = C x.

    ``delta`` is the lower slope bound of the activation; the synthesis
    multiplier uses the interval [delta, 1] and needs delta > 0. An optional
    contraction certificate for W documents well-posedness of the
    equilibrium map.
    """

    w: np.ndarray
    b: np.ndarray
    c: np.ndarray
    delta: float
    cert: Certificate | None = None

    def __post_init__(self):
        w = as_matrix(self.w, "W")
        b = as_matrix(self.b, "B")
        c = as_matrix(self.c, "C")
        n = w.shape[0]
        if w.shape != (n, n):
            raise DimensionMismatch(f"W must be square, got {w.shape}")
        if b.shape[0] != n:
            raise DimensionMismatch(f"B must have {n} rows, got {b.shape}")
        if c.shape[1] != n:
            raise DimensionMismatch(f"C must have {n} columns, got {c.shape}")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]

    @property
    def p(self) -> int:
        return self.c.shape[0]

    @property
    def a(self) -> np.ndarray:
        return np.eye(self.n) - self.w

    @property
    def slope(self) -> SlopeInterval:
        return SlopeInterval(self.delta, 1.0)


@dataclass(frozen=True, eq=False)
class GainResult:
    """Synthesized integral gain with its LMI witness (P, Q, Y)."""

    k: np.ndarray
    p: np.ndarray
    q: np.ndarray
    y: np.ndarray
    c_r: float
    margin: float


def assemble_gain_lmi(plant: PlantModel, p, q, y, c_r: float) -> np.ndarray:
    """Gain-design LMI block matrix of size (m + n).

    With A = I - W, Z = B^T Q ((1 - delta) I + 2 delta A) and
    R = 2 delta A^T Q A + (1 - delta)(Q A + A^T Q), returns
    [[2 c_r P - 2 delta B^T Q B, Z - Y C], [(Z - Y C)^T, -R]].
    Affine in (P, Q, Y) jointly.
    """
    m, n = plant.m, plant.n
    p = np.asarray(p, dtype=float)
    qv = np.asarray(q, dtype=float)
    y = np.asarray(y, dtype=float)
    if p.shape != (m, m):
        raise DimensionMismatch(f"P must be {m}x{m}, got {p.shape}")
    if qv.ndim != 1 or qv.size != n:
        raise DimensionMismatch(f"q must be a length-{n} vector, got {qv.shape}")
    if y.shape != (m, plant.p):
        raise DimensionMismatch(f"Y must be {m}x{plant.p}, got {y.shape}")
    delta = plant.delta
    a = plant.a
    qm = np.diag(qv)
    z = (plant.b.T @ qm) @ ((1.0 - delta) * np.eye(n) + (2.0 * delta) * a)
    r = (2.0 * delta) * ((a.T @ qm) @ a) + (1.0 - delta) * (qm @ a + a.T @ qm)
    tl = (2.0 * c_r) * p - (2.0 * delta) * ((plant.b.T @ qm) @ plant.b)
    tr = z - y @ plant.c
    return np.block([[tl, tr], [tr.T, -r]])


def gain_problem(plant: PlantModel, c_r: float) -> FeasibilityProblem:
    """Feasibility problem in (P, Q, Y) for the gain-design LMI."""
    m, n = plant.m, plant.n
    return FeasibilityProblem(
        variables=(
            VarSpec("P", "sym", m),
            VarSpec("Q", "diag", n),
            VarSpec("Y", "full", m, plant.p),
        ),
        assemble=lambda vals: assemble_gain_lmi(plant, vals["P"], vals["Q"], vals["Y"], c_r),
        normalized=("P", "Q"),
        target_trace=float(m + n),
    )


def _temper_gain(plant: PlantModel, p, q, y, c_r: float, margin: float):
    """Inflate P as far as the margin allows; K = P^{-1} Y shrinks alongside.

    The LMI depends on P only through the positive term 2 c_r P, so the
    largest eigenvalue is nondecreasing in the scale of P and bisection on
    the scale is exact. Keeps a quarter of the original margin as slack.
    """
    target = margin / 4.0
    lo, hi = 1.0, 1.0
    for _ in range(40):
        trial = float(eigvals_sym(assemble_gain_lmi(plant, (2.0 * hi) * p, q, y, c_r))[-1])
        if trial > target:
            break
        hi *= 2.0
    else:
        return p, margin
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        trial = float(eigvals_sym(assemble_gain_lmi(plant, mid * p, q, y, c_r))[-1])
        if trial <= target:
            lo = mid
        else:
            hi = mid
    scaled = lo * p
    return scaled, float(eigvals_sym(assemble_gain_lmi(plant, scaled, q, y, c_r))[-1])


def synthesize_gain(plant: PlantModel, c_r: float, opts: SolverOptions | None = None) -> GainResult:
    """Solve the gain-design LMI for (P, Q, Y) and return K = P^{-1} Y.

    The raw solver tends to shrink P, which inflates K; a post-step rescales
    P upward within the available margin so the returned gain is as small as
    the certificate allows. Raises FeasibilityNotFound when the solver
    reaches no feasible point; this is not a proof that no gain exists.
    """
    if c_r <= 0:
        raise ValueError(f"c_r must be positive, got {c_r}")
    opts = opts or SolverOptions()
    res = min_lambda_max(gain_problem(plant, c_r), opts)
    if res.status is FeasibilityStatus.NOT_FOUND:
        raise FeasibilityNotFound(
            f"no gain found for c_r = {c_r} (margin {res.margin:.3e})"
        )
    p = symmetrize(res.values["P"])
    q = res.values["Q"]
    y = res.values["Y"]
    if res.status is FeasibilityStatus.FEASIBLE:
        p, margin = _temper_gain(plant, p, q, y, c_r, res.margin)
    else:
        margin = res.margin
    evs = eigvals_sym(p)
    if evs[0] <= 1e-12 * max(1.0, evs[-1]):
        raise SingularP("synthesized P is numerically singular")
    k = np.linalg.solve(p, y)
    check = float(eigvals_sym(assemble_gain_lmi(plant, p, q, y, c_r))[-1])
    if abs(check - margin) > opts.strict_tol:
        raise NumericalFailure("gain LMI margin failed re-verification")
    return GainResult(k=k, p=p, q=q, y=y, c_r=c_r, margin=margin)


def dc_gain_check(plant: PlantModel, gain: GainResult) -> tuple[bool, float]:
    """Verify the DC-gain consequence of a synthesized gain.

    Returns (hurwitz, witness): ``hurwitz`` is True when every eigenvalue of
    -K C A^{-1} B has negative real part, and ``witness`` is the smallest
    eigenvalue of P G + G^T P - 2 c_r P for G = K C A^{-1} B, positive when
    the matrix inequality holds. A positive witness forces hurwitz.
    """
    a = plant.a
    if abs(np.linalg.det(a)) < 1e-12:
        raise SingularA("A = I - W is singular")
    g = gain.k @ plant.c @ np.linalg.solve(a, plant.b)
    lyap = gain.p @ g + g.T @ gain.p - (2.0 * gain.c_r) * gain.p
    witness = float(eigvals_sym(lyap)[0])
    hurwitz = bool(np.all(np.linalg.eigvals(-g).real < 0.0))
    if witness > 0.0 and not hurwitz:
        raise NumericalFailure("DC-gain inequality holds but -KCA^-1B is not Hurwitz")
    return hurwitz, witness


def max_feasible_cr(
    plant: PlantModel,
    hi: float = 2.0,
    bisect_tol: float = 1e-2,
    opts: SolverOptions | None = None,
) -> float:
    """Largest reduced-dynamics rate the solver can certify, by bisection."""
    opts = opts or SolverOptions()

    def feasible(c_r: float) -> bool:
        try:
            synthesize_gain(plant, c_r, opts)
            return True
        except FeasibilityNotFound:
            return False

    if feasible(hi):
        return hi
    lo = hi
    while lo > bisect_tol:
        lo *= 0.5
        if feasible(lo):
            break
    else:
        raise FeasibilityNotFound("no feasible c_r found above bisect_tol")
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo
