"""Small dense semidefinite feasibility search.

All certificate-search problems in this package are affine in the unknowns
once the weight matrix is fixed: find (P, Q) or (P, Q, Y) making an assembled
symmetric matrix negative semidefinite. The solver minimizes the largest
eigenvalue in epigraph form with a primal log-barrier Newton method on the
central path, under a trace normalization that fixes the homogeneity gauge.
It is a local method on a convex problem, so a failure to reach a negative
margin is reported as "not found", never as a proof of infeasibility;
successful candidates are always re-verified by an exact eigenvalue check on
the directly assembled matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from . import conditions
from .conditions import ConditionId, Rate
from .errors import DimensionMismatch, NumericalFailure
from .linalg import is_nsd

# Decision variables are kept this far inside the definite cone.
VAR_EPS = 1e-6

# Margins within this band of zero are classified as marginal rather than
# feasible, and solver/re-check margins must agree within it.
STRICT_TOL = 1e-7


class FeasibilityStatus(Enum):
    FEASIBLE = "feasible"
    MARGINAL = "marginal"
    NOT_FOUND = "not_found"


@dataclass(frozen=True)
class VarSpec:
    """One decision variable block: a symmetric, diagonal, or free matrix."""

    name: str
    kind: str  # "sym" | "diag" | "full"
    rows: int
    cols: int = 0

    def __post_init__(self):
        if self.kind not in ("sym", "diag", "full"):
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.kind == "full" and self.cols <= 0:
            raise ValueError("full variables need explicit cols")

    @property
    def size(self) -> int:
        if self.kind == "sym":
            return self.rows * (self.rows + 1) // 2
        if self.kind == "diag":
            return self.rows
        return self.rows * self.cols


@dataclass(frozen=True)
class FeasibilityProblem:
    """Affine map from packed decision variables to a symmetric matrix.

    ``assemble`` receives a dict of named arrays (symmetric blocks as full
    matrices, diagonal blocks as 1-D vectors) and must be affine in them.
    Variables listed in ``normalized`` have their traces pinned to
    ``target_trace`` in total, fixing the homogeneity gauge; definite blocks
    are kept at least ``eps`` inside the cone.
    """

    variables: tuple[VarSpec, ...]
    assemble: Callable[[dict[str, np.ndarray]], np.ndarray]
    normalized: tuple[str, ...]
    target_trace: float
    eps: float = VAR_EPS


@dataclass(frozen=True)
class SolverOptions:
    seed: int = 0
    restarts: int = 8
    strict_tol: float = STRICT_TOL
    # Stop early once the exact margin is at least this negative.
    stop_margin: float = -1e-4
    # Barrier parameters: multiplier of the path parameter per stage, target
    # duality-gap bound, and the Newton iteration cap per centering stage.
    barrier_mu: float = 10.0
    gap_tol: float = 1e-9
    max_newton: int = 40


@dataclass(frozen=True)
class FeasibilityResult:
    status: FeasibilityStatus
    values: dict[str, np.ndarray]
    margin: float

    @property
    def found(self) -> bool:
        return self.status is not FeasibilityStatus.NOT_FOUND


def _unpack(problem: FeasibilityProblem, theta: np.ndarray) -> dict[str, np.ndarray]:
    out = {}
    pos = 0
    for spec in problem.variables:
        chunk = theta[pos : pos + spec.size]
        pos += spec.size
        if spec.kind == "sym":
            n = spec.rows
            mat = np.zeros((n, n))
            iu = np.triu_indices(n)
            mat[iu] = chunk
            mat = mat + np.triu(mat, 1).T
            out[spec.name] = mat
        elif spec.kind == "diag":
            out[spec.name] = chunk.copy()
        else:
            out[spec.name] = chunk.reshape(spec.rows, spec.cols).copy()
    return out


def _pack(problem: FeasibilityProblem, values: dict[str, np.ndarray]) -> np.ndarray:
    parts = []
    for spec in problem.variables:
        val = np.asarray(values[spec.name], dtype=float)
        if spec.kind == "sym":
            iu = np.triu_indices(spec.rows)
            parts.append(val[iu])
        else:
            parts.append(val.ravel())
    return np.concatenate(parts)


def _basis(problem: FeasibilityProblem) -> tuple[np.ndarray, np.ndarray]:
    """Constant term L0 and stacked basis matrices of the affine map."""
    dim = sum(spec.size for spec in problem.variables)
    zero = _unpack(problem, np.zeros(dim))
    l0 = np.asarray(problem.assemble(zero), dtype=float)
    size = l0.shape[0]
    basis = np.empty((dim, size, size))
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = 1.0
        basis[k] = np.asarray(problem.assemble(_unpack(problem, e)), dtype=float) - l0
    return l0, basis


def _trace_coords(problem: FeasibilityProblem) -> np.ndarray:
    """0/1 mask of packed coordinates entering the trace normalization."""
    mask = np.zeros(sum(s.size for s in problem.variables))
    pos = 0
    for spec in problem.variables:
        if spec.name in problem.normalized:
            if spec.kind == "sym":
                iu_r, iu_c = np.triu_indices(spec.rows)
                mask[pos : pos + spec.size][iu_r == iu_c] = 1.0
            elif spec.kind == "diag":
                mask[pos : pos + spec.size] = 1.0
            else:
                raise ValueError("free variables cannot be trace-normalized")
        pos += spec.size
    return mask


@dataclass(frozen=True)
class _SymBlock:
    """Indexing of one eps-definite variable block inside the packed vector."""

    kind: str
    rows: int
    start: int
    size: int
    # For sym blocks: packed-coordinate basis matrices, shape (size, rows, rows).
    basis: np.ndarray | None = None


def _definite_blocks(problem: FeasibilityProblem) -> list[_SymBlock]:
    blocks = []
    pos = 0
    for spec in problem.variables:
        if spec.kind == "sym":
            bas = np.zeros((spec.size, spec.rows, spec.rows))
            iu = np.triu_indices(spec.rows)
            for k, (i, j) in enumerate(zip(*iu)):
                bas[k, i, j] = 1.0
                bas[k, j, i] = 1.0
            blocks.append(_SymBlock("sym", spec.rows, pos, spec.size, bas))
        elif spec.kind == "diag":
            blocks.append(_SymBlock("diag", spec.rows, pos, spec.size))
        pos += spec.size
    return blocks


def _sym_value(block: _SymBlock, theta: np.ndarray) -> np.ndarray:
    chunk = theta[block.start : block.start + block.size]
    return np.tensordot(chunk, block.basis, axes=1)


def _initial_values(problem, rng, first: bool) -> dict[str, np.ndarray]:
    """Neutral identity start first, then heavy-tailed anisotropic draws."""
    values = {}
    for spec in problem.variables:
        if spec.kind == "sym":
            if first:
                values[spec.name] = np.eye(spec.rows)
            else:
                g = rng.standard_normal((spec.rows, spec.rows))
                basis_q, _ = np.linalg.qr(g)
                spectrum = np.exp(rng.uniform(-2.0, 2.0, spec.rows))
                values[spec.name] = (basis_q * spectrum) @ basis_q.T
        elif spec.kind == "diag":
            if first:
                values[spec.name] = np.ones(spec.rows)
            else:
                values[spec.name] = np.exp(rng.uniform(-2.0, 2.0, spec.rows))
        else:
            if first:
                values[spec.name] = np.zeros((spec.rows, spec.cols))
            else:
                values[spec.name] = 0.1 * rng.standard_normal((spec.rows, spec.cols))
    return values


class _Barrier:
    """Log-barrier model of one feasibility problem in epigraph form.

    Decision vector z = (theta, s); objective t * s plus barriers
    -logdet(s I - L(theta)), -logdet(P - eps I) per symmetric block, and
    -sum log(q_i - eps) per diagonal block, with the trace plane handled as
    a linear equality in the Newton system.
    """

    def __init__(self, problem: FeasibilityProblem, l0, basis, mask):
        self.problem = problem
        self.l0 = l0
        self.basis = basis
        self.mask = mask
        self.dim = basis.shape[0]
        self.lmi_size = l0.shape[0]
        self.blocks = _definite_blocks(problem)
        self.eps = problem.eps
        # Total barrier degree bounds the duality gap by degree / t.
        self.degree = self.lmi_size + sum(b.rows for b in self.blocks)

    def lmi(self, theta: np.ndarray) -> np.ndarray:
        return self.l0 + np.tensordot(theta, self.basis, axes=1)

    def strictly_feasible(self, theta: np.ndarray, s: float) -> bool:
        m = s * np.eye(self.lmi_size) - self.lmi(theta)
        if not _chol_ok(m):
            return False
        for block in self.blocks:
            if block.kind == "sym":
                if not _chol_ok(_sym_value(block, theta) - self.eps * np.eye(block.rows)):
                    return False
            else:
                if np.any(theta[block.start : block.start + block.size] <= self.eps):
                    return False
        return True

    def value(self, theta: np.ndarray, s: float, t: float) -> float:
        m = s * np.eye(self.lmi_size) - self.lmi(theta)
        val = t * s - _logdet(m)
        for block in self.blocks:
            if block.kind == "sym":
                val -= _logdet(_sym_value(block, theta) - self.eps * np.eye(block.rows))
            else:
                chunk = theta[block.start : block.start + block.size]
                val -= float(np.sum(np.log(chunk - self.eps)))
        return val

    def derivatives(self, theta: np.ndarray, s: float, t: float):
        """Gradient and Hessian of the barrier objective in (theta, s)."""
        dim = self.dim
        grad = np.zeros(dim + 1)
        hess = np.zeros((dim + 1, dim + 1))
        m = s * np.eye(self.lmi_size) - self.lmi(theta)
        m_inv = np.linalg.inv(m)
        m_inv = 0.5 * (m_inv + m_inv.T)
        # -logdet(sI - L): d/dtheta_i (sI - L) = -basis_i, d/ds = I.
        x = np.einsum("ab,kbc->kac", m_inv, self.basis, optimize=True)
        grad[:dim] = np.einsum("kaa->k", x)
        grad[dim] = t - float(np.trace(m_inv))
        hess[:dim, :dim] = np.einsum("kab,lba->kl", x, x, optimize=True)
        m_inv2 = m_inv @ m_inv
        cross = -np.einsum("ab,kba->k", m_inv2, self.basis, optimize=True)
        hess[:dim, dim] = cross
        hess[dim, :dim] = cross
        hess[dim, dim] = float(np.trace(m_inv2))
        for block in self.blocks:
            sl = slice(block.start, block.start + block.size)
            if block.kind == "sym":
                pm = _sym_value(block, theta) - self.eps * np.eye(block.rows)
                pm_inv = np.linalg.inv(pm)
                pm_inv = 0.5 * (pm_inv + pm_inv.T)
                xb = np.einsum("ab,kbc->kac", pm_inv, block.basis, optimize=True)
                grad[sl] -= np.einsum("kaa->k", xb)
                hess[sl, sl] += np.einsum("kab,lba->kl", xb, xb, optimize=True)
            else:
                gap = theta[sl] - self.eps
                grad[sl] -= 1.0 / gap
                idx = np.arange(block.start, block.start + block.size)
                hess[idx, idx] += 1.0 / gap**2
        return grad, hess


def _chol_ok(m: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(m)
        return True
    except np.linalg.LinAlgError:
        return False


def _logdet(m: np.ndarray) -> float:
    sign, val = np.linalg.slogdet(m)
    if sign <= 0:
        raise NumericalFailure("barrier matrix left the cone")
    return float(val)


def _newton_step(bar: _Barrier, theta, s, t, a_vec):
    """One equality-constrained damped Newton step; returns updated point."""
    dim = bar.dim
    grad, hess = bar.derivatives(theta, s, t)
    # Regularize mildly; the barrier Hessian is positive definite on paper
    # but can be borderline once eigenvalues nearly touch the cone boundary.
    hess = hess + 1e-12 * np.eye(dim + 1) * max(1.0, float(np.abs(hess).max()))
    if a_vec is None:
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"Newton system singular: {exc}") from exc
        nu = None
    else:
        kkt = np.zeros((dim + 2, dim + 2))
        kkt[: dim + 1, : dim + 1] = hess
        kkt[: dim + 1, dim + 1] = a_vec
        kkt[dim + 1, : dim + 1] = a_vec
        rhs = np.concatenate([-grad, [0.0]])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"KKT system singular: {exc}") from exc
        step, nu = sol[: dim + 1], sol[dim + 1]
    decrement_sq = float(-grad @ step)
    base = bar.value(theta, s, t)
    alpha = 1.0
    d_theta, d_s = step[:dim], float(step[dim])
    slope = float(grad @ step)
    for _ in range(60):
        cand_theta = theta + alpha * d_theta
        cand_s = s + alpha * d_s
        if bar.strictly_feasible(cand_theta, cand_s):
            cand_val = bar.value(cand_theta, cand_s, t)
            if cand_val <= base + 1e-4 * alpha * slope:
                return cand_theta, cand_s, max(decrement_sq, 0.0)
        alpha *= 0.5
    return theta, s, 0.0


def min_lambda_max(problem: FeasibilityProblem, opts: SolverOptions | None = None) -> FeasibilityResult:
    """Approximately minimize lambda_max(L(theta)) over the constraint set.

    Deterministic for a fixed seed. The best candidate over all restarts is
    re-verified by assembling L(theta) directly and taking its exact largest
    eigenvalue; that exact value is the reported margin.
    """
    opts = opts or SolverOptions()
    l0, basis = _basis(problem)
    mask = _trace_coords(problem)
    bar = _Barrier(problem, l0, basis, mask)
    has_plane = bool(mask.any())
    a_vec = np.concatenate([mask, [0.0]]) if has_plane else None

    best_theta = None
    best_margin = np.inf
    for restart in range(max(1, opts.restarts)):
        rng = np.random.default_rng([opts.seed, restart])
        values = _initial_values(problem, rng, first=(restart == 0))
        theta = _pack(problem, values)
        if has_plane:
            total = float(mask @ theta)
            if total > 0:
                theta = theta * (problem.target_trace / total)
            shift = (problem.target_trace - float(mask @ theta)) / float(mask.sum())
            theta = theta + shift * mask
        # Lift diagonal/symmetric blocks into the strict interior if needed.
        for block in bar.blocks:
            sl = slice(block.start, block.start + block.size)
            if block.kind == "diag":
                theta[sl] = np.maximum(theta[sl], 2.0 * problem.eps)
        lam0 = float(np.linalg.eigvalsh(bar.lmi(theta))[-1])
        if lam0 < best_margin:
            best_margin, best_theta = lam0, theta.copy()
        spread = max(1.0, abs(lam0))
        s = lam0 + 0.1 * spread
        if not bar.strictly_feasible(theta, s):
            s = lam0 + spread
            if not bar.strictly_feasible(theta, s):
                continue
        t = max(bar.degree / spread, 1e-2)
        try:
            while True:
                for _ in range(opts.max_newton):
                    theta, s, dec_sq = _newton_step(bar, theta, s, t, a_vec)
                    lam = float(np.linalg.eigvalsh(bar.lmi(theta))[-1])
                    if lam < best_margin:
                        best_margin, best_theta = lam, theta.copy()
                    if dec_sq <= 1e-10:
                        break
                if best_margin <= opts.stop_margin:
                    break
                if bar.degree / t <= opts.gap_tol:
                    break
                t *= opts.barrier_mu
        except NumericalFailure:
            continue
        if best_margin <= opts.stop_margin:
            break

    if best_theta is None:
        raise NumericalFailure("solver produced no strictly feasible start")
    values = _unpack(problem, best_theta)
    exact = np.asarray(problem.assemble(values), dtype=float)
    _, margin = is_nsd(exact, tol=0.0)
    if margin <= -opts.strict_tol:
        status = FeasibilityStatus.FEASIBLE
    elif abs(margin) <= opts.strict_tol:
        status = FeasibilityStatus.MARGINAL
    else:
        status = FeasibilityStatus.NOT_FOUND
    return FeasibilityResult(status=status, values=values, margin=margin)


def certificate_problem(cond: ConditionId, w, rate: Rate) -> FeasibilityProblem:
    """Feasibility problem for one table cell with unknown (P, Q)."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionMismatch(f"W must be square, got {w.shape}")
    n = w.shape[0]
    return FeasibilityProblem(
        variables=(VarSpec("P", "sym", n), VarSpec("Q", "diag", n)),
        assemble=lambda vals: conditions.assemble(cond, w, vals["P"], vals["Q"], rate),
        normalized=("P", "Q"),
        target_trace=float(2 * n),
    )


def find_certificate(
    cond: ConditionId, w, rate: Rate, opts: SolverOptions | None = None
) -> FeasibilityResult:
    """Search for (P, Q) certifying one table cell at the given rate.

    Feasible and marginal results are re-verified through the direct table
    assembly; the reported margin is the re-verified one. A NOT_FOUND status
    makes no infeasibility claim.
    """
    opts = opts or SolverOptions()
    problem = certificate_problem(cond, w, rate)
    res = min_lambda_max(problem, opts)
    _, margin = conditions.check(cond, w, res.values["P"], res.values["Q"], rate, tol=0.0)
    if abs(margin - res.margin) > opts.strict_tol:
        raise NumericalFailure(
            f"solver margin {res.margin:.3e} disagrees with re-check {margin:.3e}"
        )
    if margin <= -opts.strict_tol:
        status = FeasibilityStatus.FEASIBLE
    elif abs(margin) <= opts.strict_tol:
        status = FeasibilityStatus.MARGINAL
    else:
        status = FeasibilityStatus.NOT_FOUND
    return FeasibilityResult(status=status, values=res.values, margin=margin)
