"""Seeded random generators for certificates, weights, and plants.

Each of the eight condition cells has a direct construction that produces a
strictly feasible random certificate; every returned object is re-verified
through the table check, so a sampler bug cannot silently leak invalid test
fixtures. All draws go through a caller-supplied Generator, keeping suites
reproducible.
"""

from __future__ import annotations

import numpy as np

from .conditions import (
    Architecture,
    Certificate,
    ConditionId,
    Nonlinearity,
    Rate,
    TimeDomain,
    make_certificate,
)
from .integral_control import PlantModel
from .linalg import spd_inv
from .parameterization import generate, random_seed, seed_from_raw

FR = Architecture.FIRING_RATE
HOP = Architecture.HOPFIELD
CT = TimeDomain.CONTINUOUS
DT = TimeDomain.DISCRETE
CONE = Nonlinearity.CONE
MONE = Nonlinearity.MONE


def random_diag_pos(rng: np.random.Generator, n: int, spread: float = 1.0) -> np.ndarray:
    return np.exp(rng.uniform(-spread, spread, n))


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n))
    return g @ g.T / n + 0.3 * np.eye(n)


def scaled_gaussian(rng: np.random.Generator, rows: int, cols: int, norm: float) -> np.ndarray:
    g = rng.standard_normal((rows, cols))
    top = float(np.linalg.norm(g, 2))
    return g * (norm / top) if top > 0 else g


def random_symmetric_with_alpha(rng: np.random.Generator, n: int, alpha: float) -> np.ndarray:
    """Random symmetric matrix whose largest eigenvalue is exactly ``alpha``.

    The remaining spectrum stays clear of zero so the implied log-optimal
    witness is well conditioned.
    """
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    evs = np.empty(n)
    evs[0] = alpha
    for i in range(1, n):
        if alpha > 0 and rng.uniform() < 0.5:
            evs[i] = rng.uniform(0.5 * alpha, alpha)
        else:
            evs[i] = rng.uniform(-2.0, -0.05)
    return (q * evs) @ q.T


def _conjugate(q: np.ndarray, m0: np.ndarray) -> np.ndarray:
    """W = Q^(-1/2) M0 Q^(1/2) for diagonal q, so Q^(1/2) W Q^(-1/2) = M0."""
    root = np.sqrt(q)
    return (m0 * root[None, :]) / root[:, None]


def random_certificate(rng: np.random.Generator, cond: ConditionId, n: int) -> Certificate:
    """Strictly feasible random certificate for one condition cell."""
    s = rng.uniform(0.3, 0.9)
    if cond.time is DT:
        rho = rng.uniform(0.3, 0.9)
        rate = Rate.dt(rho)
        q = random_diag_pos(rng, n)
        if cond == ConditionId(FR, DT, CONE):
            gamma = rng.uniform(0.3, 0.95)
            w = _conjugate(q, scaled_gaussian(rng, n, n, rho * np.sqrt(gamma) * s))
            p = gamma * np.diag(q)
        elif cond == ConditionId(HOP, DT, CONE):
            p = random_spd(rng, n)
            ev = np.linalg.eigvalsh(p)
            q = rho * rho * 0.9 * ev[0] * rng.uniform(0.5, 1.0, n)
            w = scaled_gaussian(rng, n, n, s * np.sqrt(q.min() / ev[-1]))
        elif cond == ConditionId(FR, DT, MONE):
            gamma = rng.uniform(0.4, 1.6)
            bound = rho * np.sqrt(gamma * (2.0 - gamma)) * s
            w = _conjugate(q, scaled_gaussian(rng, n, n, bound))
            p = gamma * np.diag(q)
        else:  # HOP/DT/MONE
            gamma = rng.uniform(0.4, 1.6)
            bound = rho * np.sqrt(gamma * (2.0 - gamma)) * s
            w = _conjugate(q, scaled_gaussian(rng, n, n, bound))
            p = np.diag(q) / (rho * rho * gamma)
        return make_certificate(cond, w, p, q, rate)

    c = rng.uniform(0.05, 0.9)
    rate = Rate.ct(c)
    if cond == ConditionId(FR, CT, MONE):
        seed = seed_from_raw(
            0.4 * rng.standard_normal(n),
            0.6 * rng.standard_normal((n, n)),
            rng.standard_normal((n, n)) / np.sqrt(n),
            c,
        )
        w, p, q = generate(seed)
        return make_certificate(cond, w, p, q, rate)
    if cond == ConditionId(HOP, CT, MONE):
        seed = seed_from_raw(
            0.4 * rng.standard_normal(n),
            0.6 * rng.standard_normal((n, n)),
            rng.standard_normal((n, n)) / np.sqrt(n),
            c,
        )
        w, p, q = generate(seed)
        return make_certificate(cond, w.T, spd_inv(p), 1.0 / q, rate)
    q = random_diag_pos(rng, n)
    if cond == ConditionId(FR, CT, CONE):
        gamma = rng.uniform(0.4, 1.6)
        bound = (1.0 - c) * np.sqrt(gamma * (2.0 - gamma)) * s
        w = _conjugate(q, scaled_gaussian(rng, n, n, bound))
        p = gamma * (1.0 - c) * np.diag(q)
    else:  # HOP/CT/CONE
        beta0 = rng.uniform(0.7, 1.4)
        bound = (1.0 - c) * np.sqrt(2.0 * beta0 - 1.0) / beta0 * s
        w = _conjugate(q, scaled_gaussian(rng, n, n, bound))
        p = (beta0 / (1.0 - c)) * np.diag(q)
    return make_certificate(cond, w, p, q, rate)


def random_schur_stable(rng: np.random.Generator, n: int, rho: float) -> np.ndarray:
    """Random W that is Schur diagonally stable with factor below ``rho``."""
    q = random_diag_pos(rng, n)
    return _conjugate(q, scaled_gaussian(rng, n, n, rho * rng.uniform(0.3, 0.9)))


def random_contracting_plant(
    rng: np.random.Generator,
    n: int,
    m: int,
    p_out: int,
    delta: float,
    c: float = 0.4,
    min_dc_sv: float = 0.2,
    collocated_mix: float = 0.3,
    require_gain_cr: float | None = None,
) -> PlantModel:
    """Random contracting plant with a well-conditioned DC path C A^{-1} B.

    The weight matrix comes from the exact parameterization with moderate
    scales so the plant is comfortably simulable. The output map is a
    collocated C = B^T perturbed by ``collocated_mix`` of a random matrix;
    the gain-design condition is sufficient only, and collocation keeps
    randomly drawn plants inside its feasible class. With
    ``require_gain_cr`` set, draws are additionally rejected until the gain
    LMI at that rate is feasible, so the plant is certified controllable by
    construction.
    """
    from .feasibility import SolverOptions, min_lambda_max
    from .integral_control import gain_problem

    if p_out != m and collocated_mix > 0:
        raise ValueError("collocated sampling needs p_out == m")
    for _ in range(200):
        seed = seed_from_raw(
            0.2 * rng.standard_normal(n),
            0.5 * rng.standard_normal((n, n)),
            0.6 * rng.standard_normal((n, n)) / np.sqrt(n),
            c,
        )
        w, p, q = generate(seed)
        if np.linalg.norm(w, 2) > 1.6:
            continue
        b = rng.standard_normal((n, m)) / np.sqrt(n)
        c_out = b.T + collocated_mix * rng.standard_normal((p_out, n)) / np.sqrt(n)
        a = np.eye(n) - w
        dc = c_out @ np.linalg.solve(a, b)
        if float(np.linalg.svd(dc, compute_uv=False)[-1]) < min_dc_sv:
            continue
        cert = make_certificate(ConditionId(FR, CT, MONE), w, p, q, Rate.ct(c))
        plant = PlantModel(w=w, b=b, c=c_out, delta=delta, cert=cert)
        if require_gain_cr is not None:
            probe = min_lambda_max(
                gain_problem(plant, require_gain_cr),
                SolverOptions(seed=int(rng.integers(2**31)), restarts=2),
            )
            if probe.margin > -1e-6:
                continue
        return plant
    raise RuntimeError("plant sampler failed to find a well-conditioned draw")
