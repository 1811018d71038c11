"""Trajectory simulation, equilibrium solving, and empirical rate estimation.

Continuous dynamics integrate with fixed-step RK4 so traces are deterministic
and reproducible; discrete dynamics iterate the map exactly. The closed-loop
tracking experiment wraps a slow integral controller around a contracting
plant and reports the final tracking error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateTraces, DimensionMismatch, NoConvergence, NonFiniteState
from .integral_control import GainResult, PlantModel
from .linalg import symmetrize
from .multipliers import SlopeInterval

FR = "fr"
HOPFIELD = "hopfield"

TRACKING_TOL = 1e-3


@dataclass(frozen=True)
class Activation:
    """Elementwise activation with a declared slope interval.

    The declared interval is a true slope restriction for the function:
    tanh, relu and sigmoid lie in [0, 1], identity in [1, 1], and
    blend(delta)(s) = delta*s + (1-delta)*tanh(s) in [delta, 1].
    """

    kind: str
    slope: SlopeInterval
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.fn(x)

    @property
    def is_mone(self) -> bool:
        return SlopeInterval(0.0, 1.0).contains(self.slope)

    @property
    def is_cone(self) -> bool:
        return SlopeInterval(-1.0, 1.0).contains(self.slope)


def tanh_act() -> Activation:
    return Activation("tanh", SlopeInterval(0.0, 1.0), np.tanh)


def relu_act() -> Activation:
    return Activation("relu", SlopeInterval(0.0, 1.0), lambda x: np.maximum(x, 0.0))


def sigmoid_act() -> Activation:
    return Activation("sigmoid", SlopeInterval(0.0, 1.0), lambda x: 1.0 / (1.0 + np.exp(-x)))


def identity_act() -> Activation:
    return Activation("identity", SlopeInterval(1.0, 1.0), lambda x: x)


def blend_act(delta: float) -> Activation:
    """delta * x + (1 - delta) * tanh(x); keeps the slope bounded away from 0."""
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return Activation(
        "blend",
        SlopeInterval(delta, 1.0),
        lambda x: delta * x + (1.0 - delta) * np.tanh(x),
    )


def make_activation(kind: str, delta: float | None = None) -> Activation:
    table = {"tanh": tanh_act, "relu": relu_act, "sigmoid": sigmoid_act, "identity": identity_act}
    if kind == "blend":
        if delta is None:
            raise ValueError("blend activation needs delta")
        return blend_act(delta)
    if kind not in table:
        raise ValueError(f"unknown activation {kind!r}")
    return table[kind]()


@dataclass(frozen=True, eq=False)
class SimTrace:
    """A simulated trajectory on a uniform time grid."""

    times: np.ndarray
    states: np.ndarray
    inputs: np.ndarray | None = None
    outputs: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        """Render as CSV with header t, x1..xn, u1..um, y1..yp."""
        n = self.states.shape[1]
        cols = [self.times[:, None], self.states]
        header = ["t"] + [f"x{i + 1}" for i in range(n)]
        if self.inputs is not None:
            cols.append(self.inputs)
            header += [f"u{i + 1}" for i in range(self.inputs.shape[1])]
        if self.outputs is not None:
            cols.append(self.outputs)
            header += [f"y{i + 1}" for i in range(self.outputs.shape[1])]
        data = np.hstack(cols)
        lines = [",".join(header)]
        for row in data:
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _input_fn(u, m: int) -> Callable[[float], np.ndarray]:
    if u is None:
        const = np.zeros(m)
        return lambda t: const
    if callable(u):
        return lambda t: np.asarray(u(t), dtype=float)
    const = np.atleast_1d(np.asarray(u, dtype=float))
    if const.size != m:
        raise DimensionMismatch(f"input must have size {m}, got {const.size}")
    return lambda t: const


def _field(model: str, w, b, act: Activation):
    if model == FR:
        return lambda x, u: -x + act(w @ x + b @ u)
    if model == HOPFIELD:
        return lambda x, u: -x + w @ act(x) + b @ u
    raise ValueError(f"unknown model {model!r}")


def _readout(model: str, c_out, act: Activation, states: np.ndarray) -> np.ndarray | None:
    if c_out is None:
        return None
    if model == FR:
        return states @ np.asarray(c_out, dtype=float).T
    return act(states) @ np.asarray(c_out, dtype=float).T


def simulate_ct(
    model: str,
    w,
    b,
    act: Activation,
    u,
    x0,
    t_final: float,
    h: float = 1e-2,
    c_out=None,
    check_convergence: bool = False,
) -> SimTrace:
    """Integrate the continuous dynamics with fixed-step RK4.

    ``u`` may be None, a constant vector, or a callable of time. With
    ``check_convergence`` the integration is repeated at half step and the
    endpoint difference stored as metadata["richardson_error"].
    """
    w = np.asarray(w, dtype=float)
    b = np.asarray(b, dtype=float)
    if h <= 0 or t_final < h:
        raise ValueError("need h > 0 and t_final >= h")
    u_fn = _input_fn(u, b.shape[1])
    f = _field(model, w, b, act)

    def integrate(step: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        steps = int(round(t_final / step))
        times = step * np.arange(steps + 1)
        states = np.empty((steps + 1, w.shape[0]))
        inputs = np.empty((steps + 1, b.shape[1]))
        x = np.asarray(x0, dtype=float).copy()
        for k in range(steps + 1):
            t = times[k]
            uk = u_fn(t)
            states[k] = x
            inputs[k] = uk
            if k == steps:
                break
            k1 = f(x, uk)
            k2 = f(x + 0.5 * step * k1, u_fn(t + 0.5 * step))
            k3 = f(x + 0.5 * step * k2, u_fn(t + 0.5 * step))
            k4 = f(x + step * k3, u_fn(t + step))
            x = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise NonFiniteState(f"state diverged at t = {t + step:.6g}")
        return times, states, inputs

    times, states, inputs = integrate(h)
    meta = {"h": h, "method": "rk4", "model": model}
    if check_convergence:
        _, states_half, _ = integrate(h / 2.0)
        meta["richardson_error"] = float(np.max(np.abs(states_half[-1] - states[-1])))
    return SimTrace(
        times=times,
        states=states,
        inputs=inputs,
        outputs=_readout(model, c_out, act, states),
        metadata=meta,
    )


def simulate_dt(model: str, w, b, act: Activation, u, x0, steps: int, c_out=None) -> SimTrace:
    """Iterate the discrete map exactly for ``steps`` steps."""
    w = np.asarray(w, dtype=float)
    b = np.asarray(b, dtype=float)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    u_fn = _input_fn(u, b.shape[1])
    states = np.empty((steps + 1, w.shape[0]))
    inputs = np.empty((steps + 1, b.shape[1]))
    x = np.asarray(x0, dtype=float).copy()
    for k in range(steps + 1):
        uk = u_fn(float(k))
        states[k] = x
        inputs[k] = uk
        if k == steps:
            break
        if model == FR:
            x = act(w @ x + b @ uk)
        elif model == HOPFIELD:
            x = w @ act(x) + b @ uk
        else:
            raise ValueError(f"unknown model {model!r}")
        if not np.all(np.isfinite(x)):
            raise NonFiniteState(f"state diverged at step {k + 1}")
    return SimTrace(
        times=np.arange(steps + 1, dtype=float),
        states=states,
        inputs=inputs,
        outputs=_readout(model, c_out, act, states),
        metadata={"model": model, "method": "iteration"},
    )


def fixed_point(
    w,
    b,
    act: Activation,
    u,
    tol: float = 1e-10,
    damping: float = 0.5,
    max_iter: int = 100_000,
    x0=None,
) -> np.ndarray:
    """Solve x = act(W x + B u) by damped iteration.

    The iteration is the Euler flow of the contracting firing-rate dynamics,
    so it converges whenever a continuous-time certificate exists and the
    damping is small enough. Hitting the iteration cap raises NoConvergence,
    which usually signals a missing or invalid certificate.
    """
    w = np.asarray(w, dtype=float)
    b = np.asarray(b, dtype=float)
    u_vec = np.atleast_1d(np.asarray(u, dtype=float)) if not callable(u) else np.asarray(u(0.0))
    bu = b @ u_vec
    x = np.zeros(w.shape[0]) if x0 is None else np.asarray(x0, dtype=float).copy()
    for _ in range(max_iter):
        target = act(w @ x + bu)
        residual = float(np.max(np.abs(x - target)))
        if residual <= tol:
            return x
        x = (1.0 - damping) * x + damping * target
        if not np.all(np.isfinite(x)):
            raise NoConvergence("fixed-point iteration diverged")
    raise NoConvergence(f"no fixed point to tolerance {tol} within {max_iter} iterations")


def weighted_distance(xa: np.ndarray, xb: np.ndarray, p) -> np.ndarray:
    """Rowwise P-weighted distances between two state trajectories."""
    diff = xa - xb
    pm = symmetrize(p)
    return np.sqrt(np.maximum(np.einsum("ki,ij,kj->k", diff, pm, diff), 0.0))


def empirical_rate(trace_a: SimTrace, trace_b: SimTrace, p) -> float:
    """Least-squares decay rate of the P-weighted distance between two traces.

    Fits log ||xa(t) - xb(t)||_P over the window where the distance exceeds
    1e-12 and returns minus the slope.
    """
    if trace_a.times.shape != trace_b.times.shape or not np.array_equal(
        trace_a.times, trace_b.times
    ):
        raise DimensionMismatch("traces must share the same time grid")
    dist = weighted_distance(trace_a.states, trace_b.states, p)
    mask = dist > 1e-12
    if mask.sum() < 2:
        raise DegenerateTraces("traces coincide; no distance to fit")
    t = trace_a.times[mask]
    logd = np.log(dist[mask])
    slope = np.polyfit(t, logd, 1)[0]
    return float(-slope)


def track(
    plant: PlantModel,
    gain: GainResult,
    r,
    eps: float,
    x0=None,
    u0=None,
    t_final: float | None = None,
    h: float = 1e-2,
    act: Activation | None = None,
    tracking_tol: float = TRACKING_TOL,
) -> SimTrace:
    """Integrate the closed loop x' = -x + act(Wx + Bu), u' = eps K (r - Cx).

    The default horizon is 10 / (eps * c_r), the slow-timescale settling
    window. The returned trace stores states x, inputs u (the controller
    state) and outputs y = Cx; metadata reports the final sup-norm tracking
    error and whether it meets ``tracking_tol``.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    act = act or blend_act(plant.delta)
    r_vec = np.atleast_1d(np.asarray(r, dtype=float))
    if r_vec.size != plant.p:
        raise DimensionMismatch(f"reference must have size {plant.p}")
    if t_final is None:
        t_final = 10.0 / (eps * gain.c_r)
    steps = int(round(t_final / h))
    x = np.zeros(plant.n) if x0 is None else np.asarray(x0, dtype=float).copy()
    u = np.zeros(plant.m) if u0 is None else np.asarray(u0, dtype=float).copy()
    w, b, c, k = plant.w, plant.b, plant.c, gain.k

    def f(state):
        xs, us = state[: plant.n], state[plant.n :]
        dx = -xs + act(w @ xs + b @ us)
        du = eps * (k @ (r_vec - c @ xs))
        return np.concatenate([dx, du])

    state = np.concatenate([x, u])
    times = h * np.arange(steps + 1)
    states = np.empty((steps + 1, plant.n))
    inputs = np.empty((steps + 1, plant.m))
    for i in range(steps + 1):
        states[i] = state[: plant.n]
        inputs[i] = state[plant.n :]
        if i == steps:
            break
        k1 = f(state)
        k2 = f(state + 0.5 * h * k1)
        k3 = f(state + 0.5 * h * k2)
        k4 = f(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise NonFiniteState(f"closed loop diverged at t = {times[i + 1]:.6g}")
    outputs = states @ c.T
    final_error = float(np.max(np.abs(r_vec - outputs[-1])))
    return SimTrace(
        times=times,
        states=states,
        inputs=inputs,
        outputs=outputs,
        metadata={
            "h": h,
            "method": "rk4",
            "model": "closed_loop",
            "eps": eps,
            "final_error": final_error,
            "tracking_ok": final_error <= tracking_tol,
            "tracking_tol": tracking_tol,
        },
    )


def simulate_reduced(
    plant: PlantModel,
    gain: GainResult,
    r,
    u0,
    t_final: float,
    h: float = 1e-2,
    act: Activation | None = None,
    fp_tol: float = 1e-10,
) -> SimTrace:
    """Integrate the reduced dynamics u' = K (r - C x*(u)) directly.

    Each vector-field evaluation solves the plant equilibrium x*(u) by
    fixed-point iteration, warm-started from the previous solution.
    """
    act = act or blend_act(plant.delta)
    r_vec = np.atleast_1d(np.asarray(r, dtype=float))
    steps = int(round(t_final / h))
    u = np.asarray(u0, dtype=float).copy()
    warm = {"x": np.zeros(plant.n)}

    def f(uv):
        xs = fixed_point(plant.w, plant.b, act, uv, tol=fp_tol, x0=warm["x"])
        warm["x"] = xs
        return gain.k @ (r_vec - plant.c @ xs)

    times = h * np.arange(steps + 1)
    states = np.empty((steps + 1, plant.m))
    outputs = np.empty((steps + 1, plant.p))
    for i in range(steps + 1):
        states[i] = u
        outputs[i] = plant.c @ fixed_point(plant.w, plant.b, act, u, tol=fp_tol, x0=warm["x"])
        if i == steps:
            break
        k1 = f(u)
        k2 = f(u + 0.5 * h * k1)
        k3 = f(u + 0.5 * h * k2)
        k4 = f(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise NonFiniteState(f"reduced dynamics diverged at t = {times[i + 1]:.6g}")
    return SimTrace(
        times=times,
        states=states,
        outputs=outputs,
        metadata={"h": h, "method": "rk4", "model": "reduced"},
    )
