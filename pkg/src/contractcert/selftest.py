"""Built-in regression anchors runnable from the command line.

Each anchor exercises one analytically known fact: the skew counterexample,
the symmetric boundary-tight constructions, exact agreement between the two
LMI assembly routes, the structural transform chain, and the
parameterization round trip. Deterministic for a fixed seed.
"""

from __future__ import annotations

import numpy as np

from . import conditions, feasibility, parameterization, sampling, transforms
from .conditions import (
    ALL_CONDITIONS,
    Architecture,
    ConditionId,
    Nonlinearity,
    Rate,
    TimeDomain,
)
from .multipliers import LureSystem, assemble_lure_ct, assemble_lure_dt, m_cone, m_mone


def _lure_specialization(cond, w, p, q, rate):
    n = w.shape[0]
    eye = np.eye(n)
    mult = m_cone(q) if cond.nonlinearity is Nonlinearity.CONE else m_mone(q)
    if cond.architecture is Architecture.FIRING_RATE:
        b_mat, c_mat = eye, w
    else:
        b_mat, c_mat = w, eye
    if cond.time is TimeDomain.CONTINUOUS:
        sys = LureSystem(a=-eye, b=b_mat, c=c_mat)
        return assemble_lure_ct(sys, p, mult, rate.value, 1.0)
    sys = LureSystem(a=np.zeros((n, n)), b=b_mat, c=c_mat)
    return assemble_lure_dt(sys, p, mult, rate.value, 1.0)


def anchor_skew_vertices(rng: np.random.Generator, samples: int = 2000) -> dict:
    both = 0
    for _ in range(samples):
        p = sampling.random_spd(rng, 2)
        v1, v2 = transforms.skew_counterexample_vertices(p)
        if v1 and v2:
            both += 1
    return {"name": "skew_vertices_never_both_pd", "passed": both == 0, "detail": f"{both}/{samples} violations"}


def anchor_skew_not_found(seed: int, restarts: int = 4) -> dict:
    opts = feasibility.SolverOptions(seed=seed, restarts=restarts)
    res = feasibility.find_certificate(
        ConditionId(Architecture.FIRING_RATE, TimeDomain.CONTINUOUS, Nonlinearity.MONE),
        transforms.SKEW_W,
        Rate.ct(0.01),
        opts,
    )
    ok = res.status is feasibility.FeasibilityStatus.NOT_FOUND
    return {"name": "skew_certificate_not_found", "passed": ok, "detail": f"status {res.status.value}, margin {res.margin:.3e}"}


def anchor_symmetric_constructions(rng: np.random.Generator, samples: int = 20) -> dict:
    worst = 0.0
    for _ in range(samples):
        alpha = rng.uniform(0.15, 0.9)
        w = sampling.random_symmetric_with_alpha(rng, int(rng.integers(2, 8)), alpha)
        cert = transforms.symmetric_construction(w)
        worst = max(worst, abs(cert.margin))
    neg = transforms.symmetric_construction(np.diag([-1.0, -2.0]))
    ok = worst <= 1e-8 and abs(neg.margin) <= 1e-12 and neg.rate.value == 1.0
    return {"name": "symmetric_boundary_constructions", "passed": ok, "detail": f"worst |margin| {worst:.3e}"}


def anchor_table_lemma_agreement(rng: np.random.Generator, per_cell: int = 25) -> dict:
    mismatches = 0
    for cond in ALL_CONDITIONS:
        for _ in range(per_cell):
            n = int(rng.integers(1, 7))
            w = rng.standard_normal((n, n))
            p = sampling.random_spd(rng, n)
            q = sampling.random_diag_pos(rng, n)
            rate = (
                Rate.ct(rng.uniform(0.01, 1.0))
                if cond.time is TimeDomain.CONTINUOUS
                else Rate.dt(rng.uniform(0.0, 0.99))
            )
            direct = conditions.assemble(cond, w, p, q, rate)
            generic = _lure_specialization(cond, w, p, q, rate)
            if not np.array_equal(direct, generic):
                mismatches += 1
    return {"name": "table_matches_lure_specialization", "passed": mismatches == 0, "detail": f"{mismatches} mismatched assemblies"}


def anchor_transform_chain(rng: np.random.Generator, per_cell: int = 10) -> dict:
    failures = []
    for cond in ALL_CONDITIONS:
        for _ in range(per_cell):
            n = int(rng.integers(2, 7))
            cert = sampling.random_certificate(rng, cond, n)
            try:
                dual = transforms.dualize(cert)
                back = transforms.dualize(dual)
                if not (
                    np.allclose(back.p, cert.p, atol=1e-9 * max(1.0, float(np.abs(cert.p).max())))
                    and np.allclose(back.q, cert.q, rtol=1e-9)
                ):
                    failures.append(f"{cond}: involution drift")
                if cond.nonlinearity is Nonlinearity.CONE:
                    transforms.cone_to_mone(cert)
                if cond.time is TimeDomain.DISCRETE:
                    transforms.disc_to_cts(cert)
            except Exception as exc:  # noqa: BLE001 - report, never crash the suite
                failures.append(f"{cond}: {exc}")
    return {"name": "structural_transform_chain", "passed": not failures, "detail": "; ".join(failures[:3]) or "all transforms re-checked"}


def anchor_parameterization_roundtrip(rng: np.random.Generator, samples: int = 50) -> dict:
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(1, 9))
        c = float(rng.uniform(0.0, 0.9))
        seed = parameterization.random_seed(rng, n, c)
        w, p, q = parameterization.generate(seed)
        holds, margin = conditions.check(
            parameterization.FR_CT_MONE, w, p, q, Rate.ct(c), tol=1e-8
        )
        if not holds:
            return {"name": "parameterization_roundtrip", "passed": False, "detail": f"margin {margin:.3e}"}
        cert = conditions.make_certificate(parameterization.FR_CT_MONE, w, p, q, Rate.ct(c), tol=1e-8)
        back, _, _ = parameterization.generate(parameterization.invert(cert))
        worst = max(worst, float(np.max(np.abs(back - w))) / max(1.0, float(np.max(np.abs(w)))))
    return {"name": "parameterization_roundtrip", "passed": worst <= 1e-7, "detail": f"worst relative drift {worst:.3e}"}


def run_selftest(seed: int = 0) -> dict:
    """Run every anchor; returns the report body."""
    anchors = [
        anchor_skew_vertices(np.random.default_rng([seed, 1])),
        anchor_skew_not_found(seed),
        anchor_symmetric_constructions(np.random.default_rng([seed, 2])),
        anchor_table_lemma_agreement(np.random.default_rng([seed, 3])),
        anchor_transform_chain(np.random.default_rng([seed, 4])),
        anchor_parameterization_roundtrip(np.random.default_rng([seed, 5])),
    ]
    return {
        "anchors": anchors,
        "status": "pass" if all(a["passed"] for a in anchors) else "fail",
    }
