"""Command-line front end.

One command is one process: parse inputs, run the library, render one JSON
report (stdout or --out) plus optional CSV traces, and exit with
0 = certified / succeeded, 2 = domain-level negative (nothing found, no
convergence, diverged), 1 = usage or IO error. Reports carry input hashes,
the RNG seed, and the package version; rerunning with identical inputs and
seed reproduces the report byte for byte.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, selftest
from .conditions import (
    Architecture,
    Certificate,
    ConditionId,
    Nonlinearity,
    Rate,
    TimeDomain,
    check,
    make_certificate,
)
from .errors import (
    ContractivityError,
    FeasibilityNotFound,
    InvalidRate,
    NoConvergence,
    NonFiniteState,
    ReCheckFailed,
    SlopeBoundViolated,
)
from .feasibility import FeasibilityStatus, SolverOptions, find_certificate
from .integral_control import dc_gain_check, synthesize_gain
from .parameterization import generate, invert, random_seed
from .serialization import (
    certificate_from_json,
    certificate_to_json,
    diag_from_json,
    diag_to_json,
    gain_from_json,
    gain_to_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    plant_from_json,
    render_report,
    seed_to_json,
    sha256_file,
    write_atomic,
)
from .simulate import make_activation, simulate_ct, simulate_dt, track
from .transforms import cone_to_mone, disc_to_cts, dualize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NEGATIVE = 2

DOMAIN_NEGATIVE = (
    FeasibilityNotFound,
    NoConvergence,
    NonFiniteState,
    ReCheckFailed,
    SlopeBoundViolated,
)


def _default_tol() -> float | None:
    raw = os.environ.get("CONTRACTION_CERT_TOL")
    return float(raw) if raw else None


def _input_entry(path: str) -> dict:
    return {"path": path, "sha256": sha256_file(path)}


def _emit(report: dict, out: str | None):
    text = render_report(report)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _parse_condition(args) -> ConditionId:
    return ConditionId(
        Architecture(args.cond.upper()),
        TimeDomain(args.time.upper()),
        Nonlinearity(args.nl.upper()),
    )


def _parse_rate(cond: ConditionId, value: float) -> Rate:
    if cond.time is TimeDomain.CONTINUOUS:
        if value <= 0:
            raise InvalidRate(f"continuous rate must be positive, got {value}")
        return Rate.ct(value)
    return Rate.dt(value)


def cmd_certify(args) -> tuple[dict, int]:
    cond = _parse_condition(args)
    rate = _parse_rate(cond, args.rate)
    w = matrix_from_json(load_json(args.W), "W")
    tol = args.tol if args.tol is not None else _default_tol()
    report = {
        "command": "certify",
        "version": __version__,
        "seed": args.seed,
        "condition": str(cond),
        "rate": {"kind": rate.kind.value, "value": rate.value},
        "inputs": {"W": _input_entry(args.W)},
    }
    if (args.P is None) != (args.Q is None):
        raise ValueError("provide both --P and --Q or neither")
    if args.P is not None:
        p = matrix_from_json(load_json(args.P), "P")
        q = diag_from_json(load_json(args.Q), "Q")
        report["inputs"]["P"] = _input_entry(args.P)
        report["inputs"]["Q"] = _input_entry(args.Q)
        holds, margin = check(cond, w, p, q, rate, tol)
        report["status"] = "certified" if holds else "not_certified"
        report["margin"] = margin
        return report, EXIT_OK if holds else EXIT_NEGATIVE
    opts = SolverOptions(seed=args.seed, restarts=args.restarts)
    res = find_certificate(cond, w, rate, opts)
    report["status"] = res.status.value
    report["margin"] = res.margin
    if res.status is not FeasibilityStatus.NOT_FOUND:
        report["certificate"] = {
            "P": matrix_to_json(res.values["P"]),
            "Q": diag_to_json(res.values["Q"]),
        }
    code = EXIT_OK if res.status is FeasibilityStatus.FEASIBLE else EXIT_NEGATIVE
    return report, code


def cmd_param_gen(args) -> tuple[dict, int]:
    if not 0.0 <= args.c <= 1.0:
        raise InvalidRate(f"c must lie in [0, 1], got {args.c}")
    rng = np.random.default_rng(args.seed)
    seed = random_seed(rng, args.n, args.c)
    w, p, q = generate(seed)
    holds, margin = check(
        ConditionId(Architecture.FIRING_RATE, TimeDomain.CONTINUOUS, Nonlinearity.MONE),
        w, p, q, Rate.ct(args.c), tol=1e-8,
    )
    report = {
        "command": "param_gen",
        "version": __version__,
        "seed": args.seed,
        "condition": "FR/CT/MONE",
        "rate": {"kind": "ct_rate", "value": args.c},
        "inputs": {"n": args.n},
        "status": "certified" if holds else "generation_failed",
        "margin": margin,
        "W": matrix_to_json(w),
        "certificate": {"P": matrix_to_json(p), "Q": diag_to_json(q)},
        "param_seed": seed_to_json(seed),
    }
    return report, EXIT_OK if holds else EXIT_NEGATIVE


def cmd_param_invert(args) -> tuple[dict, int]:
    cert = certificate_from_json(load_json(args.cert))
    report = {
        "command": "param_invert",
        "version": __version__,
        "seed": args.seed,
        "condition": str(cert.cond),
        "inputs": {"cert": _input_entry(args.cert)},
    }
    seed = invert(cert)
    back, _, _ = generate(seed)
    report["status"] = "inverted"
    report["param_seed"] = seed_to_json(seed)
    report["reconstruction_error"] = float(np.max(np.abs(back - cert.w)))
    return report, EXIT_OK


def cmd_transform(args) -> tuple[dict, int]:
    cert = certificate_from_json(load_json(args.cert))
    ops = {"dual": dualize, "cone2mone": cone_to_mone, "disc2cts": disc_to_cts}
    out_cert = ops[args.kind](cert)
    report = {
        "command": f"transform_{args.kind}",
        "version": __version__,
        "seed": args.seed,
        "condition": str(out_cert.cond),
        "rate": {"kind": out_cert.rate.kind.value, "value": out_cert.rate.value},
        "inputs": {"cert": _input_entry(args.cert)},
        "status": "transformed",
        "margin": out_cert.margin,
        "certificate": certificate_to_json(out_cert),
    }
    return report, EXIT_OK


def cmd_synth(args) -> tuple[dict, int]:
    plant = plant_from_json(load_json(args.plant))
    opts = SolverOptions(seed=args.seed, restarts=args.restarts)
    gain = synthesize_gain(plant, args.cr, opts)
    hurwitz, witness = dc_gain_check(plant, gain)
    report = {
        "command": "synth",
        "version": __version__,
        "seed": args.seed,
        "inputs": {"plant": _input_entry(args.plant)},
        "status": "synthesized",
        "margin": gain.margin,
        "gain": gain_to_json(gain),
        "diagnostics": {"dc_gain_hurwitz": hurwitz, "dc_gain_witness": witness},
    }
    return report, EXIT_OK


def cmd_simulate(args) -> tuple[dict, int]:
    model_spec = load_json(args.model)
    kind = model_spec.get("model", "fr")
    w = matrix_from_json(model_spec["W"], "W")
    b = matrix_from_json(model_spec["B"], "B")
    c_out = matrix_from_json(model_spec["C"], "C") if "C" in model_spec else None
    act_spec = model_spec.get("activation", {"kind": "tanh"})
    act = make_activation(act_spec["kind"], act_spec.get("delta"))
    u = None
    inputs_meta = {"model": _input_entry(args.model)}
    if args.input:
        input_spec = load_json(args.input)
        u = np.asarray(input_spec["const"], dtype=float)
        inputs_meta["input"] = _input_entry(args.input)
    x0 = np.zeros(w.shape[0]) if args.x0 is None else np.asarray(load_json(args.x0), dtype=float)
    if args.time.upper() == "CT":
        trace = simulate_ct(kind, w, b, act, u, x0, args.T, args.h, c_out=c_out)
    else:
        trace = simulate_dt(kind, w, b, act, u, x0, int(args.steps), c_out=c_out)
    if args.trace_out:
        write_atomic(args.trace_out, trace.to_csv())
    report = {
        "command": "simulate",
        "version": __version__,
        "seed": args.seed,
        "inputs": inputs_meta,
        "status": "simulated",
        "diagnostics": {
            "steps": int(trace.times.size - 1),
            "final_state_sup": float(np.max(np.abs(trace.states[-1]))),
        },
    }
    return report, EXIT_OK


def cmd_track(args) -> tuple[dict, int]:
    plant = plant_from_json(load_json(args.plant))
    gain = gain_from_json(load_json(args.gain))
    r = np.asarray([float(v) for v in args.ref.split(",")], dtype=float)
    trace = track(plant, gain, r, args.eps, t_final=args.T, h=args.h)
    if args.trace_out:
        write_atomic(args.trace_out, trace.to_csv())
    report = {
        "command": "track",
        "version": __version__,
        "seed": args.seed,
        "inputs": {"plant": _input_entry(args.plant), "gain": _input_entry(args.gain)},
        "status": "tracked" if trace.metadata["tracking_ok"] else "error_plateau",
        "diagnostics": {
            "final_error": trace.metadata["final_error"],
            "tracking_ok": trace.metadata["tracking_ok"],
            "tracking_tol": trace.metadata["tracking_tol"],
            "horizon": float(trace.times[-1]),
        },
    }
    return report, EXIT_OK


def cmd_selftest(args) -> tuple[dict, int]:
    body = selftest.run_selftest(args.seed)
    report = {
        "command": "selftest",
        "version": __version__,
        "seed": args.seed,
        "inputs": {},
        **body,
    }
    for anchor in body["anchors"]:
        sys.stderr.write(
            f"{'PASS' if anchor['passed'] else 'FAIL'}  {anchor['name']}: {anchor['detail']}\n"
        )
    return report, EXIT_OK if body["status"] == "pass" else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contractcert",
        description="Certify, construct, and exploit contractivity of firing-rate and Hopfield networks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("certify", help="check or search a contraction certificate")
    p.add_argument("--cond", required=True, choices=["FR", "HOP", "fr", "hop"])
    p.add_argument("--time", required=True, choices=["CT", "DT", "ct", "dt"])
    p.add_argument("--nl", required=True, choices=["CONE", "MONE", "cone", "mone"])
    p.add_argument("--W", required=True, help="weight matrix JSON file")
    p.add_argument("--P", help="metric matrix JSON file (with --Q: direct check)")
    p.add_argument("--Q", help="diagonal multiplier JSON file")
    p.add_argument("--rate", required=True, type=float)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--restarts", type=int, default=8)
    common(p)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("param", help="generate or invert parameterized weights")
    psub = p.add_subparsers(dest="param_command", required=True)
    g = psub.add_parser("gen", help="draw a random contracting weight matrix")
    g.add_argument("--n", required=True, type=int)
    g.add_argument("--c", required=True, type=float)
    common(g)
    g.set_defaults(fn=cmd_param_gen)
    iv = psub.add_parser("invert", help="recover free variables from a certificate")
    iv.add_argument("--cert", required=True)
    common(iv)
    iv.set_defaults(fn=cmd_param_invert)

    p = sub.add_parser("transform", help="apply a structural transform to a certificate")
    p.add_argument("kind", choices=["dual", "cone2mone", "disc2cts"])
    p.add_argument("--cert", required=True)
    common(p)
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("synth", help="synthesize a low-gain integral control gain")
    p.add_argument("--plant", required=True)
    p.add_argument("--cr", required=True, type=float)
    p.add_argument("--restarts", type=int, default=8)
    common(p)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("simulate", help="simulate network dynamics")
    p.add_argument("--model", required=True)
    p.add_argument("--input", help="JSON file with a constant input vector")
    p.add_argument("--x0", help="JSON file with the initial state")
    p.add_argument("--time", default="CT", choices=["CT", "DT", "ct", "dt"])
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--h", type=float, default=1e-2)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--trace-out", help="write the trajectory CSV here")
    common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("track", help="closed-loop reference tracking")
    p.add_argument("--plant", required=True)
    p.add_argument("--gain", required=True)
    p.add_argument("--ref", required=True, help="comma-separated reference values")
    p.add_argument("--eps", required=True, type=float)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--h", type=float, default=1e-2)
    p.add_argument("--trace-out", help="write the trajectory CSV here")
    common(p)
    p.set_defaults(fn=cmd_track)

    p = sub.add_parser("selftest", help="run the built-in regression anchors")
    common(p)
    p.set_defaults(fn=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        report, code = args.fn(args)
    except DOMAIN_NEGATIVE as exc:
        _emit(
            {
                "command": args.command,
                "version": __version__,
                "seed": getattr(args, "seed", 0),
                "status": "error",
                "error": {"type": type(exc).__name__, "message": str(exc)},
            },
            getattr(args, "out", None),
        )
        return EXIT_NEGATIVE
    except (ContractivityError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE
    _emit(report, args.out)
    return code


def script_main():  # console entry point
    raise SystemExit(main())
