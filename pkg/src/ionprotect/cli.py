"""Command-line entry point.

Subcommands: run, steady, design (all take scenario files) and verify (the
randomized invariant audit).  Exit codes: 0 success, 2 validation failure,
3 numerical failure, 4 I/O failure.
"""

import argparse
import json
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import errors
from .hilbert import FockSpace, Operator
from .liouvillian import (
    DensityMatrix,
    Generator,
    LindbladChannel,
    apply_generator,
    propagate,
)
from .scenario import design_report, parse_scenario, run_scenario, steady_report

_NUMERICAL_ERRORS = (
    errors.IntegratorFailure,
    errors.PositivityViolation,
    errors.SingularSystem,
    errors.TruncationError,
    errors.ZeroAmplitude,
    errors.BadHProfile,
    errors.FirstZeroViolation,
    errors.InconsistentScale,
    errors.QuadratureNotConverged,
    errors.SizeGuardExceeded,
    errors.NegativeRate,
    errors.DimensionMismatch,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _load(path: str, truncation_override):
    text = Path(path).read_text(encoding="utf-8")
    sc = parse_scenario(text, default_name=Path(path).stem)
    if truncation_override is not None:
        sc.truncation = truncation_override
    return sc


def _say(quiet, *parts):
    if not quiet:
        print(*parts)


def _cmd_run(args) -> int:
    for path in args.scenario:
        sc = _load(path, args.truncation_override)
        report = run_scenario(sc, args.out_dir)
        _say(args.quiet, f"[{sc.name}] steady fidelity {report.steady_state['fidelity']:.6f}  "
                         f"gap {report.gap['MHz']:.6g} MHz  "
                         f"out {Path(args.out_dir) / sc.name}")
    return EXIT_OK


def _cmd_steady(args) -> int:
    for path in args.scenario:
        sc = _load(path, args.truncation_override)
        rep = steady_report(sc)
        _say(args.quiet, json.dumps(rep, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_design(args) -> int:
    for path in args.scenario:
        sc = _load(path, args.truncation_override)
        rep = design_report(sc)
        if args.quiet:
            continue
        eng = rep["engineered"]
        if eng is None:
            print(f"[{rep['name']}] environment-only scenario, nothing to design")
            continue
        print(f"[{rep['name']}] gamma_eng = {eng['gamma_eng_MHz'] * 1e3:.6g} kHz, "
              f"dark residual = {eng['dark_residual']:.3e}, "
              f"null dim = {eng['null_dim']}")
        for dr in eng["drives"]:
            rabi = complex(dr['rabi_MHz'][0], dr['rabi_MHz'][1])
            print(f"  {dr['label']:<22} sideband {dr['sideband_k']:+d}  "
                  f"eta {dr['eta']:.3f}  Rabi {rabi:.6g} MHz")
    return EXIT_OK


def _random_generator(rng, space, n_channels):
    channels = []
    for _ in range(n_channels):
        mat = rng.standard_normal((space.dim, space.dim)) \
            + 1j * rng.standard_normal((space.dim, space.dim))
        channels.append(LindbladChannel(rng.uniform(0.1, 2.0), Operator(space, mat)))
    return Generator(channels, space=space)


def _random_density(rng, space):
    mat = rng.standard_normal((space.dim, space.dim)) \
        + 1j * rng.standard_normal((space.dim, space.dim))
    mat = mat @ mat.conj().T
    return DensityMatrix(space, mat / np.trace(mat).real, validate=False)


def run_verification(instances: int = 100, dim: int = 6, seed: int = 7,
                     quiet: bool = False) -> bool:
    """Randomized invariant audit: trace, Hermiticity, positivity, determinism."""
    rng = np.random.default_rng(seed)
    space = FockSpace(dim)
    ok = True

    worst_trace = 0.0
    worst_herm = 0.0
    for _ in range(instances):
        gen = _random_generator(rng, space, int(rng.integers(1, 4)))
        rho = _random_density(rng, space)
        deriv = apply_generator(gen, rho)
        worst_trace = max(worst_trace, abs(np.trace(deriv)))
        worst_herm = max(worst_herm, float(np.abs(deriv - deriv.conj().T).max()))
    checks = [
        ("trace preservation", worst_trace <= 1e-10, f"max |Tr drho| = {worst_trace:.2e}"),
        ("hermiticity preservation", worst_herm <= 1e-12, f"max defect = {worst_herm:.2e}"),
    ]

    worst_drift = 0.0
    worst_neg = 0.0
    for _ in range(5):
        gen = _random_generator(rng, space, 2)
        rho = _random_density(rng, space)
        traj = propagate(gen, rho, np.linspace(0.0, 1.0, 9))
        worst_drift = max(worst_drift, max(abs(dm.trace() - 1.0) for dm in traj))
        worst_neg = min(worst_neg, min(dm.min_eigenvalue() for dm in traj))
    checks.append(("propagation trace drift", worst_drift <= 1e-7,
                   f"max drift = {worst_drift:.2e}"))
    checks.append(("propagation positivity floor", worst_neg >= -1e-6,
                   f"min eigenvalue = {worst_neg:.2e}"))

    doc = json.dumps({"name": "determinism-audit",
                      "target": {"kind": "qubit", "amplitudes": [1, 1]},
                      "model": "reduced", "truncation": 8,
                      "grid": {"t_max": 50.0, "points": 12}})
    payloads = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as tmp:
            rep = run_scenario(parse_scenario(doc), tmp)
            payloads.append(Path(rep.timeseries_path).read_bytes())
    checks.append(("determinism (byte-identical rerun)", payloads[0] == payloads[1], ""))

    for label, passed, detail in checks:
        ok &= passed
        if not quiet:
            print(f"{'PASS' if passed else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
    return ok


def _cmd_verify(args) -> int:
    ok = run_verification(instances=args.instances, quiet=args.quiet)
    return EXIT_OK if ok else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ionprotect",
                                description="Engineered-reservoir protection of "
                                            "trapped-ion motional states")
    p.add_argument("--out-dir", default="runs", help="artifact directory (default: runs)")
    p.add_argument("--truncation-override", type=int, default=None,
                   help="override the scenario's Fock-space dimension")
    p.add_argument("--quiet", action="store_true", help="suppress console summaries")
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="design, simulate, and emit artifacts")
    run_p.add_argument("scenario", nargs="+")
    run_p.set_defaults(func=_cmd_run)

    steady_p = sub.add_parser("steady", help="steady-state analysis only")
    steady_p.add_argument("scenario", nargs="+")
    steady_p.set_defaults(func=_cmd_steady)

    design_p = sub.add_parser("design", help="inverse design only, print drive table")
    design_p.add_argument("scenario", nargs="+")
    design_p.set_defaults(func=_cmd_design)

    verify_p = sub.add_parser("verify", help="run the randomized invariant audit")
    verify_p.add_argument("--instances", type=int, default=100)
    verify_p.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (errors.ParseError, errors.ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
