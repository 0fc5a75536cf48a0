"""Command-line front end.

Subcommands: ``measures`` (per-state monogamy report), ``example``
(built-in counterexample regression), ``theorems`` (randomized property
batteries), ``scan`` (conjecture scan over Haar samples), ``bsa`` (best
separable approximation).  Exit codes: 0 success, 1 property failure,
2 usage or parse error, 3 dimension error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .bsa import bsa_decompose, werner_state
from .errors import EntmonoError, WrongDimsError
from .measures import RoofConfig
from .monogamy import (
    MonogamyReport,
    equal_marginal_battery,
    equivalence_battery,
    example_state,
    monogamy_triple,
    scan_conjecture,
)
from .states import (
    DensityMatrix,
    density_to_dict,
    load_density,
    load_state,
    partial_trace,
    state_to_dict,
)

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2
EXIT_DIMS = 3
EXIT_IO = 4

EXAMPLE_RHO_AB = np.array(
    [[1, 0, 0, 1], [0, 2, 0, 0], [0, 0, 2, 0], [1, 0, 0, 1]], dtype=float
) / 6.0


@dataclass(frozen=True)
class RunConfig:
    """Echoed verbatim in machine reports (execution-only fields such as
    the output path and worker count are excluded so reports stay
    byte-identical across runs and worker counts)."""

    command: str
    state_path: str | None = None
    d: int = 3
    samples: int = 100
    seed: int = 42
    restarts: int = 32
    max_sweeps: int = 200
    tol: float = 1e-6
    format: str = "text"
    include_example: bool = False
    werner: float | None = None
    which: int | None = None


def _report_dict(report: MonogamyReport) -> dict:
    return {
        "c_a_bc": report.c_a_bc,
        "c_ab": report.c_ab,
        "c_ac_assist": report.c_ac_assist,
        "equality_residual": report.equality_residual,
        "ckw_residual": report.ckw_residual,
        "dual_residual": report.dual_residual,
        "ppt_ab": report.ppt_ab,
        "ppt_ab_min_eig": report.ppt_ab_min_eig,
        "product_form": report.product_form,
        "roof_converged": report.roof_converged,
    }


def _emit(payload: dict, config: RunConfig, out_path: str | None) -> int:
    if config.format == "machine":
        text = json.dumps({"config": asdict(config), "result": payload}, indent=2)
    else:
        lines = [f"{k}: {v}" for k, v in payload.items()]
        text = "\n".join(lines)
    if out_path is not None:
        try:
            with open(out_path, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"cannot write {out_path}: {exc}", file=sys.stderr)
            return EXIT_IO
    print(text)
    return EXIT_OK


def _roof(args, mode: str = "maximize") -> RoofConfig:
    return RoofConfig(
        mode=mode,
        restarts=args.restarts,
        max_sweeps=args.max_sweeps,
        seed=args.seed,
    )


def cmd_measures(args) -> int:
    try:
        psi = load_state(args.state)
    except (OSError, ValueError) as exc:
        print(f"cannot parse state file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    config = RunConfig(
        command="measures",
        state_path=args.state,
        seed=args.seed,
        restarts=args.restarts,
        max_sweeps=args.max_sweeps,
        tol=args.tol,
        format=args.format,
    )
    try:
        report = monogamy_triple(psi, _roof(args))
    except WrongDimsError as exc:
        print(f"dimension error: {exc}", file=sys.stderr)
        return EXIT_DIMS
    return _emit(_report_dict(report), config, args.out)


def cmd_example(args) -> int:
    psi = example_state()
    report = monogamy_triple(psi, _roof(args))
    rho_ab = partial_trace(psi.density(), (0, 1))
    ab_gap = float(np.max(np.abs(rho_ab.mat - EXAMPLE_RHO_AB)))
    target_coa = 2.0 * math.sqrt(2.0) / 3.0
    checks = [
        ("c_a_bc_equals_1", abs(report.c_a_bc - 1.0), 1e-9),
        ("c_ab_equals_0", abs(report.c_ab), 1e-9),
        ("rho_ab_matches", ab_gap, 1e-12),
        ("coa_ac_equals_2sqrt2_over_3", abs(report.c_ac_assist - target_coa), 1e-4),
    ]
    payload = {"ppt_ab": report.ppt_ab}
    ok = report.ppt_ab
    for name, gap, tol in checks:
        passed = gap <= tol
        ok = ok and passed
        payload[name] = {"gap": gap, "tol": tol, "passed": passed}
        if args.format != "machine":
            status = "PASS" if passed else "FAIL"
            print(f"{status} {name}: gap={gap:.3e} (tol {tol:.0e})")
    config = RunConfig(
        command="example",
        seed=args.seed,
        restarts=args.restarts,
        max_sweeps=args.max_sweeps,
        format=args.format,
    )
    if args.format == "machine":
        code = _emit(payload, config, args.out)
        if code != EXIT_OK:
            return code
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_theorems(args) -> int:
    if args.samples < 1:
        print("samples must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.d < 2:
        print("d must be >= 2", file=sys.stderr)
        return EXIT_USAGE
    roof = _roof(args)
    if args.which == 1:
        out = equivalence_battery(
            [args.d], args.samples, args.samples, args.seed, roof, tol=args.tol
        )
        total = out["product_samples"] + out["generic_samples"]
    else:
        out = equal_marginal_battery(args.d, args.samples, args.seed, roof, tol=args.tol)
        total = out["samples"]
    failures = out["failures"]
    print(f"battery {args.which}: {total} checks, {len(failures)} failures")
    if failures:
        path = args.out or f"theorem{args.which}_failures.json"
        try:
            with open(path, "w") as fh:
                json.dump({"failures": failures}, fh, indent=2)
            print(f"failing cases dumped to {path}", file=sys.stderr)
        except OSError as exc:
            print(f"cannot write {path}: {exc}", file=sys.stderr)
            return EXIT_IO
        return EXIT_PROPERTY
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.samples < 1 or args.d < 2:
        print("scan needs d >= 2 and samples >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.include_example and args.d != 3:
        print("--include-example requires --d 3", file=sys.stderr)
        return EXIT_USAGE
    config = RunConfig(
        command="scan",
        d=args.d,
        samples=args.samples,
        seed=args.seed,
        restarts=args.restarts,
        max_sweeps=args.max_sweeps,
        tol=args.tol,
        format=args.format,
        include_example=args.include_example,
    )
    summary = scan_conjecture(
        args.d,
        args.samples,
        args.seed,
        _roof(args),
        workers=args.workers,
        include_example=args.include_example,
    )
    text = json.dumps({"config": asdict(config), "summary": summary}, indent=2)
    if args.out is not None:
        try:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        print(text)
    print(
        f"min residual {summary['min_residual']:.6e}, "
        f"{len(summary['violations'])} violations"
    )
    return EXIT_OK


def cmd_bsa(args) -> int:
    if (args.state is None) == (args.werner is None):
        print("bsa needs exactly one of STATE or --werner F", file=sys.stderr)
        return EXIT_USAGE
    if args.werner is not None:
        try:
            rho = werner_state(args.werner)
        except EntmonoError as exc:
            print(f"bad werner fidelity: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        try:
            rho = load_density(args.state)
        except (OSError, ValueError) as exc:
            print(f"cannot parse density file: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        dec = bsa_decompose(rho, restarts=args.restarts, seed=args.seed)
    except WrongDimsError as exc:
        print(f"dimension error: {exc}", file=sys.stderr)
        return EXIT_DIMS
    payload = {
        "lambda": dec.lam,
        "residual_norm": dec.residual_norm,
        "certified_locally_maximal": dec.certified,
        "converged": dec.converged,
        "rho_s": density_to_dict(dec.rho_s),
        "p_e": state_to_dict(dec.p_e) if dec.p_e is not None else None,
    }
    config = RunConfig(
        command="bsa",
        state_path=args.state,
        seed=args.seed,
        restarts=args.restarts,
        format=args.format,
        werner=args.werner,
    )
    return _emit(payload, config, args.out)


def _add_common(p, restarts_default=32):
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--restarts", type=int, default=restarts_default)
    p.add_argument("--max-sweeps", type=int, default=200, dest="max_sweeps")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("text", "machine"), default="text")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entmono",
        description="Concurrence monogamy analysis for 2x2xd quantum systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measures", help="monogamy report for a state file")
    p.add_argument("state", help="JSON pure-state file with dims [2,2,d]")
    _add_common(p)
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("example", help="built-in counterexample regression")
    _add_common(p)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("theorems", help="randomized theorem batteries")
    p.add_argument("--which", type=int, choices=(1, 2), required=True,
                   help="1: equivalence battery, 2: equal-marginal battery")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--samples", type=int, default=100)
    _add_common(p, restarts_default=8)
    p.set_defaults(func=cmd_theorems)

    p = sub.add_parser("scan", help="random scan of the monogamy residual")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--include-example", action="store_true",
                   dest="include_example")
    _add_common(p, restarts_default=4)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("bsa", help="best separable approximation (two qubits)")
    p.add_argument("state", nargs="?", default=None,
                   help="JSON density-matrix file with dims [2,2]")
    p.add_argument("--werner", type=float, default=None,
                   help="use the Werner state of this singlet fidelity")
    _add_common(p)
    p.set_defaults(func=cmd_bsa)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
