"""Command-line front end: decompose, reconstruct, schedule, simulate,
counts, loss, random.

Matrices travel in the plain-text interchange format, structured artifacts
as JSON.  Human summaries go to stdout, machine-readable error objects to
stderr; exit status is 0 only when every invoked invariant passed tolerance
(2 for parse/usage failures, 1 for tolerance or invariant violations).
The default reconstruction tolerance 1e-10 * N can be overridden with
--tolerance or the TIMELOOM_TOLERANCE environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import loss as loss_mod
from .core import (
    MatrixFormatError,
    NotUnitaryError,
    frob_distance,
    haar_random_su,
    read_matrix,
    write_matrix,
)
from .cosine_sine import cs_decompose, cs_plan_from_json, cs_plan_to_json, reconstruct_cs
from .elimination import (
    element_counts_elimination,
    eliminate,
    elimination_plan_from_json,
    elimination_plan_to_json,
    reconstruct_elimination,
)
from .schedule import (
    device_inventory,
    schedule_cs,
    schedule_elimination,
    schedule_from_json,
    schedule_to_json,
)
from .simulate import ScheduleReplayError, simulate_timebins


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def _tolerance(args, n: int) -> float:
    if args.tolerance is not None:
        return args.tolerance
    env = os.environ.get("TIMELOOM_TOLERANCE")
    if env:
        return float(env)
    return 1e-10 * n


def _load_plan(path: str):
    with open(path) as fh:
        text = fh.read()
    kind = json.loads(text).get("kind")
    if kind == "elimination":
        return elimination_plan_from_json(text)
    if kind == "cs":
        return cs_plan_from_json(text)
    raise ValueError(f"unknown plan kind {kind!r}")


def _reconstruct(plan, include_padding: bool = False):
    from .cosine_sine import CsPlan

    if isinstance(plan, CsPlan):
        return reconstruct_cs(plan, include_padding=include_padding)
    return reconstruct_elimination(plan, include_padding=include_padding)


def cmd_random(args) -> int:
    su = haar_random_su(args.dim, args.seed)
    text = write_matrix(su.inner)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_decompose(args) -> int:
    with open(args.input) as fh:
        mat = read_matrix(fh.read(), check=not args.no_check)
    arr = mat if isinstance(mat, np.ndarray) else mat.data
    n = arr.shape[0]
    if args.method == "elimination":
        plan = eliminate(arr, args.m)
        text = elimination_plan_to_json(plan)
    else:
        plan = cs_decompose(arr, args.m)
        text = cs_plan_to_json(plan)
    err = frob_distance(_reconstruct(plan).data, arr)
    tol = _tolerance(args, n)
    with open(args.output, "w") as fh:
        fh.write(text)
    print(f"method={args.method} n={n} m={args.m} reconstruction_error={err:.3e} "
          f"tolerance={tol:.3e}")
    if err > tol:
        return _fail("reconstruction", f"error {err:.3e} exceeds tolerance {tol:.3e}", 1)
    return 0


def cmd_reconstruct(args) -> int:
    plan = _load_plan(args.input)
    u = _reconstruct(plan)
    with open(args.output, "w") as fh:
        fh.write(write_matrix(u))
    print(f"wrote {u.dim}x{u.dim} matrix to {args.output}")
    return 0


def cmd_schedule(args) -> int:
    plan = _load_plan(args.input)
    from .cosine_sine import CsPlan

    if isinstance(plan, CsPlan):
        sched = schedule_cs(plan, reuse=args.reuse, chain=args.chain)
    else:
        if args.reuse:
            return _fail("usage", "--reuse applies only to cs plans", 2)
        sched = schedule_elimination(plan, chain=args.chain)
    with open(args.output, "w") as fh:
        fh.write(schedule_to_json(sched))
    print(f"architecture={sched.architecture} devices={len(sched.devices)} "
          f"bins={sched.total_bins}")
    return 0


def cmd_simulate(args) -> int:
    with open(args.input) as fh:
        sched = schedule_from_json(fh.read())
    result, _mode_map = simulate_timebins(sched)
    if args.reference:
        with open(args.reference) as fh:
            ref = read_matrix(fh.read(), check=False)
        if ref.shape[0] == sched.n_original and sched.n_logical > sched.n_original:
            padded = np.eye(sched.n_logical, dtype=complex)
            padded[: ref.shape[0], : ref.shape[0]] = ref
            ref = padded
    elif args.plan:
        ref = _reconstruct(_load_plan(args.plan), include_padding=True).data
    else:
        ref = np.eye(sched.n_logical)
    if ref.shape[0] != result.dim:
        return _fail("dimension",
                     f"reference is {ref.shape[0]}x, schedule acts on {result.dim}", 2)
    dist = frob_distance(result.data, ref)
    tol = max(_tolerance(args, result.dim), 1e-8)
    print(f"architecture={sched.architecture} n={result.dim} distance={dist:.3e} "
          f"tolerance={tol:.3e}")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(write_matrix(result))
    if dist > tol:
        return _fail("simulation", f"distance {dist:.3e} exceeds tolerance {tol:.3e}", 1)
    return 0


def cmd_counts(args) -> int:
    if args.input:
        with open(args.input) as fh:
            sched = schedule_from_json(fh.read())
        for line in device_inventory(sched).lines():
            print(line)
        return 0
    if args.n is None or args.m is None:
        return _fail("usage", "counts needs either -i SCHEDULE or --n and --m", 2)
    rep = element_counts_elimination(args.n, args.m)
    print(f"n={rep.n} m={rep.m} k={rep.k} padding={rep.padding}")
    print(f"universal-block beam splitters: {rep.bs_universal}")
    print(f"residual-block tunable beam splitters: {rep.bs_residual}")
    print(f"tunable beam splitters total: {rep.bs_tunable_total}")
    print(f"residual swaps: {rep.swaps_residual_tilde} (device form: "
          f"{rep.swaps_residual_rotated})")
    print(f"phase shifters: {rep.phase_shifters}")
    print(f"delay lines: {rep.delay_lines_inner} inner + {rep.delay_lines_outer} outer "
          f"= {rep.delay_lines_total}")
    print(f"fully spatial mesh: {rep.spatial_mesh_bs} beam splitters; "
          f"ratio = {rep.bs_ratio_vs_spatial:.6e}")
    return 0


def cmd_loss(args) -> int:
    if args.fig4:
        t = loss_mod.TemporalLossParams()
        h = loss_mod.HybridLossParams()
        n_max = args.n_max or 2500
        m_set = args.m_set or list(range(2, 11))
    else:
        t = loss_mod.TemporalLossParams(eta_i=args.eta_i, eta_o=args.eta_o,
                                        eta_bs=args.eta_bs, eta_sc=args.eta_sc)
        h = loss_mod.HybridLossParams(eta_i=args.eta_i, eta_o=args.eta_o,
                                      eta_bs=args.eta_bs, eta_c=args.eta_c)
        n_max = args.n_max or 2500
        m_set = args.m_set or list(range(2, 11))
    csv_text = loss_mod.sweep_fig4(range(2, n_max + 1), m_set, t, h)
    with open(args.output, "w") as fh:
        fh.write(csv_text)
    rows = sum(1 for line in csv_text.splitlines()
               if line and not line.startswith(("#", "N,")))
    print(f"wrote {rows} rows to {args.output}")
    if args.plot:
        from .fig import render_loss_csv

        render_loss_csv(csv_text, args.plot)
        print(f"rendered figure to {args.plot}")
    return 0


def _add_tolerance(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tolerance", type=float, default=None,
                   help="override the default 1e-10*N acceptance tolerance")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="timeloom", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("random", help="write a seeded Haar-random special unitary")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("decompose", help="compile a matrix into a plan JSON")
    p.add_argument("--method", choices=["elimination", "cs"], required=True)
    p.add_argument("--m", type=int, required=True, help="spatial block size M")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--no-check", action="store_true",
                   help="skip the unitarity check on the input matrix")
    _add_tolerance(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("reconstruct", help="multiply a plan back into a matrix")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("schedule", help="lower a plan to a time-bin schedule JSON")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--reuse", action="store_true",
                   help="single shared universal device (cs only)")
    p.add_argument("--chain", action="store_true",
                   help="replicate devices per layer instead of looping")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="replay a schedule and report the distance")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--reference", default=None, help="matrix file to compare against")
    p.add_argument("--plan", default=None, help="plan JSON to compare against")
    p.add_argument("-o", "--output", default=None, help="write the induced matrix")
    _add_tolerance(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("counts", help="element counts / schedule inventory")
    p.add_argument("-i", "--input", default=None, help="schedule JSON")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("loss", help="emit the loss-comparison CSV (and figure)")
    p.add_argument("--fig4", action="store_true",
                   help="use the reference constants")
    p.add_argument("--eta-i", dest="eta_i", type=float, default=0.9999)
    p.add_argument("--eta-o", dest="eta_o", type=float, default=0.9999)
    p.add_argument("--eta-bs", dest="eta_bs", type=float, default=0.96)
    p.add_argument("--eta-sc", dest="eta_sc", type=float, default=0.95)
    p.add_argument("--eta-c", dest="eta_c", type=float, default=0.5)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--m-set", dest="m_set", type=lambda s: [int(x) for x in s.split(",")],
                   default=None)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--plot", default=None, help="also render a PNG figure")
    p.set_defaults(func=cmd_loss)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MatrixFormatError as exc:
        return _fail("parse", str(exc), 2)
    except (NotUnitaryError, ScheduleReplayError) as exc:
        return _fail("invariant", str(exc), 1)
    except FileNotFoundError as exc:
        return _fail("io", str(exc), 2)
    except ValueError as exc:
        return _fail("usage", str(exc), 2)


if __name__ == "__main__":
    sys.exit(main())
