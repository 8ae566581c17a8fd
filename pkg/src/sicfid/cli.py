"""Command-line interface.

Exit codes: 0 all requested checks pass, 2 a conjecture-falsification event,
1 any other computational failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import ConjectureFailure, SicfidError


def _add_common(p):
    p.add_argument("--precision", type=int, default=60,
                   help="working precision in decimal digits")
    p.add_argument("--tolerance", type=float, default=None,
                   help="numeric verification tolerance (default 10^-(precision/3))")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for independent character/pair evaluations")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sicfid",
                                 description="SIC fiducial vectors from Stark "
                                             "units in prime dimensions n^2+3")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the construction end to end")
    p_run.add_argument("--d", type=int, required=True)
    p_run.add_argument("--source", default="zeta",
                       help="'zeta' to compute Stark units, 'builtin' for bundled "
                            "reference data, or a directory with p4.json/g4.json")
    p_run.add_argument("--exact", action="store_true", default=False,
                       help="also assemble and verify the exact fiducial")
    p_run.add_argument("--verify", choices=("full", "reduced", "spot"),
                       default="reduced")
    p_run.add_argument("--report", default=None, help="write the report here")
    p_run.add_argument("--format", choices=("human", "machine"), default="human")
    p_run.add_argument("--out-fiducial", default=None,
                       help="write the fiducial vector to this file")
    _add_common(p_run)

    p_stark = sub.add_parser("stark", help="compute and print Stark units")
    p_stark.add_argument("--d", type=int, required=True)
    p_stark.add_argument("--out", default=None, help="write a Stark unit file")
    p_stark.add_argument("--cutoff", type=int, default=None,
                         help="ideal-norm cutoff override for the L-series")
    _add_common(p_stark)

    p_cls = sub.add_parser("classify", help="dimension-tower invariants of d")
    p_cls.add_argument("--d", type=int, required=True)

    p_ver = sub.add_parser("verify", help="verify a fiducial vector file")
    p_ver.add_argument("--fiducial", required=True)
    p_ver.add_argument("--verify", choices=("full", "reduced"), default="reduced")
    _add_common(p_ver)
    return ap


def _cmd_run(args) -> int:
    import mpmath as mp

    from .fileio import (emit_report, load_fixtures, parse_galois, parse_poly,
                         write_fiducial, write_report)
    from .pipeline import RunConfig, run_recipe

    config = RunConfig(precision=args.precision, exact=args.exact,
                       verify=args.verify,
                       tolerance=None if args.tolerance is None
                       else mp.mpf(args.tolerance),
                       threads=args.threads)
    ingested = None
    source = args.source
    if source == "builtin":
        fx = load_fixtures(args.d)
        ingested = {k: fx[k] for k in ("p4", "g4", "p1") if k in fx}
        source = "ingested"
    elif source != "zeta":
        import os

        ingested = {}
        if os.path.exists(os.path.join(source, "p4.json")):
            p4 = parse_poly(os.path.join(source, "p4.json"))
            ingested = {"p4": p4,
                        "g4": parse_galois(os.path.join(source, "g4.json"), p4)}
            p1p = os.path.join(source, "p1.json")
            if os.path.exists(p1p):
                ingested["p1"] = parse_poly(p1p)
        elif os.path.exists(os.path.join(source, "stark.json")):
            from .fileio import parse_stark

            ingested["stark"] = parse_stark(os.path.join(source, "stark.json"))
        else:
            raise SicfidError(f"{source}: need p4.json/g4.json or stark.json")
        source = "ingested"
    try:
        run = run_recipe(args.d, source=source, config=config, ingested=ingested)
    except SicfidError as exc:
        failed = getattr(exc, "run", None)
        if failed is not None and args.report:
            write_report(failed, args.report,
                         "machine" if args.report.endswith(".json") else args.format)
        raise
    text = emit_report(run, args.format)
    sys.stdout.write(text)
    if args.report:
        write_report(run, args.report,
                     "machine" if args.report.endswith(".json") else args.format)
    if args.out_fiducial:
        write_fiducial(args.out_fiducial,
                       run.fiducial_exact if run.fiducial_exact is not None
                       else run.fiducial)
    return 0 if run.verdict == "pass" else 1


def _cmd_stark(args) -> int:
    import mpmath as mp

    from .fileio import stark_to_dict, write_stark
    from .quadfield import classify_dimension
    from .zeta import stark_units

    info = classify_dimension(args.d)
    units = stark_units(info, args.precision, args.cutoff)
    if args.out:
        write_stark(args.out, units)
    else:
        json.dump(stark_to_dict(units), sys.stdout, indent=1, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _cmd_classify(args) -> int:
    from .quadfield import (absolute_degree_factored, classify_dimension,
                            degree_small_rcf)

    info = classify_dimension(args.d)
    out = {"d": info.d, "n": info.n, "D": info.D, "ell": info.ell,
           "h": info.h, "m": info.m, "prime": info.is_prime}
    if info.is_prime:
        out["degree_over_K"] = degree_small_rcf(info)
        out["absolute_degree_factored"] = {
            str(p): e for p, e in sorted(absolute_degree_factored(info).items())}
    json.dump(out, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_verify(args) -> int:
    import mpmath as mp

    from .fileio import parse_fiducial
    from .heisenberg import flatness_and_norm, sic_verify

    fv = parse_fiducial(args.fiducial)
    tol = None if args.tolerance is None else mp.mpf(args.tolerance)
    rep = sic_verify(fv, tolerance=tol, subset=args.verify,
                     precision=args.precision)
    flat = flatness_and_norm(fv, args.precision)
    print(f"sic conditions ({rep.subset}, {rep.mode}): "
          f"{'PASS' if rep.passed else 'FAIL'}"
          + (f"  max deviation {rep.max_deviation}"
             if rep.max_deviation is not None else ""))
    print(f"flatness/normalization: {'PASS' if flat.passed else 'FAIL'}")
    return 0 if rep.passed and flat.passed else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "stark":
            return _cmd_stark(args)
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "verify":
            return _cmd_verify(args)
    except ConjectureFailure as exc:
        print(f"CONJECTURE-FAIL: {exc}", file=sys.stderr)
        return 2
    except SicfidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
