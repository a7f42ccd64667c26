"""Command-line frontend: ``scma-udcg <subcommand> ...``.

Exit status is 0 on success, 1 for invalid input (bad flags, parameters or
files) and 2 for anything unexpected.
"""

import argparse
import logging
import os
import sys
import traceback

import numpy as np

from . import io
from .metrics import evaluate_codebook_set, med_superimposed
from .linksim import SimConfig, default_workers, simulate_ber
from .optimizer import SearchConfig, design_pipeline, optimize_step_size
from .udcg import (DesignError, DesignParams, check_group_params, check_uniquely_decodable,
                   group_amplitudes, group_from_parts, rotation_angles, superimpose)

log = logging.getLogger("scma_udcg")

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma separated list of numbers, got {text!r}") from None


def parse_t_range(text):
    """``ini:end:step`` -> ``(t_ini, t_end, step)``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--t-range expects ini:end:step, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--t-range expects numbers, got {text!r}") from None


def parse_ebno(text):
    """``start:step:stop`` (inclusive) or a comma list of Eb/N0 values in dB."""
    if ":" not in text:
        return parse_floats(text)
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--ebno expects start:step:stop, got {text!r}")
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--ebno expects numbers, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"--ebno needs step > 0 and stop >= start, got {text!r}")
    n = int(np.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(n + 1)]


def expand_epsilons(values, n):
    """Fit the ``--eps`` list to ``n`` rotated constellations.

    A list of exactly `n` values is used as given; a shorter one lists one
    value per pair, e.g. ``1,2`` with ``n = 4`` gives ``(1, 1, 2, 2)``.
    """
    values = list(values)
    if len(values) >= n:
        return tuple(values[:n])
    paired = [e for e in values for _ in range(2)]
    if len(paired) < n:
        raise UsageError(f"--eps gives {len(values)} pair value(s), {n} rotations need "
                         f"{(n + 1) // 2}")
    return tuple(paired[:n])


def _add_design_args(p, with_t=True):
    p.add_argument("--K", type=int, default=4, help="resources (default 4)")
    p.add_argument("--J", type=int, default=6, help="users (default 6)")
    p.add_argument("--B", type=int, default=2, help="nonzero resources per user (default 2)")
    p.add_argument("--M", type=int, required=True, help="codebook size")
    p.add_argument("--r", type=int, required=True, help="ring order exponent, 2**r points per ring")
    p.add_argument("--a", type=float, default=0.5, help="inner ring amplitude (default 0.5)")
    p.add_argument("--eps", default="1", help="rotation exponents, one per pair or one per rotation")
    if with_t:
        p.add_argument("--t", type=float, default=None, help="fixed ring step; skips the search")


def build_parser():
    parser = _Parser(prog="scma-udcg", description="UDCG based SCMA codebook design and evaluation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("design", help="design a codebook set and write it with its metrics")
    _add_design_args(p)
    p.add_argument("--criterion", choices=("superimposed", "codebook"), default="codebook")
    p.add_argument("--t-range", default="0:2:0.05", help="search grid ini:end:step")
    p.add_argument("--no-interleave", action="store_true", help="skip codebook interleaving")
    p.add_argument("--out", required=True, help="codebook JSON path")
    p.add_argument("--metrics-out", help="metrics JSON path (default <out>.metrics.json)")

    p = sub.add_parser("evaluate", help="recompute metrics of codebook files")
    p.add_argument("codebooks", nargs="*", help="codebook JSON files")
    p.add_argument("--codebook", action="append", default=[], help="codebook JSON (repeatable)")
    p.add_argument("--mpd", choices=("per_codebook", "exact", "none"), default="per_codebook")
    p.add_argument("--out", help="metrics JSON path (single codebook only)")
    p.add_argument("--csv", help="per-resource MED table CSV path")

    p = sub.add_parser("optimize", help="write the gain trace of a step-size search")
    _add_design_args(p, with_t=False)
    p.add_argument("--df", type=int, default=None, help="constellations per group (default from K, J, B)")
    p.add_argument("--criterion", choices=("superimposed", "codebook"), default="codebook")
    p.add_argument("--t-range", default="0:2:0.05", help="search grid ini:end:step")
    p.add_argument("--out", required=True, help="trace CSV path")

    p = sub.add_parser("simulate", help="Monte Carlo BER of a codebook file")
    p.add_argument("--codebook", required=True)
    p.add_argument("--channel", choices=("awgn", "rayleigh"), default="awgn")
    p.add_argument("--ebno", required=True, help="Eb/N0 in dB, start:step:stop or comma list")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=10, help="MPA iterations")
    p.add_argument("--max-codewords", type=int, default=100_000)
    p.add_argument("--target-errors", type=int, default=200)
    p.add_argument("--workers", type=int, default=None, help="threads (default $SCMA_UDCG_THREADS or 1)")
    p.add_argument("--out", required=True, help="BER CSV path")

    p = sub.add_parser("verify-udcg", help="check unique decomposability of a group")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--df", type=int, required=True, help="constellations in the group")
    p.add_argument("--eps", default="1")
    return parser


def _params(args, n_rot, t=None):
    return DesignParams(M=args.M, r=args.r, a=args.a, t=t, K=args.K, J=args.J, B=args.B,
                        epsilons=expand_epsilons(parse_floats(args.eps), n_rot))


def _n_rot(args):
    # rotations needed by the regular graph of K, J, B: d_f - 1 = J*B/K - 1
    if getattr(args, "df", None):
        return args.df - 1
    if (args.J * args.B) % args.K:
        raise DesignError(f"K={args.K} does not divide J*B={args.J * args.B}; no regular factor graph")
    return args.J * args.B // args.K - 1


def cmd_design(args):
    t_ini, t_end, step = parse_t_range(args.t_range)
    params = _params(args, _n_rot(args), t=args.t)
    cfg = None if args.t is not None else SearchConfig(t_ini, t_end, step, args.criterion)
    cbs = design_pipeline(params, cfg, interleave=not args.no_interleave)
    metrics_out = args.metrics_out or os.path.splitext(args.out)[0] + ".metrics.json"
    manifest = io.make_manifest("design", {**vars(args), "resolved_params": cbs.params.to_dict()},
                                outputs=[args.out, metrics_out])
    io.save_codebook(args.out, cbs, manifest)
    io.write_metrics_json(metrics_out, cbs.report, manifest)
    r = cbs.report
    print(f"t = {r.extra['t']:g}  gain_c = {r.gain_c:.6g}  gain_x = {r.gain_x:.6g}  "
          f"d_k_min = {'/'.join(f'{d:.4f}' for d in r.per_rn_med_table)}")
    return EXIT_OK


def cmd_evaluate(args):
    paths = list(args.codebooks) + list(args.codebook)
    if not paths:
        raise UsageError("evaluate: give at least one codebook file")
    if args.out and len(paths) > 1:
        raise UsageError("evaluate: --out takes a single codebook; use --csv for several")
    mpd_mode = None if args.mpd == "none" else args.mpd
    rows = []
    for path in paths:
        cbs = io.load_codebook(path)
        report = evaluate_codebook_set(cbs, mpd_mode=mpd_mode)
        if cbs.report is not None:
            report.extra.update(cbs.report.extra)
            fresh, stored = report.to_dict(), cbs.report.to_dict()
            mismatched = [k for k in fresh if k not in ("extra", "mpd", "mpd_mode")
                          and fresh[k] != stored.get(k)]
            if mismatched:
                log.warning("%s: recomputed metrics differ from the embedded ones: %s", path, mismatched)
        name = os.path.splitext(os.path.basename(path))[0]
        rows.append((name, cbs.M, report))
        print(f"{name}: gain_c = {report.gain_c:.6g}  gain_x = {report.gain_x:.6g}  "
              f"d_k_min = {'/'.join(f'{d:.4f}' for d in report.per_rn_med_table)}")
    if args.out:
        manifest = io.make_manifest("evaluate", vars(args), inputs=paths, outputs=[args.out])
        io.write_metrics_json(args.out, rows[0][2], manifest)
    if args.csv:
        io.write_med_table_csv(args.csv, rows)
        io.write_manifest_beside(args.csv, io.make_manifest("evaluate", vars(args), inputs=paths,
                                                            outputs=[args.csv]))
    return EXIT_OK


def cmd_optimize(args):
    t_ini, t_end, step = parse_t_range(args.t_range)
    params = _params(args, _n_rot(args))
    result = optimize_step_size(params, SearchConfig(t_ini, t_end, step, args.criterion))
    io.write_trace_csv(args.out, result.trace)
    io.write_manifest_beside(args.out, io.make_manifest(
        "optimize", {**vars(args), "t_star": result.t_star, "gain_star": result.gain_star},
        outputs=[args.out]))
    print(f"t* = {result.t_star:g}  gain* = {result.gain_star:.6g}")
    return EXIT_OK


def cmd_simulate(args):
    cbs = io.load_codebook(args.codebook)
    cfg = SimConfig(parse_ebno(args.ebno), channel=args.channel, mpa_iterations=args.iterations,
                    max_codewords=args.max_codewords, target_errors=args.target_errors,
                    seed=args.seed)
    workers = args.workers or default_workers()
    curve = simulate_ber(cbs, cfg, workers=workers)
    io.write_ber_csv(args.out, curve)
    io.write_manifest_beside(args.out, io.make_manifest(
        "simulate", {**vars(args), "sim_config": cfg.to_dict(), "config_hash": curve.config_hash,
                     **curve.metadata},
        inputs=[args.codebook], outputs=[args.out], seed=args.seed))
    for p in curve.points:
        print(f"{p.ebno_db:6.2f} dB  BER = {p.ber:.3e}  ({p.errors}/{p.bits})")
    return EXIT_OK


def cmd_verify(args):
    if args.df < 2:
        raise UsageError("--df must be at least 2")
    eps = expand_epsilons(parse_floats(args.eps), args.df - 1)
    check_group_params(args.M, args.r, args.a, args.t, eps)
    group = group_from_parts(group_amplitudes(args.M, args.r, args.a, args.t), args.r,
                             rotation_angles(args.r, eps))
    sup = superimpose(group)
    res = check_uniquely_decodable(sup)
    d = med_superimposed(sup)
    print(f"UDC: {str(res.is_udc).lower()}, d_min = {d:.12g}")
    if not res.is_udc:
        print(f"coinciding sums: {res.witness[0]} and {res.witness[1]}")
    return EXIT_OK


COMMANDS = {"design": cmd_design, "evaluate": cmd_evaluate, "optimize": cmd_optimize,
            "simulate": cmd_simulate, "verify-udcg": cmd_verify}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        # DesignError, UsageError and JSON decode errors are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
