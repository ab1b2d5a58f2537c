"""Command-line entry point.

Subcommands::

    sweep-p       entropy curves over the switch-error probability (CSV)
    sweep-sigma   entropy curves over Gaussian prediction noise (long CSV)
    verify        identity suite, closed form and linearity checks
    mc            Monte Carlo plug-in estimates against the exact engine
    empirical-mi  plug-in I(x_p; r) for an original/prediction PGM pair

Exit codes: 0 success, 1 I/O or parse failure, 2 usage error, 3 failed
verification. Results go to ``--output`` (default standard output); logs go
to standard error. ``CONDCODING_OUTPUT_DIR`` makes ``<dir>/<command>.csv`` the
default destination of the sweep commands.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from condcoding import kernels
from condcoding.channels import GaussianSpec, SwitchSpec, QuantizerSpec, mixture_channel, uniform_quantizer
from condcoding.empirical import PgmFormatError, empirical_mi, load_pgm
from condcoding.experiments import (
    DEFAULT_SIGMA_P_VALUES,
    SweepConfig,
    frange,
    monte_carlo_check,
    sweep_p,
    sweep_sigma,
    write_csv,
)
from condcoding.identities import (
    TOL,
    closed_form_max_error,
    linearity_deviation,
    run_identity_suite,
)
from condcoding.prob import InvalidArgumentError, pmf_uniform

log = logging.getLogger("condcoding")

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _common_model(p):
    p.add_argument("--N", type=int, default=255, help="alphabet maximum (default 255)")
    p.add_argument("--w", type=int, default=0, help="wrong-reference pixel value (default 0)")


def _output(p):
    p.add_argument("--output", "-o", default=None,
                   help="destination file, or '-' for standard output (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condcoding",
        description="Residual versus conditional coding: exact entropy analysis.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep-p", help="sweep the switch-error probability p")
    _common_model(sp)
    sp.add_argument("--p-min", type=float, default=0.0)
    sp.add_argument("--p-max", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--bottleneck", type=int, nargs="*", default=[7, 6], metavar="BITS",
                    help="quantizer widths for the bottleneck columns (default 7 6)")
    sp.add_argument("--workers", type=int, default=1)
    _output(sp)

    ss = sub.add_parser("sweep-sigma", help="sweep the Gaussian noise level sigma_p")
    _common_model(ss)
    ss.add_argument("--p", type=float, nargs="+", default=list(DEFAULT_SIGMA_P_VALUES),
                    help="fixed switch-error probabilities (default 0 0.1 0.2 0.4)")
    ss.add_argument("--sigma-min", type=float, default=0.0)
    ss.add_argument("--sigma-max", type=float, default=20.0)
    ss.add_argument("--step", type=float, default=0.5)
    ss.add_argument("--bottleneck", type=int, nargs="*", default=[7], metavar="BITS",
                    help="quantizer widths for the bottleneck columns (default 7)")
    ss.add_argument("--boundary", choices=("clip", "renormalize"), default="clip")
    ss.add_argument("--workers", type=int, default=1)
    _output(ss)

    vp = sub.add_parser("verify", help="run the identity and closed-form checks")
    vp.add_argument("--trials", type=int, default=1000)
    vp.add_argument("--seed", type=int, default=42)
    vp.add_argument("--max-alphabet", type=int, default=256)
    vp.add_argument("--closed-form-grid", type=int, default=101,
                    help="number of evenly spaced p values in [0, 1] (default 101)")
    _output(vp)

    mp = sub.add_parser("mc", help="Monte Carlo plug-in estimates vs exact values")
    _common_model(mp)
    mp.add_argument("--p", type=float, default=0.5)
    mp.add_argument("--sigma", type=float, default=0.0)
    mp.add_argument("--boundary", choices=("clip", "renormalize"), default="clip")
    mp.add_argument("--bottleneck", type=int, default=None, metavar="BITS")
    mp.add_argument("--samples", type=int, default=1_000_000)
    mp.add_argument("--seed", type=int, default=1)
    _output(mp)

    ep = sub.add_parser("empirical-mi", help="plug-in I(x_p; r) of a PGM frame pair")
    ep.add_argument("original")
    ep.add_argument("prediction")
    ep.add_argument("--bin-width", type=int, default=1)
    _output(ep)
    return parser


def _destination(args, default_name=None):
    if args.output is not None:
        return args.output
    env_dir = os.environ.get("CONDCODING_OUTPUT_DIR")
    if env_dir and default_name:
        return os.path.join(env_dir, default_name)
    return "-"


def _emit(text: str, destination: str) -> None:
    if destination == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    log.info("wrote %s", destination)


def _grid(lo, hi, step):
    try:
        return frange(lo, hi, step)
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from exc


def cmd_sweep_p(args) -> int:
    cfg = SweepConfig("p", _grid(args.p_min, args.p_max, args.step), N=args.N, w=args.w,
                      bottlenecks=tuple(args.bottleneck))
    t0 = time.perf_counter()
    table = sweep_p(cfg, workers=args.workers)
    log.info("sweep-p: %d rows in %.2fs", len(table.rows), time.perf_counter() - t0)
    write_csv(table, _destination(args, "sweep-p.csv"))
    return EXIT_OK


def cmd_sweep_sigma(args) -> int:
    cfg = SweepConfig("sigma_p", _grid(args.sigma_min, args.sigma_max, args.step), N=args.N,
                      w=args.w, p_values=tuple(args.p), bottlenecks=tuple(args.bottleneck),
                      boundary_mode=args.boundary)
    t0 = time.perf_counter()
    table = sweep_sigma(cfg, workers=args.workers)
    log.info("sweep-sigma: %d rows in %.2fs", len(table.rows), time.perf_counter() - t0)
    write_csv(table, _destination(args, "sweep-sigma.csv"))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 1 or args.max_alphabet < 1 or args.closed_form_grid < 2:
        raise UsageError("--trials and --max-alphabet must be >= 1, --closed-form-grid >= 2")
    suite = run_identity_suite(args.trials, args.seed, args.max_alphabet)
    g = args.closed_form_grid
    grid = [k / (g - 1) for k in range(g)]
    cf = {w: closed_form_max_error(255, grid, w) for w in (0, 100, 255)}
    lin = {k: linearity_deviation(2**k - 1, grid) for k in (8, 10, 12, 14, 16)}
    lin_ok = all(lin[a] > lin[b] for a, b in zip(sorted(lin), sorted(lin)[1:]))

    lines = [f"trials {args.trials} seed {args.seed} max-alphabet {args.max_alphabet}"]
    failures = []
    for name in ("chain", "bottleneck", "residual"):
        worst = getattr(suite, name)
        lines.append(f"{name} max residual {worst.error:.3e} "
                     f"(trial {worst.index}, |x|={worst.x_size}, |x_p|={worst.xp_size})")
        if worst.error >= TOL:
            failures.append(f"{name}: seed {worst.seed} trial {worst.index} "
                            f"|x|={worst.x_size} |x_p|={worst.xp_size} residual {worst.error:.3e}")
    for w, err in cf.items():
        lines.append(f"closed form vs enumeration, N=255 w={w}: max error {err:.3e} over {g} p values")
        if err >= TOL:
            failures.append(f"closed form: w={w} error {err:.3e}")
    for k, dev in lin.items():
        lines.append(f"linearity deviation N=2^{k}-1: {dev:.9f}")
    if not lin_ok:
        failures.append("linearity deviation not strictly decreasing in N")
    if failures:
        lines.append("FAILED")
        lines.extend(failures)
    else:
        lines.append("all checks passed")
        lines.append("residual identity max error < 1e-9")
    _emit("\n".join(lines) + "\n", _destination(args))
    return EXIT_VERIFY if failures else EXIT_OK


def cmd_mc(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    channel = mixture_channel(SwitchSpec(args.N, args.p, args.w),
                              GaussianSpec(args.N, args.sigma, args.boundary))
    f = None
    if args.bottleneck is not None:
        bits = (args.N + 1).bit_length() - 1
        if 1 << bits != args.N + 1:
            raise UsageError("--bottleneck needs N + 1 to be a power of two")
        f = uniform_quantizer(QuantizerSpec(args.bottleneck, bits))
    t0 = time.perf_counter()
    est = monte_carlo_check(pmf_uniform(args.N + 1), channel, f, args.samples, args.seed)
    log.info("mc: %d samples in %.2fs", args.samples, time.perf_counter() - t0)
    lines = [f"samples {est.samples}", f"seed {est.seed}"]
    for k in est.estimates:
        lines.append(f"{k} estimate {est.estimates[k]:.9f} exact {est.exact[k]:.9f} "
                     f"deviation {est.deviations[k]:.9f}")
    _emit("\n".join(lines) + "\n", _destination(args))
    return EXIT_OK


def cmd_empirical_mi(args) -> int:
    images = []
    for path in (args.original, args.prediction):
        try:
            images.append(load_pgm(path))
        except (OSError, PgmFormatError) as exc:
            print(f"condcoding: cannot read {path}: {exc}", file=sys.stderr)
            return EXIT_IO
    est = empirical_mi(*images, bin_width=args.bin_width)
    text = (f"mi {est.mi:.9f}\nh_pred {est.h_pred:.9f}\n"
            f"h_resid {est.h_resid:.9f}\nsamples {est.samples}\n")
    _emit(text, _destination(args))
    return EXIT_OK


COMMANDS = {
    "sweep-p": cmd_sweep_p,
    "sweep-sigma": cmd_sweep_sigma,
    "verify": cmd_verify,
    "mc": cmd_mc,
    "empirical-mi": cmd_empirical_mi,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    log.debug("kernel backend: %s", kernels.BACKEND)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidArgumentError) as exc:
        parser.print_usage(sys.stderr)
        print(f"condcoding {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"condcoding {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
