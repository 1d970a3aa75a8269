"""Command-line entry point: generate, run, bench, report, freq."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import config as cfg
from . import harness, mlp
from .errors import FormatError, NumericalError, ParameterError
from .harness import HarnessConfig, Scheme
from .trajectory import MOTIONS, NoiseSpec, error_stats, generate, load_csv, save_csv

log = logging.getLogger("gpsdenoise")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def emit_error_series(estimates, truth, path, k=None):
    """Write `k,abs_error` rows for plotting."""
    estimates = np.asarray(estimates, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimates.shape != truth.shape:
        raise ParameterError(f"length mismatch: {estimates.shape} vs {truth.shape}")
    k = np.arange(estimates.size) if k is None else np.asarray(k)
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "abs_error"])
        for i, e in zip(k, np.abs(estimates - truth)):
            w.writerow([int(i), repr(float(e))])


@contextmanager
def _open_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _build_parser():
    p = _Parser(prog="gpsdenoise", description=__doc__)
    p.add_argument("--config", type=Path, help="key = value settings file")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic trajectory CSV")
    g.add_argument("--n", type=int, default=180)
    g.add_argument("--dt", type=float, default=0.05)
    g.add_argument("--seed", type=int)
    g.add_argument("--motion", choices=MOTIONS, default="static")
    g.add_argument("--white-sigma", type=float)
    g.add_argument("--ar-coeff", type=float)
    g.add_argument("--bias", type=float)
    g.add_argument("--truth-level", type=float, default=100.0)
    g.add_argument("--velocity", type=float, default=1.0)
    g.add_argument("--out")

    def source(sp, required):
        sp.add_argument("--in", dest="input", required=required, help="trajectory CSV")

    def tuning(sp):
        sp.add_argument("--q", type=float, help="Kalman process noise Q")
        sp.add_argument("--r", type=float, help="Kalman measurement noise R")
        sp.add_argument("--epochs", type=int)
        sp.add_argument("--lr", type=float)
        sp.add_argument("--skip-transient", action=argparse.BooleanOptionalAction, default=None)

    r = sub.add_parser("run", help="run one scheme on a trajectory")
    source(r, True)
    r.add_argument("--scheme", choices=("kalman", "mlp", "wiener"), required=True)
    r.add_argument("--length", type=int, help="Wiener filter length")
    r.add_argument("--parallel", type=int, choices=(1, 2, 3), default=1)
    r.add_argument("--out")
    r.add_argument("--errors", help="also write k,abs_error CSV here")
    r.add_argument("--format", choices=("csv", "json", "table"), default="csv")
    tuning(r)

    b = sub.add_parser("bench", help="time schemes")
    source(b, False)
    b.add_argument("--schemes", nargs="+", help="e.g. kalman mlp 'wiener-par3(180)'")
    b.add_argument("--repetitions", type=int)
    b.add_argument("--format", choices=("json", "table"), default="table")
    b.add_argument("--out")
    tuning(b)

    rep = sub.add_parser("report", help="full comparison report")
    source(rep, False)
    rep.add_argument("--schemes", nargs="+")
    rep.add_argument("--repetitions", type=int)
    rep.add_argument("--inject-paper-times", action="store_true",
                     help="add the sampling-rate table computed from published times")
    rep.add_argument("--timings", type=Path,
                     help="JSON {scheme_id: ms} used instead of measuring")
    rep.add_argument("--format", choices=("json", "table"), default="json")
    rep.add_argument("--out")
    tuning(rep)

    f = sub.add_parser("freq", help="sampling rate needed to match a reference time")
    f.add_argument("--t-ref", type=float, required=True, help="reference processing time, ms")
    f.add_argument("--t-proc", type=float, required=True, help="Wiener processing time, ms")
    f.add_argument("--n", type=int, required=True, help="samples to accumulate")
    f.add_argument("--format", choices=("table", "json"), default="table")
    return p


def _settings(args):
    s = cfg.load(args.config) if args.config else cfg.Settings()
    for flag, attr in (("q", "kalman_q"), ("r", "kalman_r"), ("epochs", "mlp_epochs"),
                       ("lr", "mlp_lr"), ("skip_transient", "wiener_skip_transient"),
                       ("repetitions", "repetitions"), ("seed", "seed"),
                       ("white_sigma", "noise_white_sigma"), ("ar_coeff", "noise_ar_coeff"),
                       ("bias", "noise_bias"), ("length", "wiener_length")):
        v = getattr(args, flag, None)
        if v is not None:
            setattr(s, attr, v)
    return s


def _harness_config(s: cfg.Settings, inject=False):
    return HarnessConfig(
        kalman_q=s.kalman_q,
        kalman_r=s.kalman_r,
        mlp=mlp.TrainConfig(s.mlp_epochs, s.mlp_lr, s.mlp_seed),
        skip_transient=s.wiener_skip_transient,
        repetitions=s.repetitions,
        inject_paper_times=inject,
    )


def _trajectory(args, s):
    if getattr(args, "input", None):
        return load_csv(args.input)
    return generate(noise=NoiseSpec(s.noise_white_sigma, s.noise_ar_coeff, s.noise_bias, s.seed))


def _cmd_generate(args, s):
    traj = generate(args.n, args.dt, args.motion,
                    NoiseSpec(s.noise_white_sigma, s.noise_ar_coeff, s.noise_bias, s.seed),
                    truth_level=args.truth_level, velocity=args.velocity)
    with _open_out(args.out) as fh:
        save_csv(traj, fh)


def _cmd_run(args, s):
    if args.parallel != 1 and args.scheme != "wiener":
        raise UsageError("--parallel applies only to the wiener scheme")
    if args.length is not None and args.scheme != "wiener":
        raise UsageError("--length applies only to the wiener scheme")
    traj = _trajectory(args, s)
    if args.scheme == "wiener":
        scheme = Scheme("wiener", s.wiener_length or len(traj), args.parallel)
    else:
        scheme = Scheme(args.scheme)
    est, stats = harness.run_scheme(scheme, traj, _harness_config(s))
    if scheme.kind == "mlp":
        k = np.arange(len(traj) // 2, len(traj))
    else:
        k = np.arange(est.size)
    truth = traj.truth[k]

    with _open_out(args.out) as fh:
        if args.format == "json":
            json.dump({"scheme": str(scheme), "k": k.tolist(), "estimate": est.tolist(),
                       "error_stats": stats.as_dict()}, fh, indent=2)
            fh.write("\n")
        elif args.format == "table":
            fh.write(f"{'k':>6} {'estimate':>14} {'truth':>14}\n")
            for i, e, t in zip(k, est, truth):
                fh.write(f"{i:>6d} {e:>14.6f} {t:>14.6f}\n")
            fh.write(f"mean_abs={stats.mean_abs:.6f} variance={stats.variance:.6f} "
                     f"count={stats.count}\n")
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "estimate"])
            for i, e in zip(k, est):
                w.writerow([int(i), repr(float(e))])
            fh.write(f"# scheme={scheme}\n# mean_abs={stats.mean_abs!r}\n"
                     f"# variance={stats.variance!r}\n# count={stats.count}\n")
    if args.errors:
        emit_error_series(est, truth, args.errors, k)


def _schemes(args, traj):
    if not args.schemes:
        return harness.default_schemes(len(traj))
    try:
        return [Scheme.parse(t) for t in args.schemes]
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def _cmd_bench(args, s):
    traj = _trajectory(args, s)
    hc = _harness_config(s)
    results = [harness.time_scheme(sc, traj, hc.repetitions, hc) for sc in _schemes(args, traj)]
    with _open_out(args.out) as fh:
        if args.format == "json":
            json.dump([r.__dict__ for r in results], fh, indent=2)
            fh.write("\n")
        else:
            fh.write(f"{'scheme':<20}{'median ms':>12}{'IQR ms':>12}{'MAC/out':>10}{'reps':>6}\n")
            for r in results:
                mac = "-" if r.mac_per_output is None else f"{r.mac_per_output:g}"
                fh.write(f"{r.scheme_id:<20}{r.processing_ms:>12.4f}{r.spread_ms:>12.4f}"
                         f"{mac:>10}{r.repetitions:>6}\n")


def _cmd_report(args, s):
    traj = _trajectory(args, s)
    timings = None
    if args.timings:
        try:
            timings = json.loads(args.timings.read_text())
        except json.JSONDecodeError as exc:
            raise FormatError(f"timings file is not JSON: {exc}") from None
    report = harness.build_report(traj, _schemes(args, traj),
                                  _harness_config(s, args.inject_paper_times), timings)
    with _open_out(args.out) as fh:
        fh.write(harness.report_json(report) if args.format == "json" else harness.report_text(report))


def _cmd_freq(args, s):
    req = harness.required_frequency(args.t_ref, args.t_proc, args.n)
    if args.format == "json":
        print(json.dumps({"required_khz": req.required_khz,
                          "samples_to_accumulate": req.samples_to_accumulate}))
    elif req.feasible:
        print(f"{req.required_khz:.2f} kHz")
    else:
        print(harness.IMPOSSIBLE)


COMMANDS = {"generate": _cmd_generate, "run": _cmd_run, "bench": _cmd_bench,
            "report": _cmd_report, "freq": _cmd_freq}


def main(argv=None):
    logging.basicConfig(format="%(name)s: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args = _build_parser().parse_args(argv)
        if args.verbose:
            log.setLevel(logging.DEBUG)
        settings = _settings(args)
        COMMANDS[args.command](args, settings)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"gpsdenoise: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, NumericalError, OSError) as exc:
        print(f"gpsdenoise: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
