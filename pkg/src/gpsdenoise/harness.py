"""Scheme timing, precision/latency comparison report, sampling-frequency budget."""
from __future__ import annotations

import json
import re
import statistics
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kalman, mlp, parfir, wiener
from .errors import ParameterError
from .trajectory import ErrorStats, Trajectory, error_stats

IMPOSSIBLE = "impossible"

# Published processing times in milliseconds, keyed by scheme id.
PAPER_TIMES_MS = {
    "kalman": 20.3281,
    "mlp": 16.9648,
    "wiener(180)": 25.2656,
    "wiener-par2(180)": 20.234,
    "wiener-par3(180)": 15.1483,
    "wiener(135)": 15.5938,
    "wiener(90)": 9.688,
}

REFERENCE_SCHEMES = ("kalman", "mlp")

_SCHEME_RE = re.compile(r"^(kalman|mlp|wiener(?:-par([23]))?\((\d+)\))$")


@dataclass(frozen=True, order=True)
class Scheme:
    kind: str  # kalman | mlp | wiener
    length: int = 0
    parallel: int = 1

    def __str__(self):
        if self.kind != "wiener":
            return self.kind
        par = f"-par{self.parallel}" if self.parallel > 1 else ""
        return f"wiener{par}({self.length})"

    @property
    def is_fir(self):
        return self.kind == "wiener"

    @classmethod
    def parse(cls, text):
        m = _SCHEME_RE.match(text.strip())
        if not m:
            raise ParameterError(f"unknown scheme {text!r}")
        if m.group(1) in ("kalman", "mlp"):
            return cls(m.group(1))
        length = int(m.group(3))
        if length < 1:
            raise ParameterError("wiener length must be >= 1")
        return cls("wiener", length, int(m.group(2) or 1))


def default_schemes(n=180):
    reduced = [round(n * 3 / 4), n // 2]
    return [Scheme("kalman"), Scheme("mlp"), Scheme("wiener", n), Scheme("wiener", n, 2),
            Scheme("wiener", n, 3)] + [Scheme("wiener", m) for m in reduced if m >= 1]


@dataclass
class HarnessConfig:
    kalman_q: float = kalman.DEFAULT_Q
    kalman_r: float | None = None
    mlp: mlp.TrainConfig = field(default_factory=mlp.TrainConfig)
    skip_transient: bool = False
    repetitions: int = 50
    warmup: int = 2
    inject_paper_times: bool = False


@dataclass(frozen=True)
class TimingResult:
    scheme_id: str
    processing_ms: float
    repetitions: int
    spread_ms: float = 0.0  # interquartile range
    mac_per_output: float | None = None

    def __post_init__(self):
        if not self.processing_ms > 0:
            raise ParameterError(f"processing time must be positive, got {self.processing_ms}")
        if self.repetitions < 5:
            raise ParameterError(f"need at least 5 repetitions, got {self.repetitions}")


@dataclass(frozen=True)
class FrequencyRequirement:
    reference_scheme: str
    wiener_variant: str
    required_hz: float | str
    samples_to_accumulate: int

    @property
    def feasible(self):
        return self.required_hz != IMPOSSIBLE

    @property
    def required_khz(self):
        return self.required_hz / 1e3 if self.feasible else IMPOSSIBLE


def required_frequency(t_ref_ms, t_proc_ms, n_samples, reference="", variant=""):
    """Sampling rate at which accumulating `n_samples` plus processing fits in t_ref.

    t_ref = t_proc + n_samples / f  =>  f = n_samples / (t_ref - t_proc).
    """
    if not t_ref_ms > 0 or not t_proc_ms > 0:
        raise ParameterError("processing times must be positive")
    if not isinstance(n_samples, (int, np.integer)) or n_samples < 1:
        raise ParameterError(f"n_samples must be a positive integer, got {n_samples!r}")
    if t_ref_ms <= t_proc_ms:
        hz = IMPOSSIBLE
    else:
        hz = 1.0 / (((t_ref_ms - t_proc_ms) * 1e-3) / n_samples)
    return FrequencyRequirement(reference, variant, hz, int(n_samples))


# -- scheme execution -------------------------------------------------------

@dataclass
class Prepared:
    """Everything a scheme needs that is excluded from its timed phase."""

    scheme: Scheme
    process: callable
    evaluate: callable
    mac_per_output: float | None = None


def _wiener_window(traj, scheme):
    if scheme.length > len(traj):
        raise ParameterError(f"wiener length {scheme.length} exceeds trajectory length {len(traj)}")
    return scheme.length


def prepare(scheme: Scheme, traj: Trajectory, config: HarnessConfig):
    if scheme.kind == "kalman":
        model = kalman.KalmanModel.for_trajectory(traj, config.kalman_q, config.kalman_r)

        def process():
            return kalman.run(traj, model)[0]

        def evaluate(est):
            return error_stats(est, traj.truth)

        return Prepared(scheme, process, evaluate)

    if scheme.kind == "mlp":
        # training is setup, not processing
        half = len(traj) // 2
        x_train, k_train = mlp.features(traj.measured, 1, half)
        params = mlp.train(x_train, traj.truth[k_train], config.mlp)
        x_eval, k_eval = mlp.features(traj.measured, half, len(traj))

        def process():
            return mlp.predict(params, x_eval)

        def evaluate(est):
            return error_stats(est, traj.truth[k_eval])

        return Prepared(scheme, process, evaluate)

    m = _wiener_window(traj, scheme)
    x = traj.measured[:m]
    s = traj.truth[:m]
    skip = wiener.transient(m, config.skip_transient)
    if scheme.parallel > 1:
        per_out = parfir.mac_per_output(parfir.BlockFirEngine.from_filter(np.zeros(m), scheme.parallel))
    else:
        per_out = parfir.serial_mac_per_output(m)

    def process():
        fir = wiener.design(wiener.correlations(traj, m, window=m), m)
        return parfir.run_parallel(fir.h, x, scheme.parallel)

    def evaluate(est):
        return error_stats(est[skip:], s[skip:])

    return Prepared(scheme, process, evaluate, per_out)


def run_scheme(scheme, traj, config=None):
    """Estimates and ErrorStats for one scheme, untimed."""
    config = HarnessConfig() if config is None else config
    prep = prepare(Scheme.parse(scheme) if isinstance(scheme, str) else scheme, traj, config)
    est = prep.process()
    return est, prep.evaluate(est)


def _time(fn, repetitions, warmup):
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - t0) * 1e3)
    return samples


def time_prepared(prep: Prepared, repetitions=50, warmup=2):
    if repetitions < 5:
        raise ParameterError(f"need at least 5 repetitions, got {repetitions}")
    samples = _time(prep.process, repetitions, warmup)
    q = statistics.quantiles(samples, n=4)
    return TimingResult(str(prep.scheme), max(statistics.median(samples), 1e-9), repetitions,
                        q[2] - q[0], prep.mac_per_output)


def time_scheme(scheme, traj, repetitions=50, config=None):
    config = HarnessConfig() if config is None else config
    scheme = Scheme.parse(scheme) if isinstance(scheme, str) else scheme
    return time_prepared(prepare(scheme, traj, config), repetitions, config.warmup)


# -- report -----------------------------------------------------------------

def frequency_matrix(times_ms, schemes):
    """Reference scheme x Wiener variant table of required sampling rates (kHz)."""
    refs = [r for r in REFERENCE_SCHEMES if r in times_ms]
    variants = [s for s in schemes if s.is_fir and str(s) in times_ms]
    out = {}
    for ref in refs:
        row = {}
        for v in variants:
            req = required_frequency(times_ms[ref], times_ms[str(v)], v.length, ref, str(v))
            row[str(v)] = req.required_khz
        out[ref] = row
    return out


def _label(s: Scheme, n):
    if s.kind != "wiener":
        return str(s)
    if s.parallel > 1:
        return f"par{s.parallel}"
    return "original" if s.length == n else f"L={s.length}"


def build_report(traj: Trajectory, schemes=None, config=None, timings=None):
    """Comparison report: precision, processing time, Wiener architectures, sampling rates.

    `timings` maps scheme id to milliseconds and, when given, replaces
    measurement so the report is fully deterministic.
    """
    config = HarnessConfig() if config is None else config
    schemes = default_schemes(len(traj)) if schemes is None else schemes
    schemes = [Scheme.parse(s) if isinstance(s, str) else s for s in schemes]
    if not schemes:
        raise ParameterError("a report needs at least one scheme")
    n = len(traj)

    stats: dict[str, ErrorStats] = {}
    timing: dict[str, TimingResult] = {}
    for s in schemes:
        prep = prepare(s, traj, config)
        stats[str(s)] = prep.evaluate(prep.process())
        if timings is not None:
            if str(s) not in timings:
                raise ParameterError(f"no injected time for scheme {s}")
            timing[str(s)] = TimingResult(str(s), float(timings[str(s)]), config.repetitions,
                                          0.0, prep.mac_per_output)
        else:
            timing[str(s)] = time_prepared(prep, config.repetitions, config.warmup)

    raw = error_stats(traj.measured, traj.truth)
    precision = {"original": raw.as_dict()}
    processing = {}
    for s in schemes:
        if s.kind in ("kalman", "mlp") or (s.parallel == 1 and s.length == n):
            precision[str(s)] = stats[str(s)].as_dict()
            processing[str(s)] = timing[str(s)].processing_ms

    architectures = {}
    for s in schemes:
        if s.is_fir:
            architectures[_label(s, n)] = {
                "scheme": str(s),
                **stats[str(s)].as_dict(),
                "processing_ms": timing[str(s)].processing_ms,
                "mac_per_output": timing[str(s)].mac_per_output,
            }

    times_ms = {k: t.processing_ms for k, t in timing.items()}
    sampling = {"measured": frequency_matrix(times_ms, schemes)}
    if config.inject_paper_times:
        paper_schemes = [Scheme.parse(k) for k in PAPER_TIMES_MS]
        sampling["published"] = frequency_matrix(PAPER_TIMES_MS, paper_schemes)

    return {
        "trajectory": {"n": n, "dt": traj.dt, "axis": traj.axis_label,
                       "noise": asdict(traj.noise) if traj.noise else None},
        "precision": precision,
        "processing_time": processing,
        "wiener_architectures": architectures,
        "sampling_frequency_khz": sampling,
        "timings": [asdict(timing[str(s)]) for s in schemes],
    }


def report_json(report):
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def _fmt(v, width=12):
    if isinstance(v, str):
        return f"{v:>{width}}"
    if v is None:
        return f"{'-':>{width}}"
    return f"{v:>{width}.4f}"


def _table(title, columns, rows):
    lines = [title, " " * 14 + "".join(f"{c:>18}" for c in columns)]
    for name, values in rows:
        lines.append(f"{name:<14}" + "".join(_fmt(v, 18) for v in values))
    return "\n".join(lines)


def report_text(report):
    """Aligned plain-text rendering of a report."""
    blocks = []
    prec = report["precision"]
    cols = list(prec)
    blocks.append(_table("Precision (absolute error, m)", cols,
                         [("mean", [prec[c]["mean_abs"] for c in cols]),
                          ("variance", [prec[c]["variance"] for c in cols])]))
    proc = report["processing_time"]
    blocks.append(_table("Processing time (ms)", list(proc), [("time", list(proc.values()))]))
    arch = report["wiener_architectures"]
    cols = list(arch)
    blocks.append(_table("Wiener architectures", cols,
                         [("mean", [arch[c]["mean_abs"] for c in cols]),
                          ("variance", [arch[c]["variance"] for c in cols]),
                          ("time (ms)", [arch[c]["processing_ms"] for c in cols]),
                          ("MAC/output", [arch[c]["mac_per_output"] for c in cols])]))
    for source, matrix in report["sampling_frequency_khz"].items():
        cols = list(next(iter(matrix.values()), {}))
        blocks.append(_table(f"Required sampling frequency, kHz ({source} times)", cols,
                             [(ref, [row[c] for c in cols]) for ref, row in matrix.items()]))
    return "\n\n".join(blocks) + "\n"
