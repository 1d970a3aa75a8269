"""`key = value` configuration files with dotted keys (e.g. `kalman.q = 900`)."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError

AUTO = "auto"


@dataclass
class Settings:
    kalman_q: float = 900.0
    kalman_r: float | None = None  # None: derive from the noise model, else Q
    wiener_length: int | None = None  # None: trajectory length
    wiener_skip_transient: bool = False
    mlp_epochs: int = 500
    mlp_lr: float = 0.01
    mlp_seed: int = 0
    noise_white_sigma: float = 15.0
    noise_ar_coeff: float = 0.2
    noise_bias: float = 0.0
    seed: int = 7
    repetitions: int = 50


def _bool(text):
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt(conv):
    return lambda text: None if text.lower() == AUTO else conv(text)


_KEYS = {
    "kalman.q": ("kalman_q", float),
    "kalman.r": ("kalman_r", _opt(float)),
    "wiener.length": ("wiener_length", _opt(int)),
    "wiener.skip_transient": ("wiener_skip_transient", _bool),
    "mlp.epochs": ("mlp_epochs", int),
    "mlp.lr": ("mlp_lr", float),
    "mlp.seed": ("mlp_seed", int),
    "noise.white_sigma": ("noise_white_sigma", float),
    "noise.ar_coeff": ("noise_ar_coeff", float),
    "noise.bias": ("noise_bias", float),
    "seed": ("seed", int),
    "bench.repetitions": ("repetitions", int),
}


def parse(text, settings=None):
    settings = Settings() if settings is None else settings
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"expected key = value, got {raw!r}", line=lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _KEYS:
            raise FormatError(f"unknown key {key!r}", line=lineno)
        attr, conv = _KEYS[key]
        try:
            setattr(settings, attr, conv(value))
        except ValueError as exc:
            raise FormatError(f"bad value for {key}: {exc}", line=lineno) from None
    return settings


def load(path, settings=None):
    return parse(Path(path).read_text(), settings)
