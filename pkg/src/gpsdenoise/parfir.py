"""Block-parallel FIR execution via polyphase decomposition.

Two structures are provided:

* order 2: four subfilter products per block of two outputs,
  Y_even = H_e X_e + D H_o X_o and Y_odd = H_o X_e + H_e X_o,
  where D is a one-block delay.
* order 3: the fast structure with six subfilter products per block of
  three outputs, sharing the pre-added phases (H0+H1), (H1+H2), (H0+H1+H2).

Each product is a short FIR running at the block rate with its own delay
line, so the products within a block are independent of each other.  An
engine may fan them out to an executor; the combination step waits for all
of them.
"""
from __future__ import annotations

import math
from concurrent.futures import Executor
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

ORDERS = (2, 3)


@dataclass(frozen=True, eq=False)
class PolyphaseBank:
    order: int
    subfilters: tuple
    source_length: int

    @property
    def phase_length(self):
        return self.subfilters[0].size


def decompose(h, order):
    """Split `h` into `order` decimated phases, zero-padded to equal length."""
    if order not in ORDERS:
        raise ParameterError(f"order must be 2 or 3, got {order!r}")
    h = np.asarray(h, dtype=float).ravel()
    if h.size < 1:
        raise ParameterError("cannot decompose an empty filter")
    length = math.ceil(h.size / order)
    padded = np.zeros(length * order)
    padded[: h.size] = h
    phases = tuple(padded[p::order].copy() for p in range(order))
    return PolyphaseBank(order, phases, h.size)


def interleave(bank: PolyphaseBank):
    """Inverse of `decompose`: rebuild the original coefficient sequence."""
    out = np.empty(bank.phase_length * bank.order)
    for p, phase in enumerate(bank.subfilters):
        out[p::bank.order] = phase
    return out[: bank.source_length]


class DelayLine:
    """Block-rate FIR with a history buffer of its last L-1 inputs."""

    def __init__(self, taps):
        self.taps = np.asarray(taps, dtype=float)
        self.history = np.zeros(self.taps.size - 1)

    def filter(self, u):
        buf = np.concatenate([self.history, u])
        out = np.convolve(buf, self.taps, mode="valid")
        if self.history.size:
            self.history = buf[buf.size - self.history.size:]
        return out

    def reset(self):
        self.history[:] = 0.0


class BlockDelay:
    """One-block delay (z^-order at the sample rate) carried across calls."""

    def __init__(self):
        self.last = 0.0

    def __call__(self, v):
        if v.size == 0:
            return v
        out = np.empty_like(v)
        out[0] = self.last
        out[1:] = v[:-1]
        self.last = v[-1]
        return out


@dataclass(eq=False)
class BlockFirEngine:
    bank: PolyphaseBank
    executor: Executor | None = None
    mac_count: int = 0
    branches: dict = field(init=False)
    delays: dict = field(init=False)

    def __post_init__(self):
        ph = self.bank.subfilters
        if self.bank.order == 2:
            he, ho = ph
            taps = {"ee": he, "oo": ho, "oe": ho, "eo": he}
            self.delays = {"oo": BlockDelay()}
        else:
            h0, h1, h2 = ph
            taps = {
                "00": h0,
                "11": h1,
                "22": h2,
                "01": h0 + h1,
                "12": h1 + h2,
                "012": h0 + h1 + h2,
            }
            self.delays = {"22": BlockDelay(), "c": BlockDelay()}
        self.branches = {name: DelayLine(t) for name, t in taps.items()}

    @classmethod
    def from_filter(cls, h, order, executor=None):
        return cls(decompose(h, order), executor)

    @property
    def order(self):
        return self.bank.order

    @property
    def block_size(self):
        return self.bank.order

    def mac_per_block(self):
        return len(self.branches) * self.bank.phase_length

    def reset(self):
        self.mac_count = 0
        for line in self.branches.values():
            line.reset()
        for d in self.delays.values():
            d.last = 0.0

    def _products(self, inputs):
        # inputs: branch name -> block-rate input sequence
        if self.executor is None:
            return {k: self.branches[k].filter(u) for k, u in inputs.items()}
        futures = {k: self.executor.submit(self.branches[k].filter, u) for k, u in inputs.items()}
        return {k: f.result() for k, f in futures.items()}

    def process(self, x):
        """Filter a chunk whose length is a multiple of the block size.

        State carries over between calls, so a long stream may be fed in
        pieces.
        """
        x = np.asarray(x, dtype=float)
        L = self.bank.order
        if x.size % L:
            raise ParameterError(f"chunk length {x.size} is not a multiple of {L}")
        blocks = x.size // L
        y = np.empty(x.size)
        if blocks == 0:
            return y
        if L == 2:
            xe, xo = x[0::2], x[1::2]
            p = self._products({"ee": xe, "oo": xo, "oe": xe, "eo": xo})
            y[0::2] = p["ee"] + self.delays["oo"](p["oo"])
            y[1::2] = p["oe"] + p["eo"]
        else:
            x0, x1, x2 = x[0::3], x[1::3], x[2::3]
            p = self._products({
                "00": x0,
                "11": x1,
                "22": x2,
                "01": x0 + x1,
                "12": x1 + x2,
                "012": x0 + x1 + x2,
            })
            h11 = p["11"]
            a = p["00"] - self.delays["22"](p["22"])  # H0X0 - D H2X2
            b = p["01"] - h11  # (H0+H1)(X0+X1) - H1X1
            c = p["12"] - h11  # (H1+H2)(X1+X2) - H1X1
            y[0::3] = a + self.delays["c"](c)
            y[1::3] = b - a
            y[2::3] = p["012"] - b - c
        self.mac_count += blocks * self.mac_per_block()
        return y


def mac_per_block(engine: BlockFirEngine):
    return engine.mac_per_block()


def mac_per_output(engine: BlockFirEngine):
    return engine.mac_per_block() / engine.order


def serial_mac_per_output(m):
    return m


def _run(engine, x, order):
    if engine.order != order:
        raise ParameterError(f"engine has order {engine.order}, expected {order}")
    x = np.asarray(x, dtype=float)
    n = x.size
    pad = (-n) % order
    y = engine.process(np.concatenate([x, np.zeros(pad)]))
    return y[:n]


def run2(engine: BlockFirEngine, x):
    """2-parallel filtering of a whole series; zero-pads to an even length."""
    return _run(engine, x, 2)


def run3(engine: BlockFirEngine, x):
    """Fast 3-parallel filtering of a whole series; zero-pads to a multiple of 3."""
    return _run(engine, x, 3)


def run_parallel(h, x, order, executor=None):
    """Filter `x` with a fresh engine of the given order (1 means serial)."""
    if order == 1:
        h = np.asarray(h, dtype=float)
        x = np.asarray(x, dtype=float)
        return np.convolve(h, x)[: x.size]
    engine = BlockFirEngine.from_filter(h, order, executor)
    return _run(engine, x, order)
