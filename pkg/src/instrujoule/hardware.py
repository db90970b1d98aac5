"""Ground-truth power from oscilloscope captures of a two-rail sensing rig.

The rig senses the three supplies feeding a GPU: the two PCI-E slot rails
(12 V and 3.3 V) each through a series shunt resistor, and the direct
supply cable through a current clamp. Per capture row:

    p_12v  = (v_s1 - v_g1) / r_s * v_g1    (shunt drop -> current, times rail voltage)
    p_3v3  = (v_s2 - v_g2) / r_s * v_g2
    p_dps  = i_clamp * v_dps
    p_total = p_12v + p_3v3 + p_dps        (watts)

The total is symmetric in the two shunt terms, so swapping which rail is
wired to which shunt pair cannot change it. Capture rows are assumed
time-aligned (all channels acquired by one oscilloscope). The shunt value
and capture rate are properties of the rig and must come with the data;
there are no defaults.

CSV format: a ``# r_s_ohm: <value>`` comment line, then the header
``t_s,v_s1,v_g1,v_s2,v_g2,i_clamp_a,v_dps``, then one row per sample with
``%.9g`` values.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .energy import integrate_energy
from .errors import MalformedCapture, MissingShunt
from .trace import KernelWindow, PowerTrace, _read_text

_HEADER = "t_s,v_s1,v_g1,v_s2,v_g2,i_clamp_a,v_dps"
_CHANNELS = ("v_s1", "v_g1", "v_s2", "v_g2", "i_clamp", "v_dps")


@dataclass(frozen=True)
class HwSample:
    t: float
    v_s1: float
    v_g1: float
    v_s2: float
    v_g2: float
    i_clamp: float
    v_dps: float


@dataclass(frozen=True)
class HwPowerPoint:
    t: float
    p_pcie_12v: float  # W
    p_pcie_3v3: float  # W
    p_dps: float       # W
    p_total: float     # W


class HwCapture:
    """Immutable six-channel capture plus the shunt resistance (ohms)."""

    __slots__ = ("times", "channels", "r_s")

    def __init__(self, times, channels: dict, r_s: float):
        if not r_s > 0:
            raise MalformedCapture(f"shunt resistance must be > 0, got {r_s}")
        t = np.asarray(times, dtype=np.float64)
        if t.size and not np.all(np.isfinite(t)):
            raise MalformedCapture("non-finite timestamp")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            idx = int(np.argmax(np.diff(t) <= 0))
            raise MalformedCapture(f"timestamps not strictly increasing at index {idx + 1}")
        chans = {}
        for name in _CHANNELS:
            arr = np.asarray(channels[name], dtype=np.float64)
            if arr.shape != t.shape:
                raise MalformedCapture(f"channel {name} length differs from timestamps")
            if arr.size and not np.all(np.isfinite(arr)):
                raise MalformedCapture(f"non-finite value in channel {name}")
            arr.setflags(write=False)
            chans[name] = arr
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "channels", chans)
        object.__setattr__(self, "r_s", float(r_s))

    def __setattr__(self, name, value):
        raise AttributeError("HwCapture is immutable")

    def __len__(self) -> int:
        return int(self.times.size)

    def sample(self, i: int) -> HwSample:
        return HwSample(
            float(self.times[i]),
            *(float(self.channels[name][i]) for name in _CHANNELS),
        )


def hw_power(sample: HwSample, r_s: float) -> HwPowerPoint:
    """Evaluate the rig power equation for one capture row (watts)."""
    if not r_s > 0:
        raise ValueError("shunt resistance must be > 0")
    p_12v = (sample.v_s1 - sample.v_g1) / r_s * sample.v_g1
    p_3v3 = (sample.v_s2 - sample.v_g2) / r_s * sample.v_g2
    p_dps = sample.i_clamp * sample.v_dps
    return HwPowerPoint(sample.t, p_12v, p_3v3, p_dps, p_12v + p_3v3 + p_dps)


def hw_power_trace(capture: HwCapture) -> PowerTrace:
    """Per-row power evaluation as a milliwatt trace for energy integration."""
    r_s = capture.r_s
    c = capture.channels
    p_watts = (
        (c["v_s1"] - c["v_g1"]) / r_s * c["v_g1"]
        + (c["v_s2"] - c["v_g2"]) / r_s * c["v_g2"]
        + c["i_clamp"] * c["v_dps"]
    )
    return PowerTrace(capture.times, p_watts * 1000.0)


def hw_energy(capture: HwCapture, window: KernelWindow) -> float:
    """Window energy (mJ) of the capture, using the same sample-mean
    integration as the software strategies so comparisons are like for like."""
    return integrate_energy(hw_power_trace(capture), window)


def save_hw_capture(capture: HwCapture, sink) -> None:
    lines = [f"# r_s_ohm: {capture.r_s:.9g}", _HEADER]
    cols = [capture.times] + [capture.channels[name] for name in _CHANNELS]
    for row in zip(*cols):
        lines.append(",".join("%.9g" % v for v in row))
    text = "\n".join(lines) + "\n"
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text, encoding="utf-8")
    elif hasattr(sink, "encoding") or isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(text.encode("utf-8"))


def load_hw_capture(source) -> HwCapture:
    """Parse a capture CSV. MissingShunt if the r_s comment is absent;
    MalformedCapture (with line number) for format or invariant violations."""
    text = _read_text(source, MalformedCapture)
    lines = text.splitlines()
    r_s = None
    idx = 0
    while idx < len(lines) and lines[idx].startswith("#"):
        body = lines[idx].lstrip("#").strip()
        if body.startswith("r_s_ohm:"):
            payload = body[len("r_s_ohm:"):].strip()
            try:
                r_s = float(payload)
            except ValueError:
                raise MalformedCapture(f"unparsable shunt value '{payload}'", idx + 1) from None
        idx += 1
    if r_s is None:
        raise MissingShunt("capture has no '# r_s_ohm: <value>' comment")
    if idx >= len(lines) or lines[idx].strip() != _HEADER:
        got = lines[idx].strip() if idx < len(lines) else "<end of file>"
        raise MalformedCapture(f"expected header '{_HEADER}', got '{got}'", idx + 1)
    idx += 1

    rows: list[list[float]] = []
    for line_no in range(idx, len(lines)):
        line = lines[line_no].strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise MalformedCapture(f"expected 7 fields, got {len(parts)}", line_no + 1)
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise MalformedCapture(f"unparsable number in '{line}'", line_no + 1) from None
        if not all(math.isfinite(v) for v in values):
            raise MalformedCapture(f"non-finite value in '{line}'", line_no + 1)
        if rows and values[0] <= rows[-1][0]:
            raise MalformedCapture(
                f"timestamp {values[0]:.9g} not after previous {rows[-1][0]:.9g}",
                line_no + 1,
            )
        rows.append(values)

    if rows:
        cols = list(zip(*rows))
    else:
        cols = [()] * 7
    channels = {name: cols[i + 1] for i, name in enumerate(_CHANNELS)}
    return HwCapture(cols[0], channels, r_s)
