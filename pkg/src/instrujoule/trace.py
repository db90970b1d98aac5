"""Power-over-time traces and their CSV form.

A trace is a strictly time-ordered series of instantaneous board power
readings in milliwatts, with timestamps in seconds relative to the start of
recording. A trace may carry one annotated kernel window marking where the
measured kernel executed.

CSV format (bit-exact):
  line 1 (optional)  ``# window: <start_s>,<end_s>``
  header             ``t_s,power_mw``
  one sample per line, both fields formatted with ``%.9g``
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import MalformedTrace

_HEADER = "t_s,power_mw"


@dataclass(frozen=True)
class PowerSample:
    t: float        # seconds, relative to trace start
    power: float    # milliwatts, non-negative


@dataclass(frozen=True)
class KernelWindow:
    start: float
    end: float

    def __post_init__(self):
        if not (self.end > self.start):
            raise ValueError(f"window end {self.end} must exceed start {self.start}")

    @property
    def span(self) -> float:
        return self.end - self.start


class PowerTrace:
    """Immutable, numpy-backed power trace.

    Construction validates the invariants: finite strictly increasing
    timestamps, non-negative power, and (when present) a window contained
    in the sampled span.
    """

    __slots__ = ("times", "powers", "window")

    def __init__(
        self,
        times: Sequence[float] | np.ndarray,
        powers: Sequence[float] | np.ndarray,
        window: KernelWindow | None = None,
    ):
        t = np.asarray(times, dtype=np.float64)
        p = np.asarray(powers, dtype=np.float64)
        if t.shape != p.shape or t.ndim != 1:
            raise MalformedTrace("times and powers must be 1-d arrays of equal length")
        if t.size and not np.all(np.isfinite(t)):
            raise MalformedTrace("non-finite timestamp")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            idx = int(np.argmax(np.diff(t) <= 0))
            raise MalformedTrace(f"timestamps not strictly increasing at index {idx + 1}")
        if p.size and bool(np.any(p < 0)):
            raise MalformedTrace("negative power sample")
        if window is not None:
            if t.size == 0:
                raise MalformedTrace("window annotation on an empty trace")
            if window.start < t[0] or window.end > t[-1]:
                raise MalformedTrace(
                    f"window [{window.start}, {window.end}] outside sampled span "
                    f"[{t[0]}, {t[-1]}]"
                )
        t.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "powers", p)
        object.__setattr__(self, "window", window)

    def __setattr__(self, name, value):
        raise AttributeError("PowerTrace is immutable")

    def __len__(self) -> int:
        return int(self.times.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerTrace):
            return NotImplemented
        return (
            self.window == other.window
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.powers, other.powers)
        )

    def __repr__(self) -> str:
        w = f", window=[{self.window.start}, {self.window.end}]" if self.window else ""
        return f"PowerTrace({len(self)} samples{w})"

    @property
    def samples(self) -> list[PowerSample]:
        return [PowerSample(float(t), float(p)) for t, p in zip(self.times, self.powers)]

    @classmethod
    def from_samples(cls, samples: Iterable[PowerSample], window: KernelWindow | None = None):
        pairs = [(s.t, s.power) for s in samples]
        if pairs:
            t, p = zip(*pairs)
        else:
            t, p = (), ()
        return cls(t, p, window)

    def with_window(self, window: KernelWindow | None) -> "PowerTrace":
        return PowerTrace(self.times, self.powers, window)


def _fmt(x: float) -> str:
    return "%.9g" % x


def save_trace(trace: PowerTrace, sink) -> None:
    """Write a trace as CSV to ``sink`` (path, text stream, or binary stream)."""
    lines = []
    if trace.window is not None:
        lines.append(f"# window: {_fmt(trace.window.start)},{_fmt(trace.window.end)}")
    lines.append(_HEADER)
    for t, p in zip(trace.times, trace.powers):
        lines.append(f"{_fmt(t)},{_fmt(p)}")
    text = "\n".join(lines) + "\n"
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text, encoding="utf-8")
    elif hasattr(sink, "encoding") or isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(text.encode("utf-8"))


def load_trace(source) -> PowerTrace:
    """Parse a trace CSV from a path, text stream, binary stream, or bytes.

    Raises MalformedTrace (with the offending line number) on a bad header,
    unparsable numbers, non-monotonic timestamps, or negative power.
    """
    text = _read_text(source, MalformedTrace)
    lines = text.splitlines()
    window = None
    idx = 0
    if idx < len(lines) and lines[idx].startswith("#"):
        window = _parse_window_comment(lines[idx], idx + 1)
        idx += 1
    if idx >= len(lines) or lines[idx].strip() != _HEADER:
        got = lines[idx].strip() if idx < len(lines) else "<end of file>"
        raise MalformedTrace(f"expected header '{_HEADER}', got '{got}'", idx + 1)
    idx += 1

    times: list[float] = []
    powers: list[float] = []
    for line_no in range(idx, len(lines)):
        line = lines[line_no].strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedTrace(f"expected 't,power', got '{line}'", line_no + 1)
        try:
            t, p = float(parts[0]), float(parts[1])
        except ValueError:
            raise MalformedTrace(f"unparsable number in '{line}'", line_no + 1) from None
        if not (math.isfinite(t) and math.isfinite(p)):
            raise MalformedTrace(f"non-finite value in '{line}'", line_no + 1)
        if times and t <= times[-1]:
            raise MalformedTrace(
                f"timestamp {t:.9g} not after previous {times[-1]:.9g}", line_no + 1
            )
        if p < 0:
            raise MalformedTrace(f"negative power {p:.9g}", line_no + 1)
        times.append(t)
        powers.append(p)
    return PowerTrace(times, powers, window)


def _parse_window_comment(line: str, line_no: int) -> KernelWindow:
    body = line.lstrip("#").strip()
    if not body.startswith("window:"):
        raise MalformedTrace(f"unrecognized comment '{line}'", line_no)
    payload = body[len("window:"):].strip()
    parts = payload.split(",")
    if len(parts) != 2:
        raise MalformedTrace(f"window comment needs 'start,end', got '{payload}'", line_no)
    try:
        start, end = float(parts[0]), float(parts[1])
    except ValueError:
        raise MalformedTrace(f"unparsable window bounds '{payload}'", line_no) from None
    try:
        return KernelWindow(start, end)
    except ValueError as exc:
        raise MalformedTrace(str(exc), line_no) from None


def _read_text(source, error_cls) -> str:
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise error_cls(f"no such file: {path}")
        return path.read_text(encoding="utf-8")
    if isinstance(source, bytes):
        return source.decode("utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data
