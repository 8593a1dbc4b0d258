"""A/D conversion and fixed-length windowing of voltage traces.

The default converter matches the acquisition board: 10-bit resolution over a
3600 mV full scale (one digit per 3.515625 mV) sampled at 16 Hz, with feature
windows cut every 2 seconds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .signal_model import ElementKind, VoltageTrace


@dataclass(frozen=True)
class AdcConfig:
    resolution_bits: int = 10
    full_scale_mv: float = 3600.0
    sample_rate_hz: float = 16.0

    def __post_init__(self):
        if self.resolution_bits < 1:
            raise ValidationError(f"resolution_bits must be >= 1, got {self.resolution_bits}")
        if not self.full_scale_mv > 0:
            raise ValidationError(f"full_scale_mv must be > 0, got {self.full_scale_mv}")
        if not self.sample_rate_hz > 0:
            raise ValidationError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")

    @property
    def n_levels(self) -> int:
        return 1 << self.resolution_bits

    @property
    def step_mv(self) -> float:
        return self.full_scale_mv / self.n_levels

    @property
    def max_digit(self) -> int:
        return self.n_levels - 1


@dataclass
class DigitTrace:
    """Quantized counterpart of a VoltageTrace; digits lie in [0, 2^bits - 1]."""

    sample_rate_hz: float
    channels: dict[ElementKind, np.ndarray]
    labels: list[str]
    case_id: str
    resolution_bits: int = 10

    def __post_init__(self):
        n = len(self.labels)
        hi = (1 << self.resolution_bits) - 1
        for kind, digits in self.channels.items():
            if len(digits) != n:
                raise ValidationError(
                    f"channel {kind.name} has {len(digits)} samples but {n} labels")
            if digits.size and (digits.min() < 0 or digits.max() > hi):
                raise ValidationError(f"channel {kind.name} has digits outside [0, {hi}]")

    @property
    def n_samples(self) -> int:
        return len(self.labels)


@dataclass
class Window:
    """One contiguous slice of digits per channel with a majority place label."""

    start_index: int
    digits: dict[ElementKind, np.ndarray]
    label: str
    case_id: str


def quantize(trace: VoltageTrace, cfg: AdcConfig | None = None) -> DigitTrace:
    """Map millivolts to ADC digits: floor(mv / step), clamped to the top code.

    Every sample must lie in [0, full_scale_mv]; a sample outside that range
    raises a validation error naming the channel and sample index.
    """
    cfg = cfg or AdcConfig()
    channels: dict[ElementKind, np.ndarray] = {}
    for kind, mv in trace.channels.items():
        bad = np.flatnonzero(~np.isfinite(mv) | (mv < 0) | (mv > cfg.full_scale_mv))
        if bad.size:
            i = int(bad[0])
            raise ValidationError(
                f"channel {kind.name} sample {i}: {mv[i]} mV outside [0, {cfg.full_scale_mv}]")
        digits = np.floor(mv / cfg.step_mv).astype(np.int32)
        np.minimum(digits, cfg.max_digit, out=digits)
        channels[kind] = digits
    return DigitTrace(sample_rate_hz=trace.sample_rate_hz, channels=channels,
                      labels=list(trace.labels), case_id=trace.case_id,
                      resolution_bits=cfg.resolution_bits)


def _majority_label(labels: list[str]) -> str:
    counts: dict[str, int] = {}
    for lbl in labels:
        counts[lbl] = counts.get(lbl, 0) + 1
    top = max(counts.values())
    for lbl in labels:  # earliest-occurring label wins ties
        if counts[lbl] == top:
            return lbl
    raise AssertionError("unreachable")


def windowize(trace: DigitTrace, window_seconds: float) -> list[Window]:
    """Cut a digit trace into contiguous, non-overlapping fixed-length windows.

    Window length is round(window_seconds * sample_rate); the trailing partial
    window is discarded.  Each window is labeled with the majority place label
    of its slice, ties broken by the earliest-occurring label in the slice.
    """
    if not window_seconds > 0:
        raise ValidationError(f"window_seconds must be > 0, got {window_seconds}")
    if trace.n_samples == 0:
        raise ValidationError("cannot windowize an empty trace")
    length = int(round(window_seconds * trace.sample_rate_hz))
    if length == 0:
        raise ValidationError(
            f"window of {window_seconds}s at {trace.sample_rate_hz}Hz rounds to 0 samples")
    n_windows = trace.n_samples // length
    windows = []
    for w in range(n_windows):
        s = w * length
        digits = {k: v[s:s + length] for k, v in trace.channels.items()}
        label = _majority_label(trace.labels[s:s + length])
        windows.append(Window(start_index=s, digits=digits, label=label,
                              case_id=trace.case_id))
    return windows
