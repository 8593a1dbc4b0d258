"""Windowed statistics and feature-matrix assembly.

Each window contributes seven statistics per selected channel, laid out
channel-major in canonical element order: average, variance, sum, median,
maximum, minimum, range.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .acquisition import Window
from .errors import ParseError, ValidationError
from .signal_model import ElementKind, element_from_name

STAT_NAMES = ("average", "variance", "sum", "median", "maximum", "minimum", "range")
N_STATS = len(STAT_NAMES)


def _stats_block(values: np.ndarray) -> np.ndarray:
    """Seven statistics per row of a (n_windows, window_len) float array."""
    out = np.empty((values.shape[0], N_STATS), dtype=np.float64)
    out[:, 0] = np.mean(values, axis=1)
    out[:, 1] = np.var(values, axis=1)  # population variance (divide by n)
    out[:, 2] = np.sum(values, axis=1)
    out[:, 3] = np.median(values, axis=1)
    out[:, 4] = np.max(values, axis=1)
    out[:, 5] = np.min(values, axis=1)
    out[:, 6] = out[:, 4] - out[:, 5]
    return out


def window_stats(samples: Sequence[float] | np.ndarray) -> tuple[float, ...]:
    """(average, variance, sum, median, maximum, minimum, range) of one window."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("window_stats needs a non-empty 1-D sample sequence")
    return tuple(float(x) for x in _stats_block(arr.reshape(1, -1))[0])


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    label: str
    case_id: str


@dataclass
class FeatureMatrix:
    """Rows of windowed feature vectors with one label and case id per row."""

    values: np.ndarray  # (n_rows, 7 * n_channels) float64
    labels: list[str]
    case_ids: list[str]
    channel_selection: tuple[ElementKind, ...]
    feature_names: tuple[str, ...]

    def __post_init__(self):
        n = self.values.shape[0]
        if len(self.labels) != n or len(self.case_ids) != n:
            raise ValidationError("labels/case_ids length must match the number of rows")
        if self.values.shape[1] != N_STATS * len(self.channel_selection):
            raise ValidationError(
                f"expected {N_STATS * len(self.channel_selection)} columns, "
                f"got {self.values.shape[1]}")
        if len(self.feature_names) != self.values.shape[1]:
            raise ValidationError("feature_names must match the number of columns")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def rows(self) -> Iterator[FeatureVector]:
        for i in range(self.n_rows):
            yield FeatureVector(self.values[i], self.labels[i], self.case_ids[i])

    def subset_rows(self, indices: np.ndarray) -> "FeatureMatrix":
        idx = np.asarray(indices)
        return FeatureMatrix(values=self.values[idx],
                             labels=[self.labels[i] for i in idx],
                             case_ids=[self.case_ids[i] for i in idx],
                             channel_selection=self.channel_selection,
                             feature_names=self.feature_names)

    def select_channels(self, channels: Sequence[ElementKind]) -> "FeatureMatrix":
        """Column-block subset, keeping canonical element order."""
        wanted = canonical_selection(channels)
        missing = [k.name for k in wanted if k not in self.channel_selection]
        if missing:
            raise ValidationError(f"matrix has no channel {', '.join(missing)}")
        cols: list[int] = []
        for kind in wanted:
            base = self.channel_selection.index(kind) * N_STATS
            cols.extend(range(base, base + N_STATS))
        return FeatureMatrix(values=self.values[:, cols].copy(),
                             labels=list(self.labels),
                             case_ids=list(self.case_ids),
                             channel_selection=wanted,
                             feature_names=feature_names_for(wanted))


def canonical_selection(channels: Sequence[ElementKind]) -> tuple[ElementKind, ...]:
    """Deduplicate and order a channel subset in element declaration order."""
    chosen = set(channels)
    if not chosen:
        raise ValidationError("channel selection must be non-empty")
    return tuple(k for k in ElementKind if k in chosen)


def feature_names_for(channels: Sequence[ElementKind]) -> tuple[str, ...]:
    return tuple(f"{k.name}_{s}" for k in channels for s in STAT_NAMES)


def featurize(windows: Sequence[Window],
              selection: Sequence[ElementKind],
              scale: float = 1.0) -> FeatureMatrix:
    """One feature row per window over the selected channels.

    `scale` multiplies digits before the statistics are taken (for reporting
    in millivolts via the ADC step; note variance then scales by scale**2).
    """
    wanted = canonical_selection(selection)
    if len(windows) == 0:
        return FeatureMatrix(values=np.empty((0, N_STATS * len(wanted))), labels=[],
                             case_ids=[], channel_selection=wanted,
                             feature_names=feature_names_for(wanted))
    for w in windows:
        for kind in wanted:
            if kind not in w.digits:
                raise ValidationError(f"window at index {w.start_index} of case "
                                      f"{w.case_id!r} is missing channel {kind.name}")
    n = len(windows)
    blocks = []
    lengths = {len(w.digits[wanted[0]]) for w in windows}
    for kind in wanted:
        if len(lengths) == 1:
            stacked = np.stack([w.digits[kind] for w in windows]).astype(np.float64)
            if scale != 1.0:
                stacked *= scale
            blocks.append(_stats_block(stacked))
        else:  # mixed window lengths: fall back to per-window stats
            block = np.empty((n, N_STATS))
            for i, w in enumerate(windows):
                arr = w.digits[kind].astype(np.float64)
                if scale != 1.0:
                    arr = arr * scale
                block[i] = _stats_block(arr.reshape(1, -1))[0]
            blocks.append(block)
    values = np.concatenate(blocks, axis=1)
    return FeatureMatrix(values=values,
                         labels=[w.label for w in windows],
                         case_ids=[w.case_id for w in windows],
                         channel_selection=wanted,
                         feature_names=feature_names_for(wanted))


def save_features(matrix: FeatureMatrix, path: str) -> None:
    """CSV with one feature column per name plus trailing label and case_id columns."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# ehsense-features v1 channels={','.join(k.name for k in matrix.channel_selection)}\n")
        writer = csv.writer(fh)
        writer.writerow(list(matrix.feature_names) + ["label", "case_id"])
        for i in range(matrix.n_rows):
            row = [repr(float(v)) for v in matrix.values[i]]
            writer.writerow(row + [matrix.labels[i], matrix.case_ids[i]])


def load_features(path: str) -> FeatureMatrix:
    with open(path, "r", newline="") as fh:
        line_no = 0
        first = fh.readline()
        line_no += 1
        if not first.startswith("# ehsense-features"):
            raise ParseError(f"{path}: line 1: missing 'ehsense-features' header")
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: line 2: missing column header") from None
        line_no += 1
        if len(header) < 2 + N_STATS or header[-2:] != ["label", "case_id"]:
            raise ParseError(f"{path}: line 2: expected feature columns then label,case_id")
        feature_names = tuple(header[:-2])
        channels = []
        for name in feature_names[::N_STATS]:
            channels.append(element_from_name(name.split("_", 1)[0]))
        expected = feature_names_for(channels)
        if feature_names != expected:
            raise ParseError(f"{path}: line 2: feature columns are not the canonical "
                             f"7-per-channel layout")
        values, labels, case_ids = [], [], []
        for row in reader:
            line_no += 1
            if len(row) != len(header):
                raise ParseError(f"{path}: line {line_no}: expected {len(header)} cells, "
                                 f"got {len(row)}")
            try:
                values.append([float(c) for c in row[:-2]])
            except ValueError:
                raise ParseError(f"{path}: line {line_no}: non-numeric feature cell") from None
            if not row[-2] or not row[-1]:
                raise ParseError(f"{path}: line {line_no}: empty label or case_id")
            labels.append(row[-2])
            case_ids.append(row[-1])
    arr = np.array(values, dtype=np.float64) if values else \
        np.empty((0, len(feature_names)))
    return FeatureMatrix(values=arr, labels=labels, case_ids=case_ids,
                         channel_selection=tuple(channels), feature_names=feature_names)
