"""Densely observed functional samples: ingestion, validation, presmoothing.

A sample is a collection of subjects, each observed on its own dense time
grid inside [0, 1].  Grids must be dense-regular: either every point falls
in its own bin ((j-1)/m, j/m], or (permissive rule, needed for grids of the
form {j/m : j = 0..m} that include t = 0) no gap between consecutive
points, or between the domain edges and the extreme points, exceeds 2/m.

Presmoothing fits a local quadratic with kernel weights around every point
of a uniform evaluation grid, returning fitted values (intercept) and first
derivatives (linear coefficient) per subject.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CsvFormatError,
    DataError,
    DomainError,
    DuplicateTimeError,
    GridMismatchError,
    InsufficientDataError,
)
from .kernels import EPANECHNIKOV, Kernel

__all__ = [
    "FunctionalSample",
    "SmoothedSample",
    "load_long_csv",
    "load_wide_csv",
    "presmooth",
    "default_presmooth_bandwidth",
    "pooled_std",
]

_GRID_TOL = 1e-9


def _validate_grid(t: np.ndarray, subject: str) -> None:
    m = t.size
    if m == 0:
        raise DataError(f"subject {subject!r} has no observations")
    if np.any(t < -_GRID_TOL) or np.any(t > 1.0 + _GRID_TOL):
        raise DomainError(f"subject {subject!r} has observation times outside [0, 1]")
    d = np.diff(t)
    if np.any(d == 0.0):
        raise DuplicateTimeError(f"subject {subject!r} has duplicate observation times")
    if np.any(d < 0.0):
        raise DataError(f"subject {subject!r} has unsorted observation times")
    # dense-regular: per-bin placement, or the permissive max-gap rule
    j = np.arange(1, m + 1)
    in_bins = t[0] <= 1.0 / m + _GRID_TOL and np.all(t[1:] > (j[1:] - 1) / m - _GRID_TOL) and np.all(
        t <= j / m + _GRID_TOL
    )
    if not in_bins:
        gaps = np.concatenate(([t[0]], d, [1.0 - t[-1]]))
        if gaps.max() > 2.0 / m + _GRID_TOL:
            raise DomainError(
                f"subject {subject!r}: grid is not dense-regular "
                f"(largest gap {gaps.max():.4g} > 2/m = {2.0 / m:.4g})"
            )


@dataclass
class FunctionalSample:
    """n subject trajectories on per-subject dense grids in [0, 1].

    Treat instances as immutable once constructed.  ``shared_grid`` is set
    when every subject was observed on the identical grid, which unlocks
    the vectorized cross-sectional operations.
    """

    ids: list[str]
    times: list[np.ndarray]
    values: list[np.ndarray]
    shared_grid: np.ndarray | None = field(init=False, default=None)

    def __post_init__(self):
        if not (len(self.ids) == len(self.times) == len(self.values)):
            raise DataError("ids, times and values must have equal lengths")
        if len(self.ids) == 0:
            raise DataError("a sample needs at least one subject")
        if len(set(self.ids)) != len(self.ids):
            raise DataError("subject ids must be unique")
        self.times = [np.asarray(t, dtype=float) for t in self.times]
        self.values = [np.asarray(v, dtype=float) for v in self.values]
        for sid, t, v in zip(self.ids, self.times, self.values):
            if t.shape != v.shape or t.ndim != 1:
                raise DataError(f"subject {sid!r}: times and values must be equal-length 1-d arrays")
            if not np.all(np.isfinite(v)):
                raise DataError(f"subject {sid!r} has non-finite values")
            _validate_grid(t, sid)
        first = self.times[0]
        if all(t.size == first.size and np.array_equal(t, first) for t in self.times):
            self.shared_grid = first

    @property
    def n(self) -> int:
        return len(self.ids)

    def value_matrix(self) -> np.ndarray:
        """(n, m) value matrix; only defined when all subjects share a grid."""
        if self.shared_grid is None:
            raise GridMismatchError("subjects do not share a common observation grid")
        return np.vstack(self.values)

    @classmethod
    def from_matrix(cls, grid, matrix, ids=None) -> "FunctionalSample":
        """Build a shared-grid sample from a (n, m) value matrix."""
        matrix = np.asarray(matrix, dtype=float)
        grid = np.asarray(grid, dtype=float)
        if matrix.ndim != 2 or matrix.shape[1] != grid.size:
            raise DataError("matrix must be (n, m) with m matching the grid length")
        if ids is None:
            ids = [f"s{i + 1:04d}" for i in range(matrix.shape[0])]
        return cls(list(ids), [grid] * matrix.shape[0], [row for row in matrix])


@dataclass
class SmoothedSample:
    """Per-subject smoothed values and first derivatives on a uniform grid."""

    ids: list[str]
    eval_grid: np.ndarray
    values: np.ndarray      # (n, G)
    derivatives: np.ndarray  # (n, G)
    h_d: float

    def __post_init__(self):
        self.eval_grid = np.asarray(self.eval_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.derivatives = np.asarray(self.derivatives, dtype=float)
        if self.values.shape != (len(self.ids), self.eval_grid.size):
            raise DataError("values must be (n, G)")
        if self.derivatives.shape != self.values.shape:
            raise DataError("derivatives must match values in shape")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.derivatives))):
            raise DataError("smoothed values and derivatives must be finite")

    @property
    def n(self) -> int:
        return len(self.ids)


def _open_text(source):
    if hasattr(source, "read"):
        probe = source.read(0)
        if isinstance(probe, bytes):
            return io.TextIOWrapper(source, encoding="utf-8"), False
        return source, False
    return open(source, "r", encoding="utf-8", newline=""), True


def _parse_float(text: str, what: str, line_no: int) -> float:
    try:
        x = float(text)
    except ValueError:
        raise CsvFormatError(f"line {line_no}: cannot parse {what} {text!r}") from None
    if not np.isfinite(x):
        raise CsvFormatError(f"line {line_no}: non-finite {what} {text!r}")
    return x


def load_long_csv(source) -> FunctionalSample:
    """Read a long-format CSV (``id,time,value``) into a FunctionalSample.

    Parameters
    ----------
    source : path, text stream or binary stream
        UTF-8 CSV with header ``id,time,value`` and ``.`` as the decimal
        separator.

    Rows are grouped by id (subjects keep first-appearance order) and
    sorted by time within each subject.  Times must lie in [0, 1]; repeated
    (id, time) pairs and non-finite values are rejected.
    """
    fh, close = _open_text(source)
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header] != ["id", "time", "value"]:
            raise CsvFormatError("expected header 'id,time,value'")
        by_id: dict[str, list[tuple[float, float]]] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise CsvFormatError(f"line {line_no}: expected 3 columns, got {len(row)}")
            sid = row[0].strip()
            if not sid:
                raise CsvFormatError(f"line {line_no}: empty subject id")
            t = _parse_float(row[1], "time", line_no)
            v = _parse_float(row[2], "value", line_no)
            if t < 0.0 or t > 1.0:
                raise DomainError(f"line {line_no}: time {t!r} outside [0, 1]")
            by_id.setdefault(sid, []).append((t, v))
    finally:
        if close:
            fh.close()
    if not by_id:
        raise CsvFormatError("no data rows found")
    ids, times, values = [], [], []
    for sid, pairs in by_id.items():
        pairs.sort(key=lambda p: p[0])
        t = np.array([p[0] for p in pairs])
        if np.any(np.diff(t) == 0.0):
            raise DuplicateTimeError(f"subject {sid!r} has duplicate (id, time) rows")
        ids.append(sid)
        times.append(t)
        values.append(np.array([p[1] for p in pairs]))
    return FunctionalSample(ids, times, values)


def load_wide_csv(source) -> FunctionalSample:
    """Read a wide-format CSV (``time,id1,id2,...``), one column per subject."""
    fh, close = _open_text(source)
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2 or header[0].strip().lower() != "time":
            raise CsvFormatError("expected header 'time,<id>,<id>,...'")
        ids = [c.strip() for c in header[1:]]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvFormatError(
                    f"line {line_no}: expected {len(header)} columns, got {len(row)}"
                )
            t = _parse_float(row[0], "time", line_no)
            if t < 0.0 or t > 1.0:
                raise DomainError(f"line {line_no}: time {t!r} outside [0, 1]")
            vals = [_parse_float(c, "value", line_no) for c in row[1:]]
            rows.append((t, vals))
    finally:
        if close:
            fh.close()
    if not rows:
        raise CsvFormatError("no data rows found")
    rows.sort(key=lambda r: r[0])
    grid = np.array([r[0] for r in rows])
    if np.any(np.diff(grid) == 0.0):
        raise DuplicateTimeError("duplicate time rows in wide CSV")
    matrix = np.array([r[1] for r in rows]).T
    return FunctionalSample.from_matrix(grid, matrix, ids=ids)


def pooled_std(sample: FunctionalSample) -> float:
    """Sample standard deviation of all observed values pooled together."""
    allv = np.concatenate(sample.values)
    if allv.size < 2:
        return 0.0
    return float(np.std(allv, ddof=1))


def default_presmooth_bandwidth(sample: FunctionalSample) -> float:
    """max(0.15, 3/m) with m the smallest per-subject observation count."""
    m_min = min(t.size for t in sample.times)
    return max(0.15, 3.0 / m_min)


def presmooth(
    sample: FunctionalSample,
    h_d: float | None = None,
    eval_grid_size: int = 101,
    kernel: Kernel = EPANECHNIKOV,
) -> SmoothedSample:
    """Local-quadratic smoothing of every subject onto a uniform grid.

    At each evaluation point g the observations are weighted by
    K((t_ij - g)/h_d) and a quadratic in (t_ij - g) is fit by weighted
    least squares; the intercept is the smoothed value and the linear
    coefficient the smoothed derivative.  Degree-2 polynomials are
    reproduced exactly, so constants get derivative 0 and lines keep their
    slope.

    Raises InsufficientDataError when fewer than 3 observations of some
    subject fall inside the window around an evaluation point.
    """
    if h_d is None:
        h_d = default_presmooth_bandwidth(sample)
    if h_d <= 0:
        raise DomainError("presmoothing bandwidth h_d must be positive")
    if eval_grid_size < 2:
        raise DomainError("eval_grid_size must be at least 2")
    grid = np.linspace(0.0, 1.0, int(eval_grid_size))
    n = sample.n
    vals = np.empty((n, grid.size))
    derivs = np.empty((n, grid.size))
    for i, (sid, tobs, yobs) in enumerate(zip(sample.ids, sample.times, sample.values)):
        x = (tobs[None, :] - grid[:, None]) / h_d          # (G, m), scaled offsets
        w = kernel.density(x)
        counts = np.count_nonzero(np.abs(x) < 1.0, axis=1)
        if counts.min() < 3:
            g_bad = grid[int(np.argmin(counts))]
            raise InsufficientDataError(
                f"subject {sid!r}: only {int(counts.min())} observations in the "
                f"smoothing window at t={g_bad:.4g} (need >= 3); increase h_d"
            )
        # weighted design moments S_p = sum w x^p and responses T_p = sum w x^p y
        s = np.empty((grid.size, 5))
        tm = np.empty((grid.size, 3))
        wxp = w
        for p in range(5):
            s[:, p] = wxp.sum(axis=1)
            if p < 3:
                tm[:, p] = wxp @ yobs
            wxp = wxp * x
        a = np.empty((grid.size, 3, 3))
        for r in range(3):
            for c in range(3):
                a[:, r, c] = s[:, r + c]
        try:
            beta = np.linalg.solve(a, tm[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            raise InsufficientDataError(
                f"subject {sid!r}: singular local design; increase h_d"
            ) from None
        vals[i] = beta[:, 0]
        derivs[i] = beta[:, 1] / h_d
    return SmoothedSample(list(sample.ids), grid, vals, derivs, float(h_d))
