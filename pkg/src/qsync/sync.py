"""Synchronization measures on observable time series.

The central quantity is the Pearson coefficient computed over a sliding
forward window [t, t + window]; discrete sums play the role of the integrals
(the uniform-weight quadrature drops out of the normalized ratio).  Windows in
which either signal is numerically constant yield NaN gap markers rather than
a value or an error.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionMismatch, QsyncError

DEFAULT_WINDOW = 20.0
DEFAULT_THRESHOLD = 0.9
VARIANCE_FLOOR = 1e-14


@dataclass(frozen=True)
class Series:
    """Real samples on a uniform time grid.

    Values must be finite; ``allow_gaps`` permits NaN gap markers, used by the
    Pearson output for windows where the coefficient is undefined.
    """

    times: np.ndarray
    values: np.ndarray
    allow_gaps: bool = False

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise DimensionMismatch("times and values must be equal-length 1-D arrays")
        if times.size >= 2:
            steps = np.diff(times)
            h = steps[0]
            span = max(1.0, abs(float(times[-1] - times[0])))
            if h <= 0 or np.max(np.abs(steps - h)) > 1e-12 * span:
                raise DimensionMismatch("time grid must be uniform and increasing")
        finite = np.isfinite(values)
        if self.allow_gaps:
            if np.any(np.isinf(values)):
                raise DimensionMismatch("series values must not be infinite")
        elif not np.all(finite):
            raise DimensionMismatch("series values must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> float:
        if self.times.size < 2:
            raise DimensionMismatch("step undefined for a single sample")
        return float(self.times[1] - self.times[0])

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class SyncReport:
    """Windowed Pearson series with the detected synchronization onset."""

    pearson: Series
    onset: float | None
    window: float
    threshold: float


def _window_samples(window: float, step: float) -> int:
    w = int(round(window / step))
    if w < 10:
        raise DimensionMismatch("window must span at least 10 samples")
    return w


def pearson(
    a1: Series,
    a2: Series,
    window: float = DEFAULT_WINDOW,
    var_floor: float = VARIANCE_FLOOR,
) -> Series:
    """Sliding-window Pearson coefficient C(t | window).

    The window is anchored forward: the sample at time t correlates the two
    signals over [t, t + window].  Windows where either signal's variance
    falls below ``var_floor`` produce NaN (degenerate window), so the output
    may contain gaps but never raises for constant stretches.
    """
    if a1.times.size != a2.times.size or np.max(np.abs(a1.times - a2.times), initial=0.0) > 1e-9:
        raise DimensionMismatch("series must share the same time grid")
    w = _window_samples(window, a1.step)
    n = len(a1)
    if n < w + 1:
        raise DimensionMismatch("series shorter than one window")
    v1 = sliding_window_view(a1.values, w)
    v2 = sliding_window_view(a2.values, w)
    d1 = v1 - v1.mean(axis=1, keepdims=True)
    d2 = v2 - v2.mean(axis=1, keepdims=True)
    var1 = np.einsum("kw,kw->k", d1, d1) / w
    var2 = np.einsum("kw,kw->k", d2, d2) / w
    cov = np.einsum("kw,kw->k", d1, d2) / w
    defined = (var1 > var_floor) & (var2 > var_floor)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(defined, cov / np.sqrt(var1 * var2), np.nan)
    return Series(a1.times[: n - w + 1], c, allow_gaps=True)


def sync_onset(
    pearson_series: Series,
    window: float,
    threshold: float = DEFAULT_THRESHOLD,
) -> float | None:
    """Earliest time at which |C| stays at or above ``threshold`` for a full
    window, or None."""
    w = int(round(window / pearson_series.step)) + 1
    with np.errstate(invalid="ignore"):
        good = np.abs(pearson_series.values) >= threshold
    run = 0
    for k, flag in enumerate(good):
        run = run + 1 if flag else 0
        if run >= w:
            return float(pearson_series.times[k - w + 1])
    return None


def sync_report(
    a1: Series,
    a2: Series,
    window: float = DEFAULT_WINDOW,
    threshold: float = DEFAULT_THRESHOLD,
) -> SyncReport:
    """Pearson series plus onset in one call."""
    c = pearson(a1, a2, window)
    onset = sync_onset(c, window, threshold) if len(c) > 1 else None
    return SyncReport(c, onset, window, threshold)


@dataclass(frozen=True)
class SweepResult:
    """|C| over a (coupling, frequency) grid; NaN marks failed cells."""

    couplings: np.ndarray
    frequencies: np.ndarray
    values: np.ndarray     # (len couplings, len frequencies)


def arnold_sweep(
    couplings: Sequence[float],
    frequencies: Sequence[float],
    runner: Callable[[float, float], tuple[Series, Series]],
    eval_time: float,
    window: float = DEFAULT_WINDOW,
    threads: int = 1,
) -> SweepResult:
    """Two-parameter sweep of |C| evaluated at ``eval_time``.

    ``runner(coupling, frequency)`` must return the two observable series for
    one grid point; cells whose simulation raises a toolkit error come back
    as NaN.  Grid points are independent and may be evaluated concurrently.
    """
    couplings = np.asarray(couplings, dtype=float)
    frequencies = np.asarray(frequencies, dtype=float)
    values = np.full((couplings.size, frequencies.size), np.nan)

    def cell(idx: tuple[int, int]) -> None:
        i, j = idx
        try:
            s1, s2 = runner(float(couplings[i]), float(frequencies[j]))
            c = pearson(s1, s2, window)
        except DimensionMismatch:
            raise
        except QsyncError:
            return
        k = int(np.argmin(np.abs(c.times - eval_time)))
        if abs(c.times[k] - eval_time) <= c.step / 2 + 1e-9:
            values[i, j] = abs(c.values[k])

    cells = [(i, j) for i in range(couplings.size) for j in range(frequencies.size)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(cell, cells))
    else:
        for idx in cells:
            cell(idx)
    return SweepResult(couplings, frequencies, values)
