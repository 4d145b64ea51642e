"""Independent reference implementations used to check the library.

Everything here is deliberately brute-force and written against the
documented contracts, not the library internals: direct window scans for
the moving averages, run-length candidate enumeration plus O(n^2) window
searches for peak prominence, and exhaustive nearest-neighbor search for
gridding.
"""

from __future__ import annotations

import numpy as np


def windowed_mean_symmetric(values, window: int) -> list[float]:
    """Centered mean with symmetric edge truncation (smooth oracle)."""
    n = len(values)
    half = window // 2
    out = []
    for i in range(n):
        w = min(half, i, n - 1 - i)
        lo, hi = i - w, i + w + 1
        out.append(sum(values[lo:hi]) / (hi - lo))
    return out


def windowed_mean_clipped(values, window: int) -> list[float]:
    """Centered mean with clipped edges (baseline oracle)."""
    n = len(values)
    half = window // 2
    out = []
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        out.append(sum(values[lo:hi]) / (hi - lo))
    return out


def brute_force_peaks(values, min_prominence: float, spacing: int):
    """O(n^2) peak finder: returns (index, height, prominence, lbase, rbase).

    Candidates are the leftmost indices of maximal equal-value runs that
    rise on the left and fall on the right. Prominence windows extend to
    the nearest strictly higher sample (or the edge); base ties resolve to
    the occurrence nearest the peak. Distance pruning keeps taller peaks
    first (ties: lower index) and discards anything closer than
    ``spacing`` samples to a kept peak.
    """
    x = np.asarray(values, dtype=float)
    n = x.size

    run_starts = [0] + [k for k in range(1, n) if x[k] != x[k - 1]]
    runs = [
        (s, (run_starts[i + 1] - 1) if i + 1 < len(run_starts) else n - 1)
        for i, s in enumerate(run_starts)
    ]
    candidates = [
        s
        for s, e in runs
        if s > 0 and e < n - 1 and x[s - 1] < x[s] and x[e + 1] < x[s]
    ]

    scored = []
    for i in candidates:
        h = x[i]
        higher_left = np.flatnonzero(x[:i] > h)
        lo = int(higher_left[-1]) + 1 if higher_left.size else 0
        left_seg = x[lo : i + 1]
        left_min = left_seg.min()
        left_base = lo + int(np.flatnonzero(left_seg == left_min)[-1])

        higher_right = np.flatnonzero(x[i + 1 :] > h)
        hi = (i + 1 + int(higher_right[0])) if higher_right.size else n
        right_seg = x[i:hi]
        right_min = right_seg.min()
        right_base = i + int(np.flatnonzero(right_seg == right_min)[0])

        prominence = h - max(left_min, right_min)
        if prominence >= min_prominence:
            scored.append((i, float(h), float(prominence), left_base, right_base))

    kept = []
    for peak in sorted(scored, key=lambda p: (-p[1], p[0])):
        if all(abs(peak[0] - other[0]) >= spacing for other in kept):
            kept.append(peak)
    return sorted(kept)


def exhaustive_grid(times_ms, values, events, grid_hz, video_duration_s=None):
    """Nearest-sample gridding by exhaustive search (to_grid oracle).

    ``events`` is a list of (t_wall_ms, "play"|"stop") pairs; a trailing
    open play closes at the last sample time.
    """
    intervals = []
    open_start = None
    for t, kind in events:
        if kind == "play":
            open_start = t
        else:
            intervals.append((open_start, t))
            open_start = None
    last_t = times_ms[-1]
    if open_start is not None and last_t >= open_start:
        intervals.append((open_start, last_t))

    def video_t(t):
        total = 0.0
        for s, e in intervals:
            if t > s:
                total += min(t, e) - s
        return total / 1000.0

    in_play = [
        (i, video_t(t), values[i])
        for i, t in enumerate(times_ms)
        if any(s <= t <= e for s, e in intervals)
    ]
    assert in_play, "oracle needs at least one in-play sample"

    covered = sum(e - s for s, e in intervals) / 1000.0
    if video_duration_s is not None:
        covered = min(covered, video_duration_s)
    n_points = int(np.floor(covered * grid_hz + 1e-9)) + 1

    out = []
    for k in range(n_points):
        target = k / grid_hz
        best = None
        for i, vt, v in in_play:
            d = abs(vt - target)
            if best is None or d < best[0]:
                best = (d, i, v)
        d, _, v = best
        if k > 0 and d > 1.0 / grid_hz:
            out.append(out[-1])
        else:
            out.append(v)
    return out


def column_means(matrix) -> list[float]:
    """Independent per-column mean of a 0/1 matrix (aggregate oracle)."""
    n_rows = len(matrix)
    n_cols = len(matrix[0])
    out = []
    for k in range(n_cols):
        total = 0
        for row in matrix:
            total += row[k]
        out.append(total / n_rows)
    return out
