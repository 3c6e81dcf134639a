"""Monte Carlo coincidence events and the per-pair Bell estimator.

Events are i.i.d. draws from the exact joint pixel pmf via an alias
table.  Sampling is chunked; each chunk uses an independent substream
seeded by (seed, chunk_index), so results are bit-identical for a given
seed regardless of how many worker threads process the chunks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .pointer import pixel_positions

DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class CoincidenceEvent:
    """One detected pair: pixel coordinates plus a sequence number."""

    seq: int
    x_a: int
    y_a: int
    x_b: int
    y_b: int


@dataclass
class PairEstimate:
    """Per-pair CHSH estimate and its four correlation terms."""

    s_hat: float
    c11: float
    c12: float
    c21: float
    c22: float


@dataclass
class RunSummary:
    """Aggregate of a per-pair estimate stream."""

    n_events: int
    s_ave: float
    stddev: float
    stderr: float
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    clipped_low: int
    clipped_high: int


def build_alias_table(probs):
    """Vose alias table (J, q) for O(1) draws from a discrete distribution."""
    p = np.asarray(probs, dtype=float).ravel()
    k = p.size
    q = p * k
    j = np.zeros(k, dtype=np.int64)
    smaller = list(np.flatnonzero(q < 1.0)[::-1])
    larger = list(np.flatnonzero(q >= 1.0)[::-1])
    while smaller and larger:
        small = smaller.pop()
        large = larger.pop()
        j[small] = large
        q[large] -= 1.0 - q[small]
        if q[large] < 1.0:
            smaller.append(large)
        else:
            larger.append(large)
    # leftovers are 1.0 up to rounding
    for idx in smaller + larger:
        q[idx] = 1.0
    return j, q


def sample_events(pmf, n, seed, chunk_size=DEFAULT_CHUNK, threads=1):
    """Draw n i.i.d. events from the pmf; returns an (n, 4) int array.

    Reproducible: each chunk i draws from numpy's Generator seeded with
    (seed, i), and chunks are concatenated in index order, so the output
    depends only on (seed, chunk_size).
    """
    pmf = np.asarray(pmf, dtype=float)
    if pmf.ndim != 4:
        raise ValueError("pmf must be a 4-index tensor")
    if n < 0:
        raise ValueError("event count must be nonnegative")
    total = pmf.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError("pmf is not normalized: sum = %r" % total)
    shape = pmf.shape
    flat = pmf.ravel() / total
    alias_j, alias_q = build_alias_table(flat)
    k = flat.size
    n_chunks = (n + chunk_size - 1) // chunk_size

    def draw(chunk):
        m = min(chunk_size, n - chunk * chunk_size)
        rng = np.random.default_rng([seed, chunk])
        cell = rng.integers(0, k, size=m)
        keep = rng.random(m) < alias_q[cell]
        return np.where(keep, cell, alias_j[cell])

    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(draw, range(n_chunks)))
    else:
        parts = [draw(i) for i in range(n_chunks)]
    cells = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    return np.stack(np.unravel_index(cells, shape), axis=1)


def accumulate_tensor(events, n_pixels):
    """4-index coincidence counts tensor N(X_A, Y_A, X_B, Y_B)."""
    events = np.asarray(events, dtype=np.int64).reshape(-1, 4)
    counts = np.zeros((n_pixels,) * 4, dtype=np.int64)
    if events.size:
        flat = np.ravel_multi_index(events.T, counts.shape)
        np.add.at(counts.ravel(), flat, 1)
    return counts


def _axis_positions(settings, grid):
    """Pixel-center position lookup per pointer axis."""
    return [pixel_positions(grid, c) for c in grid.centers]


def _pair_terms(xa, ya, xb, yb, settings):
    g = {"xA": settings.g_xa, "yA": settings.g_ya,
         "xB": settings.g_xb, "yB": settings.g_yb}
    for axis, gval in g.items():
        if gval == 0.0:
            raise ValueError("per-pair estimator needs nonzero coupling on %s" % axis)

    def corr(pa, ga, pb, gb):
        return 4.0 * pa * pb / (ga * gb) - 2.0 * pa / ga - 2.0 * pb / gb + 1.0

    c11 = corr(xa, g["xA"], xb, g["xB"])
    c12 = corr(xa, g["xA"], yb, g["yB"])
    c21 = corr(ya, g["yA"], xb, g["xB"])
    c22 = corr(ya, g["yA"], yb, g["yB"])
    return c11, c12, c21, c22


def single_pair_s(event, settings, grid):
    """Per-pair CHSH estimate from one coincidence event."""
    pos = _axis_positions(settings, grid)
    idx = (event.x_a, event.y_a, event.x_b, event.y_b) \
        if isinstance(event, CoincidenceEvent) else tuple(event)
    xa, ya, xb, yb = (p[i] for p, i in zip(pos, idx))
    c11, c12, c21, c22 = _pair_terms(xa, ya, xb, yb, settings)
    return PairEstimate(c11 - c12 + c21 + c22, c11, c12, c21, c22)


def pair_s_values(events, settings, grid):
    """Vectorized per-pair S over an (n, 4) event array."""
    events = np.asarray(events, dtype=np.int64).reshape(-1, 4)
    pos = _axis_positions(settings, grid)
    xa, ya, xb, yb = (pos[i][events[:, i]] for i in range(4))
    c11, c12, c21, c22 = _pair_terms(xa, ya, xb, yb, settings)
    return c11 - c12 + c21 + c22


def pair_s_grid(settings, grid):
    """Per-pair S evaluated on every detector cell, shape (n, n, n, n)."""
    pos = _axis_positions(settings, grid)
    xa = pos[0][:, None, None, None]
    ya = pos[1][None, :, None, None]
    xb = pos[2][None, None, :, None]
    yb = pos[3][None, None, None, :]
    c11, c12, c21, c22 = _pair_terms(xa, ya, xb, yb, settings)
    return c11 - c12 + c21 + c22


def expected_pair_s(pmf, settings, grid):
    """Deterministic E[S_hat] and per-pair stddev over the exact pmf."""
    s = pair_s_grid(settings, grid)
    mean = float(np.sum(pmf * s))
    var = float(np.sum(pmf * s * s)) - mean * mean
    return mean, math.sqrt(max(var, 0.0))


def aggregate(estimates, bin_width=1.0, hist_range=(-60.0, 60.0)):
    """Mean, spread and histogram of a per-pair estimate stream."""
    values = np.asarray(estimates, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("cannot aggregate an empty estimate list")
    n = values.size
    mean = float(values.mean())
    stddev = float(values.std(ddof=1)) if n > 1 else 0.0
    stderr = stddev / math.sqrt(n)
    lo, hi = hist_range
    nbins = max(1, int(round((hi - lo) / bin_width)))
    counts, edges = np.histogram(values, bins=nbins, range=(lo, hi))
    return RunSummary(
        n_events=n, s_ave=mean, stddev=stddev, stderr=stderr,
        hist_edges=edges, hist_counts=counts,
        clipped_low=int(np.sum(values < lo)), clipped_high=int(np.sum(values > hi)),
    )


def inject_accidentals(pmf, rate):
    """Mix the physical pmf with a uniform background of given weight."""
    if not (0.0 <= rate < 1.0):
        raise ValueError("accidental rate must be in [0, 1), got %r" % (rate,))
    pmf = np.asarray(pmf, dtype=float)
    uniform = np.full_like(pmf, 1.0 / pmf.size)
    mixed = (1.0 - rate) * pmf + rate * uniform * pmf.sum()
    return mixed


def summary_to_json(summary):
    """RunSummary as the documented JSON-ready dict."""
    return {
        "n_events": summary.n_events,
        "S_ave": summary.s_ave,
        "stddev": summary.stddev,
        "stderr": summary.stderr,
        "histogram": {
            "edges": summary.hist_edges.tolist(),
            "counts": summary.hist_counts.tolist(),
            "clipped_low": summary.clipped_low,
            "clipped_high": summary.clipped_high,
        },
    }
