"""Gaussian pointer wavefunctions and the pixelated detector geometry.

The pointer is a real Gaussian amplitude f(xi) = (2 pi sigma^2)^(-1/4)
exp(-xi^2 / 4 sigma^2), so |f|^2 is a normal density of standard
deviation sigma.  The pixel pitch defines the length unit (pitch = 1 by
default); all widths, displacements and positions are in pixel units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr


@dataclass(frozen=True)
class PixelGrid:
    """Square detector array: n pixels per side at a given pitch.

    ``centers`` holds the beam center (in pixel coordinates) for each of
    the four pointer axes (x_A, y_A, x_B, y_B).
    """

    n: int = 24
    pitch: float = 1.0
    centers: tuple = (12.0, 12.0, 12.0, 12.0)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid needs at least 2 pixels per side")
        if not (self.pitch > 0):
            raise ValueError("pixel pitch must be positive")
        if len(self.centers) != 4:
            raise ValueError("centers must give one value per pointer axis")
        for c in self.centers:
            if not (0.0 <= c <= self.n):
                raise ValueError("beam center %r outside [0, %d]" % (c, self.n))


def overlap_kappa(g, sigma):
    """Translation overlap <f|T_g|f> = exp(-g^2 / 8 sigma^2)."""
    if not (sigma > 0):
        raise ValueError("pointer width must be positive, got %r" % (sigma,))
    g = np.asarray(g, dtype=float)
    out = np.exp(-(g * g) / (8.0 * sigma * sigma))
    return float(out) if out.ndim == 0 else out


def bin_overlap(bin_lo, bin_hi, s1, s2, sigma):
    """Integral of f(xi - s1) f(xi - s2) over a pixel bin.

    Closed form: kappa(s1 - s2) * [Phi((hi - m)/sigma) - Phi((lo - m)/sigma)]
    with m the midpoint of the two shifts and Phi the standard normal CDF.
    For s1 = s2 this is the probability mass of |f|^2 in the bin.
    """
    if not (sigma > 0):
        raise ValueError("pointer width must be positive, got %r" % (sigma,))
    lo = np.asarray(bin_lo, dtype=float)
    hi = np.asarray(bin_hi, dtype=float)
    if np.any(lo >= hi):
        raise ValueError("degenerate bin: lo must be < hi")
    m = 0.5 * (np.asarray(s1, float) + np.asarray(s2, float))
    kappa = overlap_kappa(np.asarray(s1, float) - np.asarray(s2, float), sigma)
    out = kappa * (ndtr((hi - m) / sigma) - ndtr((lo - m) / sigma))
    return float(out) if np.ndim(out) == 0 else out


def pixel_to_position(grid, index, axis_center):
    """Pixel-center coordinate relative to the unshifted beam center."""
    idx = np.asarray(index)
    if np.any(idx < 0) or np.any(idx >= grid.n):
        raise ValueError("pixel index out of range [0, %d)" % grid.n)
    out = (idx + 0.5 - axis_center) * grid.pitch
    return float(out) if out.ndim == 0 else out


def pixel_positions(grid, axis_center):
    """Positions of all pixel centers along one axis."""
    return pixel_to_position(grid, np.arange(grid.n), axis_center)


def pixel_edges(grid, axis_center, clip_edges=True):
    """The n+1 bin edges along one axis; outer edges to +-inf if clipped."""
    edges = (np.arange(grid.n + 1) - axis_center) * grid.pitch
    if clip_edges:
        edges[0] = -math.inf
        edges[-1] = math.inf
    return edges


def pixel_bins(grid, axis_center, clip_edges=True):
    """Contiguous (lo, hi) intervals covering the detector along one axis."""
    edges = pixel_edges(grid, axis_center, clip_edges)
    return [(edges[i], edges[i + 1]) for i in range(grid.n)]
