"""Exact evolution through the four weak polarization-pointer couplings.

Each coupling exp(-i g Pi (x) P) is implemented exactly as the two-term
projector-controlled translation Pi (x) T_g + (I - Pi) (x) 1 (exact
because Pi^2 = Pi).  Expanding all four couplings gives 16 branches per
pure input component, each carrying a polarization amplitude and one
pointer shift per axis.  All observable quantities (moments, the traced
output polarization state, the joint pixel pmf) are branch-pair sums
weighted by Gaussian overlap matrix elements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr

from .errors import NumericError
from .pointer import overlap_kappa, pixel_edges, pixel_positions
from .polarization import (
    AngleSet,
    DEFAULT_ANGLES,
    I2,
    I4,
    SIGMA_X,
    SIGMA_Z,
    clip_to_physical,
    projector,
)

AXES = ("xA", "yA", "xB", "yB")

# Default application order: y couplings before x couplings on each
# particle, so each photon meets its first analyzer angle last.
DEFAULT_ORDERING = ("yB", "yA", "xB", "xA")


@dataclass(frozen=True)
class MeasurementSettings:
    """Analyzer angles, coupling displacements, pointer width and ordering."""

    angles: AngleSet = DEFAULT_ANGLES
    g_xa: float = 0.3
    g_ya: float = 0.3
    g_xb: float = 0.3
    g_yb: float = 0.3
    sigma: float = 3.0
    ordering: tuple = DEFAULT_ORDERING

    def __post_init__(self):
        if not (self.sigma > 0):
            raise ValueError("pointer width must be positive")
        for name in ("g_xa", "g_ya", "g_xb", "g_yb"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError("coupling %s must be finite" % name)
        if sorted(self.ordering) != sorted(AXES):
            raise ValueError("ordering must be a permutation of %r" % (AXES,))

    def coupling(self, axis):
        return {"xA": self.g_xa, "yA": self.g_ya, "xB": self.g_xb, "yB": self.g_yb}[axis]

    def angle(self, axis):
        a = self.angles
        return {"xA": a.alpha1, "yA": a.alpha2, "xB": a.beta1, "yB": a.beta2}[axis]

    def x_applied_after_y(self, particle):
        """True when the x coupling acts later than y on the given particle."""
        x, y = "x" + particle, "y" + particle
        return self.ordering.index(x) > self.ordering.index(y)

    def with_g_over_sigma(self, ratio):
        g = ratio * self.sigma
        return replace(self, g_xa=g, g_ya=g, g_xb=g, g_yb=g)


@dataclass
class MomentSet:
    """First and joint pointer-position moments (pixel / pixel^2 units)."""

    xa: float
    ya: float
    xb: float
    yb: float
    xaxb: float
    xayb: float
    yaxb: float
    yayb: float

    def first(self, axis):
        return {"xA": self.xa, "yA": self.ya, "xB": self.xb, "yB": self.yb}[axis]

    def joint(self, axis_a, axis_b):
        key = axis_a[0] + "a" + axis_b[0] + "b"
        return getattr(self, key)


def _projector_pair(theta):
    p = projector(theta)
    return (I2 - p, p)  # index by "did the projector fire" bit


def _branch_ops(settings, particle):
    """2x2 branch operators O(x_bit, y_bit) for one particle, order-aware."""
    ax = settings.angle("x" + particle)
    ay = settings.angle("y" + particle)
    px = _projector_pair(ax)
    py = _projector_pair(ay)
    ops = np.empty((2, 2, 2, 2), dtype=complex)
    for bx in (0, 1):
        for by in (0, 1):
            if settings.x_applied_after_y(particle):
                ops[bx, by] = px[bx] @ py[by]
            else:
                ops[bx, by] = py[by] @ px[bx]
    return ops


class BranchDecomposition:
    """16-branch expansion of the post-interaction joint state.

    For a mixed input the expansion is carried per eigenvector of rho_in
    with the eigenvalues as weights; ``amps`` has one (2,2,2,2,4) array
    per component, indexed by the fired-projector bits (a, b, c, d) for
    the axes (x_A, y_A, x_B, y_B).
    """

    def __init__(self, settings, weights, amps):
        self.settings = settings
        self.weights = list(weights)
        self.amps = list(amps)

    def shifts(self, bits):
        a, b, c, d = bits
        s = self.settings
        return (a * s.g_xa, b * s.g_ya, c * s.g_xb, d * s.g_yb)

    def branches(self, component=0):
        """Iterate (bits, amplitude, shifts) over the 16 branches."""
        amp = self.amps[component]
        for a in (0, 1):
            for b in (0, 1):
                for c in (0, 1):
                    for d in (0, 1):
                        bits = (a, b, c, d)
                        yield bits, amp[a, b, c, d], self.shifts(bits)

    def overlap_tensor(self):
        """Weighted branch-pair Gram tensor W[abcd, a'b'c'd'] = <amp'|amp>."""
        w = np.zeros((2,) * 8, dtype=complex)
        for weight, amp in zip(self.weights, self.amps):
            w += weight * np.einsum("abcdk,ABCDk->abcdABCD", amp, amp.conj())
        return w

    def recombined_state(self):
        """Trace out the pointers: rho_out as a branch-pair overlap sum.

        At g = 0 all overlaps are 1 and this reproduces rho_in exactly;
        in general it agrees with the composed dephasing channel.
        """
        tabs = []
        for axis in AXES:
            g = self.settings.coupling(axis)
            s = np.array([0.0, g])
            tabs.append(overlap_kappa(s[:, None] - s[None, :], self.settings.sigma))
        rho = np.zeros((4, 4), dtype=complex)
        for weight, amp in zip(self.weights, self.amps):
            rho += weight * np.einsum(
                "abcdk,ABCDl,aA,bB,cC,dD->kl",
                amp, amp.conj(), tabs[0], tabs[1], tabs[2], tabs[3],
            )
        return rho


def branch_expansion(rho_in, settings):
    """Expand rho_in through the four couplings into weighted branches."""
    rho_in = np.asarray(rho_in, dtype=complex)
    vals, vecs = np.linalg.eigh(0.5 * (rho_in + rho_in.conj().T))
    if vals.min() < -1e-10:
        raise ValueError("input state eigenvalue %r < -1e-10" % vals.min())
    ops_a = _branch_ops(settings, "A")
    ops_b = _branch_ops(settings, "B")
    weights, amps = [], []
    for val, psi in zip(vals, vecs.T):
        if val <= 1e-14:
            continue
        psi4 = psi.reshape(2, 2)  # indices (qubit A, qubit B)
        amp = np.einsum("abij,cdkl,jl->abcdik", ops_a, ops_b, psi4)
        amps.append(amp.reshape(2, 2, 2, 2, 4))
        weights.append(float(val))
    return BranchDecomposition(settings, weights, amps)


def _element_tables(g, sigma):
    """Per-axis Gaussian matrix elements over fired-bit pairs.

    Returns (K, M1, M2): <f_s'|f_s>, <f_s'|xi|f_s>, <f_s'|xi^2|f_s> for
    shifts s = bit * g, as 2x2 arrays (symmetric in the bits).
    """
    s = np.array([0.0, g])
    d = s[:, None] - s[None, :]
    m = 0.5 * (s[:, None] + s[None, :])
    k = overlap_kappa(d, sigma)
    return k, k * m, k * (m * m + sigma * sigma)


def exact_moments(rho_in, settings):
    """Exact first and joint pointer moments from the branch calculus."""
    dec = branch_expansion(rho_in, settings)
    w = dec.overlap_tensor()
    k1 = {}
    for axis in AXES:
        k, m1, _ = _element_tables(settings.coupling(axis), settings.sigma)
        k1[axis] = (k, m1)

    def moment(measured):
        tabs = [k1[axis][1] if axis in measured else k1[axis][0] for axis in AXES]
        val = np.einsum("abcdABCD,aA,bB,cC,dD->", w, *tabs)
        return float(val.real)

    return MomentSet(
        xa=moment({"xA"}), ya=moment({"yA"}), xb=moment({"xB"}), yb=moment({"yB"}),
        xaxb=moment({"xA", "xB"}), xayb=moment({"xA", "yB"}),
        yaxb=moment({"yA", "xB"}), yayb=moment({"yA", "yB"}),
    )


def weak_moments_first_order(rho_in, settings):
    """The first-order (weak limit) moment formulas evaluated on rho_in."""
    rho_in = np.asarray(rho_in, dtype=complex)

    def expect(op):
        return float(np.trace(rho_in @ op).real)

    pa = {axis: projector(settings.angle(axis)) for axis in AXES}

    def first(axis):
        side = np.kron(pa[axis], I2) if axis.endswith("A") else np.kron(I2, pa[axis])
        return settings.coupling(axis) * expect(side)

    def joint(ax_a, ax_b):
        op = np.kron(pa[ax_a], pa[ax_b])
        return settings.coupling(ax_a) * settings.coupling(ax_b) * expect(op)

    return MomentSet(
        xa=first("xA"), ya=first("yA"), xb=first("xB"), yb=first("yB"),
        xaxb=joint("xA", "xB"), xayb=joint("xA", "yB"),
        yaxb=joint("yA", "xB"), yayb=joint("yA", "yB"),
    )


def correlation_from_moments(moments, settings, j, l):
    """Correlation C(alpha_j, beta_l) reconstructed from pointer moments.

    Axis map: index 1 -> x, index 2 -> y on each branch.
    """
    ax_a = "xA" if j == 1 else "yA"
    ax_b = "xB" if l == 1 else "yB"
    ga = settings.coupling(ax_a)
    gb = settings.coupling(ax_b)
    if ga == 0.0 or gb == 0.0:
        raise ValueError("correlation reconstruction needs nonzero couplings")
    return (
        4.0 * moments.joint(ax_a, ax_b) / (ga * gb)
        - 2.0 * moments.first(ax_a) / ga
        - 2.0 * moments.first(ax_b) / gb
        + 1.0
    )


def chsh_from_moments(moments, settings):
    """CHSH parameter C11 - C12 + C21 + C22 from reconstructed correlations."""
    c = {
        (j, l): correlation_from_moments(moments, settings, j, l)
        for j in (1, 2) for l in (1, 2)
    }
    return c[(1, 1)] - c[(1, 2)] + c[(2, 1)] + c[(2, 2)]


def _embed(op, particle):
    return np.kron(op, I2) if particle == "A" else np.kron(I2, op)


def _axis_channel(settings, axis):
    """Dephasing channel (P, Q, kappa) induced by tracing out one pointer."""
    p = _embed(projector(settings.angle(axis)), axis[1])
    q = I4 - p
    kappa = overlap_kappa(settings.coupling(axis), settings.sigma)
    return p, q, kappa


def output_polarization_state(rho_in, settings):
    """Polarization state after the four couplings, pointers traced out."""
    rho = np.asarray(rho_in, dtype=complex)
    for axis in settings.ordering:
        p, q, kappa = _axis_channel(settings, axis)
        rho = p @ rho @ p + q @ rho @ q + kappa * (p @ rho @ q + q @ rho @ p)
    return clip_to_physical(rho)


def composed_kraus(settings):
    """The 16 Kraus operators of the composed four-pointer dephasing channel."""
    kraus = [I4]
    for axis in settings.ordering:
        p, q, kappa = _axis_channel(settings, axis)
        k1 = math.sqrt((1.0 + kappa) / 2.0) * I4
        k2 = math.sqrt((1.0 - kappa) / 2.0) * (p - q)
        kraus = [knew @ kold for kold in kraus for knew in (k1, k2)]
    return kraus


def visibility(rho):
    """Coincidence-fringe visibility, minimized over the H/V and D/A bases.

    One analyzer is fixed at the basis angle theta0 (0 for H/V, pi/4 for
    D/A); sweeping the other analyzer gives a sinusoidal coincidence
    fringe whose contrast (max - min)/(max + min) is evaluated in closed
    form.  On the Werner family this returns the visibility parameter
    exactly.
    """
    rho = np.asarray(rho, dtype=complex)
    vis = []
    for theta0 in (0.0, math.pi / 4):
        pa = np.kron(projector(theta0), I2)
        t_i = float(np.trace(rho @ pa).real)
        if t_i <= 1e-12:
            raise NumericError("no coincidences with analyzer A at %r" % theta0)
        t_z = float(np.trace(rho @ pa @ np.kron(I2, SIGMA_Z)).real)
        t_x = float(np.trace(rho @ pa @ np.kron(I2, SIGMA_X)).real)
        vis.append(math.hypot(t_z, t_x) / t_i)
    return min(vis)


def _bin_tables(settings, grid, clip_edges=True):
    """Per-axis (2, 2, n) tables of pixel-bin overlaps between branch pairs."""
    tables = []
    for axis, center in zip(AXES, grid.centers):
        g = settings.coupling(axis)
        sigma = settings.sigma
        edges = pixel_edges(grid, center, clip_edges)
        s = np.array([0.0, g])
        m = 0.5 * (s[:, None] + s[None, :])
        kap = overlap_kappa(s[:, None] - s[None, :], sigma)
        z = (edges[None, None, :] - m[:, :, None]) / sigma
        cdf = ndtr(z)
        tables.append(kap[:, :, None] * (cdf[:, :, 1:] - cdf[:, :, :-1]))
    return tables


def joint_pixel_pmf(rho_in, settings, grid, clip_edges=True):
    """Exact single-pair pmf over detector cells (X_A, Y_A, X_B, Y_B)."""
    dec = branch_expansion(rho_in, settings)
    w = dec.overlap_tensor()
    bxa, bya, bxb, byb = _bin_tables(settings, grid, clip_edges)
    pmf = np.einsum(
        "abcdABCD,aAi,bBj,cCk,dDl->ijkl", w, bxa, bya, bxb, byb, optimize=True
    ).real
    if pmf.min() < -1e-12:
        raise NumericError("pmf cell %r below cancellation tolerance" % pmf.min())
    np.clip(pmf, 0.0, None, out=pmf)
    return pmf


def marginal_pixel_pmf(rho_in, settings, grid, particle="A", clip_edges=True):
    """Single-branch (X, Y) pmf with the other particle's pointers traced out."""
    dec = branch_expansion(rho_in, settings)
    w = dec.overlap_tensor()
    tables = _bin_tables(settings, grid, clip_edges)
    kaps = [t.sum(axis=2) for t in tables]
    if particle == "A":
        pmf = np.einsum("abcdABCD,aAi,bBj,cC,dD->ij",
                        w, tables[0], tables[1], kaps[2], kaps[3], optimize=True).real
    else:
        pmf = np.einsum("abcdABCD,aA,bB,cCi,dDj->ij",
                        w, kaps[0], kaps[1], tables[2], tables[3], optimize=True).real
    return np.clip(pmf, 0.0, None)


def pixelated_moments(rho_in, settings, grid, clip_edges=True):
    """Pointer moments of the pixelated pmf, via factorized contractions.

    Identical to summing position products against :func:`joint_pixel_pmf`
    (by linearity), but never materializes the n^4 tensor, so it stays
    cheap on fine grids.
    """
    dec = branch_expansion(rho_in, settings)
    w = dec.overlap_tensor()
    tables = _bin_tables(settings, grid, clip_edges)
    t0, t1 = [], []
    for axis, center, tab in zip(AXES, grid.centers, tables):
        pos = pixel_positions(grid, center)
        t0.append(tab.sum(axis=2))
        t1.append(np.einsum("abp,p->ab", tab, pos))

    def moment(measured):
        tabs = [t1[i] if AXES[i] in measured else t0[i] for i in range(4)]
        return float(np.einsum("abcdABCD,aA,bB,cC,dD->", w, *tabs).real)

    return MomentSet(
        xa=moment({"xA"}), ya=moment({"yA"}), xb=moment({"xB"}), yb=moment({"yB"}),
        xaxb=moment({"xA", "xB"}), xayb=moment({"xA", "yB"}),
        yaxb=moment({"yA", "xB"}), yayb=moment({"yA", "yB"}),
    )
