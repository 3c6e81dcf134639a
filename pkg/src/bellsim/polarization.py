"""Two-qubit polarization algebra.

Rotated Pauli operators and projectors on the real plane of the Bloch
sphere, canonical entangled states, strong (projective) correlations,
the CHSH combination, and the usual state-quality metrics (fidelity,
purity, negativity, concurrence).

Basis order is fixed throughout the package as {HH, HV, VH, VV}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Spin-flip operator sigma_y (x) sigma_y used by the concurrence.
_SYSY = np.kron(SIGMA_Y, SIGMA_Y)

TSIRELSON = 2.0 * math.sqrt(2.0)


def _require_finite(theta):
    if not np.isfinite(theta):
        raise ValueError("angle must be finite, got %r" % (theta,))


def rotation_u(theta):
    """Real symmetric unitary U(theta) = [[cos, sin], [sin, -cos]]; U^2 = I."""
    _require_finite(theta)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def sigma_z_rotated(theta):
    """sigma_z conjugated by U(theta); Bloch direction (sin 2t, 0, cos 2t)."""
    _require_finite(theta)
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    return np.array([[c2, s2], [s2, -c2]], dtype=complex)


def projector(theta):
    """Rank-1 projector (I + sigma_z(theta)) / 2 onto direction theta."""
    return 0.5 * (I2 + sigma_z_rotated(theta))


@dataclass(frozen=True)
class AngleSet:
    """The four analyzer angles (radians) of a CHSH measurement."""

    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError("%s must be finite" % name)


# Canonical CHSH-optimal settings (Tsirelson-saturating on the singlet).
DEFAULT_ANGLES = AngleSet(0.0, math.pi / 4, math.pi / 8, 3 * math.pi / 8)


def validate_state(rho, atol=1e-10):
    """Check trace-1, Hermiticity and positivity of a 4x4 density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("density matrix must be 4x4, got %r" % (rho.shape,))
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise ValueError("trace is %r, expected 1" % np.trace(rho))
    if not np.allclose(rho, rho.conj().T, atol=1e-9):
        raise ValueError("density matrix is not Hermitian")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w.min() < -atol:
        raise ValueError("density matrix has eigenvalue %r < -%g" % (w.min(), atol))
    return rho


def clip_to_physical(rho, atol=1e-10):
    """Clip tiny negative eigenvalues (>= -atol) to zero and renormalize."""
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    if w.min() < -atol:
        raise NumericError("eigenvalue %r below clipping tolerance" % w.min())
    w = np.clip(w, 0.0, None)
    rho = (v * w) @ v.conj().T
    return rho / np.trace(rho).real


def singlet_ket():
    """|psi-> = (|HV> - |VH>)/sqrt(2) in the {HH,HV,VH,VV} basis."""
    return np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)


def singlet():
    """Density matrix of the singlet state."""
    psi = singlet_ket()
    return np.outer(psi, psi.conj())


def werner(v):
    """Werner mixture V * |psi-><psi-| + (1 - V) * I/4."""
    if not (0.0 <= v <= 1.0):
        raise ValueError("visibility must be in [0, 1], got %r" % (v,))
    return v * singlet() + (1.0 - v) * I4 / 4.0


def correlation_strong(rho, alpha, beta):
    """Projective correlation Tr[rho sigma_z(alpha) (x) sigma_z(beta)]."""
    op = np.kron(sigma_z_rotated(alpha), sigma_z_rotated(beta))
    return float(np.trace(rho @ op).real)


def chsh_s(rho, angles=DEFAULT_ANGLES):
    """Signed CHSH parameter C11 - C12 + C21 + C22."""
    a1, a2, b1, b2 = angles.alpha1, angles.alpha2, angles.beta1, angles.beta2
    return (
        correlation_strong(rho, a1, b1)
        - correlation_strong(rho, a1, b2)
        + correlation_strong(rho, a2, b1)
        + correlation_strong(rho, a2, b2)
    )


def purity(rho):
    """Tr[rho^2]."""
    return float(np.trace(rho @ rho).real)


def _psd_sqrt(rho):
    """Square root of a Hermitian PSD matrix via its eigendecomposition."""
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if w.min() < -1e-8:
        raise NumericError("matrix square root of non-PSD input: eigenvalue %r" % w.min())
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho1, rho2):
    """Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2."""
    sq1 = _psd_sqrt(np.asarray(rho1, dtype=complex))
    inner = sq1 @ np.asarray(rho2, dtype=complex) @ sq1
    inner = 0.5 * (inner + inner.conj().T)
    w = np.linalg.eigvalsh(inner)
    if not np.all(np.isfinite(w)):
        raise NumericError("matrix square root failed (non-finite spectrum)")
    if w.min() < -1e-8:
        raise NumericError("fidelity argument not PSD: eigenvalue %r" % w.min())
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


def negativity(rho):
    """Twice the absolute sum of negative eigenvalues of the partial transpose.

    Normalized so the singlet scores 1.
    """
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    pt = r.transpose(0, 3, 2, 1).reshape(4, 4)  # transpose on qubit B
    w = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(2.0 * np.sum(np.clip(-w, 0.0, None)))


def concurrence(rho):
    """Wootters concurrence max(0, l1 - l2 - l3 - l4) from the spin-flip spectrum."""
    rho = np.asarray(rho, dtype=complex)
    rho_tilde = _SYSY @ rho.conj() @ _SYSY
    w = np.linalg.eigvals(rho @ rho_tilde)
    if not np.all(np.isfinite(w)):
        raise NumericError("spin-flip spectrum is non-finite")
    lam = np.sqrt(np.clip(np.sort(w.real)[::-1], 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def rho_to_json(rho):
    """Serialize a 4x4 density matrix as {"re": [[...]], "im": [[...]]}."""
    rho = np.asarray(rho, dtype=complex)
    return {"re": rho.real.tolist(), "im": rho.imag.tolist()}


def rho_from_json(obj):
    """Inverse of :func:`rho_to_json`."""
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.shape != (4, 4) or im.shape != (4, 4):
        raise ValueError("density matrix JSON must hold two 4x4 arrays")
    return re + 1j * im
