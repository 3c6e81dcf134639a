"""Simulated projective two-qubit tomography and MLE reconstruction.

Measurement design: the overcomplete 36-setting scheme projecting each
qubit onto one of the six Pauli eigenstates {H, V, D, A, R, L}.  Counts
are binomial per setting; reconstruction is the diluted iterative
R-rho-R maximum-likelihood fixed point, which keeps the iterate
physical (PSD, trace one) by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .polarization import I4, concurrence, fidelity, negativity, purity, singlet
from .weak import visibility

_SQ2 = 1.0 / math.sqrt(2.0)

BASIS_KETS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([_SQ2, _SQ2], dtype=complex),
    "A": np.array([_SQ2, -_SQ2], dtype=complex),
    "R": np.array([_SQ2, -1j * _SQ2], dtype=complex),
    "L": np.array([_SQ2, 1j * _SQ2], dtype=complex),
}
BASIS_LABELS = ("H", "V", "D", "A", "R", "L")


@dataclass(frozen=True)
class ProjSetting:
    """One two-sided projective setting with its 4x4 projector."""

    label_a: str
    label_b: str

    @property
    def projector(self):
        ka = BASIS_KETS[self.label_a]
        kb = BASIS_KETS[self.label_b]
        ket = np.kron(ka, kb)
        return np.outer(ket, ket.conj())


@dataclass
class CountRecord:
    """Per-setting coincidence counts out of a fixed number of shots."""

    counts: np.ndarray
    shots: int

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=float)
        if np.any(self.counts < 0) or np.any(self.counts > self.shots):
            raise ValueError("counts must lie in [0, shots]")


@dataclass
class ReconstructedState:
    rho: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool


def tomography_settings():
    """All 36 combinations of the six Pauli eigenstates per side."""
    return [ProjSetting(a, b) for a in BASIS_LABELS for b in BASIS_LABELS]


def born_probabilities(rho, settings):
    """Tr[rho Pi_a (x) Pi_b] for each setting."""
    stack = np.stack([s.projector for s in settings])
    p = np.einsum("mij,ji->m", stack, np.asarray(rho, dtype=complex)).real
    if np.any(p < -1e-10) or np.any(p > 1.0 + 1e-10):
        raise NumericError("Born probability outside [0, 1]: %r" % p)
    return np.clip(p, 0.0, 1.0)


def simulate_counts(rho, settings, shots, seed):
    """Binomial coincidence counts per setting, one RNG substream each."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    probs = born_probabilities(rho, settings)
    counts = np.empty(len(settings), dtype=np.int64)
    for i, p in enumerate(probs):
        rng = np.random.default_rng([seed, i])
        counts[i] = rng.binomial(shots, p)
    return CountRecord(counts=counts, shots=shots)


def _povm_and_counts(record, settings):
    """Both outcomes per setting, so the POVM elements sum to 36 * I."""
    proj = np.stack([s.projector for s in settings])
    comp = I4[None, :, :] - proj
    ops = np.concatenate([proj, comp])
    n = np.concatenate([record.counts, record.shots - record.counts])
    return ops, n


def _log_likelihood(n, p):
    mask = n > 0
    if np.any(p[mask] <= 0):
        return -math.inf
    return float(np.sum(n[mask] * np.log(p[mask])))


def reconstruct_mle(record, settings, max_iter=10000, grad_tol=1e-9):
    """Diluted iterative R-rho-R maximum-likelihood reconstruction.

    The log-likelihood is non-decreasing across accepted iterations; the
    dilution restarts at 0.5 each iteration and is halved whenever a
    trial step would decrease it.  Stops when the undiluted fixed-point
    residual ||R rho R - rho||_F drops below ``grad_tol``.
    """
    ops, n = _povm_and_counts(record, settings)
    n_total = n.sum()
    if n_total <= 0:
        raise NumericError("reconstruction needs at least one count")
    ops_flat = ops.reshape(len(ops), 16)
    probs_mat = ops.transpose(0, 2, 1).reshape(len(ops), 16)  # Tr[E rho] = vec(E^T).vec(rho)

    def born(state):
        return (probs_mat @ state.ravel()).real

    rho = I4.copy() / 4.0
    loglik = _log_likelihood(n, np.clip(born(rho), 1e-300, None))
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        p = born(rho)
        coef = n / np.clip(p, 1e-12, None) / n_total
        r = (coef @ ops_flat).reshape(4, 4)
        full = r @ rho @ r
        full = 0.5 * (full + full.conj().T)
        full /= np.trace(full).real
        if np.linalg.norm(full - rho) < grad_tol:
            converged = True
            break
        eps = 0.5
        accepted = False
        while eps > 1e-14:
            rd = (I4 + eps * r) / (1.0 + eps)
            cand = rd @ rho @ rd
            cand = 0.5 * (cand + cand.conj().T)
            cand /= np.trace(cand).real
            ll_cand = _log_likelihood(n, np.clip(born(cand), 1e-300, None))
            if ll_cand >= loglik:
                rho = cand
                loglik = ll_cand
                accepted = True
                break
            eps *= 0.5
        if not accepted:
            converged = True  # no improving step exists at machine precision
            break
    return ReconstructedState(
        rho=rho, log_likelihood=loglik, iterations=iterations, converged=converged
    )


def metric_report(rho):
    """Fidelity to the singlet, purity, negativity, concurrence, visibility."""
    return {
        "fidelity_singlet": fidelity(rho, singlet()),
        "purity": purity(rho),
        "negativity": negativity(rho),
        "concurrence": concurrence(rho),
        "visibility": visibility(rho),
    }
