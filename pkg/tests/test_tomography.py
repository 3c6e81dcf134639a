import math

import numpy as np
import pytest

from bellsim.errors import NumericError
from bellsim.polarization import (
    I4,
    fidelity,
    negativity,
    purity,
    singlet,
    validate_state,
    werner,
)
from bellsim.tomography import (
    BASIS_KETS,
    CountRecord,
    ProjSetting,
    born_probabilities,
    metric_report,
    reconstruct_mle,
    simulate_counts,
    tomography_settings,
)


def random_mixed_state(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def trace_distance(r1, r2):
    w = np.linalg.eigvalsh(r1 - r2)
    return 0.5 * np.abs(w).sum()


def test_basis_kets_normalized_and_paired():
    for ket in BASIS_KETS.values():
        assert np.linalg.norm(ket) == pytest.approx(1.0)
    for a, b in [("H", "V"), ("D", "A"), ("R", "L")]:
        assert abs(np.vdot(BASIS_KETS[a], BASIS_KETS[b])) < 1e-12


def test_settings_enumeration():
    settings = tomography_settings()
    assert len(settings) == 36
    labels = {(s.label_a, s.label_b) for s in settings}
    assert ("H", "V") in labels and len(labels) == 36
    hv = ProjSetting("H", "V")
    np.testing.assert_allclose(hv.projector, np.diag([0, 1, 0, 0]), atol=1e-15)


def test_design_is_informationally_complete():
    settings = tomography_settings()
    stack = np.stack([s.projector.ravel() for s in settings])
    assert np.linalg.matrix_rank(stack, tol=1e-10) == 16


def test_born_probabilities_examples():
    settings = tomography_settings()
    idx = {(s.label_a, s.label_b): i for i, s in enumerate(settings)}
    p = born_probabilities(singlet(), settings)
    assert p[idx[("H", "H")]] == pytest.approx(0.0, abs=1e-12)
    assert p[idx[("H", "V")]] == pytest.approx(0.5, abs=1e-12)
    assert p[idx[("D", "A")]] == pytest.approx(0.5, abs=1e-12)
    assert p[idx[("D", "D")]] == pytest.approx(0.0, abs=1e-12)
    v = 0.986
    pw = born_probabilities(werner(v), settings)
    # Werner: parallel analyzers see (1 - v) / 4
    assert pw[idx[("D", "D")]] == pytest.approx((1 - v) / 4, abs=1e-12)


def test_simulate_counts_deterministic_and_plausible():
    settings = tomography_settings()
    rec1 = simulate_counts(werner(0.986), settings, 1_000_000, seed=3)
    rec2 = simulate_counts(werner(0.986), settings, 1_000_000, seed=3)
    np.testing.assert_array_equal(rec1.counts, rec2.counts)
    idx = {(s.label_a, s.label_b): i for i, s in enumerate(settings)}
    p = 0.0035  # (1 - 0.986) / 4
    k = rec1.counts[idx[("D", "D")]]
    sigma = math.sqrt(1_000_000 * p * (1 - p))
    assert abs(k - 1_000_000 * p) < 4 * sigma
    with pytest.raises(ValueError):
        simulate_counts(singlet(), settings, 0, seed=1)


def test_count_record_validation():
    with pytest.raises(ValueError):
        CountRecord(counts=np.array([-1.0]), shots=10)
    with pytest.raises(ValueError):
        CountRecord(counts=np.array([11.0]), shots=10)


def test_noiseless_inversion():
    settings = tomography_settings()
    rho = werner(0.9)
    probs = born_probabilities(rho, settings)
    shots = 10_000_000
    record = CountRecord(counts=probs * shots, shots=shots)
    rec = reconstruct_mle(record, settings)
    assert fidelity(rec.rho, rho) >= 0.9999


def test_reconstruction_of_maximally_mixed():
    settings = tomography_settings()
    record = simulate_counts(I4 / 4, settings, 100_000, seed=5)
    rec = reconstruct_mle(record, settings)
    assert trace_distance(rec.rho, I4 / 4) <= 0.02


def test_reconstruction_roundtrip_random_states():
    settings = tomography_settings()
    rng = np.random.default_rng(12)
    for i in range(5):
        rho = random_mixed_state(rng)
        record = simulate_counts(rho, settings, 100_000, seed=100 + i)
        rec = reconstruct_mle(record, settings)
        assert fidelity(rec.rho, rho) >= 0.995
        validate_state(rec.rho)


def test_likelihood_monotone_and_output_physical():
    settings = tomography_settings()
    record = simulate_counts(werner(0.986), settings, 100_000, seed=8)
    rec = reconstruct_mle(record, settings, max_iter=50)
    validate_state(rec.rho)
    # restarting from the returned iterate must not lose likelihood
    rec2 = reconstruct_mle(record, settings)
    assert rec2.log_likelihood >= rec.log_likelihood - 1e-9


def test_reconstruction_setting_order_invariant():
    settings = tomography_settings()
    record = simulate_counts(werner(0.9), settings, 100_000, seed=21)
    rec = reconstruct_mle(record, settings)
    perm = np.random.default_rng(0).permutation(36)
    settings_p = [settings[i] for i in perm]
    record_p = CountRecord(counts=record.counts[perm], shots=record.shots)
    rec_p = reconstruct_mle(record_p, settings_p)
    assert trace_distance(rec.rho, rec_p.rho) <= 1e-6


def test_reconstruction_survives_adversarial_counts():
    settings = tomography_settings()
    record = CountRecord(counts=np.zeros(36), shots=100)
    rec = reconstruct_mle(record, settings)
    validate_state(rec.rho)
    with pytest.raises(NumericError):
        # shots on no settings carry no events at all
        reconstruct_mle(CountRecord(counts=np.zeros(1), shots=0), settings[:1])


def test_nonconvergence_is_reported_not_raised():
    settings = tomography_settings()
    record = simulate_counts(werner(0.986), settings, 100_000, seed=9)
    rec = reconstruct_mle(record, settings, max_iter=2)
    assert not rec.converged
    assert rec.iterations == 2


def test_metric_report_on_known_states():
    rep = metric_report(singlet())
    assert rep["fidelity_singlet"] == pytest.approx(1.0, abs=1e-9)
    assert rep["purity"] == pytest.approx(1.0, abs=1e-12)
    assert rep["negativity"] == pytest.approx(1.0, abs=1e-12)
    assert rep["concurrence"] == pytest.approx(1.0, abs=1e-12)
    assert rep["visibility"] == pytest.approx(1.0, abs=1e-9)
    v = 0.986
    rep_w = metric_report(werner(v))
    assert rep_w["concurrence"] == pytest.approx((3 * v - 1) / 2, abs=1e-9)
    assert rep_w["visibility"] == pytest.approx(v, abs=1e-9)
    assert rep_w["purity"] == pytest.approx(purity(werner(v)), abs=1e-12)
    assert rep_w["negativity"] == pytest.approx(negativity(werner(v)), abs=1e-12)
