import math

import numpy as np
import pytest

from bellsim.polarization import (
    AngleSet,
    DEFAULT_ANGLES,
    I4,
    chsh_s,
    concurrence,
    correlation_strong,
    fidelity,
    negativity,
    projector,
    purity,
    rho_from_json,
    rho_to_json,
    rotation_u,
    sigma_z_rotated,
    singlet,
    singlet_ket,
    validate_state,
    werner,
)

SQ2 = math.sqrt(2.0)


def random_pure_state(rng):
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def test_rotation_u_theta_zero_is_sigma_z():
    np.testing.assert_allclose(rotation_u(0.0), np.diag([1.0, -1.0]), atol=1e-15)


def test_rotation_u_quarter_pi():
    expect = np.array([[1, 1], [1, -1]]) / SQ2
    np.testing.assert_allclose(rotation_u(math.pi / 4), expect, atol=1e-15)


def test_rotation_u_is_involution():
    u = rotation_u(0.3)
    np.testing.assert_allclose(u @ u, np.eye(2), atol=1e-14)


def test_rotation_u_rejects_nonfinite():
    with pytest.raises(ValueError):
        rotation_u(math.nan)


def test_projector_special_angles():
    np.testing.assert_allclose(projector(0.0), np.diag([1.0, 0.0]), atol=1e-15)
    np.testing.assert_allclose(projector(math.pi / 2), np.diag([0.0, 1.0]), atol=1e-15)
    expect = 0.5 * np.array([[1, 1], [1, 1]])
    np.testing.assert_allclose(projector(math.pi / 4), expect, atol=1e-15)


def test_projector_complement_sums_to_identity():
    theta = 0.73
    np.testing.assert_allclose(
        projector(theta) + projector(theta + math.pi / 2), np.eye(2), atol=1e-14
    )


def test_projector_properties_random_angles():
    rng = np.random.default_rng(42)
    for theta in rng.uniform(0, math.pi, size=200):
        p = projector(theta)
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
        np.testing.assert_allclose(p, p.conj().T, atol=1e-12)
        assert abs(np.trace(p) - 1.0) < 1e-12


def test_projector_is_pi_periodic():
    np.testing.assert_allclose(projector(0.4), projector(0.4 + math.pi), atol=1e-12)


def test_singlet_entries():
    rho = singlet()
    assert rho[1, 1] == pytest.approx(0.5)
    assert rho[1, 2] == pytest.approx(-0.5)
    assert purity(rho) == pytest.approx(1.0)


def test_singlet_rotation_invariance():
    rho = singlet()
    p = np.kron(projector(0.37), np.eye(2))
    assert np.trace(rho @ p).real == pytest.approx(0.5, abs=1e-12)


def test_werner_limits():
    np.testing.assert_allclose(werner(1.0), singlet(), atol=1e-15)
    np.testing.assert_allclose(werner(0.0), I4 / 4, atol=1e-15)
    with pytest.raises(ValueError):
        werner(1.2)
    with pytest.raises(ValueError):
        werner(-0.1)


def test_werner_scales_correlations():
    v = 0.6
    for alpha, beta in [(0.0, 0.3), (0.5, 1.1)]:
        c_w = correlation_strong(werner(v), alpha, beta)
        c_s = correlation_strong(singlet(), alpha, beta)
        assert c_w == pytest.approx(v * c_s, abs=1e-12)


def test_correlation_strong_singlet():
    assert correlation_strong(singlet(), 0.4, 0.4) == pytest.approx(-1.0)
    assert correlation_strong(singlet(), 0.0, math.pi / 8) == pytest.approx(
        -math.cos(math.pi / 4), abs=1e-12
    )
    assert correlation_strong(werner(0.986), 0.0, math.pi / 8) == pytest.approx(
        -0.986 * math.cos(math.pi / 4), abs=1e-12
    )


def test_correlation_strong_matches_cosine_law():
    rng = np.random.default_rng(7)
    rho = singlet()
    for alpha, beta in rng.uniform(0, math.pi, size=(100, 2)):
        c = correlation_strong(rho, alpha, beta)
        assert abs(c + math.cos(2 * (alpha - beta))) < 1e-12


def test_chsh_default_angles():
    assert chsh_s(singlet(), DEFAULT_ANGLES) == pytest.approx(-2 * SQ2, abs=1e-12)
    assert chsh_s(werner(0.986), DEFAULT_ANGLES) == pytest.approx(
        -0.986 * 2 * SQ2, abs=1e-12
    )


def test_chsh_product_state_stays_classical():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0  # |HH><HH|
    grid = np.arange(0, math.pi, math.pi / 16)
    for a1 in grid:
        for a2 in grid:
            angles = AngleSet(a1, a2, math.pi / 8, 3 * math.pi / 8)
            assert abs(chsh_s(rho, angles)) <= 2.0 + 1e-12


def test_chsh_tsirelson_bound_random_states():
    rng = np.random.default_rng(11)
    bound = 2 * SQ2 + 1e-9
    for _ in range(10_000):
        if rng.random() < 0.5:
            rho = random_pure_state(rng)
        else:
            rho = werner(rng.random())
        angles = AngleSet(*rng.uniform(0, math.pi, size=4))
        assert abs(chsh_s(rho, angles)) <= bound


def test_fidelity_examples():
    rho = werner(0.7)
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)
    hv = np.zeros((4, 4), dtype=complex)
    hv[1, 1] = 1.0
    assert fidelity(singlet(), hv) == pytest.approx(0.5, abs=1e-10)
    v = 0.986
    assert fidelity(singlet(), werner(v)) == pytest.approx((1 + 3 * v) / 4, abs=1e-10)


def test_fidelity_symmetric():
    rng = np.random.default_rng(3)
    for _ in range(20):
        r1 = 0.7 * random_pure_state(rng) + 0.3 * I4 / 4
        r2 = werner(rng.random())
        assert fidelity(r1, r2) == pytest.approx(fidelity(r2, r1), abs=1e-10)


def test_purity_examples():
    assert purity(singlet()) == pytest.approx(1.0)
    assert purity(I4 / 4) == pytest.approx(0.25)
    v = 0.986
    assert purity(werner(v)) == pytest.approx((1 + 3 * v * v) / 4, abs=1e-12)


def test_entanglement_metrics():
    assert negativity(singlet()) == pytest.approx(1.0, abs=1e-12)
    assert concurrence(singlet()) == pytest.approx(1.0, abs=1e-12)
    assert negativity(I4 / 4) == pytest.approx(0.0, abs=1e-12)
    assert concurrence(I4 / 4) == pytest.approx(0.0, abs=1e-12)
    v = 0.986
    expect = (3 * v - 1) / 2
    assert negativity(werner(v)) == pytest.approx(expect, abs=1e-9)
    assert concurrence(werner(v)) == pytest.approx(expect, abs=1e-9)


def test_negativity_concurrence_agree_on_werner_family():
    for v in np.linspace(0.0, 1.0, 101):
        rho = werner(v)
        assert abs(negativity(rho) - concurrence(rho)) <= 1e-9


def test_validate_state_rejects_bad_inputs():
    bad = np.eye(4, dtype=complex)  # trace 4
    with pytest.raises(ValueError):
        validate_state(bad)
    nonpsd = np.diag([0.6, 0.6, -0.1, -0.1]).astype(complex)
    with pytest.raises(ValueError):
        validate_state(nonpsd)


def test_density_matrix_json_round_trip():
    rho = werner(0.4)
    np.testing.assert_allclose(rho_from_json(rho_to_json(rho)), rho, atol=1e-15)


def test_singlet_ket_normalized():
    assert np.linalg.norm(singlet_ket()) == pytest.approx(1.0)
