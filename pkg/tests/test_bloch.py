"""Tests for the master-equation superoperator and Bloch dynamics."""

import math

import numpy as np
import pytest

from squeezedzeno import (
    BlochState,
    DegenerateFitError,
    DensityMatrix,
    DriveParams,
    EffectiveCoefficients,
    IllConditionedFitError,
    InvalidParamsError,
    SqueezedVacuumParams,
    SqueezingShifts,
    bloch_derivative,
    bloch_generator,
    build_liouvillian,
    effective_coefficients,
    evolve,
    fit_decay_rate,
    fit_exponential,
    population_decay_rate,
    quadrature_decay_rate,
    quadrature_effective_rates,
    spectral_m_abs,
    spectral_n,
    steady_state,
)

BATH = SqueezedVacuumParams(gamma=1.0, epsilon=0.5, phi=math.pi, omega_L=100.0)
DRIVE = DriveParams(Omega=10.0, Delta=0.0)
COEFFS = effective_coefficients(BATH, DRIVE, SqueezingShifts.asymptotic(BATH, DRIVE))


def random_coefficients(rng):
    return EffectiveCoefficients(
        gamma=rng.uniform(0.5, 2.0),
        n_tilde=rng.uniform(0.0, 3.0),
        m_tilde=complex(rng.normal(), rng.normal()),
        delta=rng.normal(),
        beta=complex(rng.normal(), rng.normal()),
    )


def random_state(rng):
    # random point inside the Bloch ball
    v = rng.normal(size=3)
    v *= rng.uniform(0.0, 1.0) / np.linalg.norm(v)
    return BlochState(complex(v[0] / 2.0, v[1] / 2.0), v[2])


def test_superoperator_matches_bloch_derivative():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(300):
        coeffs = random_coefficients(rng)
        drive = DriveParams(Omega=rng.uniform(0.0, 10.0), Delta=rng.normal())
        state = random_state(rng)
        liou = build_liouvillian(coeffs, drive)
        drho = liou.apply(state.to_density_matrix().matrix)
        ds_minus, ds_z = bloch_derivative(state, coeffs, drive)
        worst = max(worst, abs(drho[0, 1] - ds_minus))
        worst = max(worst, abs((drho[0, 0] - drho[1, 1]).real - ds_z))
        worst = max(worst, abs(np.trace(drho)))
    assert worst < 1e-12


def test_liouvillian_is_trace_free():
    rng = np.random.default_rng(12)
    trace_row = np.array([1.0, 0.0, 0.0, 1.0])
    for _ in range(50):
        liou = build_liouvillian(
            random_coefficients(rng), DriveParams(rng.uniform(0, 5), rng.normal())
        )
        assert np.abs(trace_row @ liou.matrix).max() < 1e-12


def test_generator_matches_derivative():
    rng = np.random.default_rng(13)
    for _ in range(100):
        coeffs = random_coefficients(rng)
        drive = DriveParams(Omega=rng.uniform(0.0, 10.0), Delta=rng.normal())
        state = random_state(rng)
        A, b = bloch_generator(coeffs, drive)
        v = np.array([2 * state.s_minus.real, 2 * state.s_minus.imag, state.s_z])
        du, dw, dz = A @ v + b
        ds_minus, ds_z = bloch_derivative(state, coeffs, drive)
        assert du == pytest.approx(2 * ds_minus.real, rel=1e-12, abs=1e-12)
        assert dw == pytest.approx(2 * ds_minus.imag, rel=1e-12, abs=1e-12)
        assert dz == pytest.approx(ds_z, rel=1e-12, abs=1e-12)


def test_vacuum_decay_closed_form():
    # undriven atom in an ordinary vacuum: <sigma_z>(t) = 2 e^{-gamma t} - 1
    bath = SqueezedVacuumParams(1.0, 0.0, 0.0, 100.0)
    drive = DriveParams(Omega=0.0, Delta=0.0)
    coeffs = effective_coefficients(bath, drive)
    traj = evolve(
        BlochState.excited(), coeffs, drive, (0.0, 5.0), n_samples=100, rtol=1e-10, atol=1e-13
    )
    expected = 2.0 * np.exp(-traj.t) - 1.0
    np.testing.assert_allclose(traj.s_z, expected, atol=1e-8)
    np.testing.assert_allclose(np.abs(traj.s_minus), 0.0, atol=1e-12)


def test_steady_state_solves_generator():
    ss = steady_state(COEFFS, DRIVE)
    A, b = bloch_generator(COEFFS, DRIVE)
    v = np.array([2 * ss.s_minus.real, 2 * ss.s_minus.imag, ss.s_z])
    assert np.abs(A @ v + b).max() < 1e-12
    assert ss.s_z == pytest.approx(-0.037555711260159295, rel=1e-12)
    assert ss.s_minus.imag == pytest.approx(-0.04172856806684367, rel=1e-12)


def test_undriven_steady_state_population():
    # without drive the populations thermalize to -1/(1 + 2 N~)
    drive = DriveParams(Omega=0.0, Delta=0.0)
    coeffs = effective_coefficients(BATH, drive, SqueezingShifts.asymptotic(BATH, drive))
    ss = steady_state(coeffs, drive)
    assert ss.s_z == pytest.approx(-1.0 / (1.0 + 2.0 * coeffs.n_tilde), rel=1e-12)
    assert abs(ss.s_minus) < 1e-15


def test_decay_rates_against_spectra():
    # at phi = pi the effective rates telescope onto bare spectral values:
    # slow quadrature gamma (1/2 + N1 - |M1|), fast gamma (1/2 + N0 + |M0|)
    w0, w1 = BATH.omega_L, BATH.omega_L + DRIVE.omega_prime
    slow = BATH.gamma * (0.5 + spectral_n(BATH, w1) - spectral_m_abs(BATH, w1))
    fast = BATH.gamma * (0.5 + spectral_n(BATH, w0) + spectral_m_abs(BATH, w0))
    rates = quadrature_effective_rates(COEFFS)
    assert rates[0] == pytest.approx(slow, rel=1e-12)
    assert rates[1] == pytest.approx(fast, rel=1e-12)
    assert rates[1] == pytest.approx(4.5, rel=1e-12)
    assert quadrature_decay_rate(COEFFS) == pytest.approx(0.4902200488997557, rel=1e-12)
    assert population_decay_rate(COEFFS) == pytest.approx(
        BATH.gamma * (1.0 + 2.0 * COEFFS.n_tilde), rel=1e-15
    )


def test_slow_quadrature_decouples_at_pi():
    # Im M~ + delta = 0 here, so <sigma_x> decays as a clean exponential
    # at the slow rate even with the drive on
    traj = evolve(
        BlochState.x_polarized(),
        COEFFS,
        DRIVE,
        (0.0, 3.0),
        n_samples=200,
        rtol=1e-11,
        atol=1e-13,
        method="bloch",
    )
    fit = fit_decay_rate(traj, observable="sigma_x")
    assert fit.rate == pytest.approx(quadrature_decay_rate(COEFFS), rel=1e-6)
    assert abs(fit.offset) < 1e-6


def test_evolve_methods_agree():
    kwargs = dict(n_samples=50, rtol=1e-10, atol=1e-13)
    t_span = (0.0, 2.0)
    sup = evolve(BlochState.excited(), COEFFS, DRIVE, t_span, **kwargs)
    blo = evolve(BlochState.excited(), COEFFS, DRIVE, t_span, method="bloch", **kwargs)
    np.testing.assert_allclose(sup.s_z, blo.s_z, atol=5e-8)
    np.testing.assert_allclose(sup.s_minus, blo.s_minus, atol=5e-8)
    assert np.all(blo.trace_error == 0.0)
    assert np.abs(sup.trace_error).max() < 1e-10


def test_evolve_frozen_sample():
    traj = evolve(
        BlochState.excited(), COEFFS, DRIVE, (0.0, 1.0), n_samples=5, rtol=1e-10, atol=1e-13
    )
    np.testing.assert_allclose(traj.t, [0.0, 0.25, 0.5, 0.75, 1.0], atol=1e-15)
    assert traj.s_z[0] == 1.0
    assert traj.s_z[2] == pytest.approx(-0.00662008245, abs=1e-7)
    assert traj.s_minus[2].imag == pytest.approx(-0.0888318542, abs=1e-7)
    # phi = pi keeps the real quadrature dark
    np.testing.assert_allclose(traj.s_minus.real, 0.0, atol=1e-12)


def test_evolve_explicit_grid_and_accessors():
    t_eval = np.array([0.0, 0.1, 0.7])
    traj = evolve(BlochState.ground(), COEFFS, DRIVE, (0.0, 1.0), t_eval=t_eval)
    assert len(traj) == 3
    np.testing.assert_array_equal(traj.t, t_eval)
    st = traj.state_at(0)
    assert st.s_z == -1.0
    sx = traj.observable("sigma_x")
    sy = traj.observable("sigma_y")
    np.testing.assert_allclose(sx, 2.0 * traj.s_minus.real, atol=1e-15)
    np.testing.assert_allclose(sy, -2.0 * traj.s_minus.imag, atol=1e-15)
    with pytest.raises(InvalidParamsError):
        traj.observable("sigma_q")


def test_fit_exponential_recovers_synthetic_rate():
    t = np.linspace(0.0, 4.0, 300)
    y = 0.3 + 0.7 * np.exp(-2.5 * t)
    fit = fit_exponential(t, y)
    assert fit.rate == pytest.approx(2.5, rel=1e-9)
    assert fit.amplitude == pytest.approx(0.7, rel=1e-9)
    assert fit.offset == pytest.approx(0.3, rel=1e-9)
    assert fit.residual < 1e-10


def test_fit_exponential_rejects_flat_data():
    t = np.linspace(0.0, 1.0, 50)
    with pytest.raises(DegenerateFitError):
        fit_exponential(t, np.full_like(t, 0.7))


def test_fit_exponential_rejects_non_exponential():
    t = np.linspace(0.0, 6.0, 400)
    y = np.sin(3.0 * t)
    with pytest.raises(IllConditionedFitError):
        fit_exponential(t, y)


def test_bloch_state_density_matrix_round_trip():
    rng = np.random.default_rng(21)
    for _ in range(20):
        state = random_state(rng)
        back = state.to_density_matrix().to_bloch()
        assert back.s_minus == pytest.approx(state.s_minus, abs=1e-14)
        assert back.s_z == pytest.approx(state.s_z, abs=1e-14)


def test_density_matrix_conventions():
    rho = BlochState.excited().to_density_matrix()
    # basis ordering puts the excited level first
    assert rho.matrix[0, 0] == 1.0
    assert rho.matrix[1, 1] == 0.0
    assert rho.s_z == 1.0
    plus = BlochState.x_polarized(+1).to_density_matrix()
    assert plus.s_minus == pytest.approx(0.5 + 0.0j, abs=1e-15)


def test_density_matrix_validation():
    with pytest.raises(InvalidParamsError):
        DensityMatrix(np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex))
    with pytest.raises(InvalidParamsError):
        DensityMatrix(np.array([[0.9, 0.0], [0.0, 0.5]], dtype=complex))


def test_bloch_ball_violation_warns():
    with pytest.warns(UserWarning):
        BlochState(0.6 + 0.0j, 0.8)
