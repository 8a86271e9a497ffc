"""Master equation and Bloch dynamics of the driven atom.

The reduced dynamics combines a detuning rotation, thermal-type
dissipators weighted by N~ and N~ + 1, phase-sensitive squeezing terms
proportional to M~, the coherent drive, and a pair of double-commutator
corrections proportional to beta:

    d rho / dt =
        (i/2) gamma delta [sz, rho]
      + (gamma/2) (N~+1) (2 sm rho sp - sp sm rho - rho sp sm)
      + (gamma/2)  N~    (2 sp rho sm - sm sp rho - rho sm sp)
      - gamma M~  sp rho sp  -  gamma M~* sm rho sm
      - (i/2) Omega [sp + sm, rho]
      + (i/4) ( beta [sp, [sz, rho]] - beta* [sm, [sz, rho]] )

Taking expectation values gives the equivalent Bloch form

    d<sm>/dt = -gamma (1/2 + N~ - i delta) <sm> - gamma M~ <sp>
               + (i/2) Omega <sz>
    d<sz>/dt = i (Omega + beta*) <sm> - i (Omega + beta) <sp>
               - gamma (1 + 2 N~) <sz> - gamma

with <sp> = <sm>*.  Both representations are implemented and checked
against each other.  Two decay parameters summarize the relaxation:

    Gamma_dec = gamma (1/2 + N~ + Re M~)   (symmetric quadrature)
    Gamma_pop = gamma (1 + 2 N~)           (population inversion)

The quadrature sector also carries a cross coupling proportional to
Im M~ + delta; when it vanishes, <sx> decays as a single exponential at
Gamma_dec and the fit oracle below reproduces the analytic value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp
from scipy.optimize import OptimizeWarning, curve_fit

from .coefficients import DriveParams, EffectiveCoefficients
from .errors import (
    DegenerateFitError,
    IllConditionedFitError,
    InvalidParamsError,
    StepFailureError,
)

_SM = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
_SP = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_ID = np.eye(2, dtype=complex)

_BALL_TOL = 1e-10


@dataclass(frozen=True)
class BlochState:
    """Expectation-value state (<sigma_->, <sigma_z>).

    The basis is {|e>, |g>}; <sigma_z> = +1 is the excited state.  The
    state must lie in the Bloch ball, |<sigma_->|^2 <= (1 - sz^2)/4, up
    to a small tolerance; violations beyond it are reported as warnings
    since they indicate integrator drift, not caller error.
    """

    s_minus: complex
    s_z: float

    def __post_init__(self) -> None:
        sm = complex(self.s_minus)
        sz = float(self.s_z)
        if not (math.isfinite(sm.real) and math.isfinite(sm.imag) and math.isfinite(sz)):
            raise InvalidParamsError("BlochState components must be finite")
        object.__setattr__(self, "s_minus", sm)
        object.__setattr__(self, "s_z", sz)
        excess = abs(sm) ** 2 - (1.0 - sz * sz) / 4.0
        if excess > _BALL_TOL or abs(sz) > 1.0 + _BALL_TOL:
            warnings.warn(
                f"state outside the Bloch ball by {max(excess, abs(sz) - 1.0):.3g}",
                stacklevel=2,
            )

    @classmethod
    def excited(cls) -> "BlochState":
        return cls(0.0 + 0.0j, 1.0)

    @classmethod
    def ground(cls) -> "BlochState":
        return cls(0.0 + 0.0j, -1.0)

    @classmethod
    def x_polarized(cls, sign: int = +1) -> "BlochState":
        """Pure state along +/- x: <sigma_x> = sign, <sigma_z> = 0."""
        return cls(sign * 0.5 + 0.0j, 0.0)

    def to_density_matrix(self) -> "DensityMatrix":
        rho = np.array(
            [
                [(1.0 + self.s_z) / 2.0, self.s_minus],
                [np.conj(self.s_minus), (1.0 - self.s_z) / 2.0],
            ],
            dtype=complex,
        )
        return DensityMatrix(rho)


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 density matrix over {|e>, |g>}.

    Construction checks hermiticity and unit trace to 1e-12 and warns if
    an eigenvalue dips below -1e-10.  The squeezing terms saturate the
    positivity boundary |M|^2 = N (N + 1), so transient tolerance-level
    violations along trajectories are integrator artifacts, not bugs.
    """

    matrix: NDArray[np.complex128]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidParamsError(f"expected a 2x2 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m.view(float))):
            raise InvalidParamsError("density matrix entries must be finite")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise InvalidParamsError("density matrix is not Hermitian to 1e-12")
        if abs(np.trace(m).real - 1.0) > 1e-12 or abs(np.trace(m).imag) > 1e-12:
            raise InvalidParamsError("density matrix trace differs from 1 by > 1e-12")
        object.__setattr__(self, "matrix", m)
        lo = float(np.min(np.linalg.eigvalsh((m + m.conj().T) / 2.0)))
        if lo < -1e-10:
            warnings.warn(f"density matrix has eigenvalue {lo:.3g} < -1e-10", stacklevel=2)

    @property
    def s_minus(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def s_z(self) -> float:
        return float((self.matrix[0, 0] - self.matrix[1, 1]).real)

    def to_bloch(self) -> BlochState:
        return BlochState(self.s_minus, self.s_z)


@dataclass(frozen=True)
class Liouvillian:
    """4x4 generator acting on column-vectorized (column-major) rho."""

    matrix: NDArray[np.complex128]

    def apply(self, rho: NDArray[np.complex128]) -> NDArray[np.complex128]:
        """Return d(rho)/dt for a 2x2 matrix rho."""
        vec = np.asarray(rho, dtype=complex).reshape(4, order="F")
        return (self.matrix @ vec).reshape((2, 2), order="F")


def _left(a: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return np.kron(_ID, a)


def _right(a: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return np.kron(a.T, _ID)


def _sandwich(a: NDArray, b: NDArray) -> NDArray[np.complex128]:
    # vec(A rho B) = kron(B.T, A) vec(rho) for column stacking
    return np.kron(b.T, a)


def _commutator_super(a: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return _left(a) - _right(a)


def build_liouvillian(coeffs: EffectiveCoefficients, drive: DriveParams) -> Liouvillian:
    """Assemble the full master-equation generator.

    All seven lines of the equation of motion are included: the delta
    rotation, both thermal dissipators, the two squeezing terms, the
    drive commutator, and the beta double commutators.
    """
    g = coeffs.gamma
    nt = coeffs.n_tilde
    mt = coeffs.m_tilde
    beta = coeffs.beta
    omega = drive.Omega

    diss_down = (
        2.0 * _sandwich(_SM, _SP) - _left(_SP @ _SM) - _right(_SP @ _SM)
    )
    diss_up = (
        2.0 * _sandwich(_SP, _SM) - _left(_SM @ _SP) - _right(_SM @ _SP)
    )
    cz = _commutator_super(_SZ)
    lio = (
        0.5j * g * coeffs.delta * cz
        + 0.5 * g * (nt + 1.0) * diss_down
        + 0.5 * g * nt * diss_up
        - g * mt * _sandwich(_SP, _SP)
        - g * np.conj(mt) * _sandwich(_SM, _SM)
        - 0.5j * omega * _commutator_super(_SP + _SM)
        + 0.25j * (
            beta * (_commutator_super(_SP) @ cz)
            - np.conj(beta) * (_commutator_super(_SM) @ cz)
        )
    )
    return Liouvillian(lio)


def bloch_derivative(
    state: BlochState, coeffs: EffectiveCoefficients, drive: DriveParams
) -> tuple[complex, float]:
    """Right-hand side (d<sm>/dt, d<sz>/dt) of the Bloch equations."""
    g = coeffs.gamma
    sm = state.s_minus
    sp = np.conj(sm)
    sz = state.s_z
    d_sm = (
        -g * (0.5 + coeffs.n_tilde - 1j * coeffs.delta) * sm
        - g * coeffs.m_tilde * sp
        + 0.5j * drive.Omega * sz
    )
    d_sz = (
        1j * (drive.Omega + np.conj(coeffs.beta)) * sm
        - 1j * (drive.Omega + coeffs.beta) * sp
        - g * (1.0 + 2.0 * coeffs.n_tilde) * sz
        - g
    )
    return complex(d_sm), float(d_sz.real)


def bloch_generator(
    coeffs: EffectiveCoefficients, drive: DriveParams
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Real affine form d(u, w, z)/dt = A (u, w, z) + b.

    Here u = 2 Re<sm>, w = 2 Im<sm>, z = <sz>.  Useful for steady
    states, eigenvalue checks, and a cheap integration path.
    """
    g = coeffs.gamma
    a = 0.5 + coeffs.n_tilde
    m1 = coeffs.m_tilde.real
    m2 = coeffs.m_tilde.imag
    d = coeffs.delta
    b1 = coeffs.beta.real
    b2 = coeffs.beta.imag
    omega = drive.Omega
    mat = np.array(
        [
            [-g * (a + m1), -g * (d + m2), 0.0],
            [g * (d - m2), -g * (a - m1), omega],
            [b2, -(omega + b1), -g * (1.0 + 2.0 * coeffs.n_tilde)],
        ]
    )
    aff = np.array([0.0, 0.0, -g])
    return mat, aff


def steady_state(coeffs: EffectiveCoefficients, drive: DriveParams) -> BlochState:
    """Stationary Bloch vector from the linear system A s = -b."""
    mat, aff = bloch_generator(coeffs, drive)
    u, w, z = np.linalg.solve(mat, -aff)
    return BlochState(0.5 * (u + 1j * w), z)


def quadrature_decay_rate(coeffs: EffectiveCoefficients) -> float:
    """Coherence decay constant Gamma_dec = gamma (1/2 + N~ + Re M~)."""
    return coeffs.gamma * (0.5 + coeffs.n_tilde + coeffs.m_tilde.real)


def population_decay_rate(coeffs: EffectiveCoefficients) -> float:
    """Population decay constant Gamma_pop = gamma (1 + 2 N~)."""
    return coeffs.gamma * (1.0 + 2.0 * coeffs.n_tilde)


def quadrature_effective_rates(coeffs: EffectiveCoefficients) -> tuple[float, float]:
    """Decay rates of the undriven quadrature sector, sorted ascending.

    These are the negative real parts of the eigenvalues of the 2x2
    block coupling (u, w).  When the cross coupling Im M~ + delta is
    nonzero the quadratures mix and these effective rates differ from
    the literal Gamma_dec; the slower one governs the long-time tail.
    """
    mat, _ = bloch_generator(coeffs, DriveParams(0.0, 0.0))
    eigs = np.linalg.eigvals(mat[:2, :2])
    rates = sorted(-eigs.real)
    return float(rates[0]), float(rates[1])


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the reduced dynamics.

    trace_error is |tr rho - 1| at each sample; identically zero when
    the integration ran in Bloch (expectation-value) form, since that
    parametrization has no trace degree of freedom.
    """

    t: NDArray[np.float64]
    s_minus: NDArray[np.complex128]
    s_z: NDArray[np.float64]
    trace_error: NDArray[np.float64] = field(repr=False)

    def observable(self, name: str) -> NDArray[np.float64]:
        """Time series of a named observable.

        Accepted names: sigma_x, sigma_y, sigma_z, re_s_minus,
        im_s_minus, abs_s_minus.
        """
        if name == "sigma_x":
            return 2.0 * self.s_minus.real
        if name == "sigma_y":
            return -2.0 * self.s_minus.imag
        if name == "sigma_z":
            return np.asarray(self.s_z, dtype=float)
        if name == "re_s_minus":
            return self.s_minus.real.copy()
        if name == "im_s_minus":
            return self.s_minus.imag.copy()
        if name == "abs_s_minus":
            return np.abs(self.s_minus)
        raise InvalidParamsError(f"unknown observable {name!r}")

    def state_at(self, index: int) -> BlochState:
        return BlochState(complex(self.s_minus[index]), float(self.s_z[index]))

    def __len__(self) -> int:
        return int(self.t.size)


InitialState = Union[BlochState, DensityMatrix]


def _max_step(coeffs: EffectiveCoefficients, drive: DriveParams) -> float:
    scale = max(
        coeffs.gamma * abs(1.0 + 2.0 * coeffs.n_tilde), drive.omega_prime
    )
    if scale <= 0.0:
        scale = coeffs.gamma
    return 0.01 / scale


def evolve(
    initial: InitialState,
    coeffs: EffectiveCoefficients,
    drive: DriveParams,
    t_span: tuple[float, float],
    *,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    n_samples: int = 400,
    t_eval: Sequence[float] | None = None,
    method: str = "superoperator",
) -> Trajectory:
    """Integrate the dynamics over t_span and sample the solution.

    Parameters
    ----------
    initial:
        BlochState or DensityMatrix at t_span[0].
    coeffs, drive:
        Generator inputs.
    rtol, atol:
        Local error control for the Runge-Kutta integrator.  The step
        size is additionally capped at 0.01 / max(gamma (1+2N~), Omega')
        so Rabi oscillations stay resolved.
    n_samples, t_eval:
        Either an explicit sample grid or a uniform grid size.
    method:
        "superoperator" integrates vec(rho) under the full generator
        (default; exposes trace drift as a diagnostic), "bloch"
        integrates the three real expectation values.

    Raises
    ------
    StepFailureError
        If the integrator cannot satisfy the error control.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (t1 > t0):
        raise InvalidParamsError(f"t_span end must exceed start, got {t_span}")
    if t_eval is None:
        t_eval = np.linspace(t0, t1, int(n_samples))
    else:
        t_eval = np.asarray(t_eval, dtype=float)

    if isinstance(initial, DensityMatrix):
        bloch0 = initial.to_bloch()
        rho0 = initial.matrix
    elif isinstance(initial, BlochState):
        bloch0 = initial
        rho0 = initial.to_density_matrix().matrix
    else:
        raise InvalidParamsError(
            f"initial must be a BlochState or DensityMatrix, got {type(initial).__name__}"
        )

    max_step = _max_step(coeffs, drive)

    if method == "superoperator":
        lio = build_liouvillian(coeffs, drive).matrix

        def rhs(_t: float, y: NDArray[np.complex128]) -> NDArray[np.complex128]:
            return lio @ y

        y0 = rho0.reshape(4, order="F").astype(complex)
        sol = solve_ivp(
            rhs, (t0, t1), y0, method="RK45", t_eval=t_eval,
            rtol=rtol, atol=atol, max_step=max_step,
        )
        if not sol.success:
            raise StepFailureError(f"integration failed: {sol.message}")
        rhos = sol.y.reshape(2, 2, -1, order="F")
        s_minus = rhos[0, 1, :]
        s_z = (rhos[0, 0, :] - rhos[1, 1, :]).real
        trace_error = np.abs(rhos[0, 0, :] + rhos[1, 1, :] - 1.0)
    elif method == "bloch":
        mat, aff = bloch_generator(coeffs, drive)

        def rhs_real(_t: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
            return mat @ y + aff

        y0 = np.array([2.0 * bloch0.s_minus.real, 2.0 * bloch0.s_minus.imag, bloch0.s_z])
        sol = solve_ivp(
            rhs_real, (t0, t1), y0, method="RK45", t_eval=t_eval,
            rtol=rtol, atol=atol, max_step=max_step,
        )
        if not sol.success:
            raise StepFailureError(f"integration failed: {sol.message}")
        s_minus = 0.5 * (sol.y[0] + 1j * sol.y[1])
        s_z = sol.y[2]
        trace_error = np.zeros_like(sol.t)
    else:
        raise InvalidParamsError(f"unknown method {method!r}")

    return Trajectory(
        t=np.asarray(sol.t, dtype=float),
        s_minus=np.asarray(s_minus, dtype=complex),
        s_z=np.asarray(s_z, dtype=float),
        trace_error=np.asarray(trace_error, dtype=float),
    )


@dataclass(frozen=True)
class FitResult:
    """Exponential fit y(t) = amplitude * exp(-rate t) + offset."""

    rate: float
    amplitude: float
    offset: float
    residual: float


def fit_exponential(
    t: Sequence[float],
    y: Sequence[float],
    *,
    residual_threshold: float = 1e-3,
) -> FitResult:
    """Least-squares fit of a decaying exponential with offset.

    Raises DegenerateFitError when the signal is constant and
    IllConditionedFitError when the normalized rms residual exceeds
    residual_threshold (signal not actually single-exponential).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size != y.size or t.size < 4:
        raise InvalidParamsError("need at least 4 matching samples to fit")

    spread = float(np.max(y) - np.min(y))
    scale = max(np.max(np.abs(y)), 1.0)
    if spread < 1e-13 * scale:
        raise DegenerateFitError("observable is constant; no decay rate to fit")

    c0 = float(y[-1])
    a0 = float(y[0] - c0)
    # crude rate guess from the time to lose half the initial deviation
    dev = np.abs(y - c0)
    half = np.nonzero(dev <= 0.5 * abs(a0))[0]
    if half.size and half[0] > 0:
        r0 = math.log(2.0) / (t[half[0]] - t[0])
    else:
        r0 = 1.0 / max(t[-1] - t[0], 1e-30)

    def model_plain(tt: NDArray, rate: float, amp: float, off: float) -> NDArray:
        return amp * np.exp(-rate * tt) + off

    try:
        with warnings.catch_warnings():
            # a numerically perfect decay makes the covariance singular,
            # which is fine because only popt is used
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(
                model_plain, t, y, p0=[r0, a0, c0], maxfev=20000
            )
    except RuntimeError as exc:
        raise IllConditionedFitError(f"exponential fit did not converge: {exc}") from exc

    rate, amp, off = (float(v) for v in popt)
    resid = float(np.sqrt(np.mean((model_plain(t, *popt) - y) ** 2)))
    norm = max(abs(amp), 1e-30)
    if resid / norm > residual_threshold:
        raise IllConditionedFitError(
            f"fit residual {resid:.3g} exceeds {residual_threshold:.3g} of the amplitude; "
            f"the signal is not a single exponential"
        )
    return FitResult(rate=rate, amplitude=amp, offset=off, residual=resid)


def fit_decay_rate(
    trajectory: Trajectory,
    observable: str = "sigma_x",
    *,
    residual_threshold: float = 1e-3,
) -> FitResult:
    """Fit one trajectory observable to a decaying exponential."""
    return fit_exponential(
        trajectory.t,
        trajectory.observable(observable),
        residual_threshold=residual_threshold,
    )
