"""Squeezing spectra of a finite-bandwidth squeezed vacuum.

The reservoir produced by a below-threshold degenerate parametric
oscillator is characterized by two Lorentzian spectra centered on the
carrier frequency omega_L: the mean photon number N(omega) and the
magnitude of the anomalous correlator M(omega) = |M(omega)| e^{i phi}.
Both are parametrized by the cavity damping rate gamma and the
amplification coefficient epsilon through

    lambda = gamma + epsilon,   mu = gamma - epsilon,

      N(omega) = (lambda^2 - mu^2)/4 * [1/(x^2 + mu^2) - 1/(x^2 + lambda^2)]
    |M(omega)| = (lambda^2 - mu^2)/4 * [1/(x^2 + mu^2) + 1/(x^2 + lambda^2)]

with x = omega - omega_L.  The profiles satisfy the minimum-uncertainty
identity |M|^2 = N (N + 1) at every frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidParamsError

FloatOrArray = Union[float, NDArray[np.float64]]


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidParamsError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class SqueezedVacuumParams:
    """Bath description (gamma, epsilon, phi, omega_L).

    Parameters
    ----------
    gamma:
        Cavity damping rate, angular frequency units, > 0.
    epsilon:
        Real amplification coefficient, same units, 0 <= epsilon < gamma
        (below-threshold operation; epsilon = 0 is an ordinary vacuum).
    phi:
        Squeezing phase in radians.
    omega_L:
        Carrier (driving laser) frequency, > 0.
    """

    gamma: float
    epsilon: float
    phi: float
    omega_L: float

    def __post_init__(self) -> None:
        for name in ("gamma", "epsilon", "phi", "omega_L"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.gamma <= 0.0:
            raise InvalidParamsError(f"gamma must be > 0, got {self.gamma}")
        if self.epsilon < 0.0:
            raise InvalidParamsError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.epsilon >= self.gamma:
            raise InvalidParamsError(
                f"epsilon must satisfy epsilon < gamma (below threshold), "
                f"got epsilon={self.epsilon}, gamma={self.gamma}"
            )
        if self.omega_L <= 0.0:
            raise InvalidParamsError(f"omega_L must be > 0, got {self.omega_L}")

    @property
    def lam(self) -> float:
        """lambda = gamma + epsilon (wide Lorentzian width)."""
        return self.gamma + self.epsilon

    @property
    def mu(self) -> float:
        """mu = gamma - epsilon (narrow Lorentzian width), > 0 below threshold."""
        return self.gamma - self.epsilon


@dataclass(frozen=True)
class SpectralPoint:
    """One evaluated spectral sample: (omega, N(omega), M(omega))."""

    omega: float
    n_value: float
    m_value: complex


def spectral_n(params: SqueezedVacuumParams, omega: ArrayLike) -> FloatOrArray:
    """Mean photon number N(omega) of the squeezed reservoir.

    Accepts a scalar or array of frequencies; returns the same shape.
    N is even in x = omega - omega_L, maximal at x = 0, nonnegative,
    and falls off as 1/x^4.
    """
    x = np.asarray(omega, dtype=float) - params.omega_L
    lam2 = params.lam ** 2
    mu2 = params.mu ** 2
    amp = (lam2 - mu2) / 4.0
    # product form of amp * (1/(x^2+mu^2) - 1/(x^2+lam^2)): algebraically
    # identical, but the explicit difference cancels catastrophically in
    # the wings (|x| >> lam) and would spoil |M|^2 = N(N+1) at 1e-12
    value = 4.0 * amp * amp / ((x * x + mu2) * (x * x + lam2))
    if np.ndim(omega) == 0:
        return float(value)
    return value


def spectral_m_abs(params: SqueezedVacuumParams, omega: ArrayLike) -> FloatOrArray:
    """Magnitude |M(omega)| of the anomalous correlator."""
    x = np.asarray(omega, dtype=float) - params.omega_L
    lam2 = params.lam ** 2
    mu2 = params.mu ** 2
    amp = (lam2 - mu2) / 4.0
    value = amp * (1.0 / (x * x + mu2) + 1.0 / (x * x + lam2))
    if np.ndim(omega) == 0:
        return float(value)
    return value


def spectral_m(params: SqueezedVacuumParams, omega: ArrayLike):
    """Complex correlator M(omega) = |M(omega)| e^{i phi}.

    The phase phi is frequency independent; |M| >= N pointwise and
    |M|^2 = N (N + 1) exactly.
    """
    phase = complex(math.cos(params.phi), math.sin(params.phi))
    value = spectral_m_abs(params, omega) * phase
    if np.ndim(omega) == 0:
        return complex(value)
    return value


def spectral_point(params: SqueezedVacuumParams, omega: float) -> SpectralPoint:
    """Evaluate both spectra at one frequency."""
    return SpectralPoint(
        omega=float(omega),
        n_value=spectral_n(params, omega),
        m_value=spectral_m(params, omega),
    )
