"""Sustainable-coherence conditions and parameter-space classification.

The decoherence and Zeno timescales of the weakly measured atom obey

    tau_zeno / tau_dec = [Gamma_dec + 2 omega_L/n] / [Gamma_pop + 2 omega_L/n],

and coherence is sustainable (the coherence outlives the population)
when the ratio does not exceed one.  Two algebraically inequivalent
published forms of this comparison are in circulation, differing by a
factor of two in the Re M~ term; both are implemented side by side:

    derived:  2 Re M~ <= 1 + 2 N~      (literal quotient of timescales)
    paper:    4 Re M~ <= 1 + 2 N~      (as printed in the reduction)

Neither mode is silently preferred: classification defaults to
"derived" and every report carries both.

For the asymptotic shift preset the "paper" inequality can be recast in
angular form.  With theta = atan2(|M(omega_L + Omega')|, Delta~ delta_M)
the left side

    lhs = sqrt(Delta~^2 delta_M^2 + |M|^2) sin(theta - phi)
          / [1 + 2 N(omega_L + Omega') + 3 (1 - Delta~^2) Re Upsilon]

satisfies lhs <= 1/4 exactly where the denominator is positive.  On
resonance-family phase profiles phi = pi Delta / Omega the angle
comparison collapses further to the sufficient-condition margin

    Delta tan(pi Delta / Omega) - (gamma^2 - epsilon^2) / (2 gamma) >= 0,

which is what the grid classifier reports per point.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .bloch import population_decay_rate, quadrature_decay_rate
from .coefficients import (
    DriveParams,
    EffectiveCoefficients,
    SqueezingShifts,
    effective_coefficients,
    upsilon,
)
from .errors import (
    EmptyGridError,
    InvalidParamsError,
    SingularDenominatorError,
    TangentSingularityError,
    UnphysicalCoefficientsError,
)
from .spectrum import SqueezedVacuumParams, spectral_m_abs, spectral_n
from .weakmeas import decoherence_time, zeno_time

_MODES = ("paper", "derived")


def _check_mode(mode: str) -> str:
    if mode not in _MODES:
        raise InvalidParamsError(f"mode must be one of {_MODES}, got {mode!r}")
    return mode


def timescale_ratio(
    coeffs: EffectiveCoefficients, omega_L: float, n: int, mode: str = "derived"
) -> float:
    """Ratio tau_zeno / tau_dec in the requested mode.

    mode="derived" evaluates the literal quotient
    [Gamma_dec + 2 omega_L/n] / [Gamma_pop + 2 omega_L/n]; mode="paper"
    evaluates the printed reduction
    1/2 + (2 gamma Re M~ + omega_L/n) / (Gamma_pop + 2 omega_L/n),
    which doubles the Re M~ contribution.
    """
    _check_mode(mode)
    g = coeffs.gamma
    meas = omega_L / n
    denom = g * (1.0 + 2.0 * coeffs.n_tilde) + 2.0 * meas
    if mode == "derived":
        return (quadrature_decay_rate(coeffs) + 2.0 * meas) / denom
    return 0.5 + (2.0 * g * coeffs.m_tilde.real + meas) / denom


def sustainable_condition(coeffs: EffectiveCoefficients, mode: str = "derived") -> bool:
    """Whether coherence outlives population in the requested mode."""
    _check_mode(mode)
    factor = 2.0 if mode == "derived" else 4.0
    return factor * coeffs.m_tilde.real <= 1.0 + 2.0 * coeffs.n_tilde


def squeezing_phase_profile(Delta: float, Omega: float) -> float:
    """Detuning-locked squeezing phase phi(Delta) = pi Delta / Omega."""
    if not Omega > 0.0:
        raise InvalidParamsError(f"Omega must be > 0, got {Omega}")
    return math.pi * Delta / Omega


def angular_theta(
    bath: SqueezedVacuumParams, drive: DriveParams, shifts: SqueezingShifts
) -> float:
    """Mixing angle theta = atan2(|M(omega_L + Omega')|, Delta~ delta_M).

    Zero by convention when both arguments vanish (for example an
    unsqueezed bath with the asymptotic preset); the angular left side
    is exactly zero there, so the angle carries no information.
    """
    m1 = spectral_m_abs(bath, bath.omega_L + drive.omega_prime)
    x = drive.delta_tilde * shifts.delta_M
    if m1 == 0.0 and x == 0.0:
        return 0.0
    return math.atan2(m1, x)


def angular_condition(
    bath: SqueezedVacuumParams, drive: DriveParams, shifts: SqueezingShifts
) -> tuple[float, bool]:
    """Angular form of the sustainability condition.

    Returns (lhs, lhs <= 1/4).  The signed sin(theta - phi) is kept
    literal, so phi > theta makes the condition hold trivially.  A
    degenerate zero-magnitude numerator short-circuits to (0.0, True),
    the continuous limit.  Raises SingularDenominatorError when the
    denominator 1 + 2 N(omega_L + Omega') + 3 (1 - Delta~^2) Re Upsilon
    is smaller than 1e-12 in modulus.
    """
    dt = drive.delta_tilde
    m1 = spectral_m_abs(bath, bath.omega_L + drive.omega_prime)
    n1 = spectral_n(bath, bath.omega_L + drive.omega_prime)
    magnitude = math.hypot(dt * shifts.delta_M, m1)
    if magnitude == 0.0:
        return 0.0, True
    ups_re = upsilon(bath, drive).real
    denominator = 1.0 + 2.0 * n1 + 3.0 * (1.0 - dt * dt) * ups_re
    if abs(denominator) < 1e-12:
        raise SingularDenominatorError(
            f"angular-condition denominator is {denominator:.3g}; "
            f"the reduction is singular at these parameters"
        )
    theta = angular_theta(bath, drive, shifts)
    lhs = magnitude * math.sin(theta - bath.phi) / denominator
    return float(lhs), bool(lhs <= 0.25)


def tan_theta_asymptotic(bath: SqueezedVacuumParams, drive: DriveParams) -> float:
    """Closed form tan(theta) = (gamma^2 - epsilon^2) / (2 Delta gamma).

    Valid in the asymptotic-shift regime; identical to
    mu lam / ((mu + lam) Omega' Delta~) through mu lam = gamma^2 -
    epsilon^2, mu + lam = 2 gamma and Omega' Delta~ = Delta.  Raises on
    Delta = 0 where the angle sits at pi/2 and the tangent diverges.
    """
    if drive.Delta == 0.0:
        raise SingularDenominatorError("tan(theta) diverges at Delta = 0 (theta = pi/2)")
    return (bath.gamma**2 - bath.epsilon**2) / (2.0 * drive.Delta * bath.gamma)


def sufficient_condition_margin(
    bath: SqueezedVacuumParams, drive: DriveParams
) -> float:
    """Signed residual Delta tan(pi Delta/Omega) - (gamma^2 - epsilon^2)/(2 gamma).

    Nonnegative values mean the phase-locked sufficient condition holds
    (Zeno dominance); the margin tends to zero from above as epsilon
    approaches gamma at small Delta / Omega and to -gamma/2 for an
    unsqueezed bath at vanishing detuning.
    """
    if not drive.Omega > 0.0:
        raise InvalidParamsError(
            f"Omega must be > 0 for the phase profile, got {drive.Omega}"
        )
    x = math.pi * drive.Delta / drive.Omega
    # distance from the nearest odd multiple of pi/2, where tan blows up
    residue = math.remainder(x - 0.5 * math.pi, math.pi)
    if abs(residue) < 1e-9:
        raise TangentSingularityError(
            f"pi Delta / Omega = {x:.12g} is within 1e-9 of a tangent pole"
        )
    return drive.Delta * math.tan(x) - (bath.gamma**2 - bath.epsilon**2) / (
        2.0 * bath.gamma
    )


@dataclass(frozen=True)
class RegimeVerdict:
    """Single-point classification summary.

    ratio is tau_zeno / tau_dec in the selected mode; both condition
    booleans are always present.  theta and angular_lhs document the
    angular reduction; sufficient_margin the phase-locked criterion.
    """

    ratio: float
    condition_paper: bool
    condition_derived: bool
    angular_lhs: float
    theta: float
    sufficient_margin: float


def evaluate_regime(
    bath: SqueezedVacuumParams,
    drive: DriveParams,
    n: int,
    *,
    mode: str = "derived",
    shifts: SqueezingShifts | None = None,
) -> RegimeVerdict:
    """Full verdict at one parameter point.

    Shifts default to the asymptotic preset.  Raises
    UnphysicalCoefficientsError where the effective description breaks
    down and TangentSingularityError on tangent poles of the margin.
    """
    _check_mode(mode)
    if shifts is None:
        shifts = SqueezingShifts.asymptotic(bath, drive)
    coeffs = effective_coefficients(bath, drive, shifts)
    lhs, _holds = angular_condition(bath, drive, shifts)
    return RegimeVerdict(
        ratio=timescale_ratio(coeffs, bath.omega_L, n, mode),
        condition_paper=sustainable_condition(coeffs, "paper"),
        condition_derived=sustainable_condition(coeffs, "derived"),
        angular_lhs=lhs,
        theta=angular_theta(bath, drive, shifts),
        sufficient_margin=sufficient_condition_margin(bath, drive),
    )


SWEEP_COLUMNS = (
    "gamma",
    "epsilon",
    "Delta",
    "Omega",
    "phi",
    "omega_L",
    "n",
    "Gamma_dec",
    "Gamma_pop",
    "tau_dec",
    "tau_zeno",
    "ratio_derived",
    "ratio_paper",
    "cond_derived",
    "cond_paper",
    "angular_lhs",
    "sufficient_margin",
    "status",
)


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a regime sweep, in the fixed column order."""

    gamma: float
    epsilon: float
    Delta: float
    Omega: float
    phi: float
    omega_L: float
    n: int
    Gamma_dec: float
    Gamma_pop: float
    tau_dec: float
    tau_zeno: float
    ratio_derived: float
    ratio_paper: float
    cond_derived: bool | None
    cond_paper: bool | None
    angular_lhs: float
    sufficient_margin: float
    status: str

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in SWEEP_COLUMNS)


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian parameter grid over (gamma, epsilon, Delta, Omega, phi, omega_L, n).

    Points enumerate in row-major order with n varying fastest; the
    ordering is part of the output contract (sweeps are reproducible
    byte for byte).
    """

    gamma: tuple[float, ...]
    epsilon: tuple[float, ...]
    Delta: tuple[float, ...]
    Omega: tuple[float, ...]
    phi: tuple[float, ...]
    omega_L: tuple[float, ...]
    n: tuple[int, ...]

    def __post_init__(self) -> None:
        for name in ("gamma", "epsilon", "Delta", "Omega", "phi", "omega_L"):
            raw = getattr(self, name)
            values = tuple(float(v) for v in np.atleast_1d(raw))
            if not values:
                raise EmptyGridError(f"grid axis {name!r} is empty")
            if not all(math.isfinite(v) for v in values):
                raise InvalidParamsError(f"grid axis {name!r} has non-finite entries")
            object.__setattr__(self, name, values)
        n_values = tuple(getattr(self, "n")) if np.ndim(self.n) else (self.n,)
        if not n_values:
            raise EmptyGridError("grid axis 'n' is empty")
        cleaned = []
        for v in n_values:
            if int(v) != v or int(v) < 1:
                raise InvalidParamsError(f"n grid entries must be positive integers, got {v}")
            cleaned.append(int(v))
        object.__setattr__(self, "n", tuple(cleaned))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "SweepGrid":
        """Build a grid from a config mapping; scalars become 1-point axes."""
        unknown = set(mapping) - set(SWEEP_COLUMNS[:7])
        if unknown:
            raise InvalidParamsError(f"unknown grid axes: {sorted(unknown)}")
        missing = set(SWEEP_COLUMNS[:7]) - set(mapping)
        if missing:
            raise InvalidParamsError(f"missing grid axes: {sorted(missing)}")
        axes = {}
        for name in SWEEP_COLUMNS[:7]:
            value = mapping[name]
            axes[name] = tuple(np.atleast_1d(value).tolist())
        return cls(**axes)

    @property
    def size(self) -> int:
        return (
            len(self.gamma) * len(self.epsilon) * len(self.Delta) * len(self.Omega)
            * len(self.phi) * len(self.omega_L) * len(self.n)
        )

    def points(self) -> Iterator[tuple]:
        return itertools.product(
            self.gamma, self.epsilon, self.Delta, self.Omega,
            self.phi, self.omega_L, self.n,
        )


def _sweep_point(point: tuple, mode: str) -> SweepRow:
    gamma, epsilon, Delta, Omega, phi, omega_L, n = point
    nan = math.nan
    try:
        bath = SqueezedVacuumParams(gamma, epsilon, phi, omega_L)
        drive = DriveParams(Omega, Delta)
        shifts = SqueezingShifts.asymptotic(bath, drive)
        coeffs = effective_coefficients(bath, drive, shifts)
    except (InvalidParamsError, UnphysicalCoefficientsError) as exc:
        return SweepRow(
            gamma, epsilon, Delta, Omega, phi, omega_L, n,
            nan, nan, nan, nan, nan, nan, None, None, nan, nan,
            status=f"skipped: {exc}",
        )

    g_dec = quadrature_decay_rate(coeffs)
    if g_dec <= 0.0:
        # |M~| above the positivity bound turns the slow quadrature into
        # a growing mode; there is no decay time to compare
        return SweepRow(
            gamma, epsilon, Delta, Omega, phi, omega_L, n,
            nan, nan, nan, nan, nan, nan, None, None, nan, nan,
            status=f"skipped: nonpositive quadrature decay rate ({g_dec:.6g})",
        )

    notes = []
    try:
        lhs, _ = angular_condition(bath, drive, shifts)
    except SingularDenominatorError as exc:
        lhs = nan
        notes.append(f"angular: {exc}")
    try:
        margin = sufficient_condition_margin(bath, drive)
    except (TangentSingularityError, InvalidParamsError) as exc:
        margin = nan
        notes.append(f"margin: {exc}")

    return SweepRow(
        gamma, epsilon, Delta, Omega, phi, omega_L, n,
        Gamma_dec=g_dec,
        Gamma_pop=population_decay_rate(coeffs),
        tau_dec=decoherence_time(coeffs, omega_L, n),
        tau_zeno=zeno_time(coeffs, omega_L, n),
        ratio_derived=timescale_ratio(coeffs, omega_L, n, "derived"),
        ratio_paper=timescale_ratio(coeffs, omega_L, n, "paper"),
        cond_derived=sustainable_condition(coeffs, "derived"),
        cond_paper=sustainable_condition(coeffs, "paper"),
        angular_lhs=lhs,
        sufficient_margin=margin,
        status="ok" if not notes else "partial: " + "; ".join(notes),
    )


def regime_sweep(
    grid: SweepGrid, mode: str = "derived", threads: int = 1
) -> list[SweepRow]:
    """Classify every grid point; rows come back in grid order.

    Points are independent, so evaluation parallelizes over a thread
    pool of the requested width; the assembly preserves the enumeration
    order regardless of thread count, keeping output deterministic.
    Invalid points are emitted as skipped rows rather than aborting the
    sweep.
    """
    _check_mode(mode)
    if grid.size == 0:
        raise EmptyGridError("sweep grid has no points")
    if threads < 1:
        raise InvalidParamsError(f"threads must be >= 1, got {threads}")
    if threads == 1:
        return [_sweep_point(p, mode) for p in grid.points()]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: _sweep_point(p, mode), grid.points()))
