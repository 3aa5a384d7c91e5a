"""Waveguide photon scattering from two Lambda emitters, solved independently.

Each emitter has a ground doublet {|g0>, |g1>} and one excited level; both
ground states couple to the field with the same rate J, so only the symmetric
(bright) combination couples, with strength Jt = sqrt(2)*J, while the
antisymmetric (dark) combination is invisible to the photon.  Encoding the
qubit in the bright/dark basis reproduces the switchable barriers of the
massive setup: a dark emitter is transparent, a bright one scatters.

The solver here works in the single-excitation sector and keeps the two
counter-propagating field branches and both excited-emitter amplitudes as
explicit unknowns (a 7x7 linear system) instead of eliminating the emitters
into effective delta barriers.  Agreement with the massive-particle solver at
m = k/v, Gamma = Jt^2/(v*k - omega0) is therefore a two-route consistency
check, not a restatement of the same equations.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from czscatter.core import (
    CONFIG_ORDER,
    Geometry,
    Massive,
    Photonic,
    ScatteringSolution,
    SpinConfig,
    solve_stationary_state,
)
from czscatter.errors import PoleError, SolveError

__all__ = [
    "EQUIVALENCE_TOL",
    "LambdaAtomParams",
    "GroundDoubletState",
    "bright_dark_transform",
    "bright_dark_inverse",
    "EffectiveCoupling",
    "effective_coupling",
    "detuning_for_gamma",
    "wavevector_for_gamma",
    "photonic_stationary_state",
    "verify_equivalence",
    "EquivalenceReport",
]

# the two solver routes must agree on every reflection amplitude to this level
EQUIVALENCE_TOL = 1.0e-8

_NORM_TOL = 1.0e-12
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class LambdaAtomParams:
    """Emitter and waveguide parameters shared by both scattering centers.

    ``coupling`` is the single-transition rate J; the bright combination
    couples with Jt = sqrt(2)*J.  ``omega0`` is the excited-level gap above
    the (degenerate) ground doublet.
    """

    v: float
    omega0: float
    coupling: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v) and self.v > 0):
            raise ValueError(f"group velocity must be positive, got {self.v!r}")
        if not (math.isfinite(self.omega0) and self.omega0 >= 0):
            raise ValueError(f"omega0 must be non-negative, got {self.omega0!r}")
        if not (math.isfinite(self.coupling) and self.coupling >= 0):
            raise ValueError(f"coupling must be non-negative, got {self.coupling!r}")

    @property
    def coupling_bright(self) -> float:
        """Rate Jt = sqrt(2)*J of the bright ground-state combination."""
        return _SQRT2 * self.coupling

    def to_model(self) -> Photonic:
        """The same parameters as a coupling model for the mirrored-line solver."""
        return Photonic(v=self.v, omega0=self.omega0, coupling=self.coupling)


@dataclass(frozen=True)
class GroundDoubletState:
    """Normalized emitter state over the bare ground doublet {|g0>, |g1>}."""

    g0: complex
    g1: complex

    def __post_init__(self) -> None:
        norm = math.sqrt(abs(self.g0) ** 2 + abs(self.g1) ** 2)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"doublet state must have unit norm, got {norm!r}")

    @classmethod
    def bright(cls) -> "GroundDoubletState":
        return cls(1.0 / _SQRT2, 1.0 / _SQRT2)

    @classmethod
    def dark(cls) -> "GroundDoubletState":
        return cls(1.0 / _SQRT2, -1.0 / _SQRT2)


def bright_dark_transform(state: GroundDoubletState) -> tuple[complex, complex]:
    """Amplitudes (c_plus, c_minus) on the bright/dark combinations (g0 +- g1)/sqrt(2)."""
    return (
        (complex(state.g0) + complex(state.g1)) / _SQRT2,
        (complex(state.g0) - complex(state.g1)) / _SQRT2,
    )


def bright_dark_inverse(c_plus: complex, c_minus: complex) -> GroundDoubletState:
    """Reassemble the bare-doublet state from bright/dark amplitudes."""
    return GroundDoubletState(
        g0=(complex(c_plus) + complex(c_minus)) / _SQRT2,
        g1=(complex(c_plus) - complex(c_minus)) / _SQRT2,
    )


@dataclass(frozen=True)
class EffectiveCoupling:
    """Delta-barrier parameters a bright emitter presents at one wavevector."""

    barrier: float
    mass: float
    gamma: float

    def massive(self) -> Massive:
        """The equivalent massive-particle coupling model."""
        return Massive(m=self.mass, barrier=self.barrier)


def effective_coupling(params: LambdaAtomParams, k: float) -> EffectiveCoupling:
    """Map the emitter at wavevector ``k`` onto an effective barrier.

    Eliminating the excited amplitude turns a bright emitter into a delta
    barrier of height Gamma_eff = Jt^2/(v*k - omega0) seen by a particle of
    effective mass m_eff = k/v, hence dimensionless strength
    gamma_eff = Jt^2/(v*(v*k - omega0)).
    """
    model = params.to_model()
    det = float(model.detuning(k))
    jt = params.coupling_bright
    return EffectiveCoupling(
        barrier=jt**2 / det,
        mass=float(k) / params.v,
        gamma=jt**2 / (params.v * det),
    )


def detuning_for_gamma(params: LambdaAtomParams, gamma: float) -> float:
    """Detuning v*k - omega0 at which the dimensionless strength equals ``gamma``.

    The strength depends on k only through the detuning, so this is exact at
    whatever wavevector realizes it.  Either sign of ``gamma`` is allowed;
    zero is not reachable at finite detuning.
    """
    if not (math.isfinite(gamma) and gamma != 0.0):
        raise ValueError(f"target gamma must be finite and nonzero, got {gamma!r}")
    if params.coupling == 0.0:
        raise ValueError("decoupled emitter (J = 0) has gamma = 0 at every detuning")
    return params.coupling_bright**2 / (params.v * gamma)


def wavevector_for_gamma(params: LambdaAtomParams, gamma: float) -> float:
    """Wavevector at which the dimensionless strength equals ``gamma``."""
    k = (params.omega0 + detuning_for_gamma(params, gamma)) / params.v
    if k <= 0.0:
        raise ValueError(
            f"gamma={gamma!r} would need non-positive wavevector {k!r}; "
            "raise omega0 or weaken the coupling"
        )
    return k


def _relative_residual(a: np.ndarray, u: np.ndarray, b: np.ndarray) -> float:
    """Componentwise relative backward error of the solve a @ u = b."""
    num = np.abs(a @ u - b)
    den = np.abs(a) @ np.abs(u) + np.abs(b)
    good = den > 0.0
    if np.any(num[~good] > 0.0):
        return math.inf
    return float(np.max(num[good] / den[good], initial=0.0))


def photonic_stationary_state(
    config: SpinConfig,
    params: LambdaAtomParams,
    geometry: Geometry,
    k: float,
) -> ScatteringSolution:
    """Solve the single-photon mirrored-line problem with explicit emitters.

    Unknowns are (r, a1, b1, a2, b2, eps1, eps2): the field branch amplitudes
    in the three regions plus the excited amplitude of each emitter.  The
    right-moving branch carries e^{+ikx} and jumps by -i(Jt/v)*eps at a bright
    emitter, the left-moving branch by +i(Jt/v)*eps, which leaves the total
    field continuous; the excited amplitudes obey
    (v*k - omega0)*eps_i = Jt*delta_i*psi(x_i).  Dark emitters drop out row by
    row, so eps_i = 0 whenever spin i is in state 1.
    """
    if not (math.isfinite(k) and k > 0):
        raise ValueError(f"wavevector must be positive and finite, got {k!r}")
    kk = float(k)
    det = float(params.to_model().detuning(kk))

    d1, d2 = config.deltas
    jt = params.coupling_bright
    c = 1j * jt / params.v
    e2p = cmath.exp(1j * kk * geometry.x2)
    e2m = cmath.exp(-1j * kk * geometry.x2)
    e3p = cmath.exp(1j * kk * geometry.x3)
    e3m = cmath.exp(-1j * kk * geometry.x3)

    a = np.zeros((7, 7), dtype=complex)
    b = np.zeros(7, dtype=complex)
    # right-moving branch jump at x1 = 0: a1 - 1 = -i(Jt/v) d1 eps1
    a[0, 1] = 1.0
    a[0, 5] = c * d1
    b[0] = 1.0
    # left-moving branch jump at x1: b1 - r = +i(Jt/v) d1 eps1
    a[1, 0] = -1.0
    a[1, 2] = 1.0
    a[1, 5] = -c * d1
    # branch jumps at x2, with the plane-wave factors at that point
    a[2, 1] = -e2p
    a[2, 3] = e2p
    a[2, 6] = c * d2
    a[3, 2] = -e2m
    a[3, 4] = e2m
    a[3, 6] = -c * d2
    # excited amplitudes: (v k - omega0) eps_i = Jt d_i psi(x_i)
    a[4, 1] = -jt * d1
    a[4, 2] = -jt * d1
    a[4, 5] = det
    a[5, 3] = -jt * d2 * e2p
    a[5, 4] = -jt * d2 * e2m
    a[5, 6] = det
    # hard wall: total field vanishes at x3
    a[6, 3] = e3p
    a[6, 4] = e3m

    try:
        u = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SolveError(f"photonic boundary-condition system is singular: {exc}") from exc

    return ScatteringSolution(
        config=config,
        k=kk,
        r=complex(u[0]),
        a1=complex(u[1]),
        b1=complex(u[2]),
        a2=complex(u[3]),
        b2=complex(u[4]),
        residual=_relative_residual(a, u, b),
        eps1=complex(u[5]),
        eps2=complex(u[6]),
    )


@dataclass(frozen=True)
class EquivalenceReport:
    """Reflection-amplitude deviation between the photonic and massive routes.

    ``deviations[i, j]`` is |r_photonic - r_massive| for configuration
    CONFIG_ORDER[i] at wavevector ``k_grid[j]``.
    """

    k_grid: np.ndarray
    deviations: np.ndarray
    threshold: float = EQUIVALENCE_TOL

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviations))

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation < self.threshold)

    @property
    def n_points(self) -> int:
        return int(self.k_grid.shape[0])

    @property
    def worst(self) -> tuple[SpinConfig, float]:
        """(configuration, wavevector) of the largest deviation."""
        i, j = np.unravel_index(int(np.argmax(self.deviations)), self.deviations.shape)
        return CONFIG_ORDER[i], float(self.k_grid[j])


def verify_equivalence(
    params: LambdaAtomParams,
    geometry: Geometry,
    k_grid,
) -> EquivalenceReport:
    """Cross-validate the photonic solver against the massive-particle solver.

    At every grid wavevector and every spin configuration, the photonic
    reflection amplitude is compared with the massive one computed from the
    effective barrier Gamma_eff(k) and effective mass k/v.  The grid must be
    non-empty and stay off the pole v*k = omega0.
    """
    grid = np.atleast_1d(np.asarray(k_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("equivalence check needs at least one grid wavevector")
    if not np.all(np.isfinite(grid)) or np.any(grid <= 0.0):
        raise ValueError("grid wavevectors must be positive and finite")

    deviations = np.zeros((len(CONFIG_ORDER), grid.size))
    for j, k in enumerate(grid):
        eff = effective_coupling(params, float(k))
        massive = eff.massive()
        for i, config in enumerate(CONFIG_ORDER):
            r_phot = photonic_stationary_state(config, params, geometry, float(k)).r
            r_mass = solve_stationary_state(config, massive, geometry, float(k)).r
            deviations[i, j] = abs(r_phot - r_mass)
    return EquivalenceReport(k_grid=grid.copy(), deviations=deviations)
