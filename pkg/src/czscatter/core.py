"""Stationary scattering on a mirrored line with two switchable delta barriers.

A monochromatic wave comes in from the left on a half-line terminated by a
perfect mirror at ``x3``.  Two scattering centers sit at ``x1 = 0`` and ``x2``;
each presents a delta barrier only when the corresponding control spin is in
state 0, so the four spin configurations see four different potentials and
pick up four different reflection phases.  Everything is unit-modulus
reflection: the mirror returns all flux.

Units: hbar = 1 throughout; lengths and wavevectors are reciprocal pairs.
The convenient working scale is k0 = 1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from czscatter._backend import kernels
from czscatter.errors import DegeneratePhaseError, PoleError, SolveError

__all__ = [
    "DEFAULT_GAMMA",
    "SpinConfig",
    "CONFIG_ORDER",
    "Geometry",
    "Massive",
    "Photonic",
    "CouplingModel",
    "ScatteringSolution",
    "ReflectionGate",
    "OpenLineResult",
    "effective_potential",
    "solve_stationary_state",
    "stationary_amplitudes",
    "reflection_amplitude_closed_form",
    "reflection_gate",
    "open_line_scattering",
    "open_line_operators",
    "wavefunction_eval",
]

# numeric stand-in for the strong-coupling limit
DEFAULT_GAMMA = 1.0e3


@dataclass(frozen=True)
class SpinConfig:
    """Joint state (alpha1, alpha2) of the two control spins.

    A center couples (presents a barrier) exactly when its spin is 0.
    """

    alpha1: int
    alpha2: int

    def __post_init__(self) -> None:
        for name in ("alpha1", "alpha2"):
            v = getattr(self, name)
            if v not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1, got {v!r}")

    @property
    def index(self) -> int:
        """Position in the computational-basis order 00, 01, 10, 11."""
        return 2 * self.alpha1 + self.alpha2

    @property
    def deltas(self) -> tuple[float, float]:
        """(delta_{alpha1,0}, delta_{alpha2,0}): which barriers are switched on."""
        return (1.0 if self.alpha1 == 0 else 0.0, 1.0 if self.alpha2 == 0 else 0.0)

    def __str__(self) -> str:
        return f"{self.alpha1}{self.alpha2}"


CONFIG_ORDER: tuple[SpinConfig, ...] = (
    SpinConfig(0, 0),
    SpinConfig(0, 1),
    SpinConfig(1, 0),
    SpinConfig(1, 1),
)


@dataclass(frozen=True)
class Geometry:
    """Positions of the second center and the mirror; the first center is x1 = 0."""

    x2: float
    x3: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x2) and math.isfinite(self.x3)):
            raise ValueError("geometry positions must be finite")
        if not 0.0 < self.x2 < self.x3:
            raise ValueError(
                f"need 0 < x2 < x3, got x2={self.x2!r}, x3={self.x3!r}"
            )

    @property
    def gap21(self) -> float:
        """Center-to-center distance x2 - x1."""
        return self.x2

    @property
    def gap32(self) -> float:
        """Center-to-mirror distance x3 - x2."""
        return self.x3 - self.x2

    @property
    def gap31(self) -> float:
        """First-center-to-mirror distance x3 - x1."""
        return self.x3


@dataclass(frozen=True)
class Massive:
    """Massive particle with bare delta barriers of height ``barrier``."""

    m: float = 1.0
    barrier: float = DEFAULT_GAMMA

    def __post_init__(self) -> None:
        if not (math.isfinite(self.m) and self.m > 0):
            raise ValueError(f"mass must be positive and finite, got {self.m!r}")
        if not math.isfinite(self.barrier):
            raise ValueError("barrier strength must be finite")

    @classmethod
    def from_gamma(cls, gamma: float, k: float, m: float = 1.0) -> "Massive":
        """Model whose dimensionless strength at wavevector ``k`` equals ``gamma``."""
        return cls(m=m, barrier=gamma * k / m)

    def gamma(self, k):
        """Dimensionless barrier strength m*barrier/k."""
        return self.m * self.barrier / _positive_k(k)

    def jump_coefficient(self, k):
        """Coefficient g in the matching condition dPsi'|_x = g * Psi(x)."""
        _positive_k(k)
        return 2.0 * self.m * self.barrier * np.ones_like(np.asarray(k, dtype=float))

    def energy(self, k):
        return np.asarray(k, dtype=float) ** 2 / (2.0 * self.m)

    def group_velocity(self, k):
        return np.asarray(k, dtype=float) / self.m


@dataclass(frozen=True)
class Photonic:
    """Photon at group velocity ``v`` coupled to emitters detuned from ``omega0``.

    ``coupling`` is the single-transition strength J; the bright ground-state
    combination couples with J*sqrt(2).  Eliminating the excited amplitude
    turns each coupled emitter into an effective barrier whose strength
    depends on the detuning v*k - omega0 (either sign is legitimate; exactly
    zero is a pole).
    """

    v: float
    omega0: float
    coupling: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v) and self.v > 0):
            raise ValueError(f"group velocity must be positive, got {self.v!r}")
        if not (math.isfinite(self.omega0) and math.isfinite(self.coupling)):
            raise ValueError("omega0 and coupling must be finite")

    @property
    def coupling_bright(self) -> float:
        """Coupling of the bright combination: sqrt(2) * J."""
        return math.sqrt(2.0) * self.coupling

    def detuning(self, k):
        """v*k - omega0, guarding the pole where the barrier mapping diverges."""
        det = self.v * _positive_k(k) - self.omega0
        if np.any(np.asarray(det) == 0.0):
            raise PoleError(
                "v*k equals omega0: the effective barrier diverges; choose k from "
                "a target strength, e.g. with photonic.detuning_for_gamma"
            )
        return det

    def effective_barrier(self, k):
        """Barrier height of the emitter after eliminating its excited state."""
        return self.coupling_bright**2 / self.detuning(k)

    def effective_mass(self, k):
        return _positive_k(k) / self.v

    def gamma(self, k):
        return self.coupling_bright**2 / (self.v * self.detuning(k))

    def jump_coefficient(self, k):
        return 2.0 * self.effective_mass(k) * self.effective_barrier(k)

    def energy(self, k):
        return self.v * np.asarray(k, dtype=float)

    def group_velocity(self, k):
        return self.v * np.ones_like(np.asarray(k, dtype=float))


CouplingModel = Union[Massive, Photonic]


def _positive_k(k):
    arr = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"wavevector must be positive and finite, got {k!r}")
    return arr


@dataclass(frozen=True)
class ScatteringSolution:
    """Amplitudes of one stationary state.

    ``r`` multiplies e^{-ikx} left of the first center (incident coefficient
    is 1); (a1, b1) and (a2, b2) are the e^{+-ikx} coefficients between the
    centers and between the second center and the mirror.  ``residual`` is the
    componentwise relative violation of the matching conditions (scale-free;
    machine-level for a sound solve).  The excited-emitter amplitudes eps1,
    eps2 are populated only by the photonic solver.
    """

    config: SpinConfig
    k: float
    r: complex
    a1: complex
    b1: complex
    a2: complex
    b2: complex
    residual: float
    eps1: complex | None = None
    eps2: complex | None = None

    @property
    def amps(self) -> np.ndarray:
        return np.array([self.r, self.a1, self.b1, self.a2, self.b2], dtype=complex)


@dataclass(frozen=True)
class ReflectionGate:
    """Diagonal reflection operator on the two control spins at one wavevector."""

    entries: np.ndarray
    k: float
    residuals: np.ndarray | None = field(default=None, compare=False)

    def matrix(self) -> np.ndarray:
        return np.diag(self.entries.astype(complex))

    def phase_stripped(self) -> np.ndarray:
        """Entries with the (0,0) global phase removed (moduli untouched)."""
        e0 = self.entries[0]
        if e0 == 0:
            raise DegeneratePhaseError("cannot strip phase: r_00 vanished")
        return self.entries * np.conj(e0 / abs(e0))

    @property
    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(np.abs(self.entries) - 1.0)))


@dataclass(frozen=True)
class OpenLineResult:
    """Reflection/transmission pairs for all spin configurations, no mirror."""

    r: np.ndarray
    t: np.ndarray
    k: float

    def reflection_matrix(self) -> np.ndarray:
        return np.diag(self.r.astype(complex))

    def transmission_matrix(self) -> np.ndarray:
        return np.diag(self.t.astype(complex))

    @property
    def completeness_defect(self) -> float:
        """max | |r|^2 + |t|^2 - 1 | over configurations."""
        return float(np.max(np.abs(np.abs(self.r) ** 2 + np.abs(self.t) ** 2 - 1.0)))


def effective_potential(
    config: SpinConfig,
    model: CouplingModel,
    geometry: Geometry,
    k: float | None = None,
) -> tuple[tuple[float, float], ...]:
    """Positions and barrier heights seen by this spin configuration.

    For a photonic model the height is detuning-dependent, so ``k`` is
    required there.
    """
    d1, d2 = config.deltas
    if isinstance(model, Photonic):
        if k is None:
            raise ValueError("photonic effective barriers depend on k; pass k")
        height = float(model.effective_barrier(k))
    else:
        height = model.barrier
    return ((0.0, height * d1), (geometry.x2, height * d2))


def stationary_amplitudes(
    config: SpinConfig,
    model: CouplingModel,
    geometry: Geometry,
    k,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched mirrored-line solve over an array of wavevectors.

    Returns (amps, residuals) with amps[:, j] = (r, a1, b1, a2, b2)[j].
    """
    karr = np.atleast_1d(_positive_k(k))
    d1, d2 = config.deltas
    g = np.asarray(model.jump_coefficient(karr), dtype=float)
    g = np.broadcast_to(g, karr.shape)
    n = karr.shape[0]
    g1 = np.ascontiguousarray(g * d1)
    g2 = np.ascontiguousarray(g * d2)
    x2 = np.full(n, geometry.x2)
    x3 = np.full(n, geometry.x3)
    amps, res = kernels.solve_mirrored(g1, g2, x2, x3, np.ascontiguousarray(karr))
    if not np.all(np.isfinite(res)):
        raise SolveError("mirrored-line boundary-condition solve hit a singular system")
    return amps, res


def solve_stationary_state(
    config: SpinConfig,
    model: CouplingModel,
    geometry: Geometry,
    k: float,
) -> ScatteringSolution:
    """Solve the five matching conditions for one configuration and wavevector."""
    amps, res = stationary_amplitudes(config, model, geometry, k)
    r, a1, b1, a2, b2 = (complex(z) for z in amps[0])
    return ScatteringSolution(
        config=config, k=float(k), r=r, a1=a1, b1=b1, a2=a2, b2=b2,
        residual=float(res[0]),
    )


def reflection_amplitude_closed_form(
    config: SpinConfig,
    gamma: float,
    geometry: Geometry,
    k: float,
    convention: str = "bc",
) -> complex:
    """Closed-form reflection amplitude; exactly unit modulus by construction.

    ``convention="bc"`` (default) matches the boundary-condition solver, whose
    ``r`` multiplies e^{-ikx} and reduces to the textbook -i*gamma/(1+i*gamma)
    for a single barrier on the open line.  ``convention="printed"`` evaluates
    the same expression with the opposite wavevector sign convention (the form
    in which it is usually quoted); the two are related by k -> -k and agree
    on all physical relative phases at the working geometry.
    """
    if convention not in ("bc", "printed"):
        raise ValueError(f"convention must be 'bc' or 'printed', got {convention!r}")
    kk = float(_positive_k(k))
    if convention == "bc":
        kk = -kk
    d1, d2 = config.deltas
    x21, x32, x31 = geometry.gap21, geometry.gap32, geometry.gap31
    bracket = (
        cmath.exp(-1j * kk * x31)
        - 2.0 * gamma * d2
        * (math.cos(kk * x21) - (1j + 2.0 * gamma * d1) * math.sin(kk * x21))
        * math.sin(kk * x32)
        - 2.0 * gamma * d1 * math.sin(kk * x31)
    )
    if bracket == 0:
        raise DegeneratePhaseError(
            "reflection phase undefined: closed-form bracket is exactly zero"
        )
    return -cmath.exp(2j * cmath.phase(bracket))


def reflection_gate(model: CouplingModel, geometry: Geometry, k: float) -> ReflectionGate:
    """Reflection amplitudes for all four spin configurations at one wavevector."""
    kk = float(_positive_k(k))
    g = float(np.asarray(model.jump_coefficient(kk)).reshape(()))
    d = np.array([c.deltas for c in CONFIG_ORDER])
    n = len(CONFIG_ORDER)
    amps, res = kernels.solve_mirrored(
        np.ascontiguousarray(g * d[:, 0]),
        np.ascontiguousarray(g * d[:, 1]),
        np.full(n, geometry.x2),
        np.full(n, geometry.x3),
        np.full(n, kk),
    )
    if not np.all(np.isfinite(res)):
        raise SolveError("mirrored-line boundary-condition solve hit a singular system")
    return ReflectionGate(entries=amps[:, 0].copy(), k=kk, residuals=res)


def open_line_scattering(
    config: SpinConfig,
    model: CouplingModel,
    x2: float,
    k: float,
) -> tuple[complex, complex]:
    """(r, t) for one configuration on the open line (mirror removed)."""
    if not (math.isfinite(x2) and x2 > 0):
        raise ValueError(f"need x2 > 0, got {x2!r}")
    kk = float(_positive_k(k))
    d1, d2 = config.deltas
    g = float(np.asarray(model.jump_coefficient(kk)).reshape(()))
    amps, res = kernels.solve_open(
        np.array([g * d1]), np.array([g * d2]), np.array([float(x2)]), np.array([kk])
    )
    if not np.all(np.isfinite(res)):
        raise SolveError("open-line boundary-condition solve hit a singular system")
    return complex(amps[0, 0]), complex(amps[0, 3])


def open_line_operators(model: CouplingModel, x2: float, k: float) -> OpenLineResult:
    """Diagonal reflection and transmission operators on the open line."""
    pairs = [open_line_scattering(c, model, x2, k) for c in CONFIG_ORDER]
    return OpenLineResult(
        r=np.array([p[0] for p in pairs]),
        t=np.array([p[1] for p in pairs]),
        k=float(k),
    )


def wavefunction_eval(solution: ScatteringSolution, geometry: Geometry, x):
    """Piecewise stationary wavefunction (prefactor-free) at points ``x``.

    Points beyond the mirror are outside the physical domain and rejected.
    """
    xarr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xarr > geometry.x3):
        raise ValueError(f"x beyond the mirror at x3={geometry.x3}: no physical domain there")
    psi = kernels.eval_psi(
        np.array([solution.k]),
        np.ascontiguousarray(solution.amps.reshape(1, 5)),
        geometry.x2,
        geometry.x3,
        np.ascontiguousarray(xarr),
    )[0]
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return complex(psi[0])
    return psi
