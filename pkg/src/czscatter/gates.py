"""CZ-regime construction, process matrices, and gate-fidelity analysis.

At the resonant geometry x21 = n*pi/k0, x32 = (n' + 1/2)*pi/k0 the four
reflection phases of the strong-coupling gate line up (up to a global phase)
with diag(1, 1, 1, -1): a controlled-Z on the two control spins.  Away from
k0 the same geometry gives diag(1, 1, e^{2ikx2}, e^{2ikx3}), and the process
fidelity against CZ admits a closed form in the three cosines of the problem.

Process matrices use the unnormalized two-qubit Pauli products
A_m = P_i (x) P_j with m = 4*i + j and P = (I, X, Y, Z), expanding
U = sum_m c_m A_m with c_m = Tr(A_m U)/4 and chi_mn = c_m * conj(c_n).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from czscatter.core import (
    Geometry,
    Massive,
    ReflectionGate,
    reflection_gate,
)
from czscatter.errors import ConsistencyError

__all__ = [
    "CZ_GATE",
    "PAULI_LABELS",
    "PAULI_PRODUCTS",
    "UNITARITY_TOL",
    "ROUTE_TOL",
    "NonRegimeWarning",
    "CZRegime",
    "cz_regime",
    "ideal_gate_limit",
    "ProcessMatrix",
    "pauli_chi",
    "process_fidelity",
    "fidelity_closed_form",
    "FidelityCurve",
    "fidelity_sweep",
    "fidelity_window_halfwidth",
]

# gates fed to the chi expansion must be unitary to this level
UNITARITY_TOL = 1.0e-8
# the chi-route and trace-route fidelities must agree to this level
ROUTE_TOL = 1.0e-10

CZ_GATE = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

PAULI_LABELS: tuple[str, ...] = tuple(a + b for a in "IXYZ" for b in "IXYZ")
PAULI_PRODUCTS: np.ndarray = np.stack(
    [np.kron(_PAULI_1Q[lbl[0]], _PAULI_1Q[lbl[1]]) for lbl in PAULI_LABELS]
)


class NonRegimeWarning(UserWarning):
    """Closed-form fidelity evaluated on a geometry off the resonance family."""


@dataclass(frozen=True)
class CZRegime:
    """Resonant geometry family: k0*x21 = n*pi and k0*x32 = (n' + 1/2)*pi."""

    n: int
    n_prime: int
    k0: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        if not isinstance(self.n_prime, int) or self.n_prime < 0:
            raise ValueError(f"n_prime must be an integer >= 0, got {self.n_prime!r}")
        if not (math.isfinite(self.k0) and self.k0 > 0):
            raise ValueError(f"k0 must be positive and finite, got {self.k0!r}")

    @property
    def geometry(self) -> Geometry:
        x2 = self.n * math.pi / self.k0
        return Geometry(x2=x2, x3=x2 + (2 * self.n_prime + 1) * 0.5 * math.pi / self.k0)


def cz_regime(n: int, n_prime: int, k0: float) -> CZRegime:
    """Geometry satisfying both resonance conditions at ``k0``."""
    return CZRegime(n=n, n_prime=n_prime, k0=k0)


def ideal_gate_limit(k: float, geometry: Geometry) -> ReflectionGate:
    """Strong-coupling gate diag(1, 1, e^{2ikx2}, e^{2ikx3}) at wavevector ``k``.

    This is the infinite-gamma limit of the scattering gate with its global
    phase removed: whichever center couples first acts as a hard wall, so only
    the first reflection point survives in each entry.
    """
    if not (math.isfinite(k) and k > 0):
        raise ValueError(f"wavevector must be positive and finite, got {k!r}")
    entries = np.array(
        [
            1.0,
            1.0,
            np.exp(2j * k * geometry.x2),
            np.exp(2j * k * geometry.x3),
        ],
        dtype=complex,
    )
    return ReflectionGate(entries=entries, k=float(k))


@dataclass(frozen=True)
class ProcessMatrix:
    """Rank-one process matrix chi_mn = c_m conj(c_n) of a unitary gate.

    Basis order follows PAULI_LABELS: A_{4i+j} = P_i (x) P_j, P = (I, X, Y, Z).
    """

    chi: np.ndarray
    coeffs: np.ndarray

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.chi))

    @property
    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.chi - self.chi.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        """Real spectrum (ascending); rank one means a single nonzero entry."""
        return np.linalg.eigvalsh(0.5 * (self.chi + self.chi.conj().T))

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    @property
    def rank_one_defect(self) -> float:
        """Largest |eigenvalue| besides the dominant one."""
        ev = self.eigenvalues()
        return float(np.max(np.abs(ev[:-1])))


def _as_gate_matrix(gate) -> np.ndarray:
    mat = np.asarray(gate, dtype=complex)
    if mat.shape != (4, 4):
        raise ValueError(f"gate must be a 4x4 matrix, got shape {mat.shape}")
    defect = float(np.max(np.abs(mat.conj().T @ mat - np.eye(4))))
    if defect > UNITARITY_TOL:
        raise ValueError(
            f"gate is not unitary: max |U^dag U - 1| = {defect:.3e} > {UNITARITY_TOL}"
        )
    return mat


def pauli_chi(gate) -> ProcessMatrix:
    """Expand a two-qubit unitary in the Pauli product basis.

    The products are Hermitian, so c_m = Tr(A_m U)/4 and the process matrix
    is the rank-one outer product of the coefficient vector.
    """
    mat = _as_gate_matrix(gate)
    coeffs = np.einsum("mij,ji->m", PAULI_PRODUCTS, mat) / 4.0
    return ProcessMatrix(chi=np.outer(coeffs, coeffs.conj()), coeffs=coeffs)


def process_fidelity(gate, reference) -> float:
    """Process fidelity Tr(chi_ref chi_gate) between two unitaries.

    Computed twice, once through the 16x16 process matrices and once as
    |Tr(reference^dag gate)|^2 / 16; the routes must agree to ROUTE_TOL.
    Phase-invariant, so raw solver gates can be passed without stripping.
    """
    gate_mat = _as_gate_matrix(gate)
    ref_mat = _as_gate_matrix(reference)
    chi_gate = pauli_chi(gate_mat)
    chi_ref = pauli_chi(ref_mat)
    f_chi = float(np.real(np.trace(chi_ref.chi @ chi_gate.chi)))
    f_trace = float(abs(np.trace(ref_mat.conj().T @ gate_mat)) ** 2 / 16.0)
    if abs(f_chi - f_trace) > ROUTE_TOL:
        raise ConsistencyError(
            f"process-fidelity routes disagree: chi route {f_chi!r} vs "
            f"trace route {f_trace!r}"
        )
    return f_chi


def _is_regime_geometry(geometry: Geometry, rtol: float = 1.0e-9) -> bool:
    # resonance family iff x21/x32 = n/(n' + 1/2), i.e. an even/odd rational
    q = geometry.gap21 / geometry.gap32
    frac = Fraction(q).limit_denominator(1_000_000)
    if frac.numerator % 2 != 0 or frac.denominator % 2 != 1:
        return False
    return abs(q - float(frac)) <= rtol * q


def fidelity_closed_form(k: float, geometry: Geometry) -> float:
    """Fidelity of the strong-coupling gate at ``k`` against the resonant CZ.

    F = [3 + 2cos(2k x2) - cos(2k x32) - 2cos(2k x3)] / 8, which is
    |Tr(U0^dag U)|^2/16 for U = diag(1, 1, e^{2ikx2}, e^{2ikx3}).  The CZ
    reference is only physically realized when the geometry belongs to the
    resonance family; other geometries evaluate fine but are flagged.
    """
    if not math.isfinite(k):
        raise ValueError(f"wavevector must be finite, got {k!r}")
    if not _is_regime_geometry(geometry):
        warnings.warn(
            "geometry is not on the resonance family x21/x32 = n/(n'+1/2); "
            "the formula remains the overlap with diag(1,1,1,-1) but that "
            "reference gate is not produced at any k0 of this geometry",
            NonRegimeWarning,
            stacklevel=2,
        )
    return (
        3.0
        + 2.0 * math.cos(2.0 * k * geometry.x2)
        - math.cos(2.0 * k * geometry.gap32)
        - 2.0 * math.cos(2.0 * k * geometry.x3)
    ) / 8.0


@dataclass(frozen=True)
class FidelityCurve:
    """Sampled gate fidelity against CZ along k/k0.

    ``gamma`` is None for the ideal strong-coupling gate; otherwise the curve
    comes from the finite-strength solver with the barrier fixed so that the
    dimensionless strength equals ``gamma`` at k0.
    """

    k_over_k0: np.ndarray
    fidelity: np.ndarray
    regime: CZRegime
    gamma: float | None

    def __post_init__(self) -> None:
        if self.k_over_k0.shape != self.fidelity.shape or self.k_over_k0.ndim != 1:
            raise ValueError("k_over_k0 and fidelity must be matching 1-d arrays")
        if np.any(self.fidelity < -1.0e-12) or np.any(self.fidelity > 1.0 + 1.0e-12):
            raise ValueError("fidelity samples left [0, 1]")

    @property
    def samples(self) -> int:
        return int(self.k_over_k0.shape[0])

    def rows(self):
        """(k/k0, F) pairs in sample order."""
        return list(zip(self.k_over_k0.tolist(), self.fidelity.tolist()))

    def monotone_near_peak(self, window: float = 0.05) -> bool:
        """True if F decays monotonically moving away from k0 within the window."""
        x = self.k_over_k0
        below = np.argsort(x[(x >= 1.0 - window) & (x <= 1.0)])
        left = self.fidelity[(x >= 1.0 - window) & (x <= 1.0)][below]
        right = self.fidelity[(x >= 1.0) & (x <= 1.0 + window)]
        right = right[np.argsort(x[(x >= 1.0) & (x <= 1.0 + window)])]
        ok_left = bool(np.all(np.diff(left) >= -1.0e-12))
        ok_right = bool(np.all(np.diff(right) <= 1.0e-12))
        return ok_left and ok_right


def fidelity_sweep(
    regime: CZRegime,
    k_over_k0_range: tuple[float, float] = (0.9, 1.1),
    samples: int = 201,
    gamma: float | None = None,
) -> FidelityCurve:
    """Fidelity-vs-k/k0 curve at a resonant geometry.

    With ``gamma`` set, each point solves the matching conditions with the
    physical barrier held fixed (strength gamma at k0, hence gamma*k0/k at k);
    without it, the ideal-limit gate is used.  A degenerate range may carry a
    single sample; a real sweep needs at least two.
    """
    lo, hi = (float(k_over_k0_range[0]), float(k_over_k0_range[1]))
    if not (math.isfinite(lo) and math.isfinite(hi)) or not 0.0 < lo <= hi:
        raise ValueError(f"need 0 < lo <= hi, got ({lo!r}, {hi!r})")
    if samples < 2 and not (samples == 1 and lo == hi):
        raise ValueError("a sweep needs samples >= 2 (or 1 on a degenerate range)")
    ratios = np.linspace(lo, hi, samples)
    geometry = regime.geometry
    model = None if gamma is None else Massive.from_gamma(gamma, regime.k0)
    fid = np.empty(samples)
    for i, ratio in enumerate(ratios):
        k = ratio * regime.k0
        if model is None:
            mat = ideal_gate_limit(k, geometry).matrix()
        else:
            mat = reflection_gate(model, geometry, k).matrix()
        fid[i] = process_fidelity(mat, CZ_GATE)
    return FidelityCurve(k_over_k0=ratios, fidelity=fid, regime=regime, gamma=gamma)


def fidelity_window_halfwidth(
    regime: CZRegime,
    level: float = 0.95,
    max_halfwidth: float = 0.5,
    tol: float = 1.0e-10,
) -> float:
    """Largest w with closed-form F >= level on both of k0*(1 -+ w).

    Bisects on the smaller of the two one-sided fidelities, which decays
    monotonically near the peak; the result is the symmetric half-width of
    the F >= level window around k/k0 = 1.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie strictly between 0 and 1, got {level!r}")
    geometry = regime.geometry

    def short_side(w: float) -> float:
        return min(
            fidelity_closed_form(regime.k0 * (1.0 - w), geometry),
            fidelity_closed_form(regime.k0 * (1.0 + w), geometry),
        )

    if short_side(max_halfwidth) >= level:
        return max_halfwidth
    lo, hi = 0.0, max_halfwidth
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if short_side(mid) >= level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
