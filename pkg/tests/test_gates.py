"""Gate analysis: regime geometry, process matrices, fidelity routes."""
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from czscatter import (
    CZ_GATE,
    CZRegime,
    Geometry,
    Massive,
    NonRegimeWarning,
    PAULI_LABELS,
    cz_regime,
    fidelity_closed_form,
    fidelity_sweep,
    fidelity_window_halfwidth,
    ideal_gate_limit,
    pauli_chi,
    process_fidelity,
    reflection_gate,
)

REGIME = cz_regime(1, 0, 1.0)


# -- regime geometry ---------------------------------------------------------


def test_regime_geometry_values():
    geo = REGIME.geometry
    assert geo.x2 == pytest.approx(math.pi)
    assert geo.x3 == pytest.approx(1.5 * math.pi)
    higher = cz_regime(3, 2, 2.0)
    assert higher.geometry.x2 == pytest.approx(3 * math.pi / 2.0)
    assert higher.geometry.gap32 == pytest.approx(2.5 * math.pi / 2.0)


@pytest.mark.parametrize("n,np_,k0", [(0, 0, 1.0), (1, -1, 1.0), (1, 0, 0.0), (1, 0, -2.0)])
def test_regime_validation(n, np_, k0):
    with pytest.raises(ValueError):
        cz_regime(n, np_, k0)


def test_regime_requires_integers():
    with pytest.raises(ValueError):
        cz_regime(1.5, 0, 1.0)  # type: ignore[arg-type]


# -- ideal gate and CZ ----------------------------------------------------------


def test_ideal_gate_at_regime_is_cz():
    gate = ideal_gate_limit(REGIME.k0, REGIME.geometry)
    stripped = np.array(gate.phase_stripped())
    assert np.allclose(stripped, [1, 1, 1, -1], atol=1e-12)


def test_ideal_gate_matches_strong_coupling_solver():
    k = 1.03
    ideal = np.array(ideal_gate_limit(k, REGIME.geometry).phase_stripped())
    strong = np.array(
        reflection_gate(Massive.from_gamma(1e7, k), REGIME.geometry, k).phase_stripped()
    )
    assert np.max(np.abs(ideal - strong)) < 1e-5


def test_stripped_deviation_shrinks_with_gamma():
    devs = []
    for gamma in (1e2, 1e3, 1e4):
        gate = reflection_gate(Massive.from_gamma(gamma, 1.0), REGIME.geometry, 1.0)
        stripped = np.array(gate.phase_stripped())
        devs.append(np.max(np.abs(stripped - np.array([1, 1, 1, -1]))))
    assert devs[0] < 1e-2
    assert devs[0] > devs[1] > devs[2]
    # empirical rate ~ 1/gamma
    assert devs[1] == pytest.approx(devs[0] / 10.0, rel=0.05)


# -- process matrix ---------------------------------------------------------------


def test_cz_pauli_coefficients():
    pm = pauli_chi(CZ_GATE)
    coeffs = dict(zip(PAULI_LABELS, pm.coeffs))
    for label in ("II", "IZ", "ZI"):
        assert coeffs[label] == pytest.approx(0.5, abs=1e-12)
    assert coeffs["ZZ"] == pytest.approx(-0.5, abs=1e-12)
    others = [v for lbl, v in coeffs.items() if lbl not in ("II", "IZ", "ZI", "ZZ")]
    assert np.max(np.abs(others)) < 1e-12


def test_chi_is_valid_process_matrix():
    gate = ideal_gate_limit(1.07, REGIME.geometry)
    pm = pauli_chi(gate.matrix())
    assert pm.trace == pytest.approx(1.0, abs=1e-12)
    assert pm.hermiticity_defect < 1e-12
    assert pm.min_eigenvalue > -1e-12
    assert pm.rank_one_defect < 1e-12  # unitary channel
    assert pm.chi.shape == (16, 16)


def test_pauli_chi_rejects_non_unitary():
    with pytest.raises(ValueError):
        pauli_chi(np.diag([1.0, 1.0, 1.0, 0.5]))


# -- fidelity routes ----------------------------------------------------------------


def test_fidelity_peak_is_exactly_one():
    assert fidelity_closed_form(REGIME.k0, REGIME.geometry) == pytest.approx(1.0, abs=1e-14)


def test_fidelity_at_five_percent_detuning():
    f = fidelity_closed_form(1.05, REGIME.geometry)
    assert f == pytest.approx(0.959, abs=1e-3)
    assert f == pytest.approx(0.9589768026952726, abs=1e-13)  # frozen closed-form value


def test_routes_agree_on_acceptance_grid():
    ks = np.linspace(0.6, 1.4, 401)
    worst = 0.0
    for k in ks:
        f_closed = fidelity_closed_form(k, REGIME.geometry)
        f_chi = process_fidelity(ideal_gate_limit(k, REGIME.geometry).matrix(), CZ_GATE)
        worst = max(worst, abs(f_closed - f_chi))
    assert worst < 1e-12


def test_window_halfwidth_in_band():
    hw = fidelity_window_halfwidth(REGIME)
    assert 0.05 <= hw <= 0.06
    assert hw == pytest.approx(0.055291719880187884, abs=1e-9)  # frozen bisection value
    # both edges sit at the 0.95 level
    for edge in (1.0 - hw, 1.0 + hw):
        assert fidelity_closed_form(edge, REGIME.geometry) == pytest.approx(0.95, abs=1e-8)


def test_off_regime_geometry_warns():
    geo = Geometry(x2=1.0, x3=2.0)
    with pytest.warns(NonRegimeWarning):
        fidelity_closed_form(1.0, geo)


def test_on_regime_family_is_quiet():
    geo = cz_regime(3, 2, 2.3).geometry
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fidelity_closed_form(2.3, geo)


# -- sweeps ---------------------------------------------------------------------------


def test_sweep_columns_and_peak():
    curve = fidelity_sweep(REGIME, (0.9, 1.1), 101)
    assert curve.k_over_k0.shape == (101,)
    assert curve.fidelity.shape == (101,)
    assert np.all((curve.fidelity >= 0.0) & (curve.fidelity <= 1.0 + 1e-12))
    mid = curve.fidelity[50]
    assert mid == pytest.approx(1.0, abs=1e-12)
    assert curve.monotone_near_peak()


def test_sweep_finite_gamma_close_to_ideal():
    ideal = fidelity_sweep(REGIME, (0.95, 1.05), 21)
    finite = fidelity_sweep(REGIME, (0.95, 1.05), 21, gamma=1e3)
    assert np.max(np.abs(ideal.fidelity - finite.fidelity)) < 1e-3
    assert finite.gamma == 1e3


def test_sweep_single_sample_only_for_collapsed_range():
    curve = fidelity_sweep(REGIME, (1.0, 1.0), 1)
    assert curve.fidelity.shape == (1,)
    assert curve.fidelity[0] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        fidelity_sweep(REGIME, (0.9, 1.1), 1)


@settings(max_examples=40, deadline=None)
@given(ratio=st.floats(0.4, 1.8), n=st.integers(1, 3), np_=st.integers(0, 2))
def test_property_fidelity_bounded_and_symmetric_free(ratio, n, np_):
    regime = cz_regime(n, np_, 1.0)
    f = fidelity_closed_form(ratio, regime.geometry)
    assert -1e-12 <= f <= 1.0 + 1e-12
