"""Command-line surface: solve, gate, fidelity-sweep, wavepacket, duration,
working-condition, equivalence.

Parameters come from an optional JSON config file (--config) with a handful
of common overrides as flags; every numeric input is validated by the owning
domain type before any computation, and output text is assembled in full
before the first byte is written, so invalid runs never leave partial files.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 acceptance-threshold failure (equivalence deviations above threshold).

Dimensionless commands work in k0-units (hbar = 1, k0 ~ 1); the
working-condition command is the only SI surface and tags its output as
such, so the two unit systems cannot be mixed silently.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from czscatter import __version__
from czscatter.core import (
    CONFIG_ORDER,
    Geometry,
    Massive,
    reflection_gate,
    solve_stationary_state,
)
from czscatter.errors import ConsistencyError, CzScatterError, SolveError
from czscatter.gates import (
    CZ_GATE,
    CZRegime,
    cz_regime,
    fidelity_closed_form,
    fidelity_window_halfwidth,
    ideal_gate_limit,
    process_fidelity,
)
from czscatter.photonic import LambdaAtomParams, verify_equivalence
from czscatter.tables import SweepTable
from czscatter.wavepacket import (
    GridSpec,
    QuadratureRule,
    SpinConfig,
    completion_time,
    evolve,
    gate_duration,
    gaussian_packet,
    locate_resonance,
    packet_gate_fidelity,
    WORKING_CONDITION_PRESETS,
    working_condition,
    working_condition_preset,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_THRESHOLD = 4

_BASE_METADATA = {"tool": "czscatter", "version": __version__}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


# -- config plumbing ---------------------------------------------------------


def _load_config(args: argparse.Namespace) -> dict:
    config: dict = {}
    if args.config is not None:
        try:
            config = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(config, dict):
            raise ConfigError("config must be a JSON object")
    if getattr(args, "gamma", None) is not None:
        config["gamma"] = args.gamma
    if getattr(args, "samples", None) is not None:
        config["samples"] = args.samples
    if getattr(args, "regime", None) is not None:
        config["regime"] = args.regime
    return config


def _take(config: dict, key: str, default=None, cast=None):
    value = config.get(key, default)
    if value is None:
        return None
    if cast is not None:
        try:
            return cast(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config field {key!r}: {exc}") from exc
    return value


def _regime_from(config: dict) -> CZRegime:
    spec = config.get("regime", [1, 0])
    if not (isinstance(spec, (list, tuple)) and len(spec) == 2):
        raise ConfigError(f"'regime' must be a pair [n, n'], got {spec!r}")
    k0 = _take(config, "k0", 1.0, float)
    return cz_regime(int(spec[0]), int(spec[1]), k0)


def _geometry_from(config: dict) -> tuple[Geometry, float]:
    """Geometry plus the reference wavevector (regime k0 or explicit k0)."""
    if "geometry" in config:
        spec = config["geometry"]
        if not isinstance(spec, dict) or not {"x2", "x3"} <= spec.keys():
            raise ConfigError("'geometry' must be an object with keys 'x2' and 'x3'")
        return Geometry(x2=float(spec["x2"]), x3=float(spec["x3"])), _take(
            config, "k0", 1.0, float
        )
    regime = _regime_from(config)
    return regime.geometry, regime.k0


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _metadata(command: str, extra: dict[str, str]) -> dict[str, str]:
    meta = dict(_BASE_METADATA)
    meta["command"] = command
    meta.update(extra)
    return meta


# -- subcommands --------------------------------------------------------------


def cmd_solve(args: argparse.Namespace, config: dict) -> int:
    geometry, k0 = _geometry_from(config)
    gamma = _take(config, "gamma", 1.0e3, float)
    k = _take(config, "k", k0, float)
    model = Massive.from_gamma(gamma, k)
    gate = reflection_gate(model, geometry, k)
    stripped = gate.phase_stripped()
    rows = []
    for i, spin in enumerate(CONFIG_ORDER):
        solution = solve_stationary_state(spin, model, geometry, k)
        r = gate.entries[i]
        rows.append(
            (
                float(spin.alpha1),
                float(spin.alpha2),
                r.real,
                r.imag,
                abs(r),
                math.atan2(r.imag, r.real),
                math.degrees(math.atan2(r.imag, r.real)),
                math.atan2(stripped[i].imag, stripped[i].real),
                solution.residual,
            )
        )
    table = SweepTable(
        columns=(
            "alpha1",
            "alpha2",
            "re_r",
            "im_r",
            "modulus",
            "phase_rad",
            "phase_deg",
            "stripped_phase_rad",
            "residual",
        ),
        rows=tuple(rows),
        metadata=_metadata(
            "solve",
            {
                "gamma": repr(gamma),
                "k": repr(k),
                "x2": repr(geometry.x2),
                "x3": repr(geometry.x3),
                "units": "k0",
            },
        ),
    )
    _write_or_print(table.dumps(args.format), args.out)
    return EXIT_OK


def cmd_gate(args: argparse.Namespace, config: dict) -> int:
    geometry, k0 = _geometry_from(config)
    gamma = _take(config, "gamma", None, float)
    k = _take(config, "k", k0, float)
    if gamma is None:
        gate = ideal_gate_limit(k, geometry)
        gamma_tag = "inf"
    else:
        gate = reflection_gate(Massive.from_gamma(gamma, k), geometry, k)
        gamma_tag = repr(gamma)
    stripped = gate.phase_stripped()
    fidelity = process_fidelity(gate.matrix(), CZ_GATE)
    rows = tuple(
        (
            float(spin.alpha1),
            float(spin.alpha2),
            gate.entries[i].real,
            gate.entries[i].imag,
            stripped[i].real,
            stripped[i].imag,
        )
        for i, spin in enumerate(CONFIG_ORDER)
    )
    table = SweepTable(
        columns=("alpha1", "alpha2", "re_r", "im_r", "stripped_re", "stripped_im"),
        rows=rows,
        metadata=_metadata(
            "gate",
            {
                "gamma": gamma_tag,
                "k": repr(k),
                "x2": repr(geometry.x2),
                "x3": repr(geometry.x3),
                "fidelity_vs_cz": repr(fidelity),
                "unitarity_defect": repr(gate.unitarity_defect),
                "units": "k0",
            },
        ),
    )
    _write_or_print(table.dumps(args.format), args.out)
    return EXIT_OK


def cmd_fidelity_sweep(args: argparse.Namespace, config: dict) -> int:
    regime = _regime_from(config)
    lo, hi = _take(config, "range", (0.8, 1.2), tuple)
    lo, hi = float(lo), float(hi)
    samples = _take(config, "samples", 401, int)
    gamma = _take(config, "gamma", None, float)
    if not (0.0 < lo <= hi):
        raise ConfigError(f"'range' must satisfy 0 < lo <= hi, got ({lo}, {hi})")
    if samples < 1 or (samples == 1 and lo != hi):
        raise ConfigError("'samples' must be >= 2, or == 1 for a collapsed range")
    ratios = np.linspace(lo, hi, samples)
    geometry = regime.geometry
    model = Massive.from_gamma(gamma, regime.k0) if gamma is not None else None
    columns = ["k_over_k0", "F_closed", "F_chi"]
    if model is not None:
        columns.append("F_finite_gamma")
    rows = []
    for ratio in ratios:
        k = ratio * regime.k0
        f_closed = fidelity_closed_form(k, geometry)
        f_chi = process_fidelity(ideal_gate_limit(k, geometry).matrix(), CZ_GATE)
        row = [float(ratio), f_closed, f_chi]
        if model is not None:
            row.append(process_fidelity(reflection_gate(model, geometry, k).matrix(), CZ_GATE))
        rows.append(tuple(row))
    halfwidth = fidelity_window_halfwidth(regime)
    table = SweepTable(
        columns=tuple(columns),
        rows=tuple(rows),
        metadata=_metadata(
            "fidelity-sweep",
            {
                "regime": f"({regime.n}, {regime.n_prime})",
                "k0": repr(regime.k0),
                "gamma": "inf" if gamma is None else repr(gamma),
                "window_halfwidth_095": repr(halfwidth),
                "units": "k0",
            },
        ),
    )
    _write_or_print(table.dumps(args.format), args.out)
    if args.out is not None:
        sys.stdout.write(
            f"widest symmetric window with F >= 0.95: half-width {halfwidth:.6f} "
            f"in k/k0 around 1\n"
        )
    return EXIT_OK


def cmd_wavepacket(args: argparse.Namespace, config: dict) -> int:
    regime = _regime_from(config)
    geometry = regime.geometry
    dk = _take(config, "dk", 0.05 * regime.k0, float)
    x0 = _take(config, "x0", None, float)
    if x0 is None:
        x0 = -3.0 / dk  # 6 position widths left of the first center
    packet = gaussian_packet(x0, regime.k0, dk)
    gamma = _take(config, "gamma", 1.0e3, float)
    model = Massive.from_gamma(gamma, regime.k0)
    nodes = _take(config, "nodes", 401, int)
    window = _take(config, "window", 6.0, float)
    if bool(config.get("refine", True)):
        k_res = locate_resonance(
            SpinConfig(0, 0),
            model,
            geometry,
            packet.k0 - window * dk,
            packet.k0 + window * dk,
        )
        rule = QuadratureRule.build(packet, nodes=nodes, window=window, refine_at=(k_res,))
    else:
        rule = QuadratureRule.build(packet, nodes=nodes, window=window)
    t_final = completion_time(packet, model, geometry)
    times = _take(config, "times", [0.0, 0.5 * t_final, t_final], list)
    times = [float(t) for t in times]

    evolutions = [
        evolve(packet, spin, model, geometry, times, rule=rule) for spin in CONFIG_ORDER
    ]
    norm_drift = max(ev.norm_drift for ev in evolutions)
    wall = max(ev.max_wall_amplitude for ev in evolutions)
    f_wp = packet_gate_fidelity(packet, regime, gamma=None, nodes=nodes, window=window)
    duration = gate_duration(packet, model)

    snapshot_tables = []
    grid = evolutions[0].grid
    for j, t in enumerate(times):
        arrays = [grid]
        names = ["x"]
        for spin, ev in zip(CONFIG_ORDER, evolutions):
            arrays.append(ev.fields[j].real)
            arrays.append(ev.fields[j].imag)
            names.append(f"re_psi_{spin}")
            names.append(f"im_psi_{spin}")
        snapshot_tables.append(
            SweepTable.from_arrays(
                names,
                arrays,
                metadata=_metadata(
                    "wavepacket",
                    {"time": repr(t), "gamma": repr(gamma), "units": "k0"},
                ),
            )
        )
    summary = {
        "command": "wavepacket",
        "version": __version__,
        "units": "k0",
        "regime": [regime.n, regime.n_prime],
        "k0": regime.k0,
        "dk": dk,
        "x0": x0,
        "gamma": gamma,
        "times": times,
        "completion_time": t_final,
        "norm_drift": norm_drift,
        "max_wall_amplitude": wall,
        "F_wp": f_wp,
        "dtau": duration.dtau,
        "dtau_min": duration.dtau_min,
        "duration_note": duration.note,
        "quadrature_nodes": int(rule.nodes.size),
        "spectral_tail_bound": rule.tail_bound,
        "raw_initial_norm": {
            str(spin): ev.raw_initial_norm for spin, ev in zip(CONFIG_ORDER, evolutions)
        },
    }
    summary_text = json.dumps(summary, sort_keys=True, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(summary_text)
    else:
        base = Path(args.out)
        for j, table in enumerate(snapshot_tables):
            base.with_name(f"{base.name}_t{j}.csv").write_text(table.to_csv())
        base.with_name(f"{base.name}_summary.json").write_text(summary_text)
        sys.stdout.write(
            f"norm drift {norm_drift:.3e}, F_wp {f_wp:.6f}, dtau {duration.dtau:g}\n"
        )
    return EXIT_OK


def cmd_duration(args: argparse.Namespace, config: dict) -> int:
    k0 = _take(config, "k0", 1.0, float)
    dk = _take(config, "dk", 0.05 * k0, float)
    x0 = _take(config, "x0", -3.0 / dk, float)
    gamma = _take(config, "gamma", 1.0e3, float)
    packet = gaussian_packet(x0, k0, dk)
    model = Massive.from_gamma(gamma, k0, m=_take(config, "mass", 1.0, float))
    report = gate_duration(packet, model)
    table = SweepTable(
        columns=("dtau", "dtau_min", "td_bound"),
        rows=((report.dtau, report.dtau_min, report.td_bound),),
        metadata=_metadata(
            "duration",
            {"note": report.note, "k0": repr(k0), "dk": repr(dk), "units": "k0"},
        ),
    )
    _write_or_print(table.dumps(args.format), args.out)
    return EXIT_OK


def cmd_working_condition(args: argparse.Namespace, config: dict) -> int:
    preset = config.get("preset")
    if preset is not None:
        bound = working_condition_preset(str(preset))
        v, lambda0 = WORKING_CONDITION_PRESETS[str(preset)]
    else:
        v = _take(config, "v", None, float)
        lambda0 = _take(config, "lambda0", None, float)
        if v is None or lambda0 is None:
            raise ConfigError("working-condition needs 'preset' or both 'v' and 'lambda0'")
        bound = working_condition(v, lambda0)
    table = SweepTable(
        columns=("v", "lambda0", "k0", "td_bound"),
        rows=((v, lambda0, 2.0 * math.pi / lambda0, bound),),
        metadata=_metadata(
            "working-condition",
            {
                "units": "SI",
                "preset": str(preset) if preset is not None else "custom",
                "note": "decoherence time must exceed td_bound (order-of-magnitude)",
            },
        ),
    )
    _write_or_print(table.dumps(args.format), args.out)
    if args.out is not None:
        sys.stdout.write(f"T_d bound: {bound:.6e} s\n")
    return EXIT_OK


def cmd_equivalence(args: argparse.Namespace, config: dict) -> int:
    v = _take(config, "v", 1.0, float)
    omega0 = _take(config, "omega0", 0.5, float)
    coupling = _take(config, "coupling", 1.0, float)
    lo, hi = (float(x) for x in _take(config, "detuning_range", (0.002, 0.2), tuple))
    samples = _take(config, "samples", 101, int)
    threshold = _take(config, "threshold", 1.0e-8, float)
    if samples < 2:
        raise ConfigError(f"'samples' must be >= 2, got {samples}")
    if lo <= 0.0 <= hi or lo == 0.0 or hi == 0.0:
        raise ConfigError(
            f"detuning grid [{lo}, {hi}] contains the pole at detuning = 0 "
            "(photon energy equals the atomic splitting)"
        )
    params = LambdaAtomParams(v=v, omega0=omega0, coupling=coupling)
    geometry, _ = _geometry_from(config)
    detunings = np.linspace(lo, hi, samples)
    k_grid = (omega0 + detunings) / v
    if np.any(k_grid <= 0):
        raise ConfigError("detuning grid reaches non-positive wavevectors")
    report = verify_equivalence(params, geometry, k_grid)
    arrays = [detunings, k_grid] + [report.deviations[i] for i in range(4)]
    names = ["detuning", "k"] + [f"dev_{spin}" for spin in CONFIG_ORDER]
    table = SweepTable.from_arrays(
        names,
        arrays,
        metadata=_metadata(
            "equivalence",
            {
                "v": repr(v),
                "omega0": repr(omega0),
                "coupling": repr(coupling),
                "threshold": repr(threshold),
                "max_deviation": repr(report.max_deviation),
                "units": "k0",
            },
        ),
    )
    if args.out is not None:
        _write_or_print(table.dumps(args.format), args.out)
    sys.stdout.write(
        f"max |r_photonic - r_massive| = {report.max_deviation:.6e} over "
        f"{samples} detunings x 4 configurations\n"
    )
    return EXIT_OK if report.max_deviation < threshold else EXIT_THRESHOLD


# -- parser -------------------------------------------------------------------


def _parse_regime_flag(text: str) -> list[int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected n,n' (two integers), got {text!r}")
    try:
        return [int(parts[0]), int(parts[1])]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="czscatter",
        description="Conditional-phase gate analysis for barrier scattering on a mirrored line.",
    )
    parser.add_argument("--version", action="version", version=f"czscatter {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--out", type=str, default=None, help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--regime", type=_parse_regime_flag, default=None, metavar="N,N'")
        p.set_defaults(func=func)
        return p

    add("solve", cmd_solve, "stationary reflection data for all four spin configurations")
    add("gate", cmd_gate, "conditional-phase gate entries and fidelity versus CZ")
    add("fidelity-sweep", cmd_fidelity_sweep, "process fidelity over a k/k0 range")
    add("wavepacket", cmd_wavepacket, "packet evolution snapshots and summary")
    add("duration", cmd_duration, "characteristic gate duration report")
    add("working-condition", cmd_working_condition, "decoherence-time bound (SI units)")
    add("equivalence", cmd_equivalence, "photonic-vs-massive reflection comparison")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args)
        return args.func(args, config)
    except (SolveError, ConsistencyError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (CzScatterError, ConfigError) as exc:
        sys.stderr.write(f"invalid configuration: {exc}\n")
        return EXIT_CONFIG
    except (KeyError, TypeError, ValueError) as exc:
        sys.stderr.write(f"invalid configuration: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
