"""Scenario-driven command line: reproduce the reference experiments and
resource reports from a JSON config.

Commands::

    lgt run <config.json>        time evolution -> CSV curves + metadata JSON
    lgt resources <config.json>  resource tables -> CSV
    lgt qasm <config.json> --step  one Trotter-step circuit -> OpenQASM + counts

Exit codes: 0 ok, 2 config error, 3 resource limit. Model couplings are
interpreted in lattice units (the Hamiltonian is built with spacing 1; the
nominal physical spacing is carried as metadata in `model.a`).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lgt.dynamics import (
    KRYLOV_LIMIT,
    ExactEvolver,
    StateVector,
    config_probabilities,
    gauss_filter,
    loschmidt,
    standard_observables,
    top_configs,
    trotter_plan,
    trotter_states,
)
from lgt.gauge import check_spin, flux_state_index
from lgt.hamiltonian import HamiltonianTerms, ModelParams, assemble, default_lambda
from lgt.lattice import LatticeSpec, RegisterLayout, StaticLink, layout, spinor_components
from lgt.matter import MAPPING_NAMES, fermion_mapping
from lgt.resources import (
    closed_form_link_counts,
    cnot_per_trotter_step,
    link_resource_counts,
    qubit_report,
    rows_to_csv,
    scaling_table,
)


class ConfigError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"config error at {path}: {message}")
        self.path = path


class ResourceLimitError(Exception):
    pass


PRESETS: dict[str, dict] = {
    "vacuum_decay": {
        "lattice": {"d": 1, "extents": [3], "boundary": "periodic",
                    "static_links": []},
        "model": {"m": 0.5, "r": 1.0, "a": 0.5, "e": math.sqrt(2.0),
                  "lambda_gauss": 10.0},
        "mapping": "jw",
        "gauge_encoding": "log",
        "spin": 1.0,
        "theta": [0.0],
        "initial_state": "bare_vacuum",
        "evolution": {"method": "both", "dt": [0.1, 0.05, 0.01],
                      "t_max": 2.0, "sample_dt": 0.1, "ordering": "canonical"},
        "output": {"prefix": "vacuum_decay"},
    },
    "string_breaking_1d": {
        "lattice": {"d": 1, "extents": [3], "boundary": "open",
                    "static_links": [
                        {"site": [-1], "dir": 0, "flux": 1.0},
                        {"site": [2], "dir": 0, "flux": 1.0}]},
        "model": {"m": 0.4, "r": 1.0, "a": 0.4, "e": 2.0,
                  "lambda_gauss": 20.0},
        "mapping": "jw",
        "gauge_encoding": "log",
        "spin": 1.0,
        "theta": [0.0],
        "initial_state": {"sites": ["o", "o", "o"], "link_fluxes": [1, 1]},
        "evolution": {"method": "both", "dt": [0.1, 0.05, 0.01],
                      "t_max": 2.0, "sample_dt": 0.1, "ordering": "canonical"},
        "output": {"prefix": "string_breaking_1d"},
    },
    "double_plaquette_2d": {
        "lattice": {"d": 2, "extents": [3, 2], "boundary": "open",
                    "static_links": [
                        {"site": [-1, 0], "dir": 0, "flux": 1.0},
                        {"site": [2, 0], "dir": 0, "flux": 1.0}]},
        "model": {"m": 0.4, "r": 1.0, "a": 0.4, "e": 2.0,
                  "lambda_gauss": 20.0},
        "mapping": "jw",
        "gauge_encoding": "log",
        "spin": 0.5,
        "theta": [0.5, 0.5],
        # the flux string enters at the lower-left site and runs along the
        # bottom edge; link order is site-major so those are links 0 and 3
        "initial_state": {"sites": ["o"] * 6,
                          "link_fluxes": [1, 0, 0, 1, 0, 0, 0]},
        "evolution": {"method": "both", "dt": [0.05, 0.025, 0.012],
                      "t_max": 1.0, "sample_dt": 0.1, "ordering": "canonical"},
        "output": {"prefix": "double_plaquette_2d"},
    },
    "resource_report": {
        "spins": [0.5, 1.0, 1.5, 2.0, 3.0, 3.5, 7.5, 15.5, 31.5, 63.5,
                  127.5, 255.5],
        "qubit_tables": {
            "2d": [[2, 3], [4, 4], [10, 10], [100, 100]],
            "3d": [[2, 2, 2], [4, 4, 4], [10, 10, 10], [100, 100, 100]],
            "spins": [0.5, 1.0, 1.5, 3.5, 7.5, 15.5, 31.5, 127.5, 255.5],
        },
        "gauge_encoding": "log",
        "output": {"prefix": "resource_report"},
    },
}

SITE_PATTERNS = {"o": (0, 1), "p": (1, 1), "a": (0, 0), "b": (1, 0)}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    raw: dict
    spec: LatticeSpec | None
    params: ModelParams | None
    mapping: str
    encoding: str
    spin: float
    initial: object
    evolution: dict
    output_prefix: str


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(str(path), str(exc)) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("$", "top level must be a JSON object")
    scenario = cfg.get("scenario", "custom")
    if scenario in PRESETS:
        cfg = _merge(PRESETS[scenario] | {"scenario": scenario}, cfg)
    return cfg


def _require(cfg: dict, key: str, types, path: str):
    if key not in cfg:
        raise ConfigError(f"{path}.{key}", "missing required field")
    val = cfg[key]
    if not isinstance(val, types):
        raise ConfigError(f"{path}.{key}", f"expected {types}, got {type(val).__name__}")
    return val


def validate_config(cfg: dict) -> ScenarioConfig:
    scenario = cfg.get("scenario", "custom")
    known = set(PRESETS) | {"custom"}
    if scenario not in known:
        raise ConfigError("$.scenario", f"unknown scenario {scenario!r}")
    prefix = cfg.get("output", {}).get("prefix", scenario)
    if scenario == "resource_report":
        return ScenarioConfig(scenario, cfg, None, None, "jw",
                              cfg.get("gauge_encoding", "log"), 0.5, None,
                              {}, prefix)

    lat = _require(cfg, "lattice", dict, "$")
    d = _require(lat, "d", int, "$.lattice")
    extents = _require(lat, "extents", list, "$.lattice")
    if len(extents) != d:
        raise ConfigError("$.lattice.extents", f"need {d} extents")
    boundary = _require(lat, "boundary", str, "$.lattice")
    statics = []
    for i, sl in enumerate(lat.get("static_links", [])):
        spath = f"$.lattice.static_links[{i}]"
        statics.append(StaticLink(tuple(_require(sl, "site", list, spath)),
                                  _require(sl, "dir", int, spath),
                                  float(_require(sl, "flux", (int, float), spath))))
    try:
        spec = LatticeSpec(d, tuple(extents), boundary, tuple(statics))
    except ValueError as exc:
        raise ConfigError("$.lattice", str(exc)) from exc

    model = _require(cfg, "model", dict, "$")
    theta = tuple(float(x) for x in cfg.get("theta", []))
    lam = float(model.get("lambda_gauss", -1.0))
    params = ModelParams(
        m=float(_require(model, "m", (int, float), "$.model")),
        r=float(model.get("r", 1.0)),
        a=float(model.get("a", 1.0)),
        e=float(model.get("e", 1.0)),
        theta=theta,
        lam=lam if lam >= 0 else 0.0,
    )
    if lam < 0:
        params = ModelParams(params.m, params.r, params.a, params.e, theta,
                             default_lambda(params))

    mapping = cfg.get("mapping", "jw")
    if mapping not in MAPPING_NAMES:
        raise ConfigError("$.mapping", f"one of {MAPPING_NAMES} required")
    encoding = cfg.get("gauge_encoding", "log")
    if encoding not in ("log", "linear"):
        raise ConfigError("$.gauge_encoding", "one of ('log', 'linear') required")
    spin = float(_require(cfg, "spin", (int, float), "$"))
    try:
        check_spin(spin)
    except ValueError as exc:
        raise ConfigError("$.spin", str(exc)) from exc

    evo = cfg.get("evolution", {})
    dts = [float(x) for x in evo.get("dt", [0.05])]
    if any(dt <= 0 for dt in dts):
        raise ConfigError("$.evolution.dt", "time steps must be positive")
    evolution = {
        "method": evo.get("method", "both"),
        "dt": dts,
        "t_max": float(evo.get("t_max", 1.0)),
        "sample_dt": float(evo.get("sample_dt", max(dts))),
        "ordering": evo.get("ordering", "canonical"),
    }
    if evolution["method"] not in ("exact", "trotter", "both"):
        raise ConfigError("$.evolution.method", "one of exact|trotter|both")

    initial = cfg.get("initial_state", "bare_vacuum")
    return ScenarioConfig(scenario, cfg, spec, params, mapping, encoding,
                          spin, initial, evolution, prefix)


def build_layout(sc: ScenarioConfig) -> RegisterLayout:
    return layout(sc.spec, spinor_components(sc.spec.d), sc.encoding, sc.spin)


def lattice_units(params: ModelParams) -> ModelParams:
    """Couplings are lattice-unit values; the Hamiltonian uses spacing 1."""
    return ModelParams(params.m, params.r, 1.0, params.e, params.theta,
                       params.lam)


def build_hamiltonian(sc: ScenarioConfig, lay: RegisterLayout) -> HamiltonianTerms:
    if lay.n_total > KRYLOV_LIMIT:
        raise ResourceLimitError(
            f"{lay.n_total} qubits exceeds the simulable limit ({KRYLOV_LIMIT})")
    return assemble(lay, lattice_units(sc.params), sc.mapping)


def initial_state(label, lay: RegisterLayout, mapping, params) -> StateVector:
    """Computational basis state for a named or explicit configuration."""
    n_sp = lay.n_spinor
    if label == "bare_vacuum":
        occupations = ([0] * (n_sp // 2) + [1] * (n_sp - n_sp // 2)) * lay.spec.n_sites
        fluxes = [0.0] * len(lay.links)
    elif isinstance(label, dict):
        sites = label.get("sites")
        if sites is None or len(sites) != lay.spec.n_sites:
            raise ConfigError("$.initial_state.sites",
                              f"need {lay.spec.n_sites} site labels")
        occupations = []
        for s in sites:
            if isinstance(s, str):
                if n_sp != 2 or s not in SITE_PATTERNS:
                    raise ConfigError("$.initial_state.sites",
                                      f"unknown site label {s!r}")
                occupations.extend(SITE_PATTERNS[s])
            else:
                occupations.extend(int(b) for b in s)
        fluxes = [float(x) for x in label.get("link_fluxes", [])]
        if len(fluxes) != len(lay.links):
            raise ConfigError("$.initial_state.link_fluxes",
                              f"need {len(lay.links)} flux values")
    else:
        raise ConfigError("$.initial_state", f"unsupported label {label!r}")

    index = mapping.encode_occupations(occupations) << (lay.n_total - lay.n_fermionic)
    for li, link in enumerate(lay.links):
        m_val = fluxes[li] - params.theta_along(link.direction)
        try:
            local = flux_state_index(lay.spin, lay.encoding, m_val)
        except ValueError as exc:
            raise ConfigError(f"$.initial_state.link_fluxes[{li}]", str(exc)) from exc
        offset = lay.n_fermionic + li * lay.qubits_per_link
        index |= local << (lay.n_total - offset - lay.qubits_per_link)
    return StateVector.basis_state(lay.n_total, index)


# -- run command ------------------------------------------------------------


def _format(x: float) -> str:
    return f"{x:.12g}"


def _curve_rows(states, s0, observables):
    rows = []
    for t, st in states:
        rows.append((t, loschmidt(s0, st),
                     observables[0].expectation(st), st))
    return rows


def _write_curve(path: Path, rows, lay, mapping, params, label_columns):
    lines = ["t,loschmidt,total_particle_number"
             + "".join(f",p[{label}]" for label in label_columns) + ",p[other]"]
    for t, g, n_part, st in rows:
        probs = config_probabilities(st, lay, mapping, params)
        listed = sum(probs.get(label, 0.0) for label in label_columns)
        other = max(0.0, sum(probs.values()) - listed)
        cells = [_format(t), _format(g), _format(n_part)]
        cells += [_format(probs.get(label, 0.0)) for label in label_columns]
        cells.append(_format(other))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def run_scenario(sc: ScenarioConfig, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lay = build_layout(sc)
    h = build_hamiltonian(sc, lay)
    mapping = fermion_mapping(sc.mapping, lay.n_fermionic)
    params = lattice_units(sc.params)
    s0 = initial_state(sc.initial, lay, mapping, params)
    obs = standard_observables(lay, mapping, params)

    evo = sc.evolution
    t_max = evo["t_max"]
    curves: dict[str, list] = {}
    if evo["method"] in ("exact", "both"):
        ev = ExactEvolver(h.total)
        sample = evo["sample_dt"]
        n_samples = int(round(t_max / sample))
        states = [(0.0, s0)]
        st = s0
        for k in range(1, n_samples + 1):
            st = ev.evolve(st, sample)
            states.append((k * sample, st))
        curves["exact"] = _curve_rows(states, s0, obs)
    if evo["method"] in ("trotter", "both"):
        for dt in evo["dt"]:
            plan = trotter_plan(h, dt, int(round(t_max / dt)), evo["ordering"])
            states = [(t, st.copy()) for t, st in trotter_states(s0, plan)]
            curves[f"trotter_dt{dt:g}"] = _curve_rows(states, s0, obs)

    # stable label columns: ranked by peak probability across all curves
    peak: dict[str, float] = {}
    for rows in curves.values():
        for *_, st in rows:
            for label, p in config_probabilities(st, lay, mapping, params).items():
                peak[label] = max(peak.get(label, 0.0), p)
    label_columns = [label for label, _ in
                     sorted(peak.items(), key=lambda kv: (-kv[1], kv[0]))[:12]]

    written = []
    for name, rows in curves.items():
        path = out / f"{sc.output_prefix}_{name}.csv"
        _write_curve(path, rows, lay, mapping, params, label_columns)
        written.append(path)

    n_configs, invariant = (None, None)
    if lay.n_total <= 20:
        total_cfg, inv = gauss_filter(lay, mapping, params)
        n_configs, invariant = total_cfg, len(inv)
    meta = {
        "scenario": sc.scenario,
        "lattice": {"d": sc.spec.d, "extents": list(sc.spec.extents),
                    "boundary": sc.spec.boundary},
        "model": {"m": sc.params.m, "r": sc.params.r, "e": sc.params.e,
                  "a_nominal": sc.params.a, "lambda_gauss": sc.params.lam,
                  "theta": list(sc.params.theta)},
        "units": "lattice (Hamiltonian built with spacing 1)",
        "mapping": sc.mapping,
        "gauge_encoding": sc.encoding,
        "spin": sc.spin,
        "evolution": evo,
        "ordering": evo["ordering"],
        "seed": None,
        "n_qubits": lay.n_total,
        "n_pauli_strings": h.n_terms,
        "n_cnot_per_trotter_step": cnot_per_trotter_step(h.total),
        "n_configurations": n_configs,
        "n_gauge_invariant": invariant,
        "trotter_error_reporting": {
            "absolute": "curve differences against the exact column",
            "relative_floor": 1e-3,
        },
        "workers": os.environ.get("LGT_WORKERS", "1"),
    }
    meta_path = out / f"{sc.output_prefix}_meta.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    written.append(meta_path)
    return written


# -- resources command --------------------------------------------------------


def _per_link_csv(spins) -> str:
    lines = ["S,hopping_factor,e_op,e_sq,plaquette,exact"]
    for spin in spins:
        d_s = check_spin(spin)
        counts = (link_resource_counts(spin, "log") if d_s <= 16
                  else closed_form_link_counts(spin))
        lines.append(f"{spin:g},{counts.hopping_factor},{counts.e_op},"
                     f"{counts.e_sq},{counts.plaquette},{int(counts.exact)}")
    return "\n".join(lines) + "\n"


def _qubit_csv(lattices, spins) -> str:
    lines = ["lattice,S,nqubits_total,nqubits_fermionic,nqubits_gauge"]
    for extents in lattices:
        for spin in spins:
            rep = qubit_report(tuple(extents), "open", spin)
            name = "x".join(str(e) for e in extents)
            lines.append(f"{name},{spin:g},{rep.n_total},{rep.n_fermionic},"
                         f"{rep.n_gauge}")
    return "\n".join(lines) + "\n"


def run_resources(sc: ScenarioConfig, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if sc.scenario == "resource_report":
        cfg = sc.raw
        spins = cfg.get("spins", PRESETS["resource_report"]["spins"])
        tables = cfg.get("qubit_tables", PRESETS["resource_report"]["qubit_tables"])
        files = {
            f"{sc.output_prefix}_per_link.csv": _per_link_csv(spins),
            f"{sc.output_prefix}_qubits_2d.csv":
                _qubit_csv(tables["2d"], tables["spins"]),
            f"{sc.output_prefix}_qubits_3d.csv":
                _qubit_csv(tables["3d"], tables["spins"]),
        }
        for name, text in files.items():
            path = out / name
            path.write_text(text)
            written.append(path)
        return written
    rows = scaling_table(sc.spec, [sc.spin], [sc.encoding],
                         r=sc.params.r, params=lattice_units(sc.params))
    path = out / f"{sc.output_prefix}_resources.csv"
    path.write_text(rows_to_csv(rows))
    written.append(path)
    return written


# -- qasm command -------------------------------------------------------------


def run_qasm(sc: ScenarioConfig, out_dir: str | Path, dt: float | None) -> list[Path]:
    from lgt.circuits import export_qasm, synth_trotter_step

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lay = build_layout(sc)
    h = build_hamiltonian(sc, lay)
    step = dt if dt is not None else sc.evolution["dt"][0]
    circ = synth_trotter_step(h, step, sc.evolution["ordering"])
    qasm_path = out / f"{sc.output_prefix}_trotter_step.qasm"
    qasm_path.write_text(export_qasm(circ))
    summary = {
        "n_qubits": circ.n_qubits,
        "dt": step,
        "gate_counts": circ.gate_counts(),
        "cnot_count": circ.cnot_count,
        "depth": circ.depth(),
        "n_pauli_strings": h.n_terms,
    }
    json_path = out / f"{sc.output_prefix}_gate_counts.json"
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return [qasm_path, json_path]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lgt",
        description="U(1) lattice gauge theory on qubits: runs and resources")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, hlp in (("run", "simulate a scenario"),
                      ("resources", "emit resource tables"),
                      ("qasm", "emit one Trotter-step circuit")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("config", help="path to the JSON config")
        p.add_argument("--out", default="out", help="output directory")
        if name == "qasm":
            p.add_argument("--step", action="store_true",
                           help="emit a single Trotter step (default behavior)")
            p.add_argument("--dt", type=float, default=None,
                           help="step size override")
    args = parser.parse_args(argv)

    try:
        sc = validate_config(load_config(args.config))
        if args.command == "run":
            written = run_scenario(sc, args.out)
        elif args.command == "resources":
            written = run_resources(sc, args.out)
        else:
            written = run_qasm(sc, args.out, args.dt)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
