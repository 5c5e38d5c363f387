"""Configuration-driven command line front end.

Usage: ``dg-gauge <config-path> [--seed N] [--output DIR]``.

The config is one JSON document selecting a mode (evolve, transform,
invariants, classify, commute, verify) plus the blocks that mode needs.
Outputs are plain text next to the configured path prefix: a
``<prefix>_series.csv`` time series, a ``<prefix>_result.json`` scalar
document, and ``<prefix>_state_<k>.txt`` wavefunction snapshots written
with shortest round-trip float formatting so re-reading them is
bit-exact.  Exit codes: 0 success, 1 numerical failure (a run hit a node
or went unstable), 2 config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .evolve import (
    RK4_FD2,
    RK4_SPECTRAL,
    EvolutionConfig,
    commute_check,
    energy_like,
    evolve,
)
from . import verification
from .errors import (
    DegenerateFamily,
    NodalState,
    NotLinearizable,
    ParseError,
    Unstable,
    ValidationError,
)
from .family import (
    DGParams,
    FamilyParams,
    from_dg,
    invariants,
    linearizability,
)
from .fields import (
    Grid,
    Potential,
    ScalarField,
    Wavefunction,
    gaussian_packet,
    plane_wave,
    total_mass,
)
from .gauge import GaugeElement, act_on_params, apply

MODES = ("evolve", "transform", "invariants", "classify", "commute", "verify")

_TOP_KEYS = {"mode", "family_params", "dg_params", "gauge", "grid",
             "initial_state", "potential", "evolution", "output"}
_FAMILY_KEYS = ("nu1", "nu2", "mu0", "mu1", "mu2", "mu3", "mu4", "mu5")
_DG_KEYS = ("hbar", "mass", "D", "Dprime", "c1", "c2", "c3", "c4", "c5")


@dataclass
class ExperimentConfig:
    """A validated experiment description with defaults filled in."""

    mode: str
    family: FamilyParams | None = None
    dg: DGParams | None = None
    gauge: GaugeElement | None = None
    grid: Grid | None = None
    initial_state: dict | None = None
    potential: dict | None = None
    evolution: EvolutionConfig | None = None
    output: str | None = None
    base_dir: str = "."

    def params(self) -> FamilyParams:
        return self.family if self.family is not None else from_dg(self.dg)

    def potential_is_free(self) -> bool:
        # only an explicit V ≡ 0 drops the ι₀ invariant; an omitted
        # potential block leaves the μ₀-sector meaningful
        return self.potential is not None and self.potential["kind"] == "free"


# ---------------------------------------------------------------------------
# parsing and validation

def _check_keys(block, allowed, where):
    for key in block:
        if key not in allowed:
            raise ValidationError(f"unknown field '{key}' in '{where}'")


def _number(block, key, where, default=None):
    if key not in block:
        if default is None:
            raise ValidationError(f"missing field '{key}' in '{where}'")
        return float(default)
    val = block[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ValidationError(f"field '{where}.{key}' must be a number")
    return float(val)


def _integer(block, key, where, default=None):
    if key not in block:
        if default is None:
            raise ValidationError(f"missing field '{key}' in '{where}'")
        return int(default)
    val = block[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ValidationError(f"field '{where}.{key}' must be an integer")
    return val


def _parse_family(block) -> FamilyParams:
    _check_keys(block, _FAMILY_KEYS, "family_params")
    vals = {k: _number(block, k, "family_params") for k in _FAMILY_KEYS}
    if vals["nu1"] == 0.0:
        raise ValidationError("nu1 must be nonzero")
    return FamilyParams(**vals)


def _parse_dg(block) -> DGParams:
    _check_keys(block, _DG_KEYS, "dg_params")
    vals = {k: _number(block, k, "dg_params") for k in _DG_KEYS}
    if vals["hbar"] <= 0:
        raise ValidationError("dg_params.hbar must be positive")
    if vals["mass"] <= 0:
        raise ValidationError("dg_params.mass must be positive")
    return DGParams(**vals)


def _parse_gauge(block) -> GaugeElement:
    _check_keys(block, ("lambda", "gamma"), "gauge")
    lam = _number(block, "lambda", "gauge")
    gamma = _number(block, "gamma", "gauge")
    if lam == 0.0:
        raise ValidationError("gauge.lambda must be nonzero")
    return GaugeElement(lam, gamma)


def _parse_grid(block) -> Grid:
    _check_keys(block, ("n", "length"), "grid")
    n = _integer(block, "n", "grid")
    length = _number(block, "length", "grid")
    if n < 2:
        raise ValidationError("grid.n must be at least 2")
    if length <= 0:
        raise ValidationError("grid.length must be positive")
    return Grid(n, length)


def _parse_initial_state(block) -> dict:
    if "kind" not in block:
        raise ValidationError("missing field 'kind' in 'initial_state'")
    kind = block["kind"]
    if kind == "gaussian":
        _check_keys(block, ("kind", "sigma0", "x0", "k0"), "initial_state")
        return {"kind": kind,
                "sigma0": _number(block, "sigma0", "initial_state", default=1.0),
                "x0": _number(block, "x0", "initial_state", default=0.0),
                "k0": _number(block, "k0", "initial_state", default=0.0)}
    if kind == "plane_wave":
        _check_keys(block, ("kind", "k"), "initial_state")
        return {"kind": kind, "k": _number(block, "k", "initial_state")}
    if kind == "file":
        _check_keys(block, ("kind", "path"), "initial_state")
        if not isinstance(block.get("path"), str):
            raise ValidationError("field 'initial_state.path' must be a string")
        return {"kind": kind, "path": block["path"]}
    raise ValidationError(f"initial_state.kind must be one of gaussian, plane_wave, file; got {kind!r}")


def _parse_potential(block) -> dict:
    if "kind" not in block:
        raise ValidationError("missing field 'kind' in 'potential'")
    kind = block["kind"]
    if kind == "free":
        _check_keys(block, ("kind",), "potential")
        return {"kind": kind}
    if kind == "harmonic":
        _check_keys(block, ("kind", "k"), "potential")
        return {"kind": kind, "k": _number(block, "k", "potential")}
    if kind == "sampled":
        _check_keys(block, ("kind", "values"), "potential")
        vals = block.get("values")
        if not isinstance(vals, list) or not vals:
            raise ValidationError("field 'potential.values' must be a nonempty list of numbers")
        for v in vals:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValidationError("field 'potential.values' must contain only numbers")
        return {"kind": kind, "values": [float(v) for v in vals]}
    raise ValidationError(f"potential.kind must be one of free, harmonic, sampled; got {kind!r}")


def _parse_evolution(block) -> EvolutionConfig:
    _check_keys(block, ("dt", "t_end", "scheme", "rho_floor", "record_every"), "evolution")
    dt = _number(block, "dt", "evolution")
    t_end = _number(block, "t_end", "evolution")
    if dt <= 0:
        raise ValidationError("evolution.dt must be positive")
    if t_end <= 0:
        raise ValidationError("evolution.t_end must be positive")
    scheme = block.get("scheme", RK4_SPECTRAL)
    if not isinstance(scheme, str) or scheme.lower() not in (RK4_SPECTRAL, RK4_FD2):
        raise ValidationError("evolution.scheme must be 'rk4-spectral' or 'rk4-fd2'")
    rho_floor = None
    if "rho_floor" in block:
        rho_floor = _number(block, "rho_floor", "evolution")
        if rho_floor < 0:
            raise ValidationError("evolution.rho_floor must be nonnegative")
    record_every = _integer(block, "record_every", "evolution", default=1)
    if record_every < 1:
        raise ValidationError("evolution.record_every must be a positive integer")
    return EvolutionConfig(dt=dt, t_end=t_end, scheme=scheme.lower(),
                              rho_floor=rho_floor, record_every=record_every)


def _check_ehrenfest_structure(dg: DGParams):
    scale = max(1.0, abs(dg.D), abs(dg.Dprime))
    tol = 1e-12 * scale
    if abs(dg.Dprime * dg.c1 - dg.D) > tol:
        raise ValidationError("dg_params: Ehrenfest structure needs Dprime*c1 == D")
    if abs(dg.Dprime * dg.c4 + dg.D) > tol:
        raise ValidationError("dg_params: Ehrenfest structure needs Dprime*c4 == -D")
    if abs(dg.c2 + 2.0 * dg.c5) > tol:
        raise ValidationError("dg_params: Ehrenfest structure needs c2 + 2*c5 == 0")
    if abs(dg.c3) > tol:
        raise ValidationError("dg_params: Ehrenfest structure needs c3 == 0")


_MODE_NEEDS = {
    "evolve": ("parameters", "initial_state", "evolution"),
    "transform": ("parameters", "gauge", "initial_state"),
    "invariants": ("parameters",),
    "classify": ("parameters",),
    "commute": ("dg_params", "initial_state", "evolution"),
    "verify": (),
}


def parse_config(text: str, base_dir: str = ".") -> ExperimentConfig:
    """Validate a JSON experiment document and fill defaults.

    Raises ParseError for malformed JSON (with line/column) and
    ValidationError naming the offending field otherwise.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ValidationError("top-level config must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "config")
    mode = doc.get("mode")
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {', '.join(MODES)}; got {mode!r}")

    if "family_params" in doc and "dg_params" in doc:
        raise ValidationError("parameters: give exactly one of family_params or dg_params")

    cfg = ExperimentConfig(mode=mode, base_dir=base_dir)
    if "family_params" in doc:
        cfg.family = _parse_family(doc["family_params"])
    if "dg_params" in doc:
        cfg.dg = _parse_dg(doc["dg_params"])
    if "gauge" in doc:
        cfg.gauge = _parse_gauge(doc["gauge"])
    if "grid" in doc:
        cfg.grid = _parse_grid(doc["grid"])
    if "initial_state" in doc:
        cfg.initial_state = _parse_initial_state(doc["initial_state"])
    if "potential" in doc:
        cfg.potential = _parse_potential(doc["potential"])
    if "evolution" in doc:
        cfg.evolution = _parse_evolution(doc["evolution"])
    if "output" in doc:
        if not isinstance(doc["output"], str) or not doc["output"]:
            raise ValidationError("field 'output' must be a nonempty string")
        cfg.output = doc["output"]

    for need in _MODE_NEEDS[mode]:
        if need == "parameters":
            if cfg.family is None and cfg.dg is None:
                raise ValidationError(f"mode '{mode}' needs family_params or dg_params")
        elif need == "dg_params":
            if cfg.dg is None:
                raise ValidationError("mode 'commute' needs a dg_params block")
        elif need == "initial_state":
            if cfg.initial_state is None:
                raise ValidationError(f"mode '{mode}' needs an initial_state block")
            if cfg.grid is None and cfg.initial_state["kind"] != "file":
                raise ValidationError(f"mode '{mode}' needs a grid block")
        elif getattr(cfg, need) is None:
            raise ValidationError(f"mode '{mode}' needs a {need} block")

    if mode == "commute":
        _check_ehrenfest_structure(cfg.dg)
    return cfg


# ---------------------------------------------------------------------------
# state file IO (bit-exact text round trip)

def write_state(path: str, psi: Wavefunction):
    """Header ``n length dim``, then one ``re im`` pair per grid point."""
    grid = psi.grid
    with open(path, "w") as fh:
        fh.write(f"{grid.n} {grid.length!r} {grid.dim}\n")
        for v in psi.values.ravel():
            fh.write(f"{float(v.real)!r} {float(v.imag)!r}\n")


def read_state(path: str) -> Wavefunction:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValidationError(f"state file {path}: malformed header")
        try:
            n, length, dim = int(header[0]), float(header[1]), int(header[2])
        except ValueError:
            raise ValidationError(f"state file {path}: malformed header") from None
        grid = Grid(n, length, dim)
        values = np.empty(grid.size, dtype=np.complex128)
        for i in range(grid.size):
            parts = fh.readline().split()
            if len(parts) != 2:
                raise ValidationError(f"state file {path}: expected {grid.size} 're im' lines")
            values[i] = complex(float(parts[0]), float(parts[1]))
    return Wavefunction(grid, values.reshape(grid.shape))


def _build_initial_state(cfg: ExperimentConfig) -> Wavefunction:
    spec = cfg.initial_state
    if spec["kind"] == "file":
        path = spec["path"]
        if not os.path.isabs(path):
            path = os.path.join(cfg.base_dir, path)
        psi = read_state(path)
        if cfg.grid is not None and psi.grid != cfg.grid:
            raise ValidationError("grid block does not match the state file's grid")
        return psi
    if spec["kind"] == "gaussian":
        return gaussian_packet(cfg.grid, sigma0=spec["sigma0"], x0=spec["x0"], k0=spec["k0"])
    return plane_wave(cfg.grid, spec["k"])


def _build_potential(cfg: ExperimentConfig, grid: Grid) -> Potential:
    spec = cfg.potential
    if spec is None or spec["kind"] == "free":
        return Potential.free()
    if spec["kind"] == "harmonic":
        return Potential.harmonic(spec["k"])
    vals = np.asarray(spec["values"], dtype=np.float64)
    if vals.size != grid.size:
        raise ValidationError(f"potential.values has {vals.size} samples, grid has {grid.size}")
    return Potential.sampled(ScalarField(grid, vals.reshape(grid.shape)))


# ---------------------------------------------------------------------------
# output helpers

def _params_dict(p: FamilyParams) -> dict:
    return {"nu1": p.nu1, "nu2": p.nu2, "mu1": p.mu1, "mu2": p.mu2,
            "mu3": p.mu3, "mu4": p.mu4, "mu5": p.mu5, "mu0": p.mu0}


def _gauge_dict(g: GaugeElement) -> dict:
    return {"lambda": g.lam, "gamma": g.gamma}


def _resolve_prefix(cfg: ExperimentConfig, output_dir: str | None) -> str:
    prefix = cfg.output or "out"
    if output_dir:
        prefix = os.path.join(output_dir, os.path.basename(prefix))
    parent = os.path.dirname(prefix)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return prefix


def _write_result(prefix: str, document: dict) -> str:
    path = f"{prefix}_result.json"
    with open(path, "w") as fh:
        json.dump(document, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _write_series(prefix: str, seed: int, columns, rows) -> str:
    path = f"{prefix}_series.csv"
    with open(path, "w", newline="") as fh:
        fh.write(f"# seed {seed}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    return path


# ---------------------------------------------------------------------------
# mode dispatch

def _run_invariants(cfg, prefix, seed):
    iota = invariants(cfg.params(), has_potential=not cfg.potential_is_free())
    doc = {"mode": "invariants", "seed": seed,
           "params": _params_dict(cfg.params()),
           "invariants": {"iota0": iota.iota0, "iota1": iota.iota1,
                          "iota2": iota.iota2, "iota3": iota.iota3,
                          "iota4": iota.iota4, "iota5": iota.iota5}}
    path = _write_result(prefix, doc)
    print(f"invariants written to {path}")
    return 0


def _run_classify(cfg, prefix, seed):
    res = linearizability(cfg.params(), has_potential=not cfg.potential_is_free())
    doc = {"mode": "classify", "seed": seed,
           "verdict": res.verdict,
           "gauge": _gauge_dict(res.gauge) if res.gauge else None,
           "hbar_prime": res.hbar_prime,
           "mass": res.mass_out,
           "hbar_over_mass": res.hbar_over_mass,
           "obstruction": res.obstruction,
           "sign_convention": "lambda-positive"}
    path = _write_result(prefix, doc)
    print(f"classification ({res.verdict}) written to {path}")
    return 0


def _run_transform(cfg, prefix, seed):
    psi = _build_initial_state(cfg)
    p = cfg.params()
    psi_t = apply(cfg.gauge, psi)
    primed = act_on_params(cfg.gauge, p)
    state_path = f"{prefix}_state_0.txt"
    write_state(state_path, psi_t)
    doc = {"mode": "transform", "seed": seed,
           "gauge": _gauge_dict(cfg.gauge),
           "params": _params_dict(p),
           "primed_params": _params_dict(primed),
           "files": {"state": os.path.basename(state_path)}}
    path = _write_result(prefix, doc)
    print(f"transformed state written to {state_path}; result to {path}")
    return 0


def _run_evolve(cfg, prefix, seed):
    psi0 = _build_initial_state(cfg)
    grid = psi0.grid
    p = cfg.params()
    V = _build_potential(cfg, grid)
    traj = evolve(p, V, psi0, cfg.evolution)

    rows = []
    state_files = []
    for k, (t, state) in enumerate(zip(traj.times, traj.states)):
        rows.append((t, total_mass(state), energy_like(p, V, state)))
        state_path = f"{prefix}_state_{k}.txt"
        write_state(state_path, state)
        state_files.append(os.path.basename(state_path))
    series_path = _write_series(prefix, seed, ("t", "norm", "energy"), rows)

    mass0 = total_mass(traj.states[0])
    mass1 = total_mass(traj.states[-1])
    doc = {"mode": "evolve", "seed": seed, "scheme": cfg.evolution.scheme,
           "params": _params_dict(p),
           "snapshots": len(traj.states),
           "t_final": float(traj.times[-1]),
           "mass_initial": mass0, "mass_final": mass1,
           "mass_drift": abs(mass1 - mass0) / mass0,
           "files": {"series": os.path.basename(series_path), "states": state_files}}
    path = _write_result(prefix, doc)
    print(f"evolved {len(traj.states)} snapshots to t = {traj.times[-1]:g}; result in {path}")
    return 0


def _run_commute(cfg, prefix, seed):
    psi0 = _build_initial_state(cfg)
    grid = psi0.grid
    V = _build_potential(cfg, grid)
    dg = cfg.dg
    report = commute_check((dg.hbar, dg.mass, dg.D, dg.Dprime * dg.c2),
                              V, psi0, cfg.evolution)
    p_lin = report.linear.params
    rows = []
    for t, state, err in zip(report.times, report.linear.states, report.l2_error):
        rows.append((t, total_mass(state), energy_like(p_lin, V, state), err))
    series_path = _write_series(prefix, seed, ("t", "norm", "energy", "l2_error"), rows)
    doc = {"mode": "commute", "seed": seed,
           "gauge": _gauge_dict(report.gauge),
           "params": _params_dict(from_dg(dg)),
           "primed_params": _params_dict(p_lin),
           "max_l2_error": report.max_error,
           "files": {"series": os.path.basename(series_path)}}
    path = _write_result(prefix, doc)
    print(f"commuting-diagram max discrepancy {report.max_error:.3e}; result in {path}")
    return 0


def _run_verify(cfg, prefix, seed):
    results = verification.run_all(seed=seed)
    all_passed = all(r.passed for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    doc = {"mode": "verify", "seed": seed, "all_passed": all_passed,
           "checks": [{"name": r.name, "passed": r.passed,
                       "max_ratio": float(r.max_ratio), "detail": r.detail}
                      for r in results]}
    path = _write_result(prefix, doc)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} checks passed; result in {path}")
    return 0 if all_passed else 1


_DISPATCH = {
    "invariants": _run_invariants,
    "classify": _run_classify,
    "transform": _run_transform,
    "evolve": _run_evolve,
    "commute": _run_commute,
    "verify": _run_verify,
}


def run(cfg: ExperimentConfig, seed: int = 0, output_dir: str | None = None) -> int:
    """Dispatch a validated config; returns the process exit status."""
    try:
        prefix = _resolve_prefix(cfg, output_dir)
        return _DISPATCH[cfg.mode](cfg, prefix, seed)
    except (ValidationError, ParseError, DegenerateFamily) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NodalState, Unstable, NotLinearizable) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dg-gauge",
        description="Run gauge-transformation experiments for the nonlinear family from a JSON config.")
    parser.add_argument("config", help="path to the JSON experiment description")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized verification (default 0)")
    parser.add_argument("--output", metavar="DIR", default=None,
                        help="directory to place outputs in (overrides the config prefix's directory)")
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text, base_dir=os.path.dirname(os.path.abspath(args.config)))
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg, seed=args.seed, output_dir=args.output)


if __name__ == "__main__":
    sys.exit(main())
