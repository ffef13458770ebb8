"""Disorder-ensemble orchestration: deterministic seeding, parameter sweeps,
aggregation, and CSV/JSON persistence.

Per-realization seeds are a pure function of (master seed, parameter index,
realization index), so results do not depend on worker count or completion
order, and realization streams extend prefix-consistently when the sample
count grows.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from .basis import enumerate_basis, reflection_action, antisymmetric_projector
from .operators import (build_clean_hamiltonian, build_hamiltonian,
                        build_observable, project_operator, sample_couplings)
from .spectral import (SpectralDecomposition, SpectralWindow, diagonalize,
                       eigenvalues_only, energy_density, level_spacing_ratio)
from .entanglement import (bipartition_table, eigenstate_entropies,
                           page_value)
from .dynamics import (TimeGrid, ee_trajectory, initial_vector,
                       make_initial_state, occupation_trajectory)
from .ethstats import OffdiagAccumulator, diag_fluctuations, matrix_elements

__all__ = [
    "ExperimentConfig",
    "EnsembleResult",
    "derive_rng",
    "run_experiment",
    "convergence_sweep",
    "parse_config_text",
]

KNOWN_TASKS = ("spectrum", "entanglement", "dynamics", "eth")
DEFAULT_MEMORY_CAP = 4_000_000_000  # bytes of dense eigensolver footprint


def derive_rng(master_seed: int, param_idx: int,
               realization_idx: int) -> np.random.Generator:
    """Counter-based per-realization stream."""
    ss = np.random.SeedSequence([int(master_seed), int(param_idx),
                                 int(realization_idx)])
    return np.random.Generator(np.random.PCG64(ss))


def estimate_memory_bytes(dim: int) -> int:
    """Dense matrix + eigenvectors + LAPACK workspace, roughly 3 copies."""
    return 3 * 8 * dim * dim


@dataclass
class ExperimentConfig:
    L: int = 6
    N: int = -1  # -1 means L // 2
    mode: str = "disordered"  # disordered | clean
    sweep: tuple = (2.0,)  # D/J values, or g_cl/J in clean mode
    samples: int = 10
    seed: int = 1234
    tasks: tuple = ("spectrum",)
    window: str = "middle-third"
    eth_delta_omega: float = 0.002
    eth_observable: str = "site_occupancy"  # observable for the ETH task
    dynamics_grid: str = "log"  # log | windows
    dynamics_t_max: float = 1e4
    dynamics_initial: str = "photon-odd-sites"
    page_samples: int = 1000
    out_dir: str = "out"
    workers: int = 1
    memory_cap: int = DEFAULT_MEMORY_CAP

    def __post_init__(self):
        if self.N == -1:
            self.N = self.L // 2
        if self.mode == "clean":
            self.samples = 1

    def validate(self) -> list:
        errors = []
        if self.L < 1:
            errors.append(f"model.L must be >= 1, got {self.L}")
        if self.N < 0:
            errors.append(f"model.N must be >= 0, got {self.N}")
        if self.mode not in ("disordered", "clean"):
            errors.append(f"model.mode must be disordered|clean, got "
                          f"{self.mode!r}")
        if self.mode == "disordered" and any(v < 0 for v in self.sweep):
            errors.append("model.D_over_J values must be non-negative")
        if self.mode == "clean" and any(v < 0 for v in self.sweep):
            errors.append("model.g_cl_over_J values must be non-negative")
        if not self.sweep:
            errors.append("sweep needs at least one parameter value")
        if self.samples < 1:
            errors.append(f"ensemble.samples must be >= 1, got {self.samples}")
        for t in self.tasks:
            if t not in KNOWN_TASKS:
                errors.append(f"unknown task {t!r}; known: "
                              f"{', '.join(KNOWN_TASKS)}")
        if self.window not in ("middle-third", "middle-four-fifths", "all"):
            errors.append(f"unknown window {self.window!r}")
        if self.eth_delta_omega <= 0:
            errors.append("eth.delta_omega must be positive")
        if self.dynamics_grid not in ("log", "windows"):
            errors.append(f"dynamics.grid must be log|windows, got "
                          f"{self.dynamics_grid!r}")
        return errors


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse the flat dotted-key config format (`key = value`, `#` comments).

    Keys: model.L, model.N, model.mode, model.D_over_J, model.g_cl_over_J,
    ensemble.samples, ensemble.seed, tasks, spectral.window,
    eth.delta_omega, eth.observable, dynamics.grid, dynamics.t_max,
    dynamics.initial_state, entanglement.page_samples, output.dir,
    run.workers, run.memory_cap.
    """
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected `key = value`, got "
                             f"{raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        kv[key] = val

    def floats(s):
        return tuple(float(x) for x in s.split(","))

    cfg = ExperimentConfig()
    cfg.N = -1
    mapping = {
        "model.L": ("L", int),
        "model.N": ("N", int),
        "model.mode": ("mode", str),
        "ensemble.samples": ("samples", int),
        "ensemble.seed": ("seed", int),
        "spectral.window": ("window", str),
        "eth.delta_omega": ("eth_delta_omega", float),
        "eth.observable": ("eth_observable", str),
        "dynamics.grid": ("dynamics_grid", str),
        "dynamics.t_max": ("dynamics_t_max", float),
        "dynamics.initial_state": ("dynamics_initial", str),
        "entanglement.page_samples": ("page_samples", int),
        "output.dir": ("out_dir", str),
        "run.workers": ("workers", int),
        "run.memory_cap": ("memory_cap", int),
    }
    errors = []
    for key, val in kv.items():
        if key in mapping:
            attr, conv = mapping[key]
            try:
                setattr(cfg, attr, conv(val))
            except ValueError:
                errors.append(f"{key}: cannot parse {val!r}")
        elif key == "model.D_over_J":
            cfg.mode = "disordered"
            cfg.sweep = floats(val)
        elif key == "model.g_cl_over_J":
            cfg.mode = "clean"
            cfg.sweep = floats(val)
        elif key == "tasks":
            cfg.tasks = tuple(t.strip() for t in val.split(",") if t.strip())
        else:
            errors.append(f"unknown config key {key!r}")
    if errors:
        raise ValueError("; ".join(errors))
    if cfg.N == -1:
        cfg.N = cfg.L // 2
    if cfg.mode == "clean":
        cfg.samples = 1
    return cfg


@dataclass
class EnsembleResult:
    config: ExperimentConfig
    records: list  # one dict per (param_idx, realization_idx), index-ordered
    aggregates: dict
    files: list = field(default_factory=list)
    wall_time: float = 0.0


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _window(cfg: ExperimentConfig) -> SpectralWindow:
    return SpectralWindow(cfg.window)


def _realization_record(cfg: ExperimentConfig, param_idx: int,
                        realization: int) -> dict:
    """Everything computed from one (parameter, realization) job."""
    basis = enumerate_basis(cfg.L, cfg.N)
    value = cfg.sweep[param_idx]
    rng = derive_rng(cfg.seed, param_idx, realization)
    subspace = None
    if cfg.mode == "disordered":
        profile = sample_couplings(value, cfg.L, rng, realization=realization)
        H = build_hamiltonian(basis, profile)
        H_static = H
        g_values = list(profile.g)
    else:
        H = build_clean_hamiltonian(basis, value)
        P = reflection_action(basis)
        subspace = antisymmetric_projector(basis, P)
        H_static = project_operator(H, subspace, label=f"{H.label}|antisym")
        g_values = [value] * cfg.L

    need_vectors = any(t in cfg.tasks
                       for t in ("entanglement", "dynamics", "eth"))
    rec = {"param_idx": param_idx, "realization": realization,
           "param_value": value, "g": g_values}

    spec = None
    if need_vectors:
        spec = diagonalize(H_static)
        ev = spec.eigenvalues
        if subspace is not None:
            # expand eigenvectors back to the full sector basis
            spec = SpectralDecomposition(
                eigenvalues=ev,
                eigenvectors=subspace @ spec.eigenvectors,
                basis=basis,
            )
    else:
        ev = eigenvalues_only(H_static)

    if "spectrum" in cfg.tasks:
        mean_r, r_vals, n_deg = level_spacing_ratio(ev, _window(cfg))
        rec["eigenvalues"] = ev
        rec["mean_r"] = mean_r
        rec["n_degenerate_gaps"] = n_deg

    if "entanglement" in cfg.tasks:
        table = bipartition_table(cfg.L, cfg.N)
        idx = _window(cfg).indices(ev)
        eps = energy_density(ev)
        S = eigenstate_entropies(spec, _window(cfg), table)
        rec["ee_indices"] = idx
        rec["ee_eps"] = eps[idx]
        rec["ee_values"] = S

    if "dynamics" in cfg.tasks:
        if cfg.dynamics_grid == "windows":
            grid = TimeGrid.three_windows()
        else:
            grid = TimeGrid.logarithmic(t_max=cfg.dynamics_t_max)
        init = make_initial_state(cfg.dynamics_initial, cfg.L, cfg.N)
        psi0 = initial_vector(init, basis)
        # dynamics always runs in the full sector: product initial states
        # have no definite reflection parity
        dyn_spec = spec if subspace is None else diagonalize(H)
        rec["traj_t"] = grid.times
        rec["traj_S"] = ee_trajectory(dyn_spec, psi0, grid, cfg.L, cfg.N)
        n_c, n_a = occupation_trajectory(dyn_spec, psi0, grid, basis)
        rec["traj_nc"] = n_c
        rec["traj_na"] = n_a

    if "eth" in cfg.tasks:
        obs = build_observable(basis, cfg.eth_observable,
                               site=cfg.L // 2 if
                               cfg.eth_observable != "kinetic" else None)
        # clean mode: eigenvectors were expanded back to the full sector,
        # so full-space observables give the projected matrix elements
        table = matrix_elements(obs, spec)
        acc = OffdiagAccumulator(delta_omega=cfg.eth_delta_omega,
                                 label=obs.label)
        acc.add_table(table)
        rec["eth_label"] = obs.label
        rec["eth_diag_eps"] = table.diag_eps
        rec["eth_diag_values"] = table.diag_values
        rec["eth_fluct"] = diag_fluctuations(table)
        rec["eth_bins"] = {int(b): row.tolist()
                           for b, row in acc._sums.items()}
        rec["eth_degenerate_pairs"] = table.n_degenerate_pairs
    return rec


def _job(args):
    cfg_dict, param_idx, realization = args
    cfg = ExperimentConfig(**cfg_dict)
    return _realization_record(cfg, param_idx, realization)


def _param_tag(cfg: ExperimentConfig, param_idx: int) -> str:
    prefix = "D" if cfg.mode == "disordered" else "g"
    return f"{prefix}{cfg.sweep[param_idx]:g}".replace(".", "p")


def _write_csv(path, header, rows):
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")


def run_experiment(cfg: ExperimentConfig) -> EnsembleResult:
    errors = cfg.validate()
    if errors:
        raise ValueError("invalid config: " + "; ".join(errors))
    dim = enumerate_basis(cfg.L, cfg.N).dim
    need = estimate_memory_bytes(dim)
    if need > cfg.memory_cap:
        raise MemoryError(
            f"dense diagonalization at dimension {dim} needs about "
            f"{need/1e9:.1f} GB, above the configured cap of "
            f"{cfg.memory_cap/1e9:.1f} GB"
        )
    t0 = time.time()
    os.makedirs(cfg.out_dir, exist_ok=True)

    jobs = [(asdict(cfg), p, r)
            for p in range(len(cfg.sweep)) for r in range(cfg.samples)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_job, jobs))
    else:
        records = [_job(j) for j in jobs]
    records.sort(key=lambda r: (r["param_idx"], r["realization"]))

    files = []
    aggregates = {"per_param": []}
    param_name = "D_over_J" if cfg.mode == "disordered" else "g_cl_over_J"
    for p, value in enumerate(cfg.sweep):
        tag = _param_tag(cfg, p)
        recs = [r for r in records if r["param_idx"] == p]
        agg = {param_name: value, "L": cfg.L, "N": cfg.N,
               "samples": len(recs)}

        if "spectrum" in cfg.tasks:
            rows = []
            for r in recs:
                eps = energy_density(r["eigenvalues"])
                for n, (e, x) in enumerate(zip(r["eigenvalues"], eps)):
                    rows.append((str(r["realization"]), str(n), _fmt(e),
                                 _fmt(x)))
            path = os.path.join(cfg.out_dir, f"spectrum_{tag}.csv")
            _write_csv(path, ("realization", "n", "E", "eps"), rows)
            files.append(path)
            rvals = np.array([r["mean_r"] for r in recs])
            agg["r_mean"] = float(rvals.mean())
            agg["r_stderr"] = (float(rvals.std(ddof=1) / np.sqrt(len(rvals)))
                               if len(rvals) > 1 else 0.0)

        if "entanglement" in cfg.tasks:
            rows = []
            for r in recs:
                for n, eps, s in zip(r["ee_indices"], r["ee_eps"],
                                     r["ee_values"]):
                    rows.append((str(r["realization"]), str(n), _fmt(eps),
                                 _fmt(s)))
            path = os.path.join(cfg.out_dir, f"ee_{tag}.csv")
            _write_csv(path, ("realization", "n", "eps", "S"), rows)
            files.append(path)
            means = np.array([r["ee_values"].mean() for r in recs])
            agg["S_mean"] = float(means.mean())
            agg["Delta_S"] = (float(means.std(ddof=1))
                              if len(means) > 1 else 0.0)

        if "dynamics" in cfg.tasks:
            t = recs[0]["traj_t"]
            mean_S = np.mean([r["traj_S"] for r in recs], axis=0)
            rows = []
            for r in recs:
                rows.extend((str(r["realization"]), _fmt(tv), _fmt(sv))
                            for tv, sv in zip(t, r["traj_S"]))
            rows.extend(("mean", _fmt(tv), _fmt(sv))
                        for tv, sv in zip(t, mean_S))
            path = os.path.join(cfg.out_dir, f"ee_traj_{tag}.csv")
            _write_csv(path, ("realization", "t", "S"), rows)
            files.append(path)

            mean_nc = np.mean([r["traj_nc"] for r in recs], axis=0)
            mean_na = np.mean([r["traj_na"] for r in recs], axis=0)
            rows = []
            for r in recs:
                for it, tv in enumerate(t):
                    for site in range(cfg.L):
                        rows.append((str(r["realization"]), _fmt(tv),
                                     str(site + 1),
                                     _fmt(r["traj_nc"][it, site]),
                                     _fmt(r["traj_na"][it, site])))
            for it, tv in enumerate(t):
                for site in range(cfg.L):
                    rows.append(("mean", _fmt(tv), str(site + 1),
                                 _fmt(mean_nc[it, site]),
                                 _fmt(mean_na[it, site])))
            path = os.path.join(cfg.out_dir, f"occupations_{tag}.csv")
            _write_csv(path, ("realization", "t", "site", "n_c", "n_a"), rows)
            files.append(path)

        if "eth" in cfg.tasks:
            label = recs[0]["eth_label"]
            rows = []
            for r in recs:
                rows.extend(
                    (str(r["realization"]), _fmt(eps), label, _fmt(v))
                    for eps, v in zip(r["eth_diag_eps"], r["eth_diag_values"])
                )
            path = os.path.join(cfg.out_dir, f"eth_diag_{tag}.csv")
            _write_csv(path, ("realization", "eps", "O_label", "value"), rows)
            files.append(path)

            acc = OffdiagAccumulator(delta_omega=cfg.eth_delta_omega,
                                     label=label)
            for r in recs:
                other = OffdiagAccumulator(delta_omega=cfg.eth_delta_omega,
                                           label=label)
                other._sums = {int(b): np.array(row)
                               for b, row in r["eth_bins"].items()}
                acc.merge(other)
            try:
                stats = acc.result()
            except ValueError:
                stats = None  # too few off-diagonal pairs at this size
            if stats is None:
                rows = []
            else:
                gam = stats.gamma()
                rows = [(label, _fmt(c), _fmt(cfg.L * c), _fmt(a2), _fmt(a1),
                         _fmt(g), str(int(n)))
                        for c, a2, a1, g, n in zip(stats.bin_centers,
                                                   stats.mean_abs2,
                                                   stats.mean_abs, gam,
                                                   stats.counts)]
            path = os.path.join(cfg.out_dir, f"eth_binned_{tag}.csv")
            _write_csv(path, ("O_label", "omega_bin_center", "L_omega",
                              "mean_abs2", "mean_abs", "gamma", "count"),
                       rows)
            files.append(path)
            agg["eth_fluct_mean"] = float(
                np.mean([r["eth_fluct"] for r in recs])
            )

        aggregates["per_param"].append(agg)

    wall = time.time() - t0
    meta = {
        "config": asdict(cfg),
        "version": __version__,
        "wall_time_s": wall,
        "aggregates": aggregates,
    }
    meta_path = os.path.join(cfg.out_dir, "metadata.json")
    with open(meta_path, "w") as f:
        json.dump(meta, f, indent=2, default=str)
    files.append(meta_path)

    # aggregate CSV across the sweep
    if "spectrum" in cfg.tasks:
        rows = [(
            _fmt(a[param_name]), str(cfg.L), _fmt(a["r_mean"]),
            _fmt(a["r_stderr"]), str(a["samples"]))
            for a in aggregates["per_param"]]
        path = os.path.join(cfg.out_dir, "r_aggregate.csv")
        _write_csv(path, (param_name, "L", "r_mean", "r_stderr", "samples"),
                   rows)
        files.append(path)
    if "entanglement" in cfg.tasks:
        basis = enumerate_basis(cfg.L, cfg.N)
        sp, sp_err = page_value(basis, cfg.page_samples,
                                derive_rng(cfg.seed, 999999, 0))
        rows = []
        for a in aggregates["per_param"]:
            a["S_P"] = sp
            rows.append((_fmt(a[param_name]), str(cfg.L), _fmt(a["S_mean"]),
                         _fmt(a["S_mean"] / sp if sp > 0 else 0.0),
                         _fmt(a["Delta_S"]), _fmt(sp), _fmt(sp_err)))
        path = os.path.join(cfg.out_dir, "ee_aggregate.csv")
        _write_csv(path, (param_name, "L", "S_mean", "S_over_SP", "Delta_S",
                          "S_P", "S_P_stderr"), rows)
        files.append(path)

    return EnsembleResult(config=cfg, records=records, aggregates=aggregates,
                          files=files, wall_time=wall)


def convergence_sweep(cfg: ExperimentConfig, counts) -> list:
    """Re-aggregate prefix subsets of one realization stream at increasing
    sample counts; larger counts strictly extend smaller ones."""
    counts = list(counts)
    if counts != sorted(counts):
        raise ValueError("sample counts must be ascending")
    base = ExperimentConfig(**{**asdict(cfg), "samples": counts[-1]})
    full = run_experiment(base)
    out = []
    for c in counts:
        sub = [r for r in full.records if r["realization"] < c]
        entry = {"samples": c, "flagged_single_sample": c == 1}
        if "spectrum" in cfg.tasks:
            rvals = np.array([r["mean_r"] for r in sub])
            entry["r_mean"] = float(rvals.mean())
            entry["r_stderr"] = (float(rvals.std(ddof=1) / np.sqrt(c))
                                 if c > 1 else float("nan"))
        if "entanglement" in cfg.tasks:
            means = np.array([r["ee_values"].mean() for r in sub])
            entry["S_mean"] = float(means.mean())
            entry["Delta_S"] = (float(means.std(ddof=1)) if c > 1
                                else float("nan"))
        if "dynamics" in cfg.tasks:
            entry["traj_t"] = sub[0]["traj_t"]
            entry["traj_S_mean"] = np.mean([r["traj_S"] for r in sub], axis=0)
        out.append(entry)
    return out
