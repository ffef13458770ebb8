"""Command-line front end: config runs, figure presets, basis tools."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, replace

from .basis import enumerate_basis
from .ensemble import (ExperimentConfig, convergence_sweep,
                       parse_config_text, run_experiment)

SCHEMA_NOTE = """\
Output CSV schemas:
  spectrum_*.csv     realization,n,E,eps
  r_aggregate.csv    D_over_J|g_cl_over_J,L,r_mean,r_stderr,samples
  ee_*.csv           realization,n,eps,S
  ee_aggregate.csv   D_over_J|g_cl_over_J,L,S_mean,S_over_SP,Delta_S,S_P,S_P_stderr
  ee_traj_*.csv      realization|mean,t,S
  occupations_*.csv  realization|mean,t,site,n_c,n_a
  eth_diag_*.csv     realization,eps,O_label,value
  eth_binned_*.csv   O_label,omega_bin_center,L_omega,mean_abs2,mean_abs,gamma,count
  metadata.json      config echo, seeds, versions, timings
See SCHEMAS.md for field semantics.
"""


DESK_SIZES = (6, 8)
PAPER_SIZES = (6, 8, 10)


def _desk_samples(L: int, scale: str) -> int:
    if scale == "paper":
        return {6: 1000, 8: 400, 10: 50}.get(L, 50)
    return {6: 24, 8: 8}.get(L, 8)


def _preset_runs(name: str, scale: str):
    """Resolve a figure preset into (subdir, config) run specs.

    Desk scale shrinks to L <= 8 and reduced sample counts with identical
    output schemas; paper scale uses the full published sample schedule.
    """
    sizes = list(PAPER_SIZES) if scale == "paper" else list(DESK_SIZES)
    runs = []
    if name == "fig2-phase":
        sweep = ((0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0)
                 if scale == "paper" else (0.01, 1.0, 2.0, 10.0, 100.0))
        for L in sizes:
            runs.append((f"L{L}_disordered", ExperimentConfig(
                L=L, sweep=sweep, samples=_desk_samples(L, scale),
                tasks=("spectrum", "entanglement"))))
            runs.append((f"L{L}_clean", ExperimentConfig(
                L=L, mode="clean", sweep=sweep, samples=1,
                tasks=("spectrum", "entanglement"))))
    elif name == "fig3-ee-dynamics":
        for L in sizes:
            runs.append((f"L{L}", ExperimentConfig(
                L=L, sweep=(0.01, 2.0, 100.0),
                samples=_desk_samples(L, scale), tasks=("dynamics",),
                dynamics_initial="photon-odd-sites")))
    elif name == "fig4-initial-states":
        for kind in ("photon-odd-sites", "mixed-two-site", "atom-odd-sites"):
            L_values = [8] if kind == "mixed-two-site" else sizes[:2]
            for L in L_values:
                runs.append((f"{kind}_L{L}", ExperimentConfig(
                    L=L, sweep=(0.01,), samples=_desk_samples(L, scale),
                    tasks=("dynamics",), dynamics_initial=kind)))
    elif name == "fig5-occupations":
        for kind in ("photon-odd-sites", "mixed-two-site", "atom-odd-sites"):
            runs.append((kind, ExperimentConfig(
                L=8, sweep=(0.01,),
                samples=100 if scale == "paper" else 8,
                tasks=("dynamics",), dynamics_initial=kind,
                dynamics_grid="windows")))
            runs.append((f"{kind}_clean", ExperimentConfig(
                L=8, mode="clean", sweep=(0.01,), samples=1,
                tasks=("dynamics",), dynamics_initial=kind,
                dynamics_grid="windows")))
    elif name in ("fig6-diagonal", "fig8-offdiag", "fig9-gamma"):
        for L in sizes:
            for obs in ("site_occupancy", "kinetic"):
                runs.append((f"L{L}_{obs}", ExperimentConfig(
                    L=L, sweep=(0.01, 2.0, 100.0),
                    samples=_desk_samples(L, scale), tasks=("eth",),
                    eth_observable=obs)))
    elif name == "fig7-scaling":
        for L in sizes:
            for obs in ("site_occupancy", "kinetic"):
                runs.append((f"L{L}_{obs}", ExperimentConfig(
                    L=L, sweep=(2.0,), samples=_desk_samples(L, scale),
                    tasks=("eth",), eth_observable=obs)))
    elif name == "appendixA-convergence":
        counts = (400, 1000, 2000) if scale == "paper" else (4, 8, 16)
        runs.append(("convergence", ("convergence", ExperimentConfig(
            L=8 if scale == "paper" else 6, sweep=(0.01, 2.0, 100.0),
            tasks=("dynamics",), dynamics_initial="photon-odd-sites"),
            counts)))
    else:
        raise KeyError(name)
    return runs


PRESET_NAMES = ("fig2-phase", "fig3-ee-dynamics", "fig4-initial-states",
                "fig5-occupations", "fig6-diagonal", "fig7-scaling",
                "fig8-offdiag", "fig9-gamma", "appendixA-convergence")


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.samples is not None and cfg.mode != "clean":
        kw["samples"] = args.samples
    if args.workers is not None:
        kw["workers"] = args.workers
    return replace(cfg, **kw) if kw else cfg


def _out_root(args) -> str:
    if args.out:
        return args.out
    return os.environ.get("JCHSIM_OUT", "out")


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="jchsim",
        description="Exact diagonalization of disordered "
                    "Jaynes-Cummings-Hubbard chains.",
        epilog=SCHEMA_NOTE,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="override the master seed")
    parser.add_argument("--samples", type=int, default=None,
                        help="override the disorder sample count")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker processes (default 1)")
    parser.add_argument("--out", default=None,
                        help="output root (or env JCHSIM_OUT)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config file")
    p_run.add_argument("config")

    p_preset = sub.add_parser("preset", help="run a figure preset")
    p_preset.add_argument("name", choices=PRESET_NAMES)
    p_preset.add_argument("--scale", choices=("desk", "paper"),
                          default="desk")

    p_basis = sub.add_parser("basis", help="sector dimension and state dump")
    p_basis.add_argument("--L", type=int, required=True)
    p_basis.add_argument("--N", type=int, required=True)
    p_basis.add_argument("--dump", action="store_true",
                         help="print every basis state")

    p_val = sub.add_parser("validate", help="check a config file")
    p_val.add_argument("config")

    args = parser.parse_args(argv)

    if args.command == "basis":
        try:
            basis = enumerate_basis(args.L, args.N)
        except ValueError as err:
            return _fail(str(err))
        print(basis.dim)
        if args.dump:
            print(basis.dump())
        return 0

    if args.command == "validate":
        try:
            with open(args.config) as f:
                cfg = parse_config_text(f.read())
        except (OSError, ValueError) as err:
            return _fail(str(err))
        errors = cfg.validate()
        if errors:
            for e in errors:
                print(f"error: {e}", file=sys.stderr)
            return 1
        print("config ok")
        return 0

    if args.command == "run":
        try:
            with open(args.config) as f:
                cfg = parse_config_text(f.read())
        except (OSError, ValueError) as err:
            return _fail(str(err))
        errors = cfg.validate()
        if errors:
            return _fail("; ".join(errors))
        cfg = _apply_overrides(cfg, args)
        if args.out or "JCHSIM_OUT" in os.environ:
            cfg = replace(cfg, out_dir=os.path.join(_out_root(args),
                                                    cfg.out_dir))
        try:
            result = run_experiment(cfg)
        except (ValueError, MemoryError) as err:
            return _fail(str(err))
        print(f"wrote {len(result.files)} files to {cfg.out_dir} "
              f"in {result.wall_time:.1f}s")
        return 0

    if args.command == "preset":
        try:
            runs = _preset_runs(args.name, args.scale)
        except KeyError:
            return _fail(f"unknown preset {args.name!r}")
        root = os.path.join(_out_root(args), args.name)
        written = []
        for subdir, spec in runs:
            out_dir = os.path.join(root, subdir)
            if isinstance(spec, tuple) and spec[0] == "convergence":
                _, cfg, counts = spec
                cfg = _apply_overrides(replace(cfg, out_dir=out_dir), args)
                entries = convergence_sweep(cfg, counts)
                os.makedirs(out_dir, exist_ok=True)
                path = os.path.join(out_dir, "convergence.json")
                with open(path, "w") as f:
                    json.dump(
                        [{k: (v.tolist() if hasattr(v, "tolist") else v)
                          for k, v in e.items()} for e in entries],
                        f, indent=2)
                written.append(path)
                continue
            cfg = _apply_overrides(replace(spec, out_dir=out_dir), args)
            try:
                result = run_experiment(cfg)
            except (ValueError, MemoryError) as err:
                return _fail(f"preset {args.name} ({subdir}): {err}")
            missing = [p for p in result.files if not os.path.exists(p)]
            if missing:
                return _fail(f"preset {args.name} ({subdir}) did not produce "
                             f"{missing}")
            written.extend(result.files)
        manifest = os.path.join(root, "manifest.json")
        with open(manifest, "w") as f:
            json.dump({"preset": args.name, "scale": args.scale,
                       "files": written}, f, indent=2)
        print(f"preset {args.name}: {len(written)} files under {root}")
        return 0

    return _fail("no command given")  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
