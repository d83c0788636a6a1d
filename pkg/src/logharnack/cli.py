"""Experiment runner: parse a config file, execute checker grids, write
CSV reports and plot data.

The config is a single YAML file with nested key-value sections and a
schema_version field; every numeric output is serialised with 17
significant digits so reruns diff bit-exactly.  Grid points are expanded
in a fixed order, dispatched to a bounded worker pool, and the rows are
written in grid order, so the report is identical for any worker count.

Exit status is nonzero iff some inequality verdict is "violated".
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import coupling as cp
from . import verify as vf
from .diffusion import local_time_profile
from .estimators import generator_check, test_function_from_config
from .geometry import GeometryError, model_from_config
from .rng import derive_seed

__all__ = [
    "ConfigError",
    "PreconditionError",
    "ExperimentConfig",
    "CHECKS",
    "list_checks",
    "run",
    "main",
]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


class PreconditionError(ValueError):
    def __init__(self, job: str, msg: str):
        super().__init__(f"{job}: {msg}")
        self.job = job


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


# ----------------------------------------------------------------------
# Checker adapters: params dict -> reports / diagnostics / plot series
# ----------------------------------------------------------------------


@dataclass
class JobResult:
    reports: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    series: list = field(default_factory=list)  # (name, xval, yval)



def _domain_of(p, M, center_key):
    from .local_bounds import DomainSpec

    if "domain_radius" not in p:
        return None
    center = np.asarray(p[center_key], dtype=float)
    return DomainSpec(center, float(p["domain_radius"]))

def _f_of(params, key="f"):
    return test_function_from_config(params[key])


def _run_log_harnack(M, p, seed):
    rep = vf.check_log_harnack(
        M,
        np.asarray(p["x"], dtype=float),
        np.asarray(p["y"], dtype=float),
        float(p["T"]),
        _f_of(p),
        domain=_domain_of(p, M, "y"),
        n_paths=int(p.get("n_paths", 20000)),
        h=float(p.get("h", 1e-2)),
        master_seed=seed,
        use_oracle=bool(p.get("use_oracle", False)),
        include_correction=bool(p.get("correction", True)),
    )
    return JobResult(reports=[rep], series=[("log-harnack", float(p["T"]), rep.margin)])


def _run_log_harnack_local(M, p, seed):
    rep = vf.check_log_harnack_local(
        M,
        np.asarray(p["x"], dtype=float),
        np.asarray(p["y"], dtype=float),
        float(p["t"]),
        _f_of(p),
        n_paths=int(p.get("n_paths", 20000)),
        h=float(p.get("h", 1e-2)),
        master_seed=seed,
        use_oracle=bool(p.get("use_oracle", False)),
    )
    return JobResult(reports=[rep], series=[("log-harnack-local", float(p["t"]), rep.margin)])


def _run_gradient(M, p, seed):
    rep = vf.check_gradient(
        M,
        np.asarray(p["x"], dtype=float),
        float(p["T"]),
        _f_of(p),
        domain=_domain_of(p, M, "x"),
        n_paths=int(p.get("n_paths", 20000)),
        h=float(p.get("h", 1e-2)),
        master_seed=seed,
        use_oracle=bool(p.get("use_oracle", False)),
    )
    return JobResult(reports=[rep], series=[("gradient", float(p["T"]), rep.margin)])


def _run_harnack(M, p, seed):
    rep = vf.check_harnack(
        M,
        np.asarray(p["x"], dtype=float),
        np.asarray(p["y"], dtype=float),
        float(p["T"]),
        _f_of(p),
        domain=_domain_of(p, M, "y"),
        n_paths=int(p.get("n_paths", 20000)),
        h=float(p.get("h", 1e-2)),
        master_seed=seed,
        use_oracle=bool(p.get("use_oracle", False)),
    )
    return JobResult(reports=[rep], series=[("harnack", float(p["T"]), rep.margin)])


def _run_kernel_lower(M, p, seed):
    rep = vf.check_kernel_lower_bound(
        M, np.asarray(p["x"], dtype=float), np.asarray(p["y"], dtype=float), float(p["t"])
    )
    return JobResult(reports=[rep], series=[("kernel-lower", float(p["t"]), rep.margin)])


def _run_entropy(M, p, seed):
    rep = vf.check_entropy_bound(M, np.asarray(p["y"], dtype=float), float(p["t"]))
    return JobResult(reports=[rep], series=[("entropy", float(p["t"]), rep.margin)])


def _run_entropy_cost(M, p, seed):
    rep = vf.check_entropy_cost(M, float(p["t"]), eps_tilt=float(p.get("eps_tilt", 0.2)))
    return JobResult(reports=[rep], series=[("entropy-cost", float(p["t"]), rep.margin)])


def _run_coupling(M, p, seed):
    cfg = cp.standard_coupling_config(
        M,
        np.asarray(p["x"], dtype=float),
        np.asarray(p["y"], dtype=float),
        T=float(p["T"]),
        h=float(p.get("h", 1e-3)),
        domain=_domain_of(p, M, "y"),
    )
    diag = cp.run_coupling(M, cfg, int(p.get("n_paths", 20000)), seed)
    row = {"variant": M.variant, "x": json.dumps(list(map(float, np.atleast_1d(p["x"])))),
           "y": json.dumps(list(map(float, np.atleast_1d(p["y"])))), "T": float(p["T"]),
           "h": float(p.get("h", 1e-3))}
    row.update(diag.to_row())
    return JobResult(diagnostics=[row], series=[("coupling-entropy", float(p["T"]), diag.entropy_bound - diag.e_rlogr.mean)])


def _run_local_time(M, p, seed):
    t_grid = [float(t) for t in p["t_grid"]]
    ests, ref = local_time_profile(
        M,
        np.asarray(p["x"], dtype=float),
        t_grid,
        int(p.get("n_paths", 100000)),
        float(p.get("h", 1e-4)),
        seed,
        r=float(p.get("r", 1.0)),
    )
    c2_max = float(p.get("c2_max", 5.0))
    fitted = 0.0
    series = []
    for t, e, rv in zip(t_grid, ests, ref):
        excess = max(0.0, abs(e.mean - rv) - 3.0 * e.stderr)
        fitted = max(fitted, excess / t)
        series.append(("local-time", t, e.mean - rv))
    rep = vf.InequalityReport(
        "local-time",
        {"variant": M.variant, "x": list(np.atleast_1d(p["x"])), "t_grid": t_grid,
         "n_paths": int(p.get("n_paths", 100000)), "h": float(p.get("h", 1e-4)), "seed": seed},
        lhs=fitted,
        rhs=c2_max,
        notes="lhs = fitted C2 for |E l - 2 sqrt(t/pi)| <= C2 t + 3 se",
    )
    return JobResult(reports=[rep], series=series)


def _run_generator(M, p, seed):
    res = generator_check(
        M,
        np.asarray(p["x"], dtype=float),
        _f_of(p, "g"),
        n_paths=int(p.get("n_paths", 200000)),
        h=float(p.get("h", 2e-3)),
        master_seed=seed,
    )
    rep = vf.InequalityReport(
        "generator",
        {"variant": M.variant, "x": list(np.atleast_1d(p["x"])), "g": p["g"], "seed": seed},
        lhs=abs(res["slope"] - res["lg"]),
        rhs=0.05 * max(abs(res["lg"]), 1e-12),
        notes=f"slope={res['slope']:.6g} lg={res['lg']:.6g}",
    )
    series = [("generator", float(s), float(v)) for s, v in zip(res["s_grid"], res["values"])]
    return JobResult(reports=[rep], series=series)


def _run_sharpness(M, p, seed):
    rep = vf.sharpness_experiment(
        M,
        np.asarray(p["x"], dtype=float),
        _f_of(p),
        n_paths=int(p.get("n_paths", 1000000)),
        master_seed=seed,
    )
    series = [("sharpness-cbound", float(r["r"]), float(r["c_bound"])) for r in rep.rows]
    return JobResult(reports=rep.to_reports(), series=series)


CHECKS = {
    "log-harnack": {"run": _run_log_harnack, "required": ["x", "y", "T", "f"],
                    "optional": ["n_paths", "h", "use_oracle", "correction", "domain_radius"]},
    "log-harnack-local": {"run": _run_log_harnack_local, "required": ["x", "y", "t", "f"],
                          "optional": ["n_paths", "h", "use_oracle"]},
    "gradient": {"run": _run_gradient, "required": ["x", "T", "f"],
                 "optional": ["n_paths", "h", "use_oracle", "domain_radius"]},
    "harnack": {"run": _run_harnack, "required": ["x", "y", "T", "f"],
                "optional": ["n_paths", "h", "use_oracle", "domain_radius"]},
    "kernel-lower": {"run": _run_kernel_lower, "required": ["x", "y", "t"], "optional": []},
    "entropy": {"run": _run_entropy, "required": ["y", "t"], "optional": []},
    "entropy-cost": {"run": _run_entropy_cost, "required": ["t"], "optional": ["eps_tilt"]},
    "coupling-diagnostics": {"run": _run_coupling, "required": ["x", "y", "T"],
                             "optional": ["n_paths", "h", "domain_radius"]},
    "local-time": {"run": _run_local_time, "required": ["x", "t_grid"],
                   "optional": ["n_paths", "h", "r", "c2_max"]},
    "generator": {"run": _run_generator, "required": ["x", "g"], "optional": ["n_paths", "h"]},
    "sharpness": {"run": _run_sharpness, "required": ["x", "f"], "optional": ["n_paths"]},
}


def list_checks() -> str:
    """Stable machine-readable catalogue of checker tags and parameters."""
    lines = []
    for tag in sorted(CHECKS):
        spec = CHECKS[tag]
        lines.append(f"{tag}\trequired={','.join(spec['required'])}\toptional={','.join(spec['optional'])}")
    return "\n".join(lines)


# ----------------------------------------------------------------------
# Config parsing and validation
# ----------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    model: dict
    checks: list
    master_seed: int = 0
    output_dir: str = "out"
    workers: int = 1

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            raw = yaml.safe_load(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(str(path), "config file not found") from None
        except yaml.YAMLError as e:
            raise ConfigError(str(path), f"invalid YAML: {e}") from None
        if not isinstance(raw, dict):
            raise ConfigError(str(path), "config must be a mapping")
        if raw.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError("schema_version", f"must be {SCHEMA_VERSION}")
        if "model" not in raw:
            raise ConfigError("model", "missing model record")
        checks = raw.get("checks", [])
        if checks is None:
            checks = []
        cfg = cls(
            model=raw["model"],
            checks=checks,
            master_seed=int(raw.get("master_seed", 0)),
            output_dir=str(raw.get("output_dir", "out")),
            workers=int(raw.get("workers", 1)),
        )
        cfg.validate()
        return cfg

    def validate(self):
        try:
            model_from_config(self.model)
        except GeometryError as e:
            raise ConfigError("model", str(e)) from None
        for i, chk in enumerate(self.checks):
            where = f"checks[{i}]"
            if "tag" not in chk:
                raise ConfigError(where + ".tag", "missing tag")
            tag = chk["tag"]
            if tag not in CHECKS:
                raise ConfigError(where + ".tag", f"unknown check {tag!r}")
            grid = chk.get("grid", {})
            if not isinstance(grid, dict):
                raise ConfigError(where + ".grid", "grid must be a mapping of parameter lists")
            for req in CHECKS[tag]["required"]:
                if req not in grid:
                    raise ConfigError(f"{where}.grid.{req}", "required parameter missing")
            known = set(CHECKS[tag]["required"]) | set(CHECKS[tag]["optional"])
            for key, vals in grid.items():
                if key not in known:
                    raise ConfigError(f"{where}.grid.{key}", f"unknown parameter for {tag}")
                if not isinstance(vals, list) or len(vals) == 0:
                    raise ConfigError(f"{where}.grid.{key}", "grid values must be a non-empty list")
                for v in vals:
                    self._check_value(f"{where}.grid.{key}", key, v)

    @staticmethod
    def _check_value(where, key, v):
        if key in ("T", "t", "h", "domain_radius"):
            if not isinstance(v, (int, float)) or v <= 0:
                raise ConfigError(where, f"{key} must be a positive number, got {v!r}")
        if key == "n_paths":
            if not isinstance(v, int) or v < 1000:
                raise ConfigError(where, "n_paths must be an integer >= 1000")
        if key == "t_grid":
            if not isinstance(v, list) or any((not isinstance(t, (int, float))) or t <= 0 for t in v):
                raise ConfigError(where, "t_grid must be a list of positive times")
        if key in ("f", "g"):
            if not isinstance(v, dict) or "tag" not in v:
                raise ConfigError(where, "test functions are mappings with a 'tag'")

    def jobs(self):
        """Expand every check grid into (job_index, tag, params) in a
        fixed deterministic order."""
        out = []
        idx = 0
        for chk in self.checks:
            tag = chk["tag"]
            grid = chk.get("grid", {})
            keys = sorted(grid.keys())
            for combo in itertools.product(*(grid[k] for k in keys)):
                out.append((idx, tag, dict(zip(keys, combo))))
                idx += 1
        return out


# ----------------------------------------------------------------------
# Runner
# ----------------------------------------------------------------------

REPORT_COLUMNS = [
    "job_index",
    "tag",
    "config_hash",
    "lhs",
    "rhs",
    "margin",
    "band",
    "verdict",
    "master_seed",
    "constants",
    "config",
]

DIAG_COLUMNS = [
    "job_index",
    "variant",
    "x",
    "y",
    "T",
    "h",
    "e_r",
    "e_r_stderr",
    "e_rlogr",
    "e_rlogr_stderr",
    "entropy_bound",
    "coupling_weighted",
    "coupling_weighted_stderr",
    "coupled_fraction",
    "flagged_fraction",
    "max_rho_excess",
    "n",
    "seed",
    "master_seed",
]


def _csv_line(values) -> str:
    def quote(s):
        s = _fmt(s)
        if "," in s or '"' in s:
            s = '"' + s.replace('"', '""') + '"'
        return s

    return ",".join(quote(v) for v in values) + "\n"


def run(config_path, *, workers=None, seed=None, out=None) -> int:
    """Execute the experiment file; returns the process exit status."""
    cfg = ExperimentConfig.from_file(config_path)
    if seed is not None:
        cfg.master_seed = int(seed)
    if workers is not None:
        cfg.workers = int(workers)
    if out is not None:
        cfg.output_dir = str(out)
    M = model_from_config(cfg.model)
    jobs = cfg.jobs()

    def exec_job(job):
        idx, tag, params = job
        job_seed = derive_seed(cfg.master_seed, idx)
        try:
            return idx, CHECKS[tag]["run"](M, params, job_seed)
        except (ValueError, GeometryError) as e:
            raise PreconditionError(f"job {idx} ({tag})", str(e)) from e

    results = {}
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for idx, res in pool.map(exec_job, jobs):
                results[idx] = res
    else:
        for job in jobs:
            idx, res = exec_job(job)
            results[idx] = res

    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "plotdata").mkdir(exist_ok=True)

    violated = 0
    report_lines = [",".join(REPORT_COLUMNS) + "\n"]
    diag_lines = [",".join(DIAG_COLUMNS) + "\n"]
    series_acc = {}
    summary = {}
    for idx, tag, params in jobs:
        res = results[idx]
        for rep in res.reports:
            row = rep.to_row()
            row["job_index"] = idx
            row["master_seed"] = cfg.master_seed
            report_lines.append(_csv_line([row[c] for c in REPORT_COLUMNS]))
            summary.setdefault(rep.tag, {}).setdefault(rep.verdict, 0)
            summary[rep.tag][rep.verdict] += 1
            if rep.verdict == vf.VERDICT_VIOLATED:
                violated += 1
        for drow in res.diagnostics:
            drow = dict(drow)
            drow["job_index"] = idx
            drow["master_seed"] = cfg.master_seed
            diag_lines.append(_csv_line([drow.get(c, "") for c in DIAG_COLUMNS]))
        for name, xv, yv in res.series:
            series_acc.setdefault(name, []).append((xv, yv))

    (outdir / "report.csv").write_text("".join(report_lines))
    if len(diag_lines) > 1:
        (outdir / "diagnostics.csv").write_text("".join(diag_lines))
    for name, pairs in series_acc.items():
        lines = [f"{_fmt(a)}\t{_fmt(b)}\n" for a, b in pairs]
        (outdir / "plotdata" / f"{name}.tsv").write_text("".join(lines))

    lines = [f"model: {json.dumps(cfg.model, sort_keys=True)}",
             f"master_seed: {cfg.master_seed}", f"jobs: {len(jobs)}"]
    for tag in sorted(summary):
        counts = ", ".join(f"{k}={v}" for k, v in sorted(summary[tag].items()))
        lines.append(f"{tag}: {counts}")
    lines.append(f"violated: {violated}")
    (outdir / "summary.txt").write_text("\n".join(lines) + "\n")

    return 1 if violated else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="logharnack",
        description="Run inequality-verification experiments on model manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="YAML experiment file")
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", type=str, default=None)
    sub.add_parser("list-checks", help="print the checker catalogue")

    args = parser.parse_args(argv)
    if args.command == "list-checks":
        print(list_checks())
        return 0
    try:
        return run(args.config, workers=args.workers, seed=args.seed, out=args.out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except PreconditionError as e:
        print(f"precondition error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
