"""Declarative experiment runner.

Config files are flat `key = value` text (one pair per line, `#` comments).
Every run emits self-describing CSV: `# key=value` header lines for the full
config plus `entropy_base=e`, then a header row and 17-significant-digit
values in ascending time order.  Identical configs produce byte-identical
files.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import dataclass, fields, replace
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import analysis, basis, dynamics, hamiltonian
from .analysis import EETimeSeries, PTDegeneracyError
from .dynamics import KrylovConvergenceError, QuenchSpec

EXPERIMENTS = ("quench", "spectrum", "sweep", "collapse", "ptcoeff", "fragments")

CONFIG_KEYS = (
    "experiment", "L", "sector", "c", "perturbation", "lambda", "V",
    "epsilon", "init", "seed", "evolver", "t_max", "n_times", "spacing",
    "cut", "out_dir", "lambda_list", "v_list", "targets",
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    experiment: str = ""
    L: int = 0
    sector: str = ""
    c: str = ""
    perturbation: str = "none"
    lam: float = 0.0
    V: float = 0.0
    epsilon: float = 0.0
    init: str = "random_product"
    seed: int = 0
    evolver: str = "dense"
    t_max: float = 1e3
    n_times: int = 200
    spacing: str = "log"
    cut: int = -1          # -1 means mid-chain default
    out_dir: str = "."
    lambda_list: tuple[float, ...] = ()
    v_list: tuple[float, ...] = ()
    targets: tuple[str, ...] = ()

    def as_header_dict(self) -> dict[str, str]:
        return {
            "experiment": self.experiment,
            "L": str(self.L),
            "sector": self.sector,
            "c": self.c,
            "perturbation": self.perturbation,
            "lambda": fmt(self.lam),
            "V": fmt(self.V),
            "epsilon": fmt(self.epsilon),
            "init": self.init,
            "seed": str(self.seed),
            "evolver": self.evolver,
            "t_max": fmt(self.t_max),
            "n_times": str(self.n_times),
            "spacing": self.spacing,
            "cut": str(self.cut),
            "out_dir": self.out_dir,
            "lambda_list": ",".join(fmt(x) for x in self.lambda_list),
            "v_list": ",".join(fmt(x) for x in self.v_list),
            "targets": ",".join(self.targets),
        }


def fmt(x: float) -> str:
    return f"{x:.17g}"


_PARSERS = {
    "experiment": str, "sector": str, "c": str, "perturbation": str,
    "init": str, "evolver": str, "spacing": str, "out_dir": str,
    "L": int, "seed": int, "n_times": int, "cut": int,
    "lambda": float, "V": float, "epsilon": float, "t_max": float,
}
_KEY_TO_FIELD = {"lambda": "lam"}


def parse_config(path: str | Path) -> RunConfig:
    cfg = RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in ("lambda_list", "v_list"):
                setattr(cfg, key, tuple(float(v) for v in value.split(",") if v.strip()))
            elif key == "targets":
                cfg.targets = tuple(v.strip() for v in value.split(",") if v.strip())
            else:
                setattr(cfg, _KEY_TO_FIELD.get(key, key), _PARSERS[key](value))
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    _validate(cfg, path)
    return cfg


def _validate(cfg: RunConfig, path) -> None:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"{path}: experiment must be one of {EXPERIMENTS}")
    if cfg.L < 1:
        raise ConfigError(f"{path}: L must be a positive integer")
    if cfg.experiment != "fragments" and not cfg.sector:
        raise ConfigError(f"{path}: sector is required for {cfg.experiment}")
    for name in ("sector", "c"):
        value = getattr(cfg, name)
        if value:
            try:
                signs = basis.sector_from_string(value)
            except ValueError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
            if len(signs) != cfg.L:
                raise ConfigError(f"{path}: {name} length {len(signs)} != L={cfg.L}")
    if cfg.perturbation not in ("none",) + hamiltonian.PERTURBATION_KINDS:
        raise ConfigError(f"{path}: unknown perturbation {cfg.perturbation!r}")
    if cfg.init not in ("random_product", "sector_ground"):
        raise ConfigError(f"{path}: init must be random_product or sector_ground")
    if cfg.experiment in ("sweep", "collapse") and not (cfg.lambda_list and cfg.v_list):
        raise ConfigError(f"{path}: {cfg.experiment} needs lambda_list and v_list")
    if cfg.experiment == "ptcoeff" and not cfg.targets:
        raise ConfigError(f"{path}: ptcoeff needs targets")
    for t in cfg.targets:
        if len(t) != 2 * cfg.L or not set(t) <= {"0", "1"}:
            raise ConfigError(f"{path}: target {t!r} is not a {2 * cfg.L}-bit string")


def to_quench_spec(cfg: RunConfig) -> QuenchSpec:
    return QuenchSpec(
        L=cfg.L,
        sector=basis.sector_from_string(cfg.sector),
        init_kind=cfg.init,
        seed=cfg.seed,
        perturbation=None if cfg.perturbation == "none" else cfg.perturbation,
        lam=cfg.lam,
        V=cfg.V,
        c=basis.sector_from_string(cfg.c) if cfg.c else None,
        epsilon=cfg.epsilon,
        evolver=cfg.evolver,
        t_max=cfg.t_max,
        n_times=cfg.n_times,
        spacing=cfg.spacing,
        cut=None if cfg.cut < 0 else cfg.cut,
    )


# -- CSV i/o -----------------------------------------------------------------

def _write_csv(path: Path, cfg: RunConfig, columns: list[str], rows) -> None:
    lines = [f"# {k}={v}" for k, v in cfg.as_header_dict().items()]
    lines.append("# entropy_base=e")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def write_series_csv(path: Path, cfg: RunConfig, series: EETimeSeries) -> None:
    norm = series.norm_errors if series.norm_errors is not None else np.zeros_like(series.times)
    rows = zip(series.times, series.entropies, norm)
    _write_csv(path, cfg, ["time", "entropy", "norm_error"], rows)


def read_series_csv(path: str | Path) -> EETimeSeries:
    """Load a quench CSV back into an EETimeSeries."""
    meta: dict[str, str] = {}
    times, entropies, norms = [], [], []
    header = None
    for raw in Path(path).read_text().splitlines():
        if raw.startswith("#"):
            key, _, value = raw[1:].strip().partition("=")
            meta[key] = value
            continue
        if header is None:
            header = raw.split(",")
            continue
        vals = raw.split(",")
        times.append(float(vals[0]))
        entropies.append(float(vals[1]))
        norms.append(float(vals[2]) if len(vals) > 2 else 0.0)
    if header is None:
        raise ValueError(f"{path}: no data rows")
    return EETimeSeries(
        times=np.array(times),
        entropies=np.array(entropies),
        metadata=meta,
        norm_errors=np.array(norms),
    )


def _series_name(cfg: RunConfig, lam: float, V: float) -> str:
    return (
        f"quench_L{cfg.L}_{cfg.sector}_{cfg.perturbation}"
        f"_lam{lam:g}_V{V:g}_seed{cfg.seed}.csv"
    )


# -- experiments ---------------------------------------------------------------

def _run_one(args) -> str:
    cfg, lam, V = args
    point = replace(cfg, lam=lam, V=V)
    series = dynamics.run_quench(to_quench_spec(point))
    out = Path(cfg.out_dir) / _series_name(cfg, lam, V)
    write_series_csv(out, point, series)
    return str(out)


def run_quench_experiment(cfg: RunConfig) -> list[str]:
    return [_run_one((cfg, cfg.lam, cfg.V))]


def run_sweep(cfg: RunConfig, jobs: int = 1) -> list[str]:
    points = [(cfg, lam, V) for lam, V in itertools.product(cfg.lambda_list, cfg.v_list)]
    if jobs > 1:
        with Pool(jobs) as pool:
            return pool.map(_run_one, points)
    return [_run_one(p) for p in points]


def run_spectrum(cfg: RunConfig) -> list[str]:
    spec = to_quench_spec(cfg)
    h = dynamics.build_quench_hamiltonian(spec)
    report = analysis.spectrum_report(h, cfg.L)
    rows = [
        (e, report.sector_string(k), float(report.dominant_weights[k]))
        for k, e in enumerate(report.eigenvalues)
    ]
    out = Path(cfg.out_dir) / f"spectrum_L{cfg.L}_V{cfg.V:g}_c{cfg.c or 'none'}.csv"
    _write_csv(out, cfg, ["energy", "dominant_sector", "weight"], rows)
    return [str(out)]


def run_collapse(cfg: RunConfig, jobs: int = 1) -> list[str]:
    series_list = []
    for lam, V in itertools.product(cfg.lambda_list, cfg.v_list):
        point = replace(cfg, lam=lam, V=V)
        series_list.append(dynamics.run_quench(to_quench_spec(point)))
    reports = {
        k: analysis.rescale_collapse(series_list, value_exponent=2, time_exponent=k)
        for k in range(5)
    }
    best = min(reports, key=lambda k: reports[k].max_ratio)
    rows = [
        (float(k), reports[k].max_ratio, str(int(reports[k].collapsed)))
        for k in sorted(reports)
    ]
    out_dir = Path(cfg.out_dir)
    summary = out_dir / f"collapse_summary_L{cfg.L}_{cfg.sector}_{cfg.perturbation}.csv"
    _write_csv(summary, cfg, ["time_exponent", "max_ratio", "collapsed"], rows)
    written = [str(summary)]
    report = reports[best]
    for series, curve in zip(series_list, report.curves):
        lam, V = series.lam, series.V
        path = out_dir / f"collapse_curve_k{best}_lam{lam:g}_V{V:g}.csv"
        point = replace(cfg, lam=lam, V=V)
        _write_csv(
            path, point, ["rescaled_time", "rescaled_entropy"],
            zip(report.grid, curve),
        )
        written.append(str(path))
    return written


def run_ptcoeff(cfg: RunConfig) -> list[str]:
    targets = [basis.parse_state_string(t) for t in cfg.targets]
    series = dynamics.run_quench(to_quench_spec(cfg), targets=targets)
    columns = ["time"] + [f"coeff_abs_{t}" for t in cfg.targets]
    rows = (
        (t, *np.abs(series.coefficients[k]))
        for k, t in enumerate(series.times)
    )
    out = Path(cfg.out_dir) / (
        f"ptcoeff_L{cfg.L}_{cfg.sector}_lam{cfg.lam:g}_V{cfg.V:g}.csv"
    )
    _write_csv(out, cfg, columns, rows)
    return [str(out)]


def run_fragments(cfg: RunConfig) -> list[str]:
    sectors = (
        [basis.sector_from_string(cfg.sector)] if cfg.sector else basis.all_sectors(cfg.L)
    )
    c = basis.sector_from_string(cfg.c) if cfg.c else None
    columns = ["sector", "dimension", "strings", "n_strings"]
    if c is not None:
        columns.append("plateau")
    rows = []
    for sector in sectors:
        strings = basis.string_decomposition(sector)
        row = [
            basis.sector_to_string(sector),
            str(2 ** cfg.L),
            ";".join(str(length) for _, length in strings),
            str(len(strings)),
        ]
        if c is not None:
            row.append(str(sum(ci * si for ci, si in zip(c, sector))))
        rows.append(row)
    out = Path(cfg.out_dir) / f"fragments_L{cfg.L}.csv"
    _write_csv(out, cfg, columns, rows)
    return [str(out)]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zenoladder",
        description="Run a declarative ladder-quench experiment from a config file.",
    )
    parser.add_argument("config", help="flat key=value config file")
    parser.add_argument("--jobs", type=int, default=1, help="sweep worker count")
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if cfg.experiment == "quench":
            written = run_quench_experiment(cfg)
        elif cfg.experiment == "spectrum":
            written = run_spectrum(cfg)
        elif cfg.experiment == "sweep":
            written = run_sweep(cfg, jobs=args.jobs)
        elif cfg.experiment == "collapse":
            written = run_collapse(cfg, jobs=args.jobs)
        elif cfg.experiment == "ptcoeff":
            written = run_ptcoeff(cfg)
        else:
            written = run_fragments(cfg)
    except (KrylovConvergenceError, PTDegeneracyError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
