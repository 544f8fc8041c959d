"""Experiment specs, job dispatch and reproducible CSV/JSON output.

Config files are INI with three sections::

    [system]            ; SystemConfig fields, xi_*_db accepts "perfect"
    alpha1 = 0.9
    [grid]              ; sweep axes; "a:b:step" inclusive ranges or comma lists
    rho_s_db = 0:40:5
    alpha1, beta1 = (0.8, 0.2), (0.9, 0.1)   ; zipped axes vary together
    [run]
    seed = 2020
    trials = 1000000    ; SINR-level trials per point (EC / OP)
    symbols = 0         ; QPSK frames per point for BER (0 disables)
    workers = 1

Every output starts with ``#`` lines that embed the tool version and the
fully resolved INI, so feeding those lines back reproduces the file.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import logging
import math
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from dfnoma import __version__, capacity
from dfnoma.channel import SeedSpec
from dfnoma.config import (
    ConfigError,
    SystemConfig,
    config_from_mapping,
    derive_budget,
    format_field,
    parse_field,
    validate,
)
from dfnoma.fairness import (
    KpiReport,
    compare_schemes,
    deviation,
    fairness,
    grid_points,
    ratio_estimate,
    scheme_pair,
    sweet_spot,
)
from dfnoma.montecarlo import binomial_std_err, mc_ber, mc_rates_outage

log = logging.getLogger(__name__)

JOBS = ("analyze", "simulate", "sweep", "compare", "validate")
BER_FLOOR = 1e-4
EC_ABS_TOL = 0.02
SIGMAS = 3.0

_RUN_DEFAULTS = {"seed": 2020, "trials": 1_000_000, "symbols": 0, "workers": 1}


class ValidationFailure(RuntimeError):
    pass


@dataclass
class ExperimentSpec:
    job: str
    config: SystemConfig
    grid: dict[Any, list[Any]] = field(default_factory=dict)
    seed: int = _RUN_DEFAULTS["seed"]
    trials: int = _RUN_DEFAULTS["trials"]
    symbols: int = _RUN_DEFAULTS["symbols"]
    workers: int = _RUN_DEFAULTS["workers"]
    out: Path | None = None
    fmt: str = "csv"

    def points(self) -> list[SystemConfig]:
        if not self.grid:
            return [validate(self.config)]
        return grid_points(self.grid, self.config)


# -- parsing ---------------------------------------------------------------------

_RANGE = re.compile(r"^\s*(-?[\d.eE+-]+)\s*:\s*(-?[\d.eE+-]+)\s*:\s*([\d.eE+-]+)\s*$")


def parse_axis_values(axis: str, text: str) -> list[Any]:
    text = text.strip()
    if not text:
        return []
    m = _RANGE.match(text)
    if m:
        start, stop, step = (float(g) for g in m.groups())
        if step <= 0:
            raise ConfigError(axis, "range step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [float(np.round(start + i * step, 10)) for i in range(count)]
    return [parse_field(axis, item) for item in text.split(",") if item.strip()]


def parse_zipped_values(names: tuple[str, ...], text: str) -> list[tuple[Any, ...]]:
    groups = re.findall(r"\(([^)]*)\)", text)
    if not groups and text.strip():
        raise ConfigError(",".join(names), f"expected parenthesised tuples, got {text!r}")
    values = []
    for g in groups:
        items = [s for s in g.split(",") if s.strip()]
        if len(items) != len(names):
            raise ConfigError(",".join(names), f"tuple ({g}) does not match {len(names)} axes")
        values.append(tuple(parse_field(n, s) for n, s in zip(names, items)))
    return values


def parse_grid(section: Mapping[str, str]) -> dict[Any, list[Any]]:
    grid: dict[Any, list[Any]] = {}
    for key, text in section.items():
        names = tuple(k.strip() for k in key.split(","))
        if len(names) == 1:
            grid[names[0]] = parse_axis_values(names[0], text)
        else:
            grid[names] = parse_zipped_values(names, text)
    return grid


def _reader() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    return parser


def preset_path(name: str) -> Path:
    ref = resources.files("dfnoma") / "presets" / f"{name}.ini"
    if not ref.is_file():
        raise ConfigError("preset", f"no bundled preset named {name!r}")
    return Path(str(ref))


def list_presets() -> list[str]:
    folder = resources.files("dfnoma") / "presets"
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".ini"))


def load_spec(job: str, text: str | None = None, overrides: Sequence[str] = (),
              **run_overrides: Any) -> ExperimentSpec:
    """Build an ExperimentSpec from INI text, ``key=value`` overrides and run flags.

    Overrides address ``[system]`` keys by bare name, ``grid.<axis>`` and
    ``run.<key>`` otherwise.
    """
    if job not in JOBS:
        raise ConfigError("job", f"unknown job {job!r}")
    parser = _reader()
    if text:
        parser.read_string(text)
    system = dict(parser["system"]) if parser.has_section("system") else {}
    grid_text = dict(parser["grid"]) if parser.has_section("grid") else {}
    run = dict(parser["run"]) if parser.has_section("run") else {}

    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, value = (s.strip() for s in item.split("=", 1))
        if key.startswith("grid."):
            grid_text[key[5:]] = value
        elif key.startswith("run."):
            run[key[4:]] = value
        else:
            system[key.removeprefix("system.")] = value

    for key, value in run_overrides.items():
        if value is not None:
            run[key] = value
    unknown = set(run) - set(_RUN_DEFAULTS)
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown [run] key")
    try:
        run_values = {k: int(run.get(k, d)) for k, d in _RUN_DEFAULTS.items()}
    except ValueError as exc:
        raise ConfigError("run", str(exc)) from None

    return ExperimentSpec(
        job=job,
        config=config_from_mapping(system),
        grid=parse_grid(grid_text),
        **run_values,
    )


def spec_to_ini(spec: ExperimentSpec) -> str:
    lines = ["[system]"]
    for name, value in vars(spec.config).items():
        lines.append(f"{name} = {format_field(name, value)}")
    lines.append("[grid]")
    for key, values in spec.grid.items():
        if isinstance(key, tuple):
            tuples = ", ".join("(" + ", ".join(format_field(n, v) for n, v in zip(key, vals)) + ")"
                               for vals in values)
            lines.append(f"{', '.join(key)} = {tuples}")
        else:
            lines.append(f"{key} = {', '.join(format_field(key, v) for v in values)}")
    lines.append("[run]")
    for key in _RUN_DEFAULTS:
        lines.append(f"{key} = {getattr(spec, key)}")
    return "\n".join(lines) + "\n"


def spec_from_output(text: str, job: str | None = None) -> ExperimentSpec:
    """Recover the spec embedded in the ``#`` header of an output file."""
    if text.lstrip().startswith("{"):
        meta = json.loads(text)["meta"]
        return load_spec(job or meta["job"], meta["config_ini"])
    header = []
    found_job = None
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        body = line[1:].removeprefix(" ")
        if body.startswith("job: "):
            found_job = body[5:].strip()
        elif body.startswith("| "):
            header.append(body[2:])
    return load_spec(job or found_job, "\n".join(header))


# -- jobs --------------------------------------------------------------------------

def _config_columns(cfg: SystemConfig) -> dict[str, Any]:
    return {name: format_field(name, value) for name, value in vars(cfg).items()}


def _analytic_columns(report: KpiReport, cfg: SystemConfig) -> dict[str, Any]:
    budget = derive_budget(cfg)
    b1, b2, eta1, eta2, _ = capacity.ec_bound(cfg, budget)
    return {
        "ec_1": report.ec_1, "ec_2": report.ec_2, "ec_sum": report.ec_1 + report.ec_2,
        "bound_1": b1, "bound_2": b2, "eta_1": eta1, "eta_2": eta2,
        "op_1": report.op_1, "op_2": report.op_2,
        "bep_1": report.bep_1, "bep_2": report.bep_2,
        "pf_c": report.pf_c, "pf_o": report.pf_o, "pf_e": report.pf_e,
        "dev_c": report.dev_c, "dev_o": report.dev_o, "dev_e": report.dev_e,
        "flags": ";".join(report.flags),
    }


def _point_seed(spec: ExperimentSpec, index: int) -> SeedSpec:
    return SeedSpec(spec.seed, index)


def _mc_columns(spec: ExperimentSpec, cfg: SystemConfig, index: int) -> dict[str, Any]:
    budget = derive_budget(cfg)
    seed = _point_seed(spec, index)
    cols: dict[str, Any] = {}
    if spec.trials > 0:
        ro = mc_rates_outage(cfg, budget, spec.trials, seed, workers=spec.workers)
        for name in ("ec_1", "ec_2", "op_1", "op_2"):
            est = getattr(ro, name)
            cols[f"mc_{name}"], cols[f"mc_{name}_se"] = est.value, est.std_err
        cols["mc_pf_c"], cols["mc_pf_c_se"] = ratio_estimate(ro.ec_1, ro.ec_2)
        cols["mc_pf_o"], cols["mc_pf_o_se"] = ratio_estimate(ro.op_1, ro.op_2)
    if spec.symbols > 0:
        e1, e2 = mc_ber(cfg, budget, spec.symbols, SeedSpec(spec.seed, 1_000_000 + index),
                        workers=spec.workers)
        cols["mc_bep_1"], cols["mc_bep_1_se"] = e1.value, e1.std_err
        cols["mc_bep_2"], cols["mc_bep_2_se"] = e2.value, e2.std_err
        cols["mc_pf_e"], cols["mc_pf_e_se"] = ratio_estimate(e1, e2)
    return cols


def _kpi_rows(spec: ExperimentSpec, with_mc: bool) -> list[dict[str, Any]]:
    rows = []
    points = spec.points()
    reports = [fairness(p) for p in points]
    best = set()
    if spec.job == "sweep":
        by_scheme: dict[str, list[int]] = {}
        for i, r in enumerate(reports):
            by_scheme.setdefault(r.scheme.value, []).append(i)
        for idx in by_scheme.values():
            chosen = sweet_spot([reports[i] for i in idx])
            best.add(idx[[reports[i] for i in idx].index(chosen)])
    for i, (cfg, report) in enumerate(zip(points, reports)):
        row = {"point": i, **_config_columns(cfg), **_analytic_columns(report, cfg)}
        if spec.job == "sweep":
            row["grid_argmin_dev"] = int(i in best)
        if with_mc:
            row.update(_mc_columns(spec, cfg, i))
        rows.append(row)
    return rows


def _compare_rows(spec: ExperimentSpec) -> list[dict[str, Any]]:
    grid = {k: v for k, v in spec.grid.items() if k != "scheme"}
    points = grid_points(grid, spec.config) if grid else [validate(spec.config)]
    rows = []
    for i, cfg in enumerate(points):
        r_cfg, c_cfg = scheme_pair(cfg)
        rep = compare_schemes((r_cfg, c_cfg))
        cols = _config_columns(cfg)
        cols.pop("scheme")
        rows.append({
            "point": i, **cols,
            "capacity_R_DFNOMA": rep.worst_first.capacity,
            "capacity_C_DFNOMA": rep.worst_second.capacity,
            "outage_R_DFNOMA": rep.worst_first.outage,
            "outage_C_DFNOMA": rep.worst_second.outage,
            "error_R_DFNOMA": rep.worst_first.error,
            "error_C_DFNOMA": rep.worst_second.error,
            "best_capacity": rep.best_capacity,
            "best_outage": rep.best_outage,
            "best_error": rep.best_error,
            "winner_capacity": rep.winner_capacity,
            "winner_outage": rep.winner_outage,
            "winner_error": rep.winner_error,
        })
    return rows


def _check(kind: str, analytic: float, est: float, se: float, tol: float) -> dict[str, Any]:
    diff = est - analytic
    return {f"{kind}_z": diff / se if se > 0 else (0.0 if diff == 0 else math.inf),
            f"{kind}_ok": int(abs(diff) <= tol)}


def _validate_rows(spec: ExperimentSpec) -> list[dict[str, Any]]:
    rows = _kpi_rows(spec, with_mc=True)
    for row in rows:
        verdict = True
        for user in (1, 2):
            if spec.trials > 0:
                p = row[f"op_{user}"]
                se = binomial_std_err(p, spec.trials)
                row.update(_check(f"op_{user}", p, row[f"mc_op_{user}"], se, SIGMAS * se))
                c_se = row[f"mc_ec_{user}_se"]
                row.update(_check(f"ec_{user}", row[f"ec_{user}"], row[f"mc_ec_{user}"], c_se,
                                  max(EC_ABS_TOL, SIGMAS * c_se)))
                verdict &= bool(row[f"op_{user}_ok"] and row[f"ec_{user}_ok"])
            if spec.symbols > 0 and row[f"bep_{user}"] is not None:
                p = row[f"bep_{user}"]
                se = binomial_std_err(p, 2 * spec.symbols)
                if p >= BER_FLOOR:
                    row.update(_check(f"bep_{user}", p, row[f"mc_bep_{user}"], se, SIGMAS * se))
                    verdict &= bool(row[f"bep_{user}_ok"])
        row["pass"] = int(verdict)
    return rows


def execute(spec: ExperimentSpec) -> list[dict[str, Any]]:
    if spec.job in ("analyze", "sweep"):
        if spec.job == "sweep" and not spec.grid:
            raise ConfigError("grid", "sweep needs at least one grid axis")
        return _kpi_rows(spec, with_mc=False)
    if spec.job == "simulate":
        return _kpi_rows(spec, with_mc=True)
    if spec.job == "compare":
        return _compare_rows(spec)
    return _validate_rows(spec)


# -- writing -----------------------------------------------------------------------

def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def _columns(rows: Iterable[Mapping[str, Any]]) -> list[str]:
    cols: list[str] = []
    for row in rows:
        cols.extend(k for k in row if k not in cols)
    return cols


def render(spec: ExperimentSpec, rows: list[dict[str, Any]]) -> str:
    ini = spec_to_ini(spec)
    if spec.fmt == "json":
        meta = {"tool": f"dfnoma {__version__}", "job": spec.job, "seed": spec.seed, "config_ini": ini}
        payload = {"meta": meta, "rows": [{k: _json_value(v) for k, v in r.items()} for r in rows]}
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# tool: dfnoma {__version__}\n# job: {spec.job}\n# seed: {spec.seed}\n")
    for line in ini.splitlines():
        buf.write(f"# | {line}\n")
    cols = _columns(rows)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in cols])
    return buf.getvalue()


def run(spec: ExperimentSpec) -> tuple[int, list[dict[str, Any]], str]:
    """Execute a job and write its output; returns (exit status, rows, rendered text)."""
    rows = execute(spec)
    text = render(spec, rows)
    if spec.out is not None:
        Path(spec.out).write_text(text, encoding="utf-8")
    status = 0
    if spec.job == "validate":
        failed = [r for r in rows if not r["pass"]]
        for r in failed:
            log.error("validation failed at point %d: %s", r["point"],
                      {k: r[k] for k in r if k.endswith("_z")})
        status = 1 if failed else 0
    return status, rows, text


def summarize_sweep(rows: Sequence[Mapping[str, Any]]) -> str:
    lines = []
    for r in rows:
        if r.get("grid_argmin_dev"):
            devs = [deviation(float(r[k])) for k in ("pf_c", "pf_o", "pf_e")]
            lines.append(f"{r['scheme']}: grid argmin of summed |log PF| at alpha1={r['alpha1']}, "
                         f"beta1={r['beta1']} (|log PF| c/o/e = "
                         + "/".join(f"{d:.3f}" for d in devs) + ")")
    return "\n".join(lines)


def with_output(spec: ExperimentSpec, out: str | Path | None, fmt: str | None) -> ExperimentSpec:
    return replace(spec, out=Path(out) if out else None, fmt=fmt or spec.fmt)
