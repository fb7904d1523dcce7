"""Batch experiment driver.

Subcommands: approx, widths, pipeline, catalog, fit, mz.  Each run validates
its configuration (JSON file plus flat flag overrides; flags win), executes,
and writes results.csv + report.json (+ plot.svg) into the output directory.
Identical config and seed give byte-identical CSV and JSON.

Exit codes: 0 ok, 2 config error, 3 numerical nonconvergence (reports still
written), 4 I/O error.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .classes import en_exact_l2, en_lower_search, lower_bound_pipeline
from .errors import ConfigError, NonconvergenceError, WidthlabError
from .fourier import Exponential, MultiplierKernel, PolyLog, Polynomial
from .norms import mz_ratio_stats
from .rates import catalog_record, catalog_records, fit_rate
from .svg import render_plot
from .widths import BallWidthInstance, ball_width_bruteforce, coordinate_subspace_bound, phi_gluskin

logger = logging.getLogger(__name__)

# Per-subcommand config schema: key -> (type, default).  Required keys carry a
# default of None and must be supplied by config file or flag.
SCHEMAS = {
    "approx": {
        "family": (str, "polylog"),
        "r": (float, 1.0),
        "mu": (float, 1.0),
        "gamma": (float, 1.0),
        "rho": (float, None),
        "p": (float, 2.0),
        "q": (float, 2.0),
        "n_list": (list, None),
        "budget": (int, 60),
        "truncation": (int, 4096),
    },
    "widths": {
        "m": (int, None),
        "n_list": (list, None),
        "p": (float, 2.0),
        "q": (float, 2.0),
        "restarts": (int, 8),
        "inner_starts": (int, 32),
        "final_starts": (int, 64),
        "max_iter": (int, 30),
    },
    "pipeline": {
        "gamma": (float, 1.0),
        "p": (float, 2.0),
        "q": (float, 4.0),
        "n_list": (list, None),
        "m_override": (int, None),
    },
    "catalog": {
        "family": (str, None),
        "r": (float, None),
        "mu": (float, None),
        "gamma": (float, None),
        "p": (float, None),
        "q": (float, None),
        "all": (bool, False),
    },
    "fit": {
        "input": (str, None),
    },
    "mz": {
        "p_list": (list, [1.5, 2.0, 3.0]),
        "m_list": (list, [4, 8, 16, 32, 64, 128]),
        "trials": (int, 200),
    },
}

COMMON_DEFAULTS = {"seed": 0, "out": ".", "threads": None, "plot": True}


def fmt(x):
    """17 significant digits: round-trips every double."""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _coerce(key, value, typ):
    try:
        if typ is list:
            if isinstance(value, str):
                value = [v for v in value.replace(",", " ").split() if v]
            return [float(v) if "." in str(v) or "e" in str(v) else int(v) for v in value]
        if typ is bool and isinstance(value, str):
            return value.lower() in ("1", "true", "yes")
        return typ(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {value!r}") from exc


def build_config(subcommand, file_config, flag_overrides):
    """Merge schema defaults, config file and CLI flags (flags win)."""
    schema = SCHEMAS[subcommand]
    config = {k: d for k, (_, d) in schema.items()}
    config.update(COMMON_DEFAULTS)
    for source in (file_config, flag_overrides):
        for key, value in source.items():
            if value is None:
                continue
            if key in schema:
                config[key] = _coerce(key, value, schema[key][0])
            elif key in COMMON_DEFAULTS:
                default = COMMON_DEFAULTS[key]
                typ = type(default) if default is not None else int
                if key == "out":
                    typ = str
                config[key] = _coerce(key, value, typ)
            else:
                raise ConfigError(f"unknown config key {key!r} for {subcommand!r}")
    if config["threads"] is None:
        env = os.environ.get("WIDTHLAB_THREADS")
        config["threads"] = int(env) if env else 1
    return config


def _require(config, *keys):
    for key in keys:
        if config.get(key) is None:
            raise ConfigError(f"missing required config key {key!r}")
        if key.endswith("_list") and not config[key]:
            raise ConfigError(f"{key!r} must be nonempty")


def _kernel_from_config(config):
    family = config["family"]
    p, q = config["p"], config["q"]
    if family == "polylog":
        rho = config["rho"]
        if rho is None:
            rho = max(0.0, 1.0 / p - 1.0 / q)
        fam = PolyLog(rho, config["gamma"])
    elif family == "sobolev":
        fam = Polynomial(config["r"])
    elif family == "exponential":
        fam = Exponential(config["mu"], config["r"])
    else:
        raise ConfigError(f"unknown kernel family {family!r}")
    return MultiplierKernel(fam, truncation=config["truncation"])


def _parallel_map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def run_approx(config):
    _require(config, "n_list")
    kernel = _kernel_from_config(config)
    p, q, gamma = config["p"], config["q"], config["gamma"]
    exact = p == 2.0 and q == 2.0
    n_list = [int(n) for n in config["n_list"]]
    seeds = np.random.SeedSequence(config["seed"]).spawn(len(n_list))

    def one(idx_n):
        idx, n = idx_n
        if exact:
            upper = en_exact_l2(kernel, n)
        else:
            upper = en_lower_search(
                kernel, p, q, n, budget=config["budget"], seed=seeds[idx]
            )
        return upper

    uppers = _parallel_map(one, list(enumerate(n_list)), config["threads"])
    rows = []
    for n, upper in zip(n_list, uppers):
        rows.append((n, "en_exact_l2" if exact else "en_lower_search", upper))
        if config["family"] == "polylog" and n > 1:
            rows.append((n, "catalog_rate", math.log(n) ** (-gamma)))
    report = {
        "quantities": sorted({r[1] for r in rows}),
        "upper_path": "exact-l2" if exact else "candidate-search",
    }
    series = _series_from_rows(rows)
    return rows, ("n", "quantity", "value"), report, series


def run_widths(config):
    _require(config, "m", "n_list")
    m, p, q = config["m"], config["p"], config["q"]
    n_list = [int(n) for n in config["n_list"]]

    def one(n):
        inst = BallWidthInstance(m, n, p, q)
        est = ball_width_bruteforce(
            inst,
            restarts=config["restarts"],
            seed=config["seed"],
            inner_starts=config["inner_starts"],
            final_starts=config["final_starts"],
            max_iter=config["max_iter"],
        )
        try:
            phi = phi_gluskin(inst)
        except WidthlabError:
            phi = float("nan")
        return est, phi, coordinate_subspace_bound(inst)

    results = _parallel_map(one, n_list, config["threads"])
    rows = []
    nonconverged = False
    for n, (est, phi, bound) in zip(n_list, results):
        rows.append((n, "bruteforce_width", est.value))
        rows.append((n, "phi_order", phi))
        rows.append((n, "coordinate_bound", bound))
        nonconverged = nonconverged or not est.diagnostics.get("converged", True)
    report = {
        "direction": "upper-bound",
        "nonconverged": nonconverged,
        "medians": [est.diagnostics.get("median") for est, _, _ in results],
    }
    return rows, ("n", "quantity", "value"), report, _series_from_rows(rows)


def run_pipeline(config):
    _require(config, "n_list")
    n_list = [int(n) for n in config["n_list"]]

    def one(n):
        return lower_bound_pipeline(
            config["gamma"], config["p"], config["q"], n, m_override=config["m_override"]
        )

    reports = _parallel_map(one, n_list, config["threads"])
    rows = []
    for rep in reports:
        rows.append((rep.n, "m_chosen", float(rep.m_chosen)))
        rows.append((rep.n, "log_factor", rep.log_factor))
        rows.append((rep.n, "phi_value", rep.phi_value))
        rows.append((rep.n, "lower_bound", rep.lower_bound))
    report = {"notes": [rep.notes for rep in reports if rep.notes]}
    series = [
        ("lower_bound", [rep.n for rep in reports], [rep.lower_bound for rep in reports])
    ]
    return rows, ("n", "quantity", "value"), report, series


def run_catalog(config):
    if config["all"]:
        records = catalog_records()
    else:
        _require(config, "family", "p", "q")
        params = {
            k: config[k] for k in ("r", "mu", "gamma") if config[k] is not None
        }
        records = [catalog_record(config["family"], config["p"], config["q"], **params)]
    rows = [
        (
            rec["family"],
            fmt(float(rec["p"])),
            fmt(float(rec["q"])),
            json.dumps(rec["params"], sort_keys=True),
            rec.get("width_rate", ""),
            rec.get("en_rate", ""),
            rec["verdict"],
            rec["regime"],
        )
        for rec in records
    ]
    header = ("family", "p", "q", "params", "width_rate", "en_rate", "verdict", "regime")
    return rows, header, {"records": records}, []


def run_fit(config):
    _require(config, "input")
    points = []
    with open(config["input"], newline="") as fh:
        for row in csv.DictReader(fh):
            points.append((float(row["n"]), float(row["value"])))
    model, residual = fit_rate(points)
    rows = [(n, "input", v) for n, v in points]
    rows += [(n, "fitted", float(model(n))) for n, _ in points]
    report = {
        "model": {
            "kind": model.kind,
            "c": model.c,
            "a": model.a,
            "g": model.g,
            "mu": model.mu,
            "r": model.r,
            "b": model.b,
            "describe": model.describe(),
        },
        "residual": residual,
    }
    return rows, ("n", "quantity", "value"), report, _series_from_rows(rows)


def run_mz(config):
    _require(config, "p_list", "m_list")
    cells = [(float(p), int(m)) for p in config["p_list"] for m in config["m_list"]]
    seeds = np.random.SeedSequence(config["seed"]).spawn(len(cells))

    def one(idx):
        p, m = cells[idx]
        return mz_ratio_stats(m, p, config["trials"], seeds[idx])

    results = _parallel_map(one, range(len(cells)), config["threads"])
    rows = []
    constants = {}
    for (p, m), (lo, hi) in zip(cells, results):
        rows.append((m, fmt(p), "min_ratio", lo))
        rows.append((m, fmt(p), "max_ratio", hi))
        constants.setdefault(fmt(p), {})[str(m)] = {"min": lo, "max": hi}
    series = []
    for p in sorted({p for p, _ in cells}):
        ms = [m for pp, m in cells if pp == p]
        his = [r[1] for (pp, _), r in zip(cells, results) if pp == p]
        series.append((f"max p={p:g}", ms, his))
    return rows, ("m", "p", "quantity", "value"), {"constants": constants}, series


def _series_from_rows(rows):
    by_quantity = {}
    for n, quantity, value in rows:
        by_quantity.setdefault(quantity, ([], []))
        by_quantity[quantity][0].append(n)
        by_quantity[quantity][1].append(value)
    return [(q, xs, ys) for q, (xs, ys) in sorted(by_quantity.items())]


RUNNERS = {
    "approx": run_approx,
    "widths": run_widths,
    "pipeline": run_pipeline,
    "catalog": run_catalog,
    "fit": run_fit,
    "mz": run_mz,
}


def write_outputs(out_dir, subcommand, config, rows, header, report, series):
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "results.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    report_doc = {
        "tool": "widthlab",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "seed": config["seed"],
        "report": report,
    }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if config.get("plot") and series:
        try:
            doc = render_plot(series, title=subcommand)
            with open(os.path.join(out_dir, "plot.svg"), "w") as fh:
                fh.write(doc)
        except Exception as exc:  # plotting is best-effort only
            logger.warning("plot skipped: %s", exc)


def build_parser():
    parser = argparse.ArgumentParser(prog="widthlab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, schema in SCHEMAS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--threads", type=int)
        sp.add_argument("--no-plot", action="store_true")
        for key, (typ, _) in schema.items():
            flag = "--" + key.replace("_", "-")
            if typ is list:
                sp.add_argument(flag, nargs="+")
            elif typ is bool:
                sp.add_argument(flag, action="store_const", const=True, default=None)
            else:
                sp.add_argument(flag)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    subcommand = args.subcommand
    try:
        file_config = {}
        if args.config:
            try:
                with open(args.config) as fh:
                    file_config = json.load(fh)
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return 4
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        overrides = {
            key: getattr(args, key)
            for key in list(SCHEMAS[subcommand]) + ["seed", "out", "threads"]
            if getattr(args, key, None) is not None
        }
        if args.no_plot:
            overrides["plot"] = False
        config = build_config(subcommand, file_config, overrides)
        _require_any(config, subcommand)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    exit_code = 0
    try:
        rows, header, report, series = RUNNERS[subcommand](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NonconvergenceError as exc:
        rows, header = [], ("n", "quantity", "value")
        report = {"nonconvergence": True, "diagnostics": exc.diagnostics}
        series = []
        exit_code = 3
    except WidthlabError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    if report.get("nonconverged"):
        exit_code = 3
    try:
        write_outputs(config["out"], subcommand, config, rows, header, report, series)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return exit_code


def _require_any(config, subcommand):
    """Early validation that fails before any files are touched."""
    schema = SCHEMAS[subcommand]
    for key, (typ, default) in schema.items():
        if typ is list and isinstance(config.get(key), list) and not config[key]:
            raise ConfigError(f"{key!r} must be nonempty")


if __name__ == "__main__":
    sys.exit(main())
