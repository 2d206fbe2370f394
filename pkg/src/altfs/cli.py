"""Command-line interface: ``altfs qualities | search | benchmark``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .altset import AlternativesSpec, selected_indices
from .data import DataError, load_csv
from .harness import (METHODS, OBJECTIVES, compatible, run_grid, status_counts,
                      write_records_csv, write_records_jsonl)
from .heuristics import greedy_balancing, greedy_depth, greedy_replacement
from .quality import (fcbf_inputs, load_importance_scores, mrmr_inputs, univariate_qualities,
                      write_scores)
from .solver import Fcbf, Mrmr, Status, Univariate, evaluate_objective, run_sequential_chain, solve_simultaneous
from .synthetic import GENERATORS
from .wrapper import ExternalCommandOracle, HoldoutMCCOracle, greedy_wrapper, wrapper_chain

WORKERS_ENV = "ALTFS_WORKERS"
MEASURES = {"mi": "mutual_information", "mutual_information": "mutual_information",
            "abs_pearson": "abs_pearson"}


class UsageError(Exception):
    """Invalid flag combination, reported like an argparse error."""


def parse_tau(text: str) -> float:
    """Decimal such as ``0.5`` or fraction such as ``2/5``."""
    try:
        value = float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid tau {text!r}")
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"tau must lie in (0, 1], got {text}")
    return value


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DataError(f"{WORKERS_ENV} must be an integer, got {raw!r}")


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---- qualities -------------------------------------------------------------

def cmd_qualities(args) -> int:
    ds = load_csv(args.data, args.target)
    fq = univariate_qualities(ds, MEASURES[args.measure], args.bins, args.normalize)
    if args.out:
        write_scores(args.out, ds.feature_names, fq.values)
    else:
        sys.stdout.write("feature,score\n")
        for name, v in zip(ds.feature_names, fq.values):
            sys.stdout.write(f"{name},{float(v)!r}\n")
    return 0


# ---- search ----------------------------------------------------------------

_METHOD_IDS = {"seq": "seq", "sim-sum": "sim_sum", "sim-min": "sim_min", "rep": "rep",
               "bal": "bal", "depth": "depth", "wrapper": "wrapper"}


def _search_objective(args):
    """Objective, feature names and dataset (``None`` for importance files)."""
    if args.objective == "importance":
        if not args.importance_file:
            raise UsageError("--objective importance needs --importance-file")
        names = None
        ds = None
        if args.data:
            ds = load_csv(args.data, args.target)
            names = ds.feature_names
        fq = load_importance_scores(args.importance_file, names)
        return Univariate(fq.values), fq.feature_names, ds
    if not args.data:
        raise UsageError(f"--objective {args.objective} needs --data")
    ds = load_csv(args.data, args.target)
    if args.objective == "mi":
        obj = Univariate(univariate_qualities(ds, bins=args.bins).values)
    elif args.objective == "fcbf":
        q, pairs = fcbf_inputs(ds, bins=args.bins)
        obj = Fcbf(q.values, pairs)
    elif args.objective == "mrmr":
        q, D = mrmr_inputs(ds, bins=args.bins)
        obj = Mrmr(q.values, D.values, args.k)
    else:
        obj = None
    return obj, ds.feature_names, ds


def _check_pairing(objective: str, method: str):
    harness_objective = {"importance": "model_gain"}.get(objective, objective)
    harness_method = {"wrapper": "wrapper_seq"}.get(method, method)
    if not compatible(harness_method, harness_objective):
        if method == "wrapper" or objective == "wrapper":
            raise UsageError("the wrapper method and the wrapper objective go together")
        raise UsageError(f"method {method} needs univariate qualities (mi or importance)")


def cmd_search(args) -> int:
    method = _METHOD_IDS[args.method]
    _check_pairing(args.objective, method)
    obj, names, ds = _search_objective(args)
    aggregation = "min" if method == "sim_min" else "sum"
    spec = AlternativesSpec(args.k, args.num_alternatives, args.tau, args.measure, aggregation,
                            args.timeout_ms)
    spec.check_n(len(names))
    slots = spec.a + 1
    rows = []  # (selection or None, objective value, status, wall ms)

    if method == "seq":
        for sol in run_sequential_chain(obj, spec):
            rows.append((sol.selections[0] if sol.found else None,
                         sol.objective_values[0] if sol.found else None, sol.status, sol.wall_time_ms))
    elif method in ("sim_sum", "sim_min"):
        sol = solve_simultaneous(obj, spec)
        for i in range(slots):
            if sol.found:
                rows.append((sol.selections[i], sol.objective_values[i], sol.status, sol.wall_time_ms))
            else:
                rows.append((None, None, sol.status, sol.wall_time_ms))
    elif method in ("rep", "bal", "depth"):
        fn = {"rep": greedy_replacement, "bal": greedy_balancing, "depth": greedy_depth}[method]
        start = time.perf_counter()
        sets = fn(obj.q, spec.k, spec.a, spec.tau)
        wall = int(round((time.perf_counter() - start) * 1000))
        for i in range(slots):
            if i < len(sets):
                rows.append((sets[i], evaluate_objective(sets[i], obj), Status.FEASIBLE, wall))
            else:
                rows.append((None, None, Status.NOT_SOLVED, wall))
    else:
        if args.oracle_command:
            oracle = ExternalCommandOracle(args.oracle_command, len(names))
        else:
            oracle = HoldoutMCCOracle(ds, args.holdout, args.seed)
        if args.wrapper_mode == "sequential":
            sols = wrapper_chain(oracle, spec, args.max_iters)
            for sol in sols:
                value = sol.objective_values[0] if sol.found else None
                rows.append((sol.selections[0] if sol.found else None, value, sol.status,
                             sol.wall_time_ms))
        else:
            sol = greedy_wrapper(oracle, spec, "simultaneous", max_iters=args.max_iters)
            for i in range(slots):
                if sol.found:
                    rows.append((sol.selections[i], sol.objective_values[i], sol.status,
                                 sol.wall_time_ms))
                else:
                    rows.append((None, None, sol.status, sol.wall_time_ms))

    alternatives = []
    for i, (s, value, status, wall) in enumerate(rows):
        value = None if value is None or (isinstance(value, float) and np.isnan(value)) else float(value)
        alternatives.append({
            "index": i,
            "features": [names[j] for j in selected_indices(s)] if s is not None else [],
            "objective": value,
            "status": str(status),
            "wall_time_ms": int(wall),
        })
    payload = {
        "objective": args.objective,
        "method": args.method,
        "k": spec.k,
        "num_alternatives": spec.a,
        "tau": spec.tau,
        "measure": spec.measure,
        "alternatives": alternatives,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


# ---- benchmark -------------------------------------------------------------

_LIST_KEYS = {"data", "objectives", "methods", "k", "a", "tau"}
_REQUIRED = ("data", "objectives", "methods", "k", "a", "tau")
_SCALAR_KEYS = {"target", "folds", "seed", "measure", "timeout_ms", "workers", "bins",
                "max_iters", "out", "jsonl", "timing"}


class ConfigError(DataError):
    pass


def _split(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def parse_config(path) -> dict:
    """Read a ``key = value`` benchmark config.

    Blank lines and ``#`` comments are ignored; list values are comma
    separated. Errors name the offending line.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}")
    raw: dict = {}
    where: dict = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in text.split("=", 1))
        if key not in _LIST_KEYS and key not in _SCALAR_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r} (first on line {where[key]})")
        if not value:
            raise ConfigError(f"{path}:{lineno}: empty value for {key!r}")
        raw[key], where[key] = value, lineno
    for key in _REQUIRED:
        if key not in raw:
            raise ConfigError(f"{path}: missing required key {key!r}")

    cfg = {"base": path.parent}

    def convert(key, fn):
        try:
            return fn(raw[key])
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{path}:{where[key]}: bad value for {key!r}: {exc}")

    def int_list(text):
        values = [int(v) for v in _split(text)]
        if not values:
            raise ValueError("empty list")
        return values

    def names(allowed, aliases=None):
        def parse(text):
            out = []
            for v in _split(text):
                v = (aliases or {}).get(v, v)
                if v not in allowed:
                    raise ValueError(f"{v!r} is not one of {', '.join(allowed)}")
                out.append(v)
            return out
        return parse

    def on_off(text):
        if text.lower() in ("on", "true", "yes", "1"):
            return True
        if text.lower() in ("off", "false", "no", "0"):
            return False
        raise ValueError("expected on or off")

    cfg["data"] = _split(raw["data"])
    cfg["objectives"] = convert("objectives", names(OBJECTIVES))
    cfg["methods"] = convert("methods", names(METHODS, {m.replace("_", "-"): m for m in METHODS}))
    cfg["k"] = convert("k", int_list)
    cfg["a"] = convert("a", int_list)
    cfg["tau"] = convert("tau", lambda t: [parse_tau(v) for v in _split(t)])
    cfg["target"] = raw.get("target")
    for key, default in (("folds", 5), ("seed", 0), ("timeout_ms", 60000), ("bins", 10),
                         ("max_iters", 1000)):
        cfg[key] = convert(key, int) if key in raw else default
    cfg["workers"] = convert("workers", int) if "workers" in raw else None
    cfg["measure"] = convert("measure", names(("dice", "jaccard")))[0] if "measure" in raw else "dice"
    cfg["timing"] = convert("timing", on_off) if "timing" in raw else True
    cfg["out"] = raw.get("out")
    cfg["jsonl"] = raw.get("jsonl")
    cfg["lines"] = where
    return cfg


def _load_datasets(cfg):
    datasets = []
    for entry in cfg["data"]:
        if entry.startswith("synthetic:"):
            gen = entry.split(":", 1)[1]
            if gen not in GENERATORS:
                raise ConfigError(f"line {cfg['lines']['data']}: unknown synthetic dataset {gen!r}")
            datasets.append(GENERATORS[gen](seed=cfg["seed"]))
        else:
            p = Path(entry)
            if not p.is_absolute():
                p = cfg["base"] / p
            datasets.append(load_csv(p, cfg["target"]))
    return datasets


def cmd_benchmark(args) -> int:
    cfg = parse_config(args.config)
    datasets = _load_datasets(cfg)
    out = args.out or cfg["out"]
    if not out:
        raise UsageError("no output path: give --out or an 'out' key in the config")
    out = Path(out) if args.out or Path(out).is_absolute() else cfg["base"] / out
    jsonl = cfg["jsonl"]
    if jsonl and not Path(jsonl).is_absolute():
        jsonl = cfg["base"] / jsonl
    workers = args.workers or cfg["workers"] or _default_workers()

    write_records_csv([], out)
    if jsonl:
        write_records_jsonl([], jsonl)
    done = []

    def flush(batch):
        write_records_csv(batch, out, append=True)
        if jsonl:
            write_records_jsonl(batch, jsonl, append=True)
        done.extend(batch)

    try:
        run_grid(datasets, cfg["objectives"], cfg["methods"], cfg["k"], cfg["a"], cfg["tau"],
                 folds=cfg["folds"], seed=cfg["seed"], measure=cfg["measure"],
                 timeout_ms=cfg["timeout_ms"], workers=workers, bins=cfg["bins"],
                 max_iters=cfg["max_iters"], timing=cfg["timing"], on_records=flush)
    except KeyboardInterrupt:
        print(f"interrupted; {len(done)} records written to {out}", file=sys.stderr)
        return 130
    print(f"{len(done)} records written to {out}")
    for status, count in status_counts(done).items():
        print(f"  {status}: {count}")
    errors = sum(1 for r in done if r.error)
    if errors:
        print(f"  records with errors: {errors}")
    return 0


# ---- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="altfs", description="Alternative feature selection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qualities", help="write univariate feature qualities as feature,score CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--target")
    p.add_argument("--measure", choices=sorted(MEASURES), default="mi")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--normalize", choices=("none", "sum_to_one", "min_max"), default="sum_to_one")
    p.add_argument("--out")
    p.set_defaults(func=cmd_qualities)

    p = sub.add_parser("search", help="find a feature set and its alternatives")
    p.add_argument("--data")
    p.add_argument("--target")
    p.add_argument("--objective", choices=("mi", "fcbf", "mrmr", "importance", "wrapper"), default="mi")
    p.add_argument("--importance-file")
    p.add_argument("--method", choices=tuple(_METHOD_IDS), default="seq")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--num-alternatives", type=int, default=1)
    p.add_argument("--tau", type=parse_tau, default=0.5)
    p.add_argument("--measure", choices=("dice", "jaccard"), default="dice")
    p.add_argument("--timeout-ms", type=int, default=60000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--wrapper-mode", choices=("sequential", "simultaneous"), default="sequential")
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--holdout", type=float, default=0.2, help="validation fraction of the wrapper oracle")
    p.add_argument("--oracle-command", nargs="+",
                   help="external wrapper oracle: reads selection bitstrings, prints one score")
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("benchmark", help="run a cross-validated experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="CSV path; overrides the config's 'out' key")
    p.add_argument("--workers", type=int, help=f"worker processes (default: ${WORKERS_ENV} or 1)")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"altfs: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, ValueError, OSError, RuntimeError) as exc:
        print(f"altfs: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
