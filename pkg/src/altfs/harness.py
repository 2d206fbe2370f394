"""Cross-validated experiment grids over search methods and parameters."""

from __future__ import annotations

import csv
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .altset import AlternativesSpec, as_selection
from .data import Dataset, stratified_kfold
from .heuristics import greedy_balancing, greedy_depth, greedy_replacement
from .predict import feature_importance, mcc, train_tree
from .quality import fcbf_inputs, mrmr_inputs, univariate_qualities
from .solver import (Fcbf, Mrmr, Objective, Status, Univariate, evaluate_objective,
                     run_sequential_chain, solve_simultaneous)
from .wrapper import HoldoutMCCOracle, greedy_wrapper, wrapper_chain

METHODS = ("seq", "sim_sum", "sim_min", "rep", "bal", "depth", "wrapper_seq", "wrapper_sim")
OBJECTIVES = ("mi", "fcbf", "mrmr", "model_gain", "wrapper")
UNIVARIATE_OBJECTIVES = ("mi", "model_gain")
HEURISTIC_METHODS = ("rep", "bal", "depth")
WRAPPER_METHODS = ("wrapper_seq", "wrapper_sim")
# objectives and metrics whose native range is [-1, 1]
SIGNED_OBJECTIVES = ("mrmr", "wrapper")


@dataclass
class RunRecord:
    dataset: str
    fold: int
    method: str
    objective: str
    k: int
    a: int
    tau: float
    i: int
    status: str
    train_objective: Optional[float] = None
    test_objective: Optional[float] = None
    train_mcc: Optional[float] = None
    test_mcc: Optional[float] = None
    wall_time_ms: int = 0
    error: str = ""


RECORD_FIELDS = tuple(f.name for f in fields(RunRecord))


def build_objective(name: str, ds: Dataset, k: int, bins: int = 10) -> Objective:
    """Objective with qualities fitted on ``ds``."""
    if name == "mi":
        return Univariate(univariate_qualities(ds, bins=bins).values)
    if name == "model_gain":
        model = train_tree(ds.features, ds.target)
        return Univariate(feature_importance(model).values)
    if name == "fcbf":
        q, pairs = fcbf_inputs(ds, bins=bins)
        return Fcbf(q.values, pairs)
    if name == "mrmr":
        q, D = mrmr_inputs(ds, bins=bins)
        return Mrmr(q.values, D.values, k)
    raise ValueError(f"objective {name!r} has no quality-based form")


def compatible(method: str, objective: str) -> bool:
    """Heuristics need univariate qualities; wrapper methods need the wrapper objective."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    if method in WRAPPER_METHODS or objective == "wrapper":
        return method in WRAPPER_METHODS and objective == "wrapper"
    if method in HEURISTIC_METHODS:
        return objective in UNIVARIATE_OBJECTIVES
    return True


def _relaxed(obj: Objective) -> Objective:
    # test-fitted FCBF constraints may forbid the training selection; score it by relevance
    return Univariate(obj.q) if isinstance(obj, Fcbf) else obj


def _mcc_pair(train: Dataset, test: Dataset, s) -> tuple[float, float]:
    cols = np.flatnonzero(as_selection(s))
    model = train_tree(train.features[:, cols], train.target)
    return (mcc(model.predict(train.features[:, cols]), train.target),
            mcc(model.predict(test.features[:, cols]), test.target))


ObjectiveSource = Union[str, Objective, Callable[[Dataset], Objective]]


def evaluate_feature_set(train: Dataset, test: Dataset, s, obj: ObjectiveSource, k: Optional[int] = None,
                         bins: int = 10) -> tuple[float, float, float, float]:
    """Train/test objective values and train/test MCC of one feature set.

    ``obj`` is an objective id, a callable building an objective from a
    dataset, or a ready objective. Ids and callables are fitted separately on
    ``train`` and ``test``; a ready objective is used for both halves.
    """
    s = as_selection(s)
    if k is None:
        k = int(s.sum())
    if isinstance(obj, str):
        train_obj = build_objective(obj, train, k, bins)
        test_obj = build_objective(obj, test, k, bins)
    elif callable(obj):
        train_obj, test_obj = obj(train), obj(test)
    else:
        train_obj = test_obj = obj
    train_value = evaluate_objective(s, train_obj)
    test_value = evaluate_objective(s, _relaxed(test_obj))
    train_mcc, test_mcc = _mcc_pair(train, test, s)
    return train_value, test_value, train_mcc, test_mcc


def normalize_run(values: Sequence[Optional[float]], method: str = "max",
                  fill_infeasible: Optional[float] = None, signed: bool = False) -> list[Optional[float]]:
    """Normalize one search run's values over its alternatives.

    ``None`` marks an infeasible slot. With ``signed`` the values are first
    shifted from [-1, 1] to [0, 1]. Infeasible slots take ``fill_infeasible``
    when given and otherwise stay ``None`` without affecting the scaling.
    Under ``max`` a run whose maximum is not positive maps its real values to
    1; under ``min_max`` an all-equal run maps to 1.
    """
    if method not in ("max", "min_max"):
        raise ValueError(f"unknown normalization {method!r}")
    shifted = [None if v is None else ((v + 1.0) / 2.0 if signed else float(v)) for v in values]
    real = [v for v in shifted if v is not None]
    if not real and fill_infeasible is None:
        raise ValueError("every slot is infeasible and no fill value was given")
    filled = [fill_infeasible if v is None else v for v in shifted]
    pool = [v for v in filled if v is not None]
    lo, hi = min(pool), max(pool)
    out: list[Optional[float]] = []
    for v, original in zip(filled, shifted):
        if v is None:
            out.append(None)
        elif method == "max":
            if hi > 0:
                out.append(v / hi)
            else:
                out.append(1.0 if original is not None else 0.0)
        else:
            out.append(1.0 if hi == lo else (v - lo) / (hi - lo))
    return out


@dataclass(frozen=True)
class Cell:
    dataset: int
    objective: str
    method: str
    k: int
    a: int
    tau: float


def grid_cells(n_datasets: int, objectives, methods, ks, as_, taus) -> list[Cell]:
    """Compatible parameter combinations in a fixed order; incompatible pairs are skipped."""
    cells = []
    for d, o, m, k, a, tau in itertools.product(range(n_datasets), objectives, methods, ks, as_, taus):
        if compatible(m, o):
            cells.append(Cell(d, o, m, int(k), int(a), float(tau)))
    return cells


def _search(cell: Cell, train: Dataset, train_obj, spec: AlternativesSpec, seed: int,
            max_iters: int):
    """Per-slot (selection or None, status, wall ms, train objective override)."""
    m = cell.method
    slots = cell.a + 1
    if m == "seq":
        chain = run_sequential_chain(train_obj, spec)
        return [(sol.selections[0] if sol.found else None, sol.status, sol.wall_time_ms, None)
                for sol in chain]
    if m in ("sim_sum", "sim_min"):
        sim_spec = AlternativesSpec(spec.k, spec.a, spec.tau, spec.measure,
                                    "sum" if m == "sim_sum" else "min", spec.timeout_ms)
        sol = solve_simultaneous(train_obj, sim_spec)
        if not sol.found:
            return [(None, sol.status, sol.wall_time_ms, None)] * slots
        return [(s, sol.status, sol.wall_time_ms, None) for s in sol.selections]
    if m in HEURISTIC_METHODS:
        fn = {"rep": greedy_replacement, "bal": greedy_balancing, "depth": greedy_depth}[m]
        start = time.perf_counter()
        sets = fn(train_obj.q, cell.k, cell.a, cell.tau)
        wall = int(round((time.perf_counter() - start) * 1000))
        return [(sets[i], Status.FEASIBLE, wall, None) if i < len(sets)
                else (None, Status.NOT_SOLVED, wall, None) for i in range(slots)]
    oracle = HoldoutMCCOracle(train, seed=seed)
    if m == "wrapper_seq":
        chain = wrapper_chain(oracle, spec, max_iters)
        return [(sol.selections[0], sol.status, sol.wall_time_ms, sol.objective_values[0])
                if sol.found else (None, sol.status, sol.wall_time_ms, None) for sol in chain]
    sol = greedy_wrapper(oracle, spec, "simultaneous", max_iters=max_iters)
    if not sol.found:
        return [(None, sol.status, sol.wall_time_ms, None)] * slots
    return [(s, sol.status, sol.wall_time_ms, v) for s, v in zip(sol.selections, sol.objective_values)]


def run_cell(cell: Cell, ds: Dataset, fold: int, train_idx, test_idx, measure: str = "dice",
             timeout_ms: Optional[int] = 60000, seed: int = 0, bins: int = 10,
             max_iters: int = 1000, timing: bool = True) -> list[RunRecord]:
    """All records of one cell on one fold; failures become error records."""
    base = dict(dataset=ds.name, fold=fold, method=cell.method, objective=cell.objective,
                k=cell.k, a=cell.a, tau=cell.tau)
    try:
        train, test = ds.subset(train_idx), ds.subset(test_idx)
        spec = AlternativesSpec(cell.k, cell.a, cell.tau, measure, "sum", timeout_ms)
        spec.check_n(ds.n_features)
        if cell.objective == "wrapper":
            train_obj = test_obj = None
        else:
            train_obj = build_objective(cell.objective, train, cell.k, bins)
            test_obj = _relaxed(build_objective(cell.objective, test, cell.k, bins))
        slots = _search(cell, train, train_obj, spec, seed, max_iters)
        records = []
        for i, (s, status, wall, override) in enumerate(slots):
            rec = RunRecord(**base, i=i, status=str(status), wall_time_ms=wall if timing else 0)
            if s is not None:
                train_mcc, test_mcc = _mcc_pair(train, test, s)
                rec.train_mcc, rec.test_mcc = train_mcc, test_mcc
                if cell.objective == "wrapper":
                    rec.train_objective, rec.test_objective = override, test_mcc
                else:
                    rec.train_objective = evaluate_objective(s, train_obj)
                    rec.test_objective = evaluate_objective(s, test_obj)
            records.append(rec)
        return records
    except Exception as exc:  # a failing cell must not abort the grid
        msg = f"{type(exc).__name__}: {exc}"
        return [RunRecord(**base, i=i, status=str(Status.NOT_SOLVED), error=msg)
                for i in range(cell.a + 1)]


def _job(args):
    return run_cell(*args[0], **args[1])


def run_grid(datasets: Sequence[Dataset], objectives: Sequence[str], methods: Sequence[str],
             ks: Sequence[int], as_: Sequence[int], taus: Sequence[float], folds: int = 5,
             seed: int = 0, measure: str = "dice", timeout_ms: Optional[int] = 60000,
             workers: int = 1, bins: int = 10, max_iters: int = 1000, timing: bool = True,
             on_records: Optional[Callable[[list], None]] = None) -> list[RunRecord]:
    """Run every compatible grid cell on every cross-validation fold.

    Records come back ordered by (cell, fold, alternative index) whatever
    ``workers`` is. ``on_records`` receives each finished job's records in that
    same order, which lets callers write results incrementally.
    """
    for name, values in (("datasets", datasets), ("objectives", objectives), ("methods", methods),
                         ("k", ks), ("a", as_), ("tau", taus)):
        if len(values) == 0:
            raise ValueError(f"{name} list is empty")
    cells = grid_cells(len(datasets), objectives, methods, ks, as_, taus)
    plans = [stratified_kfold(ds, folds, seed) for ds in datasets]
    options = dict(measure=measure, timeout_ms=timeout_ms, seed=seed, bins=bins,
                   max_iters=max_iters, timing=timing)
    jobs = [((cell, datasets[cell.dataset], f, tr, te), options)
            for cell in cells for f, (tr, te) in enumerate(plans[cell.dataset].folds)]
    records: list[RunRecord] = []

    def collect(batch):
        records.extend(batch)
        if on_records is not None:
            on_records(batch)

    if workers <= 1:
        for job in jobs:
            collect(_job(job))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for batch in pool.map(_job, jobs):
                collect(batch)
    return records


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records_csv(records: Sequence[RunRecord], path, append: bool = False):
    """One row per record; empty cells mark missing quality values."""
    exists = append
    with open(path, "a" if append else "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if not exists:
            writer.writerow(RECORD_FIELDS)
        for r in records:
            writer.writerow([_csv_value(getattr(r, f)) for f in RECORD_FIELDS])


def write_records_jsonl(records: Sequence[RunRecord], path, append: bool = False):
    with open(path, "a" if append else "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(asdict(r)) + "\n")


def read_records_csv(path) -> list[RunRecord]:
    ints = {"fold", "k", "a", "i", "wall_time_ms"}
    floats = {"tau", "train_objective", "test_objective", "train_mcc", "test_mcc"}
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for key, raw in row.items():
                if key in ints:
                    kw[key] = int(raw)
                elif key in floats:
                    kw[key] = float(raw) if raw != "" else None
                else:
                    kw[key] = raw
            out.append(RunRecord(**kw))
    return out


def run_key(r: RunRecord) -> tuple:
    """Identifies the search run a record belongs to."""
    return (r.dataset, r.fold, r.method, r.objective, r.k, r.a, r.tau)


def normalized_train_objectives(records: Sequence[RunRecord], method: str = "max",
                                fill_infeasible: Optional[float] = 0.0) -> dict:
    """Per-record normalized train objective, keyed by ``(run key, i)``."""
    runs: dict = {}
    for r in records:
        runs.setdefault(run_key(r), []).append(r)
    out = {}
    for key, group in runs.items():
        group.sort(key=lambda r: r.i)
        values = [r.train_objective for r in group]
        if fill_infeasible is None and all(v is None for v in values):
            continue
        normed = normalize_run(values, method, fill_infeasible, signed=key[3] in SIGNED_OBJECTIVES)
        for r, v in zip(group, normed):
            out[(key, r.i)] = v
    return out


def status_counts(records: Sequence[RunRecord]) -> dict:
    counts: dict = {}
    for r in records:
        counts[r.status] = counts.get(r.status, 0) + 1
    return dict(sorted(counts.items()))


def mean(values) -> float:
    values = [v for v in values if v is not None]
    return math.fsum(values) / len(values) if values else float("nan")
