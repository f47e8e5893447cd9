"""Trial scheduling, functional evaluation and CSV/JSON output."""
from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor

from ..exact import exact_pa, exact_pa_boundary
from ..graphs import Instance, build_mst, pt_heuristic
from .records import CSV_COLUMNS, TrialRecord, normalize


def evaluate(functional: str, inst: Instance, budget: int) -> float:
    if functional == "MST":
        return build_mst(inst).total
    if functional == "PT":
        return pt_heuristic(inst).value
    if functional == "PA_exact":
        return exact_pa(inst, budget=budget).value
    if functional == "PA_B_exact":
        return exact_pa_boundary(inst, budget=budget).value
    raise ValueError(functional)


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return os.cpu_count() or 1


def _call(job):
    fn, args = job
    return fn(*args)


def run_tasks(fn, arg_list, workers: int | None = 1) -> list:
    """Apply ``fn`` to every argument tuple; results come back in input order."""
    workers = default_workers() if workers is None else workers
    jobs = [(fn, args) for args in arg_list]
    if workers <= 1 or len(jobs) <= 1:
        return [_call(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_call, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def merge(record_lists) -> list[TrialRecord]:
    """Flatten and order records by key so output is independent of scheduling."""
    out = [r for rs in record_lists for r in rs]
    out.sort(key=lambda r: (r.functional, r.n, r.trial))
    return out


def make_record(exp_id, functional, cfg, n, trial, value, wall_s, normalized=None) -> TrialRecord:
    norm = normalize(value, n, cfg.d, cfg.p) if normalized is None else normalized
    return TrialRecord(exp_id, functional, cfg.d, cfg.p, n, trial, cfg.seed, float(value),
                       float(norm), wall_s * 1000.0 if cfg.timing else None)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(records, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([r.experiment_id, r.functional, r.d, _num(r.p), r.n, r.trial, r.seed,
                    _num(r.value), _num(r.normalized_value), _num(r.wall_ms)])


def csv_text(records) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def summary_json(config: dict, result_summary: dict) -> str:
    return json.dumps({"config": config, "summary": result_summary}, indent=2, sort_keys=True) + "\n"
