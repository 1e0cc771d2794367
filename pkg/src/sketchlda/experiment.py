"""Replicate experiments and result emission.

A run fits the Gaussian and least-squares baselines once on a fixed split,
then for every ``(replicate, step size)`` pair performs a single Kaczmarz run
and snapshots it at each iteration checkpoint.  Replicate ``r`` always draws
from the stream keyed on ``(seed, r)``.
"""

import csv
import io
import json
import logging
import math
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .dataset import ArrayRowProvider, LabeledDataset, class_statistics, recode
from .errors import SketchLdaError, ValidationError
from .lda_gaussian import fit_gaussian
from .lda_ls import LinearClassifier, fit_ls
from .lda_rk import RkConfig, canonical_scheme, extract_direction, run_rk, sampler_for
from .metrics import DegenerateMetricError, accuracy_report, angle_degrees, coefficient_scaling

log = logging.getLogger(__name__)

HEADER = ("method", "sampler", "step_size", "iterations", "replicate", "metric", "value")
METHODS = ("gm", "ls", "rk")
INTERCEPTS = ("ls", "optimal")
GM_SCALINGS = ("raw", "unit_within")


def logspace_grid(lo, hi, count):
    """Integer grid whose base-10 exponents are equally spaced on ``[lo, hi]``."""
    return tuple(int(round(10.0 ** e)) for e in np.linspace(lo, hi, int(count)))


MAMMOGRAPHIC_GRID = logspace_grid(3, 6.5, 10)
OCCUPANCY_GRID = logspace_grid(3, 6, 10)
STEP_SIZES = (0.1, 0.2, 0.3, 0.4, 0.5)


class Record(NamedTuple):
    method: str
    sampler: Optional[str]
    step_size: Optional[float]
    iterations: Optional[int]
    replicate: int
    metric: str
    value: float


@dataclass
class ExperimentConfig:
    train: LabeledDataset
    test: LabeledDataset
    methods: Sequence[str] = METHODS
    sampler: str = "row_weight"
    step_sizes: Sequence[float] = STEP_SIZES
    checkpoints: Sequence[int] = MAMMOGRAPHIC_GRID
    replicates: int = 20
    seed: int = 0
    intercept: str = "optimal"
    gm_scaling: str = "raw"
    jobs: int = 1

    def __post_init__(self):
        self.methods = tuple(self.methods)
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ValidationError(f"method set must be a non-empty subset of {METHODS}")
        self.sampler = canonical_scheme(self.sampler)
        self.step_sizes = tuple(float(c) for c in self.step_sizes)
        self.checkpoints = tuple(sorted({int(k) for k in self.checkpoints}))
        if "rk" in self.methods and (not self.step_sizes or not self.checkpoints):
            raise ValidationError("step-size and iteration grids must be non-empty")
        if self.replicates < 1:
            raise ValidationError("replicate count must be at least 1")
        if self.intercept not in INTERCEPTS:
            raise ValidationError(f"intercept must be one of {INTERCEPTS}")
        if self.gm_scaling not in GM_SCALINGS:
            raise ValidationError(f"gm scaling must be one of {GM_SCALINGS}")


@dataclass
class ResultTable:
    records: List[Record] = field(default_factory=list)
    feature_names: tuple = ()
    summary: Optional[list] = None

    def add(self, *args):
        self.records.append(Record(*args))

    def means(self):
        """Arithmetic mean over replicates of every finite value, per combination."""
        groups = OrderedDict()
        for r in self.records:
            key = (r.method, r.sampler, r.step_size, r.iterations, r.metric)
            groups.setdefault(key, []).append(r.value)
        out = []
        for key, vals in groups.items():
            finite = [v for v in vals if math.isfinite(v)]
            mean = math.fsum(finite) / len(finite) if finite else math.nan
            out.append((*key, len(finite), mean))
        return out

    def select(self, **where):
        return [r for r in self.records if all(getattr(r, k) == v for k, v in where.items())]


# ---------------------------------------------------------------------------
# metric helpers


def _classifier_records(table, method, sampler, c, k, rep, clf, reference, test, names):
    if reference is not None:
        try:
            table.add(method, sampler, c, k, rep, "angle_deg", angle_degrees(reference, clf.direction))
        except DegenerateMetricError:
            table.add(method, sampler, c, k, rep, "angle_deg", math.nan)
    if test is not None and test.n:
        acc = accuracy_report(clf, test)
        table.add(method, sampler, c, k, rep, "accuracy", acc.overall)
        table.add(method, sampler, c, k, rep, "accuracy_class1", _nan(acc.class1))
        table.add(method, sampler, c, k, rep, "accuracy_class2", _nan(acc.class2))
    for name, b in zip(names, clf.direction):
        table.add(method, sampler, c, k, rep, f"coef_{name}", float(b))
    table.add(method, sampler, c, k, rep, "intercept", float(clf.intercept))


def _nan(x):
    return math.nan if x is None else x


def gm_reference(model, scaling):
    return model.unit_within_direction() if scaling == "unit_within" else model.gm_direction


def _finish(clf: LinearClassifier, stats, intercept):
    if intercept == "optimal" and not clf.degenerate:
        try:
            return clf.with_optimal_intercept(stats)
        except SketchLdaError as exc:
            log.warning("optimal intercept unavailable: %s", exc)
    return clf


def _rk_task(args):
    X, y, sampler, c, checkpoints, seed, rep = args
    provider = ArrayRowProvider(X, intercept=True)
    cfg = RkConfig(c, max(checkpoints), seed=seed, replicate=rep, checkpoints=checkpoints)
    run = run_rk(provider, y, sampler, cfg)
    return [(k, b) for k, b in run.checkpoints if k in set(checkpoints)]


def run_replicates(config: ExperimentConfig) -> ResultTable:
    train, test = config.train, config.test
    names = train.feature_names
    table = ResultTable(feature_names=names)
    stats = class_statistics(train)
    rds = recode(train)

    reference = gm_model = None
    try:
        gm_model = fit_gaussian(train)
        reference = gm_reference(gm_model, config.gm_scaling)
    except SketchLdaError as exc:
        log.error("Gaussian LDA failed: %s", exc)
        if "gm" in config.methods:
            table.add("gm", None, None, None, 0, "failed", 1.0)

    if "gm" in config.methods and gm_model is not None:
        if test is not None and test.n:
            acc = accuracy_report(gm_model, test)
            table.add("gm", None, None, None, 0, "accuracy", acc.overall)
            table.add("gm", None, None, None, 0, "accuracy_class1", _nan(acc.class1))
            table.add("gm", None, None, None, 0, "accuracy_class2", _nan(acc.class2))
        for name, b in zip(names, reference):
            table.add("gm", None, None, None, 0, f"coef_{name}", float(b))

    ls_clf = None
    if "ls" in config.methods:
        try:
            ls_clf = fit_ls(rds)
            _classifier_records(table, "ls", None, None, None, 0,
                                _finish(ls_clf, stats, config.intercept), reference, test, names)
        except SketchLdaError as exc:
            log.error("least-squares LDA failed: %s", exc)
            table.add("ls", None, None, None, 0, "failed", 1.0)

    headline = None
    if "rk" in config.methods:
        provider = ArrayRowProvider(train.features, intercept=True)
        sampler = sampler_for(provider, config.sampler)
        tasks = [
            (train.features, rds.y, sampler, c, config.checkpoints, config.seed, rep)
            for rep in range(config.replicates)
            for c in config.step_sizes
        ]
        if config.jobs > 1:
            with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                futures = [pool.submit(_rk_task, t) for t in tasks]
                results = [_outcome(f.result) for f in futures]
        else:
            results = [_outcome(_rk_task, t) for t in tasks]
        for task, snaps in zip(tasks, results):
            c, rep = task[3], task[6]
            if isinstance(snaps, Exception):
                log.error("sketched run (c=%g, replicate %d) failed: %s", c, rep, snaps)
                table.add("rk", config.sampler, c, None, rep, "failed", 1.0)
                continue
            for k, beta in snaps:
                clf = _finish(extract_direction(beta), stats, config.intercept)
                _classifier_records(table, "rk", config.sampler, c, k, rep, clf, reference, test, names)
        last_c = config.step_sizes[-1]
        for t, res in zip(tasks, results):
            if t[6] == 0 and t[3] == last_c and not isinstance(res, Exception):
                headline = (last_c, config.checkpoints[-1], res[-1][1])

    try:
        table.summary = comparison_table(train, test, headline, config.gm_scaling)
    except SketchLdaError as exc:
        log.error("comparison summary unavailable: %s", exc)
    return table


def _outcome(fn, *args):
    try:
        return fn(*args)
    except Exception as exc:  # recorded as a failed run, the sweep goes on
        return exc


# ---------------------------------------------------------------------------
# coefficient / scaling / angle / accuracy summary


def comparison_table(train, test, rk=None, gm_scaling="raw"):
    """Rows of a coefficient / angle / accuracy comparison.

    ``rk`` is ``(step_size, iterations, beta)`` for one sketched run or None.
    Returns ``[header, *rows]`` with ``None`` for empty cells.
    """
    stats = class_statistics(train)
    gm = fit_gaussian(train)
    ref = gm_reference(gm, gm_scaling)
    ls = fit_ls(recode(train))
    ls_opt = ls.with_optimal_intercept(stats)
    cols = [("LDA-GM", None), ("LDA-LS_LS", ls), ("LDA-LS_opt", ls_opt)]
    header = ["", "LDA-GM", "LDA-LS_LS", "LDA-LS_opt", "Scaling"]
    rk_ls = rk_opt = None
    if rk is not None:
        rk_ls = extract_direction(rk[2])
        rk_opt = _finish(rk_ls, stats, "optimal")
        header += ["LDA-RK_LS", "LDA-RK_opt", "Scaling"]

    def block(gm_val, ls_val, ls_opt_val, ls_scale, rk_vals=None):
        row = [gm_val, ls_val, ls_opt_val, ls_scale]
        if rk is not None:
            row += list(rk_vals)
        return row

    rows = [["Intercept", *block(None, ls.intercept, ls_opt.intercept, None,
                                 (rk_ls.intercept, rk_opt.intercept, None) if rk else None)]]
    ls_scale = coefficient_scaling(ref, ls.direction)
    rk_scale = coefficient_scaling(ref, rk_ls.direction) if rk else None
    for j, name in enumerate(train.feature_names):
        rk_vals = (rk_ls.direction[j], rk_opt.direction[j], rk_scale[j]) if rk else None
        rows.append([name, *block(ref[j], ls.direction[j], ls_opt.direction[j], ls_scale[j], rk_vals)])

    def angle(d):
        try:
            return angle_degrees(ref, d)
        except DegenerateMetricError:
            return None

    rows.append(["Angle", *block(None, angle(ls.direction), None, None,
                                 (angle(rk_ls.direction), None, None) if rk else None)])
    if test is not None and test.n:
        accs = [accuracy_report(m, test) for m in (gm, ls, ls_opt)]
        rk_accs = [accuracy_report(m, test) for m in (rk_ls, rk_opt)] if rk else None
        for label, field_ in (("Accuracy", 0), ("Accuracy_1", 1), ("Accuracy_2", 2)):
            rk_vals = (rk_accs[0][field_], rk_accs[1][field_], None) if rk else None
            rows.append([label, *block(accs[0][field_], accs[1][field_], accs[2][field_], None, rk_vals)])
    if rk is not None:
        header.append(f"(c={rk[0]:g}, k={rk[1]})")
    return [header, *rows]


def format_markdown(summary, digits=2):
    header, *rows = summary
    width = len(rows[0]) if rows else len(header)
    header = (list(header) + [""] * width)[:max(width, len(header))]

    def fmt(v):
        if v is None or (isinstance(v, float) and math.isnan(v)):
            return ""
        if isinstance(v, str):
            return v
        return f"{v:.{digits}f}"

    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for r in rows:
        cells = [fmt(v) for v in r] + [""] * (len(header) - len(r))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# emission


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def table_to_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in table.records:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def parse_csv(text) -> ResultTable:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != HEADER:
        raise ValidationError(f"unexpected results header {header}")
    table = ResultTable()
    for row in reader:
        method, sampler, c, k, rep, metric, value = row
        table.add(method, sampler or None, float(c) if c else None, int(k) if k else None,
                  int(rep), metric, float(value))
    return table


def emit(table: ResultTable, output, fmt="csv"):
    """Write ``results.csv`` and ``means.csv`` plus a summary in ``fmt``.

    Returns the list of written paths.
    """
    if not table.records:
        raise ValidationError("nothing to emit: result table is empty")
    if fmt not in ("csv", "json", "md"):
        raise ValidationError(f"unknown format {fmt!r}")
    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "results.csv"
    path.write_text(table_to_csv(table))
    written.append(path)

    path = out / "means.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("method", "sampler", "step_size", "iterations", "metric", "count", "mean"))
        for row in table.means():
            w.writerow([_fmt(v) for v in row])
    written.append(path)

    if table.summary is not None:
        if fmt == "md":
            path = out / "summary.md"
            path.write_text(format_markdown(table.summary))
        elif fmt == "json":
            path = out / "summary.json"
            header, *rows = table.summary
            path.write_text(json.dumps({"header": header, "rows": [
                [None if isinstance(v, float) and math.isnan(v) else _jsonable(v) for v in r] for r in rows
            ]}, indent=2))
        else:
            path = out / "summary.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                for r in table.summary:
                    w.writerow([_fmt(_jsonable(v)) for v in r])
        written.append(path)
    return written


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v
