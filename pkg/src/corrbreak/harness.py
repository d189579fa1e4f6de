"""Monte Carlo experiments at desk scale.

Each experiment is a list of cells (model, test, lags, thresholds) crossed
with a list of mean bandwidths. A replication draws one series per cell and
reuses it for every bandwidth and threshold, so rows of the same cell share
their random numbers. Seeds are keyed by ``(seed, cell, replication)``, so
results do not depend on the number of worker processes.
"""
from __future__ import annotations

import csv
import io as _io
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .bootstrap import BootstrapConfig
from .classical import MIN_LENGTH, classical_from_prepared
from .errors import CorrBreakError, DataError, UnknownExperiment
from .relevant import analyze
from .simulation import get_model, simulate
from .tuning import MVConfig, Tuning, prepare

FIXED_BANDWIDTHS = (0.075, 0.1, 0.125, 0.15, 0.175, 0.2, 0.225)
ALL_BANDWIDTHS = FIXED_BANDWIDTHS + ("gcv",)
LEVELS = (0.05, 0.10)


@dataclass(frozen=True)
class Cell:
    label: str
    model: str
    test: str  # "classical" or "relevant"
    lags: tuple = (1,)
    deltas: tuple = ()  # one threshold tuple per row, relevant test only
    lam: Optional[float] = None
    innovations: Optional[str] = None
    bias_correct: Optional[bool] = None  # None: the threshold-based default

    @property
    def stream(self) -> int:
        """Random-number stream id; cells on the same model and law share data."""
        return zlib.crc32(f"{self.model}|{self.innovations}".encode())


def _lambda_cells(label, model, test, lags, lams, deltas=()):
    return [Cell(label, model, test, lags, deltas, lam=float(x)) for x in lams]


def _experiments() -> dict:
    d3 = ((0.3,),)
    sweep = tuple((round(0.05 * j, 2),) for j in range(1, 13))
    return {
        "table1": (
            [
                Cell("I", "I", "classical"),
                Cell("II", "II", "classical"),
                Cell("IIt", "IIt", "classical"),
                Cell("II*", "II", "classical", (1, 2)),
            ],
            ALL_BANDWIDTHS,
        ),
        "table2": (
            [
                Cell("III", "III", "relevant", (1,), d3),
                Cell("IIIt", "IIIt", "relevant", (1,), d3),
                Cell("III*", "III", "relevant", (1, 2), ((0.3, 0.15),)),
                Cell("IV", "IV", "relevant", (1, 2), ((0.18, 0.065),)),
            ],
            ALL_BANDWIDTHS,
        ),
        "table3": (
            [
                Cell("II", "II", "classical", innovations="chi2"),
                Cell("III", "III", "relevant", (1,), d3, innovations="chi2"),
            ],
            ALL_BANDWIDTHS,
        ),
        "fig3": (
            _lambda_cells("I'", "Iprime", "classical", (1,), np.arange(7) / 10)
            + _lambda_cells("I'*", "Iprime", "classical", (1, 2), np.arange(7) / 10)
            + _lambda_cells("II'", "IIprime", "relevant", (1,), np.arange(-6, 5) / 10, d3)
            + _lambda_cells("II'*", "IIprime", "relevant", (1, 2), np.arange(-6, 5) / 10,
                            ((0.3, 0.15),)),
            ("gcv",),
        ),
        # one statistic across the whole sweep, so the curve is comparable in delta
        "fig2": ([Cell("III", "III", "relevant", (1,), sweep, bias_correct=False)], ("gcv",)),
        "robustness": (
            [
                Cell("II0", "II0", "classical"),
                Cell("III0", "III0", "relevant", (1,), d3),
            ],
            ALL_BANDWIDTHS,
        ),
    }


EXPERIMENTS = _experiments()


def experiment(experiment_id: str, models: Optional[Iterable[str]] = None,
               bandwidths: Optional[Iterable] = None):
    """Cells and bandwidth labels of an experiment, optionally filtered."""
    if experiment_id not in EXPERIMENTS:
        raise UnknownExperiment(
            f"unknown experiment {experiment_id!r}; choose from {', '.join(EXPERIMENTS)}"
        )
    cells, bws = EXPERIMENTS[experiment_id]
    if models is not None:
        keep = set(models)
        cells = [c for c in cells if c.label in keep or c.model in keep]
        if not cells:
            raise DataError(f"no cell of {experiment_id} matches {sorted(keep)}")
    if bandwidths is not None:
        wanted = {_bw_label(b) for b in bandwidths}
        bws = tuple(b for b in bws if _bw_label(b) in wanted)
        if not bws:
            raise DataError(f"no bandwidth of {experiment_id} matches {sorted(wanted)}")
    return list(cells), tuple(bws)


def _bw_label(b) -> str:
    if isinstance(b, str):
        return "gcv" if b.lower() in ("gcv", "auto") else f"{float(b):g}"
    return f"{float(b):g}"


def replication_seed(seed: int, stream: int, rep: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(stream, rep, 1)).generate_state(1)[0])


@dataclass(frozen=True)
class _Task:
    cell: Cell
    bandwidths: tuple
    rep: int
    n: int
    B: int
    seed: int


def _run_task(task: _Task) -> list:
    """Rejection indicators for one replication of one cell.

    Returns ``(bandwidth label, threshold index, [reject at each level])``
    tuples; the indicator list is ``None`` when the replication failed.
    """
    cell = task.cell
    model = get_model(cell.model, lam=cell.lam, innovations=cell.innovations)
    series = simulate(model, task.n, task.seed, key=(cell.stream, task.rep))
    boot = BootstrapConfig(B=task.B, seed=replication_seed(task.seed, cell.stream, task.rep))
    rows = max(1, len(cell.deltas))
    out = []
    for b in task.bandwidths:
        label = _bw_label(b)
        tuning = Tuning(mean_bandwidth="auto" if label == "gcv" else float(b))
        try:
            prep = prepare(series, cell.lags, tuning)
            if cell.test == "classical":
                rep = classical_from_prepared(prep, boot, "constant", MVConfig())
                out.append((label, 0, [rep.rejects_at(a) for a in LEVELS]))
                continue
            an = analyze(prep, boot, MVConfig())
            for j, deltas in enumerate(cell.deltas):
                rep = an.decide(deltas, cell.bias_correct, alpha=LEVELS[0])
                out.append((label, j, [rep.rejects_at(a) for a in LEVELS]))
        except CorrBreakError:
            out.extend((label, j, None) for j in range(rows))
    return out


@dataclass
class Table:
    experiment: str
    rows: List[dict]

    FIELDS = ("experiment", "cell", "model", "test", "lags", "innovations", "lambda",
              "bandwidth", "delta", "n", "reps", "failed", "B",
              "reject_5", "se_5", "reject_10", "se_10")

    def to_csv(self) -> str:
        buf = _io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.FIELDS, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow(row)
        return buf.getvalue()

    def lookup(self, cell: str, bandwidth="gcv", delta=None, lam=None) -> dict:
        for row in self.rows:
            if row["cell"] != cell or row["bandwidth"] != _bw_label(bandwidth):
                continue
            if delta is not None and row["delta"] != _fmt_tuple(delta):
                continue
            if lam is not None and row["lambda"] != f"{float(lam):g}":
                continue
            return row
        raise KeyError((cell, bandwidth, delta, lam))


def _fmt_tuple(x) -> str:
    x = x if isinstance(x, (tuple, list)) else (x,)
    return ";".join(f"{float(v):g}" for v in x)


def _rate(hits: int, total: int):
    if total == 0:
        return "", ""
    p = hits / total
    return f"{100 * p:.3f}", f"{100 * math.sqrt(p * (1 - p) / total):.3f}"


def reproduce(experiment_id: str, reps: int = 500, B: int = 500, seed: int = 0,
              workers: int = 1, n: int = 500, models: Optional[Sequence[str]] = None,
              bandwidths: Optional[Sequence] = None) -> Table:
    """Rejection rates (percent) with Monte Carlo standard errors.

    Failed replications (numerical errors) are counted in ``failed`` and
    left out of the denominators.
    """
    cells, bws = experiment(experiment_id, models, bandwidths)
    if reps < 1 or B < 1:
        raise DataError("reps and B must be positive")
    if n < MIN_LENGTH:
        raise DataError(f"n must be at least {MIN_LENGTH}")
    tasks = [_Task(c, bws, r, n, B, seed) for c in cells for r in range(reps)]
    if workers is None or workers <= 1:
        results = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    tally = {}
    for task, res in zip(tasks, results):
        for label, j, rej in res:
            key = (cells.index(task.cell), label, j)
            hits, ok, failed = tally.get(key, ([0] * len(LEVELS), 0, 0))
            if rej is None:
                failed += 1
            else:
                hits = [h + int(x) for h, x in zip(hits, rej)]
                ok += 1
            tally[key] = (hits, ok, failed)
    rows = []
    for ci, cell in enumerate(cells):
        for b in bws:
            label = _bw_label(b)
            for j in range(max(1, len(cell.deltas))):
                hits, ok, failed = tally[(ci, label, j)]
                r5, s5 = _rate(hits[0], ok)
                r10, s10 = _rate(hits[1], ok)
                rows.append({
                    "experiment": experiment_id,
                    "cell": cell.label,
                    "model": cell.model,
                    "test": cell.test,
                    "lags": _fmt_tuple(cell.lags),
                    "innovations": cell.innovations or "",
                    "lambda": "" if cell.lam is None else f"{cell.lam:g}",
                    "bandwidth": label,
                    "delta": _fmt_tuple(cell.deltas[j]) if cell.deltas else "",
                    "n": n,
                    "reps": reps,
                    "failed": failed,
                    "B": B,
                    "reject_5": r5,
                    "se_5": s5,
                    "reject_10": r10,
                    "se_10": s10,
                })
    return Table(experiment_id, rows)
