"""Multiple correlation breaks by binary segmentation.

Segments are tested with the classical CUSUM test and split at the first
lag's CUSUM argmax until nothing rejects. Consecutive pairs of segments can
then be re-examined with the relevant test. No multiplicity adjustment is
made across segments.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .bootstrap import BootstrapConfig
from .classical import MIN_LENGTH, run_classical_test
from .conventions import Series
from .errors import CorrBreakError, DataError, SegmentTooShort
from .relevant import RelevantConfig, RelevantTestReport, break_index, run_relevant_test
from .tuning import MVConfig, Tuning


def segment_seed(seed: int, start: int, stop: int) -> int:
    """Seed for the segment ``[start, stop)``, independent of visiting order."""
    return int(np.random.SeedSequence(seed, spawn_key=(start, stop)).generate_state(1)[0])


@dataclass
class SegmentNode:
    start: int
    stop: int
    statistic: float
    p_value: float
    reject: bool
    split: Optional[int] = None


@dataclass
class Segmentation:
    n: int
    breaks: List[float]
    indices: List[int]
    nodes: List[SegmentNode]

    def to_dict(self) -> dict:
        return {
            "kind": "segmentation",
            "n": self.n,
            "breaks": list(self.breaks),
            "break_indices": list(self.indices),
            "segments": [vars(node).copy() for node in self.nodes],
        }


def segment(series: Series, lags: Sequence[int] = (1,), tuning: Tuning = Tuning(),
            boot: BootstrapConfig = BootstrapConfig(), min_len: int = MIN_LENGTH,
            mv: MVConfig = MVConfig()) -> Segmentation:
    """Binary segmentation with the full record of every tested segment.

    Segments shorter than ``min_len`` are left unsplit. Each rejected segment
    ``[a, b)`` is cut after ``a + k``, where ``k`` is the CUSUM argmax of its
    own refitted first-lag products, and both halves are tested again.
    """
    if min_len < MIN_LENGTH:
        raise DataError(f"min_len must be at least {MIN_LENGTH}")
    boot.validate()
    values = series.values
    n = series.n
    cuts: List[int] = []
    nodes: List[SegmentNode] = []
    stack = [(0, n)]
    while stack:
        a, b = stack.pop()
        if b - a < min_len:
            continue
        cfg = replace(boot, seed=segment_seed(boot.seed, a, b))
        with warnings.catch_warnings():
            # short children are expected here; min_len is the governing floor
            warnings.simplefilter("ignore", UserWarning)
            report = run_classical_test(Series(values[a:b]), lags, tuning, cfg, "constant", mv)
        node = SegmentNode(a, b, report.statistic, report.p_value, report.reject)
        nodes.append(node)
        if not report.reject:
            continue
        k = break_index(report.prepared.products[0])
        if k >= b - a:
            continue
        node.split = a + k
        cuts.append(a + k)
        stack.append((a + k, b))
        stack.append((a, a + k))
    cuts.sort()
    nodes.sort(key=lambda s: (s.start, s.stop))
    return Segmentation(n, [c / n for c in cuts], cuts, nodes)


def binary_segment(series: Series, lags: Sequence[int] = (1,), tuning: Tuning = Tuning(),
                   boot: BootstrapConfig = BootstrapConfig(), alpha: Optional[float] = None,
                   min_len: int = MIN_LENGTH) -> List[float]:
    """Sorted break times on the global grid ``i/n``."""
    if alpha is not None:
        boot = replace(boot, alpha=alpha)
    return segment(series, lags, tuning, boot, min_len).breaks


@dataclass
class PairResult:
    start: int
    stop: int
    report: Optional[RelevantTestReport] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"start": self.start, "stop": self.stop, "error": self.error}
        out["report"] = None if self.report is None else self.report.to_dict()
        return out


def pair_bounds(n: int, breaks: Sequence[float]) -> List[tuple]:
    """Index ranges ``[a, b)`` covering ``(t_l, t_{l+2}]`` for consecutive break pairs."""
    pts = [0] + [int(round(t * n)) for t in breaks] + [n]
    if any(q <= p for p, q in zip(pts, pts[1:])):
        raise DataError("breaks must be strictly increasing inside (0, 1)")
    return [(pts[l], pts[l + 2]) for l in range(len(pts) - 2)]


def pairwise_relevant(series: Series, breaks: Sequence[float],
                      config: RelevantConfig = RelevantConfig(), tuning: Tuning = Tuning(),
                      mv: MVConfig = MVConfig()) -> List[PairResult]:
    """Relevant test on every span of two consecutive segments.

    A span shorter than the minimum test length is reported with an error
    and skipped; the others are tested with freshly fitted mean and variance.
    """
    config.validate()
    values = series.values
    out = []
    for a, b in pair_bounds(series.n, breaks):
        if b - a < MIN_LENGTH:
            err = SegmentTooShort(f"span [{a}, {b}) has {b - a} points, below {MIN_LENGTH}")
            out.append(PairResult(a, b, error=str(err)))
            continue
        cfg = replace(config, boot=replace(config.boot, seed=segment_seed(config.boot.seed, a, b)))
        try:
            report = run_relevant_test(Series(values[a:b]), cfg, tuning, mv)
        except CorrBreakError as exc:
            out.append(PairResult(a, b, error=f"{type(exc).__name__}: {exc}"))
            continue
        out.append(PairResult(a, b, report=report))
    return out
