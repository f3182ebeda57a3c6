"""Threshold calibration against a human-labeled record pool.

Two calibrated thresholds come out of this module.  The rate-matching
threshold reproduces a target acceptance rate on the calibration set.
The half-probability threshold tau_05 is the smallest score at which the
isotonic fit of the conditional tail probability

    pi(z) = P(human accepts | agent score >= z)

reaches 1/2.  Stratified subsampling (score bins crossed with review
status, largest-remainder quotas) builds the calibration set itself.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .core import CalibrationRecord

__all__ = [
    "ThresholdUnreachableError",
    "CellQuota",
    "StratificationPlan",
    "IsotonicCurve",
    "cell_populations",
    "allocate_quotas",
    "stratified_sample",
    "empirical_acceptance",
    "rate_matching_threshold",
    "tail_probability_points",
    "isotonic_fit",
    "tau_05",
    "tau05_from_scores",
    "fit_tau05",
]

logger = logging.getLogger(__name__)

_MONOTONE_TOL = 1e-12


class ThresholdUnreachableError(ValueError):
    """The fitted tail curve never reaches the requested level."""


@dataclass(frozen=True)
class CellQuota:
    """Allocation for one (score bin, status) cell."""

    bin_index: int
    status: str
    population: int
    quota: int

    def __post_init__(self) -> None:
        if not isinstance(self.bin_index, int) or self.bin_index < 0:
            raise ValueError(f"bin_index: must be an integer >= 0, got {self.bin_index!r}")
        if not isinstance(self.status, str) or not self.status:
            raise ValueError("status: must be a non-empty string")
        if not isinstance(self.population, int) or self.population < 0:
            raise ValueError(f"population: must be an integer >= 0, got {self.population!r}")
        if not isinstance(self.quota, int) or not 0 <= self.quota <= self.population:
            raise ValueError(
                f"quota: must be an integer in [0, population={self.population}], got {self.quota!r}"
            )


@dataclass(frozen=True)
class StratificationPlan:
    """Bin edges, status vocabulary, and per-cell quotas for subsampling."""

    bin_edges: tuple[float, ...]
    status_vocabulary: tuple[str, ...]
    cells: tuple[CellQuota, ...]

    def __post_init__(self) -> None:
        edges = tuple(float(e) for e in self.bin_edges)
        object.__setattr__(self, "bin_edges", edges)
        if len(edges) < 2:
            raise ValueError(f"bin_edges: need at least 2 edges, got {len(edges)}")
        for i, e in enumerate(edges):
            if not math.isfinite(e):
                raise ValueError(f"bin_edges[{i}]: must be finite, got {e!r}")
        if any(a >= b for a, b in zip(edges, edges[1:])):
            raise ValueError("bin_edges: must be strictly increasing")
        vocab = tuple(self.status_vocabulary)
        if not vocab:
            raise ValueError("status_vocabulary: must be non-empty")
        if len(set(vocab)) != len(vocab):
            raise ValueError("status_vocabulary: entries must be unique")
        for s in vocab:
            if not isinstance(s, str) or not s:
                raise ValueError("status_vocabulary: entries must be non-empty strings")
        n_bins = len(edges) - 1
        seen: set[tuple[int, str]] = set()
        for cell in self.cells:
            if cell.bin_index >= n_bins:
                raise ValueError(
                    f"cells: bin_index {cell.bin_index} out of range for {n_bins} bins"
                )
            if cell.status not in vocab:
                raise ValueError(f"cells: status {cell.status!r} not in vocabulary")
            key = (cell.bin_index, cell.status)
            if key in seen:
                raise ValueError(f"cells: duplicate cell {key}")
            seen.add(key)
        if self.n_cal < 1:
            raise ValueError("cells: quotas must sum to at least 1")

    @property
    def n_cal(self) -> int:
        return sum(cell.quota for cell in self.cells)

    def to_dict(self) -> dict[str, Any]:
        return {
            "bin_edges": list(self.bin_edges),
            "status_vocabulary": list(self.status_vocabulary),
            "cells": [
                {
                    "bin_index": c.bin_index,
                    "status": c.status,
                    "population": c.population,
                    "quota": c.quota,
                }
                for c in self.cells
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StratificationPlan":
        return cls(
            tuple(float(e) for e in data["bin_edges"]),
            tuple(str(s) for s in data["status_vocabulary"]),
            tuple(
                CellQuota(int(c["bin_index"]), str(c["status"]), int(c["population"]), int(c["quota"]))
                for c in data["cells"]
            ),
        )


@dataclass(frozen=True)
class IsotonicCurve:
    """Non-decreasing step fit of tail probabilities at score knots.

    Knots are (threshold, fitted value, weight) triples with strictly
    increasing thresholds and fitted values in [0, 1].
    """

    knots: tuple[tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        if not self.knots:
            raise ValueError("knots: must contain at least one knot")
        cleaned = []
        for i, (t, v, w) in enumerate(self.knots):
            t, v, w = float(t), float(v), float(w)
            if not math.isfinite(t):
                raise ValueError(f"knots[{i}]: threshold must be finite, got {t!r}")
            if not -_MONOTONE_TOL <= v <= 1.0 + _MONOTONE_TOL:
                raise ValueError(f"knots[{i}]: fitted value must lie in [0, 1], got {v!r}")
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"knots[{i}]: weight must be finite and > 0, got {w!r}")
            cleaned.append((t, min(max(v, 0.0), 1.0), w))
        for i in range(1, len(cleaned)):
            if cleaned[i][0] <= cleaned[i - 1][0]:
                raise ValueError("knots: thresholds must be strictly increasing")
            if cleaned[i][1] < cleaned[i - 1][1] - _MONOTONE_TOL:
                raise ValueError("knots: fitted values must be non-decreasing")
        object.__setattr__(self, "knots", tuple(cleaned))

    @property
    def thresholds(self) -> tuple[float, ...]:
        return tuple(k[0] for k in self.knots)

    @property
    def fitted(self) -> tuple[float, ...]:
        return tuple(k[1] for k in self.knots)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(k[2] for k in self.knots)


def _bin_index(score: float, edges: Sequence[float]) -> int:
    # bins are [e_i, e_{i+1}) except the last, which includes its upper edge
    if score < edges[0] or score > edges[-1]:
        raise ValueError(f"score {score} outside binning range [{edges[0]}, {edges[-1]}]")
    idx = bisect.bisect_right(edges, score) - 1
    return min(idx, len(edges) - 2)


def cell_populations(
    records: Sequence[CalibrationRecord],
    bin_edges: Sequence[float],
    status_vocabulary: Sequence[str],
) -> dict[tuple[int, str], int]:
    """Count pool records per (score bin, status) cell."""
    vocab = tuple(status_vocabulary)
    counts: dict[tuple[int, str], int] = {}
    for rec in records:
        if rec.status not in vocab:
            raise ValueError(
                f"record {rec.submission_id!r}: status {rec.status!r} not in vocabulary {vocab}"
            )
        try:
            b = _bin_index(rec.agent_score, bin_edges)
        except ValueError as exc:
            raise ValueError(f"record {rec.submission_id!r}: {exc}") from exc
        key = (b, rec.status)
        counts[key] = counts.get(key, 0) + 1
    return counts


def allocate_quotas(
    populations: Mapping[tuple[int, str], int],
    n_cal: int,
    bin_edges: Sequence[float],
    status_vocabulary: Sequence[str],
) -> StratificationPlan:
    """Largest-remainder allocation of ``n_cal`` across cells.

    Each cell's ideal share is its population fraction times ``n_cal``;
    cells receive the floor of their share and the leftover units go to
    the largest remainders (ties broken by bin index, then status order).
    When a winning cell is already exhausted the unit moves to the next
    feasible cell and a warning is logged.
    """
    edges = tuple(float(e) for e in bin_edges)
    vocab = tuple(status_vocabulary)
    n_bins = len(edges) - 1
    if n_bins < 1:
        raise ValueError("bin_edges: need at least 2 edges")
    keys = [(b, s) for b in range(n_bins) for s in vocab]
    key_set = set(keys)
    for key, pop in populations.items():
        if key not in key_set:
            raise ValueError(f"populations: unknown cell {key!r}")
        if not isinstance(pop, int) or pop < 0:
            raise ValueError(f"populations: cell {key!r} count must be an integer >= 0")
    pops = [populations.get(key, 0) for key in keys]
    total = sum(pops)
    if total < 1:
        raise ValueError("populations: pool is empty")
    if not isinstance(n_cal, int) or not 1 <= n_cal <= total:
        raise ValueError(f"n_cal: must be an integer in [1, {total}], got {n_cal!r}")

    # integer arithmetic keeps remainder comparisons exact
    base = [(n_cal * p) // total for p in pops]
    remainder = [(n_cal * p) % total for p in pops]
    quotas = list(base)
    leftover = n_cal - sum(base)
    order = sorted(range(len(keys)), key=lambda i: (-remainder[i], i))
    while leftover > 0:
        placed = False
        for i in order:
            if quotas[i] < pops[i]:
                if remainder[i] == 0 or quotas[i] > base[i]:
                    logger.warning(
                        "quota overflow: reallocating 1 unit to cell %s", keys[i]
                    )
                quotas[i] += 1
                leftover -= 1
                placed = True
                if leftover == 0:
                    break
        if not placed:
            raise ValueError("n_cal: exceeds total feasible capacity")

    cells = tuple(
        CellQuota(bin_index=b, status=s, population=p, quota=q)
        for (b, s), p, q in zip(keys, pops, quotas)
    )
    return StratificationPlan(bin_edges=edges, status_vocabulary=vocab, cells=cells)


def stratified_sample(
    pool: Sequence[CalibrationRecord],
    plan: StratificationPlan,
    seed: int,
) -> list[CalibrationRecord]:
    """Draw each cell's quota uniformly without replacement, deterministically.

    Returns the selected records in pool order.  The plan must be feasible:
    every cell's quota has to fit inside the pool's actual cell population.
    """
    members: dict[tuple[int, str], list[int]] = {}
    for idx, rec in enumerate(pool):
        if rec.status not in plan.status_vocabulary:
            raise ValueError(
                f"record {rec.submission_id!r}: status {rec.status!r} not in plan vocabulary"
            )
        try:
            b = _bin_index(rec.agent_score, plan.bin_edges)
        except ValueError as exc:
            raise ValueError(f"record {rec.submission_id!r}: {exc}") from exc
        members.setdefault((b, rec.status), []).append(idx)

    rng = np.random.default_rng(seed)
    chosen: list[int] = []
    for cell in plan.cells:
        available = members.get((cell.bin_index, cell.status), [])
        if cell.quota > len(available):
            raise ValueError(
                f"cells: quota {cell.quota} exceeds pool population {len(available)} "
                f"in cell {(cell.bin_index, cell.status)}"
            )
        if cell.quota == 0:
            continue
        picks = rng.choice(len(available), size=cell.quota, replace=False)
        chosen.extend(available[i] for i in picks)
    chosen.sort()
    return [pool[i] for i in chosen]


def empirical_acceptance(scores: Sequence[float], threshold: float) -> float:
    """Fraction of scores at or above the threshold."""
    arr = np.asarray(scores, dtype=float)
    if arr.size == 0:
        raise ValueError("scores: must be non-empty")
    if np.isnan(threshold):
        raise ValueError("threshold: must not be NaN")
    return float(np.mean(arr >= threshold))


def rate_matching_threshold(scores: Sequence[float], target_rate: float) -> float:
    """Smallest threshold whose empirical acceptance is closest to the target.

    Candidates are the distinct observed scores plus an accept-nothing
    sentinel (+inf); among equally close candidates the smallest wins.
    """
    arr = np.asarray(scores, dtype=float)
    if arr.size == 0:
        raise ValueError("scores: must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("scores: must be finite")
    target_rate = float(target_rate)
    if not 0.0 < target_rate < 1.0:
        raise ValueError(f"target_rate: must lie strictly in (0, 1), got {target_rate!r}")
    ordered = np.sort(arr)
    n = ordered.size
    uniq, first = np.unique(ordered, return_index=True)
    rates = (n - first) / n
    gaps = np.abs(rates - target_rate)
    sentinel_gap = target_rate  # acceptance 0 at +inf
    best = min(float(gaps.min()), sentinel_gap)
    finite_hits = np.nonzero(gaps == best)[0]
    if finite_hits.size:
        return float(uniq[finite_hits[0]])
    return math.inf


def tail_probability_points(
    records: Sequence[CalibrationRecord],
    thresholds: Sequence[float],
) -> list[tuple[float, float, float]]:
    """Raw conditional acceptance estimates at candidate thresholds.

    For each threshold z the estimate is the accepted fraction among
    records with score >= z, weighted by that tail count.  Thresholds must
    be strictly increasing and every tail must be non-empty.
    """
    if not records:
        raise ValueError("records: must be non-empty")
    cand = np.asarray(thresholds, dtype=float)
    if cand.size == 0:
        raise ValueError("thresholds: must be non-empty")
    if not np.all(np.isfinite(cand)):
        raise ValueError("thresholds: must be finite")
    if np.any(np.diff(cand) <= 0):
        raise ValueError("thresholds: must be strictly increasing")
    scores = np.array([r.agent_score for r in records], dtype=float)
    accepts = np.array([r.human_accept for r in records], dtype=float)
    order = np.argsort(scores, kind="stable")
    scores = scores[order]
    accepts = accepts[order]
    suffix = np.concatenate([np.cumsum(accepts[::-1])[::-1], [0.0]])
    idx = np.searchsorted(scores, cand, side="left")
    counts = scores.size - idx
    if np.any(counts == 0):
        bad = cand[np.nonzero(counts == 0)[0][0]]
        raise ValueError(f"thresholds: no records with score >= {bad}")
    estimates = suffix[idx] / counts
    return [
        (float(t), float(p), float(c))
        for t, p, c in zip(cand, estimates, counts)
    ]


def _pava(values: Sequence[float], weights: Sequence[float]) -> np.ndarray:
    """Weighted pool-adjacent-violators fit (non-decreasing)."""
    swv: list[float] = []  # per-block sum of weight * value
    sw: list[float] = []   # per-block sum of weight
    cnt: list[int] = []
    for v, w in zip(values, weights):
        swv.append(v * w)
        sw.append(w)
        cnt.append(1)
        # merge while the previous block mean exceeds the last one;
        # cross-multiplied form avoids division (weights are positive)
        while len(swv) > 1 and swv[-2] * sw[-1] > swv[-1] * sw[-2]:
            top_swv, top_sw, top_cnt = swv.pop(), sw.pop(), cnt.pop()
            swv[-1] += top_swv
            sw[-1] += top_sw
            cnt[-1] += top_cnt
    out = np.empty(len(values), dtype=float)
    pos = 0
    for block_swv, block_sw, block_len in zip(swv, sw, cnt):
        out[pos : pos + block_len] = block_swv / block_sw
        pos += block_len
    return out


def isotonic_fit(points: Sequence[tuple[float, float, float]]) -> IsotonicCurve:
    """Weighted least-squares non-decreasing fit of (t, value, weight) points."""
    if not points:
        raise ValueError("points: must be non-empty")
    ts = [float(p[0]) for p in points]
    values = [float(p[1]) for p in points]
    weights = [float(p[2]) for p in points]
    for i, t in enumerate(ts):
        if not math.isfinite(t):
            raise ValueError(f"points[{i}]: threshold must be finite, got {t!r}")
    if any(a >= b for a, b in zip(ts, ts[1:])):
        raise ValueError("points: thresholds must be strictly increasing")
    for i, v in enumerate(values):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"points[{i}]: value must lie in [0, 1], got {v!r}")
    for i, w in enumerate(weights):
        if not (math.isfinite(w) and w > 0):
            raise ValueError(f"points[{i}]: weight must be finite and > 0, got {w!r}")
    fitted = _pava(values, weights)
    return IsotonicCurve(tuple(zip(ts, fitted.tolist(), weights)))


def tau_05(curve: IsotonicCurve, level: float = 0.5) -> float:
    """Smallest knot threshold whose fitted value reaches ``level``.

    No interpolation between knots.  Raises ThresholdUnreachableError when
    the curve stays below the level everywhere.
    """
    level = float(level)
    if not 0.0 < level < 1.0:
        raise ValueError(f"level: must lie strictly in (0, 1), got {level!r}")
    for t, v, _ in curve.knots:
        if v >= level:
            return t
    raise ThresholdUnreachableError(
        f"fitted curve never reaches {level} (max fitted value {curve.fitted[-1]:.6g})"
    )


def tau05_from_scores(scores: Sequence[float], accepts: Sequence[float]) -> float:
    """Fit the tail curve on all distinct scores and return tau_05.

    Array fast path used by the bootstrap harness; equivalent to
    fit_tau05 on the corresponding records.
    """
    s = np.asarray(scores, dtype=float)
    a = np.asarray(accepts, dtype=float)
    if s.size == 0 or s.shape != a.shape:
        raise ValueError("scores: must be non-empty and match accepts in length")
    order = np.argsort(s, kind="stable")
    s = s[order]
    a = a[order]
    suffix = np.concatenate([np.cumsum(a[::-1])[::-1], [0.0]])
    uniq, first = np.unique(s, return_index=True)
    counts = s.size - first
    estimates = suffix[first] / counts
    fitted = _pava(estimates.tolist(), counts.tolist())
    hits = np.nonzero(fitted >= 0.5)[0]
    if hits.size == 0:
        raise ThresholdUnreachableError(
            f"fitted curve never reaches 0.5 (max fitted value {float(fitted[-1]):.6g})"
        )
    return float(uniq[hits[0]])


def fit_tau05(records: Sequence[CalibrationRecord]) -> tuple[float, IsotonicCurve]:
    """Full tau_05 pipeline on records: tail estimates, isotonic fit, crossing."""
    if not records:
        raise ValueError("records: must be non-empty")
    candidates = sorted({r.agent_score for r in records})
    points = tail_probability_points(records, candidates)
    curve = isotonic_fit(points)
    return tau_05(curve), curve
