"""Receiver operating characteristic curves and area-under-curve scoring."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import EVENT_NAMES, N_EVENTS
from .errors import AllSingleClass, EmptyInput, ShapeMismatch, SingleClass

# numpy renamed trapz to trapezoid in 2.0
_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class RocCurve:
    """Operating points swept over every distinct score threshold.

    Points run from the all-negative corner (0, 0) to the all-positive
    corner (1, 1); `thresholds` holds the score cut that produced each
    interior point (the first entry is above every score).
    """

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray


def roc_curve(scores, targets) -> RocCurve:
    """Exact ROC with tied scores collapsed to single operating points."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    targets = np.asarray(targets).ravel()
    if scores.size == 0:
        raise EmptyInput("no scores to rank")
    if scores.shape != targets.shape:
        raise ShapeMismatch(f"{scores.shape} scores vs {targets.shape} targets")
    if not np.isin(targets, (0, 1)).all():
        raise ValueError("targets must be 0 or 1")
    pos = int(targets.sum())
    neg = targets.size - pos
    if pos == 0 or neg == 0:
        raise SingleClass(f"need both classes, got {pos} positives / {neg} negatives")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    t = targets[order]
    # last index of each tie group marks a distinct operating point
    distinct = np.flatnonzero(np.diff(s) != 0)
    cut = np.concatenate([distinct, [s.size - 1]])
    tp = np.cumsum(t)[cut]
    fp = (cut + 1) - tp
    tpr = np.concatenate([[0.0], tp / pos])
    fpr = np.concatenate([[0.0], fp / neg])
    thresholds = np.concatenate([[np.inf], s[cut]])
    return RocCurve(fpr, tpr, thresholds)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the ROC curve."""
    return float(_trapezoid(curve.tpr, curve.fpr))


def auc_pairwise(scores, targets) -> float:
    """Probability a random positive outranks a random negative, ties half.

    Exhaustive over all positive/negative pairs; slow but an independent
    check of the threshold-sweep area.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    targets = np.asarray(targets).ravel()
    pos = scores[targets == 1]
    neg = scores[targets == 0]
    if pos.size == 0 or neg.size == 0:
        raise SingleClass(f"need both classes, got {pos.size} positives / {neg.size} negatives")
    diff = pos[:, None] - neg[None, :]
    wins = (diff > 0).sum() + 0.5 * (diff == 0).sum()
    return float(wins) / (pos.size * neg.size)


@dataclass(frozen=True)
class EvalReport:
    """Per-event detection quality over a scored window set."""

    events: tuple[str, ...]
    aucs: tuple[float, ...]          # nan where undefined
    mean_auc: float                  # over defined events
    n_windows: int
    positives: tuple[int, ...]
    curves: tuple[RocCurve | None, ...]


def evaluate(scores, targets) -> EvalReport:
    """Score a (W, 6) prediction block against binary targets.

    Events whose targets are single-class get AUC nan and are excluded from
    the mean; if every event is single-class the evaluation is meaningless
    and raises.
    """
    scores = np.asarray(scores, dtype=np.float64)
    targets = np.asarray(targets)
    if scores.ndim != 2 or scores.shape[1] != N_EVENTS:
        raise ShapeMismatch(f"scores must be (W, {N_EVENTS}), got {scores.shape}")
    if scores.shape != targets.shape:
        raise ShapeMismatch(f"{scores.shape} scores vs {targets.shape} targets")
    aucs: list[float] = []
    curves: list[RocCurve | None] = []
    positives: list[int] = []
    for e in range(N_EVENTS):
        positives.append(int(targets[:, e].sum()))
        try:
            curve = roc_curve(scores[:, e], targets[:, e])
        except SingleClass:
            aucs.append(float("nan"))
            curves.append(None)
            continue
        aucs.append(auc(curve))
        curves.append(curve)
    defined = [a for a in aucs if not np.isnan(a)]
    if not defined:
        raise AllSingleClass("every event is single-class in this window set")
    return EvalReport(
        EVENT_NAMES, tuple(aucs), float(np.mean(defined)),
        scores.shape[0], tuple(positives), tuple(curves),
    )


def report_to_json(report: EvalReport) -> str:
    payload = {
        "n_windows": report.n_windows,
        "mean_auc": report.mean_auc,
        "events": [
            {
                "name": name,
                "auc": None if np.isnan(a) else a,
                "positives": p,
            }
            for name, a, p in zip(report.events, report.aucs, report.positives)
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def report_to_table(report: EvalReport) -> str:
    """Aligned text table, one row per event plus the mean."""
    width = max(len(n) for n in report.events)
    lines = [f"{'event':<{width}}  {'auc':>7}  {'positives':>9}"]
    for name, a, p in zip(report.events, report.aucs, report.positives):
        shown = "   --- " if np.isnan(a) else f"{a:7.4f}"
        lines.append(f"{name:<{width}}  {shown}  {p:9d}")
    lines.append(f"{'mean':<{width}}  {report.mean_auc:7.4f}  {report.n_windows:9d}")
    return "\n".join(lines) + "\n"


def curve_to_csv(curve: RocCurve) -> str:
    lines = ["threshold,fpr,tpr"]
    for th, f, t in zip(curve.thresholds, curve.fpr, curve.tpr):
        lines.append(f"{'inf' if np.isinf(th) else repr(float(th))},{repr(float(f))},{repr(float(t))}")
    return "\n".join(lines) + "\n"
