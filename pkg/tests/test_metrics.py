"""ROC construction, AUC equivalence, and report rendering."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from galdetect import metrics
from galdetect.data import N_EVENTS
from galdetect.errors import (
    AllSingleClass,
    EmptyInput,
    ShapeMismatch,
    SingleClass,
)


def test_roc_perfect_ranking():
    curve = metrics.roc_curve([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert metrics.auc(curve) == 1.0
    assert curve.fpr[0] == 0.0 and curve.tpr[0] == 0.0
    assert curve.fpr[-1] == 1.0 and curve.tpr[-1] == 1.0


def test_roc_reversed_ranking():
    curve = metrics.roc_curve([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0])
    assert metrics.auc(curve) == 0.0


def test_roc_ties_collapse_to_one_point():
    # all scores equal: the only operating points are (0,0) and (1,1)
    curve = metrics.roc_curve([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0])
    assert len(curve.fpr) == 2
    assert metrics.auc(curve) == 0.5


def test_roc_partial_tie_hand_computed():
    # scores 0.9(+), 0.5(+), 0.5(-), 0.1(-): the tie contributes half credit
    curve = metrics.roc_curve([0.9, 0.5, 0.5, 0.1], [1, 1, 0, 0])
    # pairwise: pairs (0.9,0.5-)=1, (0.9,0.1)=1, (0.5+,0.5-)=0.5, (0.5+,0.1)=1
    assert abs(metrics.auc(curve) - 3.5 / 4.0) < 1e-15


def test_auc_matches_pairwise_oracle(rng):
    for _ in range(50):
        n = int(rng.integers(5, 60))
        scores = rng.choice([0.1, 0.25, 0.5, 0.75, 0.9], size=n)
        targets = rng.integers(0, 2, n)
        if targets.min() == targets.max():
            targets[0] = 1 - targets[0]
        a = metrics.auc(metrics.roc_curve(scores, targets))
        b = metrics.auc_pairwise(scores, targets)
        assert abs(a - b) < 1e-12


def test_roc_validation():
    with pytest.raises(EmptyInput):
        metrics.roc_curve([], [])
    with pytest.raises(ShapeMismatch):
        metrics.roc_curve([0.1, 0.2], [1])
    with pytest.raises(SingleClass):
        metrics.roc_curve([0.1, 0.2], [1, 1])
    with pytest.raises(ValueError):
        metrics.roc_curve([0.1, 0.2], [1, 2])


def test_evaluate_mixed_single_class(rng):
    w = 40
    scores = rng.random((w, N_EVENTS))
    targets = rng.integers(0, 2, (w, N_EVENTS))
    targets[:, 3] = 0
    for e in range(N_EVENTS):
        if e != 3 and targets[:, e].min() == targets[:, e].max():
            targets[0, e] = 1 - targets[0, e]
    report = metrics.evaluate(scores, targets)
    assert math.isnan(report.aucs[3])
    assert report.curves[3] is None
    defined = [a for a in report.aucs if not math.isnan(a)]
    assert abs(report.mean_auc - np.mean(defined)) < 1e-15
    assert report.n_windows == w
    assert report.positives[3] == 0


def test_evaluate_all_single_class():
    scores = np.random.default_rng(0).random((10, N_EVENTS))
    targets = np.zeros((10, N_EVENTS), dtype=np.uint8)
    with pytest.raises(AllSingleClass):
        metrics.evaluate(scores, targets)


def test_evaluate_shape_checks(rng):
    with pytest.raises(ShapeMismatch):
        metrics.evaluate(rng.random((10, 3)), np.zeros((10, 3)))
    with pytest.raises(ShapeMismatch):
        metrics.evaluate(rng.random((10, N_EVENTS)), np.zeros((9, N_EVENTS)))


def test_report_json_renders_nan_as_null(rng):
    scores = rng.random((30, N_EVENTS))
    targets = rng.integers(0, 2, (30, N_EVENTS))
    targets[:, 0] = 0
    for e in range(1, N_EVENTS):
        if targets[:, e].min() == targets[:, e].max():
            targets[0, e] = 1 - targets[0, e]
    report = metrics.evaluate(scores, targets)
    text = metrics.report_to_json(report)
    parsed = json.loads(text)
    assert parsed["events"][0]["auc"] is None
    assert [e["name"] for e in parsed["events"]] == list(metrics.EVENT_NAMES)
    assert parsed["events"][0]["positives"] == 0
    assert parsed["n_windows"] == 30
    assert abs(parsed["mean_auc"] - report.mean_auc) < 1e-15


def test_curve_csv_header_and_inf():
    curve = metrics.roc_curve([0.9, 0.1], [1, 0])
    text = metrics.curve_to_csv(curve)
    lines = text.strip().splitlines()
    assert lines[0] == "threshold,fpr,tpr"
    assert lines[1].startswith("inf,")
    assert len(lines) == 1 + len(curve.fpr)


def test_report_table_marks_undefined(rng):
    scores = rng.random((30, N_EVENTS))
    targets = rng.integers(0, 2, (30, N_EVENTS))
    targets[:, 2] = 0
    for e in range(N_EVENTS):
        if e != 2 and targets[:, e].min() == targets[:, e].max():
            targets[0, e] = 1 - targets[0, e]
    table = metrics.report_to_table(metrics.evaluate(scores, targets))
    row = next(line for line in table.splitlines()
               if line.startswith(metrics.EVENT_NAMES[2]))
    assert "---" in row
    assert "mean" in table


def test_auc_invariant_to_monotone_transform(rng):
    scores = rng.random(80)
    targets = rng.integers(0, 2, 80)
    targets[0], targets[1] = 0, 1
    a = metrics.auc(metrics.roc_curve(scores, targets))
    b = metrics.auc(metrics.roc_curve(np.exp(3 * scores), targets))
    assert abs(a - b) < 1e-15
