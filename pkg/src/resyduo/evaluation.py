"""Ten-fold cross-validation and the five evaluation metrics.

Folds partition the observed interactions of a matrix: a seeded shuffle
followed by a round-robin deal, so fold sizes differ by at most one and
the whole procedure is a pure function of (matrix, k, seed).

Per fold, the engine trains on the remaining interactions, predicts the
held-out ones for normalized MAE/RMSE, and emits a top-n list per test
row for precision / recall / success rate.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, asdict

import numpy as np

from .engine import (
    KnnConfig,
    RecommendationList,
    batch_estimates,
    build_similarity_model,
    top_n,
)
from .errors import MetricDomainError, SplitError
from .matrix import RatingMatrix
from .projections import CutoffConfig, apply_cutoff


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: dict
    seed: int

    def fold_pairs(self, fold):
        return [pair for pair, f in self.assignments.items() if f == fold]


@dataclass(frozen=True)
class AccuracyReport:
    tp: float
    fp: float
    fn: float
    precision: float
    recall: float
    success_rate: float


@dataclass(frozen=True)
class RankingReport:
    mae: float
    rmse: float
    n_pairs: float


@dataclass(frozen=True)
class EvaluationReport:
    per_fold: tuple
    averages: tuple
    dataset_tag: str
    config: KnnConfig
    cutoff: CutoffConfig
    n: int
    folds: int
    seed: int


def kfold_split(matrix: RatingMatrix, k, seed) -> FoldPlan:
    """Deal the observed interactions into k folds after a seeded shuffle."""
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    interactions = [(i, j) for i, j, _ in matrix.entries()]
    if k > len(interactions):
        raise SplitError(
            f"cannot split {len(interactions)} interactions into {k} folds"
        )
    rng = random.Random(seed)
    rng.shuffle(interactions)
    assignments = {pair: idx % k for idx, pair in enumerate(interactions)}
    return FoldPlan(k, assignments, seed)


def accuracy_metrics(recommended, ground_truth) -> AccuracyReport:
    """Micro-averaged tp/fp/fn over rows plus the at-least-one success rate.

    recommended maps row -> RecommendationList (or iterable of item ids);
    ground_truth maps row -> set of relevant item ids.
    """
    if not recommended:
        raise MetricDomainError("accuracy metrics need at least one row")
    missing = set(recommended) - set(ground_truth)
    if missing:
        raise MetricDomainError(f"rows without ground truth: {sorted(missing)!r}")
    tp = fp = fn = 0
    hits = 0
    for row, recs in recommended.items():
        if isinstance(recs, RecommendationList):
            rec_items = set(recs.item_ids())
        else:
            rec_items = set(recs)
        truth = set(ground_truth[row])
        row_tp = len(rec_items & truth)
        tp += row_tp
        fp += len(rec_items - truth)
        fn += len(truth - rec_items)
        if row_tp > 0:
            hits += 1
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    success = hits / len(recommended)
    return AccuracyReport(tp, fp, fn, precision, recall, success)


def error_metrics(pairs, scale) -> RankingReport:
    """Normalized MAE/RMSE over (actual, predicted) pairs."""
    pairs = list(pairs)
    if not pairs:
        raise MetricDomainError("error metrics need at least one pair")
    rmin, rmax = float(scale[0]), float(scale[1])
    if not rmax > rmin:
        raise ValueError(f"rating scale must satisfy rmax > rmin, got {scale!r}")
    width = rmax - rmin
    diffs = np.array([float(p) - float(a) for a, p in pairs])
    mae = float(np.abs(diffs).mean()) / width
    rmse = math.sqrt(float((diffs * diffs).mean())) / width
    return RankingReport(mae, rmse, len(pairs))


def _train_matrix(matrix, heldout):
    observed = matrix.observed.copy()
    for i, j in heldout:
        observed[i, j] = False
    return RatingMatrix(
        matrix.row_labels, matrix.col_labels, matrix.values, observed, matrix.rating_scale
    )


def cross_validate(
    matrix: RatingMatrix,
    config: KnnConfig,
    cutoff: CutoffConfig,
    k=10,
    n=5,
    seed=0,
    dataset_tag="",
) -> EvaluationReport:
    """Cut off the matrix, then run k-fold CV with one model per fold.

    Error metrics cover every held-out interaction; ranking metrics cover
    rows with at least one held-out positive, whose candidate set excludes
    the positives still visible in that fold's training matrix.
    """
    reduced = apply_cutoff(matrix, cutoff)
    plan = kfold_split(reduced, k, seed)
    per_fold = []
    for fold in range(k):
        heldout = sorted(plan.fold_pairs(fold))
        train = _train_matrix(reduced, heldout)
        model = build_similarity_model(train, config)

        estimates = batch_estimates(model, heldout)
        actuals = [float(reduced.values[i, j]) for i, j in heldout]
        ranking = error_metrics(zip(actuals, estimates), reduced.rating_scale)

        truth = {}
        for i, j in heldout:
            if reduced.values[i, j] > 0:
                truth.setdefault(i, set()).add(reduced.col_labels[j])
        recommended = {}
        for i in sorted(truth):
            row_label = reduced.row_labels[i]
            visible = {
                reduced.col_labels[j]
                for j in np.nonzero(train.observed[i] & (train.values[i] > 0))[0]
            }
            recommended[row_label] = top_n(model, row_label, n, exclude=visible)
        if recommended:
            accuracy = accuracy_metrics(
                recommended, {reduced.row_labels[i]: s for i, s in truth.items()}
            )
        else:
            # fold held out no positives at all; nothing to rank
            accuracy = AccuracyReport(0, 0, 0, 0.0, 0.0, 0.0)
        per_fold.append((accuracy, ranking))

    def mean(getter, reports):
        return float(sum(getter(r) for r in reports)) / len(reports)

    acc_avg = AccuracyReport(
        *(mean(lambda r, f=f: getattr(r[0], f), per_fold) for f in
          ("tp", "fp", "fn", "precision", "recall", "success_rate"))
    )
    rank_avg = RankingReport(
        *(mean(lambda r, f=f: getattr(r[1], f), per_fold) for f in ("mae", "rmse", "n_pairs"))
    )
    return EvaluationReport(
        per_fold=tuple(per_fold),
        averages=(acc_avg, rank_avg),
        dataset_tag=dataset_tag,
        config=config,
        cutoff=cutoff,
        n=n,
        folds=k,
        seed=seed,
    )


def _fmt(x: float) -> str:
    f = float(x)
    if f.is_integer() and abs(f) < 1e16:
        return str(int(f))
    return repr(f)


def report_to_csv(report: EvaluationReport) -> str:
    lines = ["fold,precision,recall,success_rate,mae,rmse"]
    for idx, (acc, rank) in enumerate(report.per_fold, start=1):
        lines.append(
            f"{idx},{_fmt(acc.precision)},{_fmt(acc.recall)},"
            f"{_fmt(acc.success_rate)},{_fmt(rank.mae)},{_fmt(rank.rmse)}"
        )
    acc, rank = report.averages
    lines.append(
        f"avg,{_fmt(acc.precision)},{_fmt(acc.recall)},"
        f"{_fmt(acc.success_rate)},{_fmt(rank.mae)},{_fmt(rank.rmse)}"
    )
    return "\n".join(lines) + "\n"


def _fold_obj(acc: AccuracyReport, rank: RankingReport):
    obj = asdict(acc)
    obj.update(asdict(rank))
    return obj


def report_to_json(report: EvaluationReport) -> str:
    acc_avg, rank_avg = report.averages
    payload = {
        "dataset_tag": report.dataset_tag,
        "config": asdict(report.config),
        "cutoff": asdict(report.cutoff),
        "n": report.n,
        "folds": report.folds,
        "seed": report.seed,
        "per_fold": [
            dict(_fold_obj(acc, rank), fold=idx)
            for idx, (acc, rank) in enumerate(report.per_fold, start=1)
        ],
        "avg": _fold_obj(acc_avg, rank_avg),
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"
