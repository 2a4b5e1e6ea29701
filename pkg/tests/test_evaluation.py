import csv
import io
import json
import math
from itertools import combinations

import numpy as np
import pytest

from resyduo import (
    KnnConfig,
    RecommendationList,
    accuracy_metrics,
    build_projection,
    cross_validate,
    error_metrics,
    generate_synthetic_corpus,
    kfold_split,
    report_to_csv,
    report_to_json,
)
from resyduo.projections import CutoffConfig
from resyduo.errors import MetricDomainError, SplitError

from conftest import binary_matrix


def sparse_with_n_entries(n_entries, n_cols=10):
    rows = (n_entries + n_cols - 1) // n_cols
    entries = {}
    for t in range(n_entries):
        entries[(t // n_cols, t % n_cols)] = 1.0
    labels = [f"r{i:02d}" for i in range(rows)]
    cols = [f"c{j:02d}" for j in range(n_cols)]
    from resyduo import RatingMatrix

    return RatingMatrix.from_entries(labels, cols, entries)


# --- kfold_split ----------------------------------------------------------


def test_fold_sizes_balanced():
    for n in (13, 100, 103):
        plan = kfold_split(sparse_with_n_entries(n), 10, seed=3)
        sizes = sorted(len(plan.fold_pairs(f)) for f in range(10))
        lo, hi = n // 10, -(-n // 10)
        assert all(s in (lo, hi) for s in sizes)
        assert sum(sizes) == n


def test_folds_partition_the_interactions():
    m = sparse_with_n_entries(37)
    plan = kfold_split(m, 10, seed=1)
    seen = []
    for f in range(10):
        seen.extend(plan.fold_pairs(f))
    assert sorted(seen) == sorted((i, j) for i, j, _ in m.entries())
    assert len(set(seen)) == len(seen)


def test_n_equals_k_gives_singleton_folds():
    plan = kfold_split(sparse_with_n_entries(10), 10, seed=0)
    assert all(len(plan.fold_pairs(f)) == 1 for f in range(10))


def test_split_determinism():
    m = sparse_with_n_entries(50)
    a = kfold_split(m, 10, seed=9)
    b = kfold_split(m, 10, seed=9)
    assert a.assignments == b.assignments
    c = kfold_split(m, 10, seed=10)
    assert a.assignments != c.assignments


def test_split_argument_errors():
    m = sparse_with_n_entries(5)
    with pytest.raises(SplitError):
        kfold_split(m, 6, seed=0)
    with pytest.raises(ValueError):
        kfold_split(m, 1, seed=0)
    with pytest.raises(ValueError):
        kfold_split(m, "ten", seed=0)


# --- accuracy_metrics -----------------------------------------------------


def rec(items):
    return RecommendationList(tuple((i, 1.0) for i in items), len(items))


def test_perfect_recommendations():
    out = accuracy_metrics(
        {"r1": rec(["a"]), "r2": rec(["b", "c"])},
        {"r1": {"a", "z"}, "r2": {"b", "c"}},
    )
    assert out.precision == 1.0
    assert out.success_rate == 1.0


def test_success_rate_counts_rows_with_a_hit():
    out = accuracy_metrics(
        {"r1": rec(["a", "b"]), "r2": rec(["x"]), "r3": rec(["c"])},
        {"r1": {"a", "b"}, "r2": {"q"}, "r3": {"c", "d"}},
    )
    # per-row true positives are 2, 0, 1
    assert out.success_rate == pytest.approx(2 / 3)
    assert out.tp == 3


def test_precision_recall_worked_example():
    out = accuracy_metrics(
        {"r1": rec(["a", "b", "c", "d", "e"])},
        {"r1": {"a", "b", "x", "y"}},
    )
    assert out.precision == pytest.approx(0.4)
    assert out.recall == pytest.approx(0.5)
    assert out.tp == 2 and out.fp == 3 and out.fn == 2


def test_micro_averaging_pools_counts():
    out = accuracy_metrics(
        {"r1": rec(["a"]), "r2": rec(["b", "c", "d"])},
        {"r1": {"a"}, "r2": {"z"}},
    )
    # pooled: tp=1, fp=3 -> precision 1/4, not the mean of 1 and 0
    assert out.precision == pytest.approx(0.25)


def test_accuracy_accepts_plain_iterables():
    out = accuracy_metrics({"r1": ["a", "b"]}, {"r1": {"a"}})
    assert out.tp == 1 and out.fp == 1


def test_empty_recommendations_give_zero_precision():
    out = accuracy_metrics({"r1": rec([])}, {"r1": {"a"}})
    assert out.precision == 0.0
    assert out.recall == 0.0
    assert out.success_rate == 0.0


def test_accuracy_domain_errors():
    with pytest.raises(MetricDomainError):
        accuracy_metrics({}, {})
    with pytest.raises(MetricDomainError):
        accuracy_metrics({"r1": rec(["a"])}, {"other": {"a"}})


def test_accuracy_matches_set_arithmetic_oracle():
    # every (recommended, truth) pair over a tiny universe
    universe = ["a", "b", "c"]
    subsets = []
    for r in range(len(universe) + 1):
        subsets.extend(combinations(universe, r))
    for recommended in subsets:
        for truth in subsets:
            if not truth:
                continue
            out = accuracy_metrics({"row": rec(list(recommended))}, {"row": set(truth)})
            tp = len(set(recommended) & set(truth))
            fp = len(set(recommended) - set(truth))
            fn = len(set(truth) - set(recommended))
            assert (out.tp, out.fp, out.fn) == (tp, fp, fn)
            assert out.precision == (tp / (tp + fp) if tp + fp else 0.0)
            assert out.recall == (tp / (tp + fn) if tp + fn else 0.0)
            assert out.success_rate == (1.0 if tp else 0.0)


# --- error_metrics --------------------------------------------------------


def test_exact_predictions_have_zero_error():
    out = error_metrics([(1.0, 1.0), (0.0, 0.0)], (0.0, 1.0))
    assert out.mae == 0.0
    assert out.rmse == 0.0
    assert out.n_pairs == 2


def test_error_worked_example():
    out = error_metrics([(1.0, 0.5), (0.0, 0.5), (1.0, 1.0)], (0.0, 1.0))
    assert out.mae == pytest.approx(1 / 3)
    assert out.rmse == pytest.approx(math.sqrt(0.5 / 3))


def test_errors_normalized_by_scale_width():
    pairs = [(2.0, 1.0), (0.0, 1.0)]
    wide = error_metrics(pairs, (0.0, 2.0))
    narrow = error_metrics([(1.0, 0.5), (0.0, 0.5)], (0.0, 1.0))
    assert wide.mae == pytest.approx(narrow.mae)
    assert wide.rmse == pytest.approx(narrow.rmse)


def test_mae_never_exceeds_rmse():
    rng = np.random.default_rng(4)
    for _ in range(50):
        pairs = [(float(a), float(p)) for a, p in rng.random((int(rng.integers(1, 9)), 2))]
        out = error_metrics(pairs, (0.0, 1.0))
        assert out.mae <= out.rmse + 1e-15
        assert 0.0 <= out.mae <= 1.0
        assert 0.0 <= out.rmse <= 1.0


def test_error_metrics_empty_rejected():
    with pytest.raises(MetricDomainError):
        error_metrics([], (0.0, 1.0))


# --- cross_validate -------------------------------------------------------


@pytest.fixture(scope="module")
def small_projection():
    corpus = generate_synthetic_corpus(48, 12, 16, 12, 4, 0.1, seed=3)
    return build_projection(corpus, "P")


def test_cross_validate_is_deterministic(small_projection):
    cfg = KnnConfig(k=10)
    a = cross_validate(small_projection, cfg, CutoffConfig(1, 1), k=5, n=5, seed=2)
    b = cross_validate(small_projection, cfg, CutoffConfig(1, 1), k=5, n=5, seed=2)
    assert a == b
    c = cross_validate(small_projection, cfg, CutoffConfig(1, 1), k=5, n=5, seed=3)
    assert a != c


def test_cross_validate_shape(small_projection):
    rep = cross_validate(small_projection, KnnConfig(), CutoffConfig(1, 1), k=5, n=5, seed=0)
    assert rep.folds == 5
    assert len(rep.per_fold) == 5
    acc_avg, rank_avg = rep.averages
    assert acc_avg.precision == pytest.approx(
        sum(f[0].precision for f in rep.per_fold) / 5
    )
    assert rank_avg.rmse == pytest.approx(sum(f[1].rmse for f in rep.per_fold) / 5)
    for acc, rank in rep.per_fold:
        assert 0.0 <= acc.precision <= 1.0
        assert 0.0 <= acc.success_rate <= 1.0
        assert rank.mae <= rank.rmse + 1e-15
        assert rank.n_pairs > 0


def test_noiseless_blocks_recommend_perfectly():
    # with pool-sized draws and no noise every project equals its block
    # mates, so each held-out positive is recoverable from the clique
    corpus = generate_synthetic_corpus(48, 12, 16, 12, 4, 0.0, seed=7)
    P = build_projection(corpus, "P")
    rep = cross_validate(P, KnnConfig(k=20), CutoffConfig(1, 1), k=10, n=5, seed=7)
    assert rep.averages[0].success_rate == 1.0
    assert all(f[0].success_rate == 1.0 for f in rep.per_fold)


def test_report_csv_shape(small_projection):
    rep = cross_validate(small_projection, KnnConfig(), CutoffConfig(1, 1), k=4, n=5, seed=1)
    text = report_to_csv(rep)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["fold", "precision", "recall", "success_rate", "mae", "rmse"]
    assert len(rows) == 1 + 4 + 1
    assert rows[-1][0] == "avg"
    assert [r[0] for r in rows[1:-1]] == ["1", "2", "3", "4"]
    assert float(rows[-1][1]) == pytest.approx(rep.averages[0].precision)


def test_report_json_round_trips_fields(small_projection):
    rep = cross_validate(
        small_projection, KnnConfig(similarity="cosine"), CutoffConfig(2, 2),
        k=4, n=3, seed=5, dataset_tag="P",
    )
    obj = json.loads(report_to_json(rep))
    assert obj["dataset_tag"] == "P"
    assert obj["folds"] == 4
    assert obj["n"] == 3
    assert obj["seed"] == 5
    assert obj["config"]["similarity"] == "cosine"
    assert obj["cutoff"] == {"v": 2, "h": 2, "fixpoint": False}
    assert len(obj["per_fold"]) == 4
    assert obj["avg"]["rmse"] == pytest.approx(rep.averages[1].rmse)
