"""KNN collaborative-filtering core.

Three similarity kinds (msd, cosine, pearson), user- and item-based modes,
deterministic neighbor selection, rating prediction and top-N ranking.

Determinism contract: neighbor ties are broken by axis label ascending, so
identical inputs give identical predictions across runs and machines. The
vectorized model builder and the scalar compute_similarity use the same
algebraic arrangement; on binary matrices every intermediate sum is an
exact integer, so the two paths agree bitwise.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    InsufficientOverlapError,
    ModelBuildError,
    ModelStateError,
    UnknownEntityError,
)
from .matrix import RatingMatrix

SIMILARITIES = ("msd", "cosine", "pearson")
MODES = ("user", "item")


@dataclass(frozen=True)
class KnnConfig:
    """Hyperparameters of the KNN engine.

    positive_only restricts training to entries with rating > 0 (implicit
    feedback); by default explicit zeros participate as observed ratings.
    """

    similarity: str = "msd"
    mode: str = "user"
    min_support: int = 1
    k: int = 20
    positive_only: bool = False

    def __post_init__(self):
        if self.similarity not in SIMILARITIES:
            raise ValueError(f"similarity must be one of {SIMILARITIES}, got {self.similarity!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not isinstance(self.min_support, int) or self.min_support < 1:
            raise ValueError(f"min_support must be an integer >= 1, got {self.min_support!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")


@dataclass(frozen=True)
class Prediction:
    row_id: str
    col_id: str
    estimate: float
    neighbor_count: int
    fallback: bool


@dataclass(frozen=True)
class RecommendationList:
    """Ranked (item_id, score) pairs, scores non-increasing, ties by id."""

    entries: tuple
    requested_n: int

    def item_ids(self):
        return [item for item, _ in self.entries]


def compute_similarity(kind, a, b, min_support=1) -> float:
    """Similarity of two rating profiles (mappings item -> rating).

    Only co-observed items participate; fewer than min_support of them
    gives exactly 0. Degenerate inputs (zero norm, zero variance) also
    give 0 rather than an error.
    """
    if kind not in SIMILARITIES:
        raise ValueError(f"kind must be one of {SIMILARITIES}, got {kind!r}")
    if not isinstance(min_support, int) or min_support < 1:
        raise ValueError(f"min_support must be an integer >= 1, got {min_support!r}")
    common = sorted(set(a) & set(b))
    n = len(common)
    if n < min_support:
        return 0.0
    xs = np.array([float(a[c]) for c in common])
    ys = np.array([float(b[c]) for c in common])
    sab = float(np.dot(xs, ys))
    saa = float(np.dot(xs, xs))
    sbb = float(np.dot(ys, ys))

    if kind == "msd":
        # sum((x - y)^2) expanded; clamp guards float cancellation
        sq = max(saa + sbb - 2.0 * sab, 0.0)
        msd = sq / n
        return 1.0 / (msd + 1.0)

    if kind == "cosine":
        denom = np.sqrt(saa) * np.sqrt(sbb)
        if denom == 0.0:
            return 0.0
        return float(min(1.0, max(-1.0, sab / denom)))

    # pearson via the expanded sample-correlation form
    sa = float(np.sum(xs))
    sb = float(np.sum(ys))
    cov = sab - sa * sb / n
    var_a = saa - sa * sa / n
    var_b = sbb - sb * sb / n
    if var_a <= 0.0 or var_b <= 0.0:
        return 0.0
    r = cov / (np.sqrt(var_a) * np.sqrt(var_b))
    return float(min(1.0, max(-1.0, r)))


def _pairwise_similarity(values, mask, kind, min_support):
    """All-pairs row similarities. values must already be 0 where mask is 0."""
    M = mask.astype(np.float64)
    A = values
    n = M @ M.T
    AB = A @ A.T
    AA = (A * A) @ M.T
    BB = AA.T
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "msd":
            sq = np.maximum(AA + BB - 2.0 * AB, 0.0)
            msd = np.where(n > 0, sq / np.where(n > 0, n, 1.0), 0.0)
            sim = np.where(n > 0, 1.0 / (msd + 1.0), 0.0)
        elif kind == "cosine":
            denom = np.sqrt(AA) * np.sqrt(BB)
            sim = np.where(denom > 0, AB / np.where(denom > 0, denom, 1.0), 0.0)
            sim = np.clip(sim, -1.0, 1.0)
        else:
            SA = A @ M.T
            SB = SA.T
            safe_n = np.where(n > 0, n, 1.0)
            cov = AB - SA * SB / safe_n
            var_a = AA - SA * SA / safe_n
            var_b = BB - SB * SB / safe_n
            ok = (n > 0) & (var_a > 0) & (var_b > 0)
            denom = np.sqrt(np.where(ok, var_a, 1.0)) * np.sqrt(np.where(ok, var_b, 1.0))
            sim = np.where(ok, cov / denom, 0.0)
            sim = np.clip(sim, -1.0, 1.0)
    sim[n < min_support] = 0.0
    return sim


@dataclass(frozen=True, eq=False)
class SimilarityModel:
    """Trained similarity matrix plus everything predict needs."""

    config: KnnConfig
    axis_labels: tuple
    sim: np.ndarray
    training_matrix: RatingMatrix
    global_mean: float

    def __post_init__(self):
        n = len(self.axis_labels)
        if self.sim.shape != (n, n):
            raise ValueError(f"similarity matrix {self.sim.shape} does not fit {n} axis labels")

    @cached_property
    def effective_observed(self) -> np.ndarray:
        m = self.training_matrix
        if self.config.positive_only:
            return m.observed & (m.values > 0)
        return m.observed

    @cached_property
    def _axis_label_rank(self) -> np.ndarray:
        # rank[i] < rank[j] iff axis_labels[i] < axis_labels[j]
        perm = np.argsort(np.array(self.axis_labels))
        rank = np.empty(len(perm), dtype=np.int64)
        rank[perm] = np.arange(len(perm))
        return rank


def build_similarity_model(matrix: RatingMatrix, config: KnnConfig) -> SimilarityModel:
    """Compute all pairwise similarities along the configured axis."""
    eff = matrix.observed & (matrix.values > 0) if config.positive_only else matrix.observed
    if not eff.any():
        raise ModelBuildError("matrix has no observed ratings to train on")
    if config.mode == "user":
        values, mask, labels = matrix.values, eff, matrix.row_labels
    else:
        values, mask, labels = matrix.values.T, eff.T, matrix.col_labels
    values = np.where(mask, values, 0.0)
    sim = _pairwise_similarity(values, mask, config.similarity, config.min_support)
    # mirror the upper triangle so sim[i][j] == sim[j][i] bitwise
    sim = np.triu(sim) + np.triu(sim, 1).T
    sim.flags.writeable = False
    global_mean = float(matrix.values[eff].mean())
    return SimilarityModel(config, tuple(labels), sim, matrix, global_mean)


def _axis_views(model: SimilarityModel):
    """(values, effective mask) oriented so axis elements are rows."""
    m = model.training_matrix
    eff = model.effective_observed
    if model.config.mode == "user":
        return m.values, eff
    return m.values.T, eff.T


def _clip(x, scale):
    return float(min(max(x, scale[0]), scale[1]))


def predict(model: SimilarityModel, row_id, col_id) -> Prediction:
    """Estimate the rating at (row_id, col_id).

    Neighbors are the up-to-k axis elements with the highest positive
    similarity that observed the target, ties by axis label ascending;
    estimate is the similarity-weighted mean of their ratings, clipped to
    the rating scale. No qualifying neighbor (or one unknown id) falls
    back to the global training mean.
    """
    m = model.training_matrix
    r = m.row_index.get(row_id)
    c = m.col_index.get(col_id)
    if r is None and c is None:
        raise UnknownEntityError(f"neither row {row_id!r} nor column {col_id!r} is known")
    scale = m.rating_scale
    if r is None or c is None:
        return Prediction(row_id, col_id, _clip(model.global_mean, scale), 0, True)

    values, eff = _axis_views(model)
    if model.config.mode == "user":
        axis_idx, other_idx = r, c
    else:
        axis_idx, other_idx = c, r
    sims = model.sim[axis_idx]
    labels = model.axis_labels
    candidates = [
        j
        for j in range(len(labels))
        if j != axis_idx and sims[j] > 0 and eff[j, other_idx]
    ]
    candidates.sort(key=lambda j: (-sims[j], labels[j]))
    top = candidates[: model.config.k]
    if not top:
        return Prediction(row_id, col_id, _clip(model.global_mean, scale), 0, True)
    num = sum(sims[j] * values[j, other_idx] for j in top)
    den = sum(abs(sims[j]) for j in top)
    return Prediction(row_id, col_id, _clip(num / den, scale), len(top), False)


def _estimate_block(model, sims, targets, values, eff, self_idx=None):
    """Estimates for one similarity vector against many target columns.

    sims is aligned with the axis; targets are column indices of the
    axis-oriented view. Mirrors predict's selection: positive similarity,
    observed target, ties by axis label, first k by cumulative count.
    """
    k = model.config.k
    scale = model.training_matrix.rating_scale
    order = np.lexsort((model._axis_label_rank, -sims))
    valid = sims[order] > 0
    if self_idx is not None:
        valid &= order != self_idx
    elig = eff[order][:, targets] & valid[:, None]
    csum = np.cumsum(elig, axis=0)
    sel = elig & (csum <= k)
    w = sims[order][:, None] * sel
    num = (w * values[order][:, targets]).sum(axis=0)
    den = np.abs(w).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        est = np.where(den > 0, num / np.where(den > 0, den, 1.0), model.global_mean)
    return np.minimum(np.maximum(est, scale[0]), scale[1])


def batch_estimates(model: SimilarityModel, pairs) -> np.ndarray:
    """Vectorized predict for many (row_idx, col_idx) index pairs.

    Matches predict() up to floating-point summation order.
    """
    pairs = list(pairs)
    values, eff = _axis_views(model)
    if model.config.mode == "user":
        keyed = [(r, c) for r, c in pairs]
    else:
        keyed = [(c, r) for r, c in pairs]
    out = np.empty(len(pairs), dtype=np.float64)
    by_axis = defaultdict(list)
    for t, (a, b) in enumerate(keyed):
        by_axis[a].append((t, b))
    for a, wanted in by_axis.items():
        targets = np.array([b for _, b in wanted], dtype=np.int64)
        est = _estimate_block(model, model.sim[a], targets, values, eff, self_idx=a)
        for (t, _), v in zip(wanted, est):
            out[t] = v
    return out


def fold_in(model: SimilarityModel, profile) -> np.ndarray:
    """Similarity of an ad-hoc profile (item id -> rating) to every
    training row, without retraining. User-based models only."""
    if model.config.mode != "user":
        raise ModelStateError("fold_in requires a user-based model")
    if not profile:
        raise ValueError("profile must be non-empty")
    m = model.training_matrix
    known = {lab: float(v) for lab, v in profile.items() if lab in m.col_index}
    if not known:
        raise InsufficientOverlapError(
            "profile shares no items with the model's column vocabulary"
        )
    eff = model.effective_observed
    cfg = model.config
    sims = np.zeros(m.n_rows, dtype=np.float64)
    for i in range(m.n_rows):
        row_profile = {
            m.col_labels[j]: float(m.values[i, j]) for j in np.nonzero(eff[i])[0]
        }
        sims[i] = compute_similarity(cfg.similarity, known, row_profile, cfg.min_support)
    return sims


def top_n(model: SimilarityModel, profile, n, exclude=()) -> RecommendationList:
    """Rank the model's columns for a profile.

    profile is either an existing row id (scored via predict) or a mapping
    item id -> rating (scored via fold_in). Columns in exclude never
    appear; ties break by item id ascending.
    """
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be an integer >= 0, got {n!r}")
    m = model.training_matrix
    exclude = set(exclude)
    candidates = [c for c in m.col_labels if c not in exclude]
    if n == 0 or not candidates:
        return RecommendationList((), n)
    cand_idx = np.array([m.col_index[c] for c in candidates], dtype=np.int64)

    if isinstance(profile, str):
        if profile in m.row_index:
            pairs = [(m.row_index[profile], j) for j in cand_idx]
            scores = batch_estimates(model, pairs)
        else:
            # unknown row: every estimate falls back to the global mean
            scores = np.full(len(candidates), _clip(model.global_mean, m.rating_scale))
    else:
        sims = fold_in(model, profile)
        values, eff = _axis_views(model)
        scores = _estimate_block(model, sims, cand_idx, values, eff, self_idx=None)

    order = sorted(range(len(candidates)), key=lambda i: (-scores[i], candidates[i]))
    picked = order[:n]
    return RecommendationList(
        tuple((candidates[i], float(scores[i])) for i in picked), n
    )
