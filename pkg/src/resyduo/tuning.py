"""Exhaustive grid search over the KNN hyperparameters.

The default pools are the ones the engine is normally swept over:
{msd, cosine, pearson} x {user, item} x min_support {1, 5, 20} x
k {5, 10, 20}, 54 configurations. Enumeration order is the nested loop
(similarity, mode, min_support, k), which also resolves ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import MODES, SIMILARITIES, KnnConfig
from .errors import ResyduoError
from .evaluation import cross_validate
from .projections import CutoffConfig

CRITERIA = ("rmse", "mae", "precision")

DEFAULT_SIMILARITIES = ("msd", "cosine", "pearson")
DEFAULT_MODES = ("user", "item")
DEFAULT_MIN_SUPPORTS = (1, 5, 20)
DEFAULT_KS = (5, 10, 20)


def _dedup(values):
    out = []
    for v in values:
        if v not in out:
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class GridSpec:
    similarities: tuple = DEFAULT_SIMILARITIES
    modes: tuple = DEFAULT_MODES
    min_supports: tuple = DEFAULT_MIN_SUPPORTS
    ks: tuple = DEFAULT_KS

    def __post_init__(self):
        object.__setattr__(self, "similarities", _dedup(self.similarities))
        object.__setattr__(self, "modes", _dedup(self.modes))
        object.__setattr__(self, "min_supports", _dedup(self.min_supports))
        object.__setattr__(self, "ks", _dedup(self.ks))
        if not self.similarities or not self.modes or not self.min_supports or not self.ks:
            raise ValueError("every grid pool must be non-empty")
        for s in self.similarities:
            if s not in SIMILARITIES:
                raise ValueError(f"unknown similarity {s!r}")
        for m in self.modes:
            if m not in MODES:
                raise ValueError(f"unknown mode {m!r}")
        for v in self.min_supports + self.ks:
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"grid counts must be integers >= 1, got {v!r}")


@dataclass(frozen=True)
class TuningResult:
    best: KnnConfig
    scoreboard: tuple
    criterion: str

    def best_score(self) -> float:
        for config, score in self.scoreboard:
            if config == self.best:
                return score
        raise LookupError("best config missing from scoreboard")


def enumerate_grid(spec: GridSpec):
    """Cartesian product in (similarity, mode, min_support, k) nest order."""
    configs = []
    for sim in spec.similarities:
        for mode in spec.modes:
            for support in spec.min_supports:
                for k in spec.ks:
                    configs.append(
                        KnnConfig(similarity=sim, mode=mode, min_support=support, k=k)
                    )
    return configs


def _score(acc, rank, criterion):
    if criterion == "rmse":
        return rank.rmse
    if criterion == "mae":
        return rank.mae
    return acc.precision


def grid_search(
    matrix,
    spec: GridSpec,
    cutoff: CutoffConfig,
    k_folds=10,
    n=5,
    seed=0,
    criterion="rmse",
    nested=False,
) -> TuningResult:
    """Cross-validate every config in the grid and pick the best.

    criterion rmse/mae is minimized, precision maximized; a config whose
    evaluation fails scores the worst possible value instead of aborting
    the sweep. With nested=True the winner is chosen per fold (the config
    that wins the most folds takes the sweep, ties to enumeration order);
    the scoreboard always carries fold-averaged scores.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    configs = enumerate_grid(spec)
    maximize = criterion == "precision"
    sentinel = -math.inf if maximize else math.inf
    scores = []
    fold_scores = []
    for config in configs:
        try:
            report = cross_validate(matrix, config, cutoff, k=k_folds, n=n, seed=seed)
        except ResyduoError:
            scores.append(sentinel)
            fold_scores.append([sentinel] * k_folds)
            continue
        scores.append(_score(*report.averages, criterion))
        fold_scores.append(
            [_score(acc, rank, criterion) for acc, rank in report.per_fold]
        )

    better = (lambda a, b: a > b) if maximize else (lambda a, b: a < b)
    if nested:
        wins = [0] * len(configs)
        for fold in range(k_folds):
            best_idx = 0
            for idx in range(1, len(configs)):
                if better(fold_scores[idx][fold], fold_scores[best_idx][fold]):
                    best_idx = idx
            wins[best_idx] += 1
        best = max(range(len(configs)), key=lambda i: (wins[i], -i))
    else:
        best = 0
        for idx in range(1, len(configs)):
            if better(scores[idx], scores[best]):
                best = idx
    scoreboard = tuple(zip(configs, scores))
    return TuningResult(best=configs[best], scoreboard=scoreboard, criterion=criterion)


def _fmt(x: float) -> str:
    f = float(x)
    if f.is_integer() and abs(f) < 1e16:
        return str(int(f))
    return repr(f)


def scoreboard_to_csv(result: TuningResult) -> str:
    lines = ["similarity,mode,min_support,k,criterion,score"]
    for config, score in result.scoreboard:
        lines.append(
            f"{config.similarity},{config.mode},{config.min_support},"
            f"{config.k},{result.criterion},{_fmt(score)}"
        )
    return "\n".join(lines) + "\n"
