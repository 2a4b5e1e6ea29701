"""Corpus-to-matrix projections and frequency cut-off filtering.

Three projections feed the recommender:

* ``P``: project x component, 1 iff the project lists the component
* ``T``: tag x component, 1 iff some project carries both
* ``L``: component x library, 1 iff some project contains both

All three are dense binary matrices: the 0 cells are stored as observed
ratings, not as missing data (training can be restricted to the 1s via the
engine's ``positive_only`` switch).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .errors import EmptyProjectionError, OverPrunedError
from .matrix import RatingMatrix

PROJECTION_KINDS = ("T", "P", "L")


@dataclass(frozen=True)
class CutoffConfig:
    """Vertical (column) and horizontal (row) occurrence thresholds."""

    v: int = 1
    h: int = 1
    fixpoint: bool = False

    def __post_init__(self):
        if not isinstance(self.v, int) or self.v < 1:
            raise ValueError(f"v must be an integer >= 1, got {self.v!r}")
        if not isinstance(self.h, int) or self.h < 1:
            raise ValueError(f"h must be an integer >= 1, got {self.h!r}")


def normalize_tag(tag: str) -> str:
    return tag.strip().lower()


def _dense_binary(row_labels, col_labels, pairs, kind):
    if not row_labels or not col_labels:
        raise EmptyProjectionError(kind)
    rows = sorted(row_labels)
    cols = sorted(col_labels)
    ridx = {lab: i for i, lab in enumerate(rows)}
    cidx = {lab: j for j, lab in enumerate(cols)}
    values = np.zeros((len(rows), len(cols)))
    for r, c in pairs:
        values[ridx[r], cidx[c]] = 1.0
    observed = np.ones_like(values, dtype=bool)
    return RatingMatrix(tuple(rows), tuple(cols), values, observed, (0.0, 1.0))


def build_projection(corpus: Corpus, kind: str) -> RatingMatrix:
    """Project the corpus onto one of the three rating matrices.

    Row/column label order is lexicographic, so identical corpora produce
    identical matrices label-for-label.
    """
    if kind not in PROJECTION_KINDS:
        raise ValueError(f"kind must be one of {PROJECTION_KINDS}, got {kind!r}")

    if kind == "P":
        row_labels = {p.id for p in corpus.projects if p.components}
        col_labels = {c.id for p in corpus.projects for c in p.components}
        pairs = {(p.id, c.id) for p in corpus.projects for c in p.components}
        return _dense_binary(row_labels, col_labels, pairs, kind)

    if kind == "T":
        pairs = set()
        row_labels = set()
        col_labels = set()
        for p in corpus.projects:
            tags = {normalize_tag(t) for t in p.tags}
            tags.discard("")
            comps = {c.id for c in p.components}
            row_labels.update(tags if comps else ())
            col_labels.update(comps if tags else ())
            pairs.update((t, c) for t in tags for c in comps)
        return _dense_binary(row_labels, col_labels, pairs, kind)

    # kind == "L"
    pairs = set()
    row_labels = set()
    col_labels = set()
    for p in corpus.projects:
        comps = {c.id for c in p.components}
        libs = set(p.libraries)
        row_labels.update(comps if libs else ())
        col_labels.update(libs if comps else ())
        pairs.update((c, lib) for c in comps for lib in libs)
    return _dense_binary(row_labels, col_labels, pairs, kind)


def _nonzero_cols(matrix: RatingMatrix):
    return ((matrix.values != 0) & matrix.observed).sum(axis=0)


def _nonzero_rows(matrix: RatingMatrix):
    return ((matrix.values != 0) & matrix.observed).sum(axis=1)


def _take(matrix: RatingMatrix, row_keep, col_keep) -> RatingMatrix:
    return RatingMatrix(
        tuple(matrix.row_labels[i] for i in row_keep),
        tuple(matrix.col_labels[j] for j in col_keep),
        matrix.values[np.ix_(row_keep, col_keep)],
        matrix.observed[np.ix_(row_keep, col_keep)],
        matrix.rating_scale,
    )


def _single_pass(matrix: RatingMatrix, v: int, h: int) -> RatingMatrix:
    col_keep = [j for j, c in enumerate(_nonzero_cols(matrix)) if c >= v]
    reduced = _take(matrix, list(range(matrix.n_rows)), col_keep)
    row_keep = [i for i, c in enumerate(_nonzero_rows(reduced)) if c >= h]
    return _take(reduced, row_keep, list(range(reduced.n_cols)))


def apply_cutoff(matrix: RatingMatrix, cfg: CutoffConfig) -> RatingMatrix:
    """Drop rare columns, then rare rows.

    Columns with fewer than ``cfg.v`` nonzero entries are removed first;
    rows counted against the reduced matrix are then removed when below
    ``cfg.h``. With ``fixpoint=True`` the two passes alternate until the
    matrix is stable, so every surviving column also meets ``v`` in the
    final matrix. Relative label order is preserved.
    """
    out = _single_pass(matrix, cfg.v, cfg.h)
    if cfg.fixpoint:
        while True:
            if out.n_rows == 0 or out.n_cols == 0:
                break
            nxt = _single_pass(out, cfg.v, cfg.h)
            if nxt.n_rows == out.n_rows and nxt.n_cols == out.n_cols:
                out = nxt
                break
            out = nxt
    if out.n_rows == 0 or out.n_cols == 0:
        raise OverPrunedError(out.n_rows, out.n_cols)
    return out
