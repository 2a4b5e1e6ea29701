"""Rating matrix container and its text serialization.

Dense numpy storage with an explicit observed mask: ``values[i, j]`` only
means something where ``observed[i, j]`` is True. Binary projections store
observed zeros, so "observed" and "nonzero" are different counts.

File format: header ``rows=<n> cols=<m> rmin=<r> rmax=<r>``, then n lines
``row <id>``, m lines ``col <id>``, then one ``<row_idx> <col_idx> <value>``
triplet per observed entry (0-based indices).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import MatrixFormatError


def _fmt(x: float) -> str:
    # Integral values print without the trailing ".0"; everything else uses
    # repr, which round-trips float64 exactly.
    f = float(x)
    if f.is_integer() and abs(f) < 1e16:
        return str(int(f))
    return repr(f)


def _check_labels(labels, side):
    seen = set()
    for lab in labels:
        if not isinstance(lab, str) or lab == "":
            raise ValueError(f"{side} labels must be non-empty strings, got {lab!r}")
        if "\n" in lab or "\r" in lab:
            raise ValueError(f"{side} label {lab!r} contains a line break")
        if lab in seen:
            raise ValueError(f"duplicate {side} label {lab!r}")
        seen.add(lab)


@dataclass(frozen=True, eq=False)
class RatingMatrix:
    """Immutable users-by-items matrix of observed ratings."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    values: np.ndarray
    observed: np.ndarray
    rating_scale: tuple[float, float] = (0.0, 1.0)

    def __eq__(self, other):
        if not isinstance(other, RatingMatrix):
            return NotImplemented
        return (
            self.row_labels == other.row_labels
            and self.col_labels == other.col_labels
            and self.rating_scale == other.rating_scale
            and np.array_equal(self.observed, other.observed)
            and np.array_equal(self.values, other.values)
        )

    def __post_init__(self):
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        _check_labels(self.row_labels, "row")
        _check_labels(self.col_labels, "col")
        shape = (len(self.row_labels), len(self.col_labels))
        values = np.asarray(self.values, dtype=np.float64)
        observed = np.asarray(self.observed, dtype=bool)
        if values.shape != shape or observed.shape != shape:
            raise ValueError(
                f"array shapes {values.shape}/{observed.shape} do not match labels {shape}"
            )
        rmin, rmax = float(self.rating_scale[0]), float(self.rating_scale[1])
        if not rmax > rmin:
            raise ValueError(f"rating scale must satisfy rmax > rmin, got ({rmin}, {rmax})")
        if observed.any():
            obs = values[observed]
            if not np.isfinite(obs).all():
                raise ValueError("observed ratings must be finite")
            if obs.min() < rmin or obs.max() > rmax:
                raise ValueError(f"observed ratings fall outside scale ({rmin}, {rmax})")
        values = values.copy()
        values[~observed] = 0.0
        observed = observed.copy()
        values.flags.writeable = False
        observed.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "observed", observed)
        object.__setattr__(self, "rating_scale", (rmin, rmax))

    @property
    def n_rows(self) -> int:
        return len(self.row_labels)

    @property
    def n_cols(self) -> int:
        return len(self.col_labels)

    @property
    def n_observed(self) -> int:
        return int(self.observed.sum())

    @cached_property
    def row_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.row_labels)}

    @cached_property
    def col_index(self) -> dict:
        return {lab: j for j, lab in enumerate(self.col_labels)}

    def entries(self):
        """Observed entries as (row_idx, col_idx, value), row-major order."""
        rows, cols = np.nonzero(self.observed)
        for i, j in zip(rows.tolist(), cols.tolist()):
            yield i, j, float(self.values[i, j])

    @classmethod
    def from_entries(cls, row_labels, col_labels, entries, rating_scale=(0.0, 1.0)):
        """Build from a sparse {(row_idx, col_idx): value} map."""
        values = np.zeros((len(row_labels), len(col_labels)))
        observed = np.zeros_like(values, dtype=bool)
        for (i, j), v in entries.items():
            if not (0 <= i < len(row_labels) and 0 <= j < len(col_labels)):
                raise ValueError(f"entry index ({i}, {j}) out of range")
            values[i, j] = v
            observed[i, j] = True
        return cls(tuple(row_labels), tuple(col_labels), values, observed, rating_scale)

    def transpose(self) -> "RatingMatrix":
        return RatingMatrix(
            self.col_labels, self.row_labels, self.values.T, self.observed.T, self.rating_scale
        )

    def to_text(self) -> str:
        rmin, rmax = self.rating_scale
        lines = [f"rows={self.n_rows} cols={self.n_cols} rmin={_fmt(rmin)} rmax={_fmt(rmax)}"]
        lines.extend(f"row {lab}" for lab in self.row_labels)
        lines.extend(f"col {lab}" for lab in self.col_labels)
        for i, j, v in self.entries():
            lines.append(f"{i} {j} {_fmt(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RatingMatrix":
        lines = text.splitlines()
        if not lines:
            raise MatrixFormatError("empty matrix file")
        header = lines[0].split()
        fields = {}
        for part in header:
            key, eq, value = part.partition("=")
            if eq != "=" or key not in ("rows", "cols", "rmin", "rmax") or key in fields:
                raise MatrixFormatError(f"bad header line: {lines[0]!r}")
            fields[key] = value
        if set(fields) != {"rows", "cols", "rmin", "rmax"}:
            raise MatrixFormatError(f"bad header line: {lines[0]!r}")
        try:
            n = int(fields["rows"])
            m = int(fields["cols"])
            rmin = float(fields["rmin"])
            rmax = float(fields["rmax"])
        except ValueError as exc:
            raise MatrixFormatError(f"bad header line: {lines[0]!r}") from exc
        if n < 0 or m < 0:
            raise MatrixFormatError(f"negative dimensions in header: {lines[0]!r}")

        pos = 1
        row_labels = []
        for _ in range(n):
            if pos >= len(lines) or not lines[pos].startswith("row "):
                raise MatrixFormatError(f"line {pos + 1}: expected 'row <id>'")
            row_labels.append(lines[pos][4:])
            pos += 1
        col_labels = []
        for _ in range(m):
            if pos >= len(lines) or not lines[pos].startswith("col "):
                raise MatrixFormatError(f"line {pos + 1}: expected 'col <id>'")
            col_labels.append(lines[pos][4:])
            pos += 1

        entries = {}
        for lineno in range(pos, len(lines)):
            line = lines[lineno].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise MatrixFormatError(f"line {lineno + 1}: expected '<row> <col> <value>'")
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise MatrixFormatError(f"line {lineno + 1}: bad triplet {line!r}") from exc
            if not (0 <= i < n and 0 <= j < m):
                raise MatrixFormatError(f"line {lineno + 1}: index ({i}, {j}) out of range")
            if (i, j) in entries:
                raise MatrixFormatError(f"line {lineno + 1}: duplicate entry ({i}, {j})")
            entries[(i, j)] = v
        try:
            return cls.from_entries(row_labels, col_labels, entries, (rmin, rmax))
        except ValueError as exc:
            raise MatrixFormatError(str(exc)) from exc

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "RatingMatrix":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return cls.from_text(fh.read())
        except OSError as exc:
            raise MatrixFormatError(f"cannot read matrix file {path}: {exc}") from exc

    def content_hash(self) -> str:
        """sha256 of the canonical text form; keys persisted models to their
        training data."""
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()
