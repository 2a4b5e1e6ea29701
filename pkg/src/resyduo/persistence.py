"""Model save/load: the static knowledge base of trained similarities.

One text file per model: config line, axis labels, global mean, a sha256
of the training matrix's canonical text form, then the lower triangle of
the similarity matrix one row per line. Floats are written with repr so
the round-trip is exact.

Loading requires the training matrix (prediction needs the ratings) and
refuses a model whose stored hash disagrees with it unless force=True.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .engine import KnnConfig, SimilarityModel
from .errors import ModelFormatError, StaleModelError
from .matrix import RatingMatrix

_MAGIC = "resyduo-model v1"


def write_text_atomic(path, text):
    """Write via a temp file + rename so failures leave no partial file."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_bytes_atomic(path, data):
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def save_model(model: SimilarityModel, path):
    cfg = model.config
    lines = [
        _MAGIC,
        f"similarity={cfg.similarity} mode={cfg.mode} "
        f"min_support={cfg.min_support} k={cfg.k} positive_only={int(cfg.positive_only)}",
        f"axis_count={len(model.axis_labels)}",
    ]
    lines.extend(f"label {lab}" for lab in model.axis_labels)
    lines.append(f"global_mean={repr(model.global_mean)}")
    lines.append(f"matrix_sha256={model.training_matrix.content_hash()}")
    for i in range(len(model.axis_labels)):
        lines.append(" ".join(repr(float(v)) for v in model.sim[i, : i + 1]))
    write_text_atomic(path, "\n".join(lines) + "\n")


def _parse_kv_line(line, expected_keys):
    fields = {}
    for part in line.split():
        key, eq, value = part.partition("=")
        if eq != "=" or key not in expected_keys or key in fields:
            raise ModelFormatError(f"bad model config line: {line!r}")
        fields[key] = value
    if set(fields) != set(expected_keys):
        raise ModelFormatError(f"bad model config line: {line!r}")
    return fields


def load_model(path, matrix: RatingMatrix, force=False) -> SimilarityModel:
    """Rebuild a SimilarityModel from disk against its training matrix."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or lines[0] != _MAGIC:
        raise ModelFormatError(f"not a model file: {path}")
    if len(lines) < 3:
        raise ModelFormatError("truncated model file")

    kv = _parse_kv_line(lines[1], ("similarity", "mode", "min_support", "k", "positive_only"))
    try:
        config = KnnConfig(
            similarity=kv["similarity"],
            mode=kv["mode"],
            min_support=int(kv["min_support"]),
            k=int(kv["k"]),
            positive_only=bool(int(kv["positive_only"])),
        )
    except ValueError as exc:
        raise ModelFormatError(f"bad model config: {exc}") from exc

    count_kv = _parse_kv_line(lines[2], ("axis_count",))
    try:
        count = int(count_kv["axis_count"])
    except ValueError as exc:
        raise ModelFormatError(f"bad axis_count: {lines[2]!r}") from exc
    if count < 1:
        raise ModelFormatError(f"bad axis_count: {count}")

    pos = 3
    expected_lines = pos + count + 2 + count
    if len(lines) < expected_lines:
        raise ModelFormatError("truncated model file")
    labels = []
    for _ in range(count):
        if not lines[pos].startswith("label "):
            raise ModelFormatError(f"line {pos + 1}: expected 'label <id>'")
        labels.append(lines[pos][6:])
        pos += 1

    gm_kv = _parse_kv_line(lines[pos], ("global_mean",))
    pos += 1
    hash_kv = _parse_kv_line(lines[pos], ("matrix_sha256",))
    pos += 1
    try:
        global_mean = float(gm_kv["global_mean"])
    except ValueError as exc:
        raise ModelFormatError(f"bad global_mean: {gm_kv['global_mean']!r}") from exc
    stored_hash = hash_kv["matrix_sha256"]

    sim = np.zeros((count, count), dtype=np.float64)
    for i in range(count):
        parts = lines[pos].split()
        if len(parts) != i + 1:
            raise ModelFormatError(f"line {pos + 1}: expected {i + 1} values, got {len(parts)}")
        try:
            row = [float(p) for p in parts]
        except ValueError as exc:
            raise ModelFormatError(f"line {pos + 1}: bad similarity value") from exc
        sim[i, : i + 1] = row
        sim[: i + 1, i] = row
        pos += 1

    if stored_hash != matrix.content_hash() and not force:
        raise StaleModelError(
            "model was trained on a different matrix (hash mismatch); "
            "pass force to load anyway"
        )
    expected_axis = matrix.row_labels if config.mode == "user" else matrix.col_labels
    if len(expected_axis) != count:
        raise ModelFormatError(
            f"model axis has {count} labels but the matrix provides {len(expected_axis)}"
        )
    sim.flags.writeable = False
    return SimilarityModel(config, tuple(labels), sim, matrix, global_mean)
