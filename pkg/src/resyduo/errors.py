"""Exception hierarchy shared across the package.

Everything raised on bad *data* derives from ResyduoError so the CLI can
map it to a single exit code; programming errors (bad argument ranges)
stay plain ValueError.
"""


class ResyduoError(Exception):
    """Base class for data/domain errors."""


class CorpusError(ResyduoError):
    pass


class CorpusParseError(CorpusError):
    """Malformed corpus JSON. Carries the 1-based line/column of the defect."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class CorpusValidationError(CorpusError):
    """Structurally valid JSON that violates a corpus invariant."""


class EmptyProjectionError(ResyduoError):
    """A projection with no rows or no columns for the requested kind."""

    def __init__(self, kind, message=None):
        super().__init__(message or f"projection {kind!r} is empty")
        self.kind = kind


class OverPrunedError(ResyduoError):
    """Cut-off filtering left zero rows or zero columns."""

    def __init__(self, n_rows, n_cols):
        super().__init__(
            f"cut-off left {n_rows} rows x {n_cols} columns; nothing to recommend from"
        )
        self.n_rows = n_rows
        self.n_cols = n_cols


class MatrixFormatError(ResyduoError):
    """Unreadable or corrupt matrix file."""


class ModelBuildError(ResyduoError):
    """Similarity model cannot be built (e.g. no observed ratings)."""


class ModelStateError(ResyduoError):
    """Operation requested on a model in the wrong state/mode."""


class UnknownEntityError(ResyduoError):
    """Both sides of a prediction query are unknown to the model."""


class InsufficientOverlapError(ResyduoError):
    """A fold-in profile shares no items with the model vocabulary."""


class UnknownKeysError(ResyduoError):
    """None of the requested tags/components are known to the model."""

    def __init__(self, keys, kind="keys"):
        keys = sorted(keys)
        super().__init__(f"unknown {kind}: {', '.join(keys)}")
        self.keys = keys
        self.kind = kind


class MetricDomainError(ResyduoError):
    """Metric requested on an empty or degenerate input."""


class SplitError(ResyduoError):
    """Cross-validation split cannot be formed."""


class StaleModelError(ResyduoError):
    """Persisted model does not match the supplied training matrix."""


class ModelFormatError(ResyduoError):
    """Unreadable or corrupt model file."""


class DraftNotFoundError(ResyduoError):
    """Unknown project-draft id."""

    def __init__(self, draft_id):
        super().__init__(f"no project draft with id {draft_id!r}")
        self.draft_id = draft_id


class VocabularyError(ResyduoError):
    """Draft references component ids outside the trained vocabulary."""

    def __init__(self, ids):
        ids = sorted(ids)
        super().__init__(f"unknown component ids: {', '.join(ids)}")
        self.ids = ids
