"""Project corpus: data model, JSON parsing/serialization, synthetic generation.

A corpus is a JSON array of project objects::

    {"id": str, "title": str, "description": str, "url": str,
     "views": int, "respects": int, "comments": int,
     "tags": [str], "components": [{"id": str, "name": str}],
     "libraries": [str], "source_files": [{"name": str, "code": str}]}

Only ``id`` and ``title`` are required; everything else defaults to
empty/zero. Unknown fields are ignored.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import CorpusParseError, CorpusValidationError

SCHEMA_VERSION = "1"

_COUNT_FIELDS = ("views", "respects", "comments")


@dataclass(frozen=True)
class ComponentRef:
    """A hardware component: stable id plus display name."""

    id: str
    name: str


@dataclass(frozen=True)
class SourceFile:
    name: str
    code: str


@dataclass(frozen=True)
class ProjectRecord:
    """One mined project. Collections are kept sorted and duplicate-free."""

    id: str
    title: str
    description: str = ""
    url: str = ""
    views: int = 0
    respects: int = 0
    comments: int = 0
    tags: tuple[str, ...] = ()
    components: tuple[ComponentRef, ...] = ()
    libraries: tuple[str, ...] = ()
    source_files: tuple[SourceFile, ...] = ()


@dataclass(frozen=True)
class Corpus:
    projects: tuple[ProjectRecord, ...] = ()
    schema_version: str = SCHEMA_VERSION


def _require(cond, message):
    if not cond:
        raise CorpusValidationError(message)


def _record_from_obj(obj, index):
    if not isinstance(obj, dict):
        raise CorpusValidationError(f"record {index}: expected an object")
    for name in ("id", "title"):
        _require(name in obj, f"record {index}: missing required field {name!r}")
        _require(isinstance(obj[name], str), f"record {index}: field {name!r} must be a string")
    _require(obj["id"] != "", f"record {index}: field 'id' must be non-empty")

    counts = {}
    for name in _COUNT_FIELDS:
        value = obj.get(name, 0)
        _require(
            isinstance(value, int) and not isinstance(value, bool) and value >= 0,
            f"record {index}: field {name!r} must be a non-negative integer",
        )
        counts[name] = value

    tags = obj.get("tags", [])
    _require(
        isinstance(tags, list) and all(isinstance(t, str) for t in tags),
        f"record {index}: field 'tags' must be a list of strings",
    )
    libraries = obj.get("libraries", [])
    _require(
        isinstance(libraries, list) and all(isinstance(x, str) for x in libraries),
        f"record {index}: field 'libraries' must be a list of strings",
    )

    components = []
    raw_components = obj.get("components", [])
    _require(isinstance(raw_components, list), f"record {index}: field 'components' must be a list")
    for c in raw_components:
        _require(
            isinstance(c, dict) and isinstance(c.get("id"), str) and c["id"] != "",
            f"record {index}: each component needs a non-empty string 'id'",
        )
        name = c.get("name", "")
        _require(isinstance(name, str), f"record {index}: component 'name' must be a string")
        components.append(ComponentRef(id=c["id"], name=name))

    source_files = []
    raw_files = obj.get("source_files", [])
    _require(isinstance(raw_files, list), f"record {index}: field 'source_files' must be a list")
    for f in raw_files:
        _require(
            isinstance(f, dict) and isinstance(f.get("name"), str) and isinstance(f.get("code"), str),
            f"record {index}: each source file needs string 'name' and 'code'",
        )
        source_files.append(SourceFile(name=f["name"], code=f["code"]))

    # Dedupe collections; components keyed by id (conflicting names are
    # caught corpus-wide in _validate_corpus).
    tags = tuple(sorted(set(tags)))
    libraries = tuple(sorted(set(libraries)))
    by_id = {}
    for c in components:
        prev = by_id.get(c.id)
        if prev is not None and prev.name != c.name:
            raise CorpusValidationError(
                f"record {index}: component {c.id!r} listed with conflicting names "
                f"{prev.name!r} and {c.name!r}"
            )
        by_id[c.id] = c
    components = tuple(by_id[k] for k in sorted(by_id))

    return ProjectRecord(
        id=obj["id"],
        title=obj["title"],
        description=obj.get("description", "") if isinstance(obj.get("description", ""), str) else "",
        url=obj.get("url", "") if isinstance(obj.get("url", ""), str) else "",
        views=counts["views"],
        respects=counts["respects"],
        comments=counts["comments"],
        tags=tags,
        components=components,
        libraries=libraries,
        source_files=tuple(source_files),
    )


def _validate_corpus(projects):
    seen = set()
    for record in projects:
        if record.id in seen:
            raise CorpusValidationError(f"duplicate project id {record.id!r}")
        seen.add(record.id)
    names = {}
    for record in projects:
        for c in record.components:
            prev = names.get(c.id)
            if prev is not None and prev != c.name:
                raise CorpusValidationError(
                    f"component {c.id!r} has conflicting names {prev!r} and {c.name!r}"
                )
            names[c.id] = c.name


def parse_corpus(data) -> Corpus:
    """Parse corpus JSON from bytes or text and validate all invariants."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise CorpusParseError(
            f"malformed corpus JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    if not isinstance(raw, list):
        raise CorpusValidationError("corpus must be a JSON array of project objects")
    projects = tuple(_record_from_obj(obj, i) for i, obj in enumerate(raw))
    _validate_corpus(projects)
    return Corpus(projects=projects)


def load_corpus(path) -> Corpus:
    with open(path, "rb") as fh:
        return parse_corpus(fh.read())


def _record_to_obj(r: ProjectRecord):
    return {
        "id": r.id,
        "title": r.title,
        "description": r.description,
        "url": r.url,
        "views": r.views,
        "respects": r.respects,
        "comments": r.comments,
        "tags": list(r.tags),
        "components": [{"id": c.id, "name": c.name} for c in r.components],
        "libraries": list(r.libraries),
        "source_files": [{"name": f.name, "code": f.code} for f in r.source_files],
    }


def serialize_corpus(corpus: Corpus) -> str:
    """Deterministic JSON text; parse_corpus(serialize_corpus(c)) == c."""
    return json.dumps([_record_to_obj(r) for r in corpus.projects], indent=1, sort_keys=True)


def generate_synthetic_corpus(
    n_projects,
    n_tags,
    n_components,
    n_libraries,
    block_count,
    noise,
    seed,
) -> Corpus:
    """Seeded corpus with planted block structure.

    Items (tags, components, libraries) are split round-robin into
    ``block_count`` pools; project j belongs to block ``j % block_count`` and
    draws from its block's pools. Component and library draws are weighted
    1/(rank+1) so early pool positions dominate and late ones form a rare
    tail, mimicking real usage counts. Each drawn item is independently
    swapped for a global draw with probability ``noise``, which plants
    sparse cross-block edges; the swap keeps the same popularity skew, so
    the tail stays rare even at high noise. Output is a pure function of
    the arguments.
    """
    for name, value in (
        ("n_projects", n_projects),
        ("n_tags", n_tags),
        ("n_components", n_components),
        ("n_libraries", n_libraries),
        ("block_count", block_count),
    ):
        if not isinstance(value, int) or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
    if block_count > min(n_tags, n_components, n_libraries):
        raise ValueError("block_count cannot exceed the smallest item pool")
    if not 0.0 <= noise <= 1.0:
        raise ValueError(f"noise must be in [0, 1], got {noise!r}")

    rng = random.Random(seed)

    tags = [f"tag{i:03d}" for i in range(n_tags)]
    component_ids = [f"c{i:03d}" for i in range(n_components)]
    libraries = [f"lib{i:03d}" for i in range(n_libraries)]

    def pools(items):
        out = [[] for _ in range(block_count)]
        for i, item in enumerate(items):
            out[i % block_count].append(item)
        return out

    tag_pools = pools(tags)
    comp_pools = pools(component_ids)
    lib_pools = pools(libraries)

    def weighted_sample(pool, size):
        # popularity is heavy-tailed: earlier pool positions are drawn far
        # more often, later ones form a rare tail
        items = list(pool)
        weights = [1.0 / (i + 1) for i in range(len(items))]
        out = []
        for _ in range(size):
            x = rng.random() * sum(weights)
            acc = 0.0
            idx = len(weights) - 1
            for i, w in enumerate(weights):
                acc += w
                if x < acc:
                    idx = i
                    break
            out.append(items.pop(idx))
            weights.pop(idx)
        return out

    def weighted_choice(items):
        # same skew for stray cross-block picks; totals stay heavy-tailed
        x = rng.random() * sum(1.0 / (i + 1) for i in range(len(items)))
        acc = 0.0
        for i, item in enumerate(items):
            acc += 1.0 / (i + 1)
            if x < acc:
                return item
        return items[-1]

    def draw(pool, everything, lo, hi, skew=False):
        size = rng.randint(min(lo, len(pool)), min(hi, len(pool)))
        picks = weighted_sample(pool, size) if skew else rng.sample(pool, size)
        out = []
        for item in picks:
            if noise > 0 and rng.random() < noise:
                out.append(weighted_choice(everything) if skew
                           else everything[rng.randrange(len(everything))])
            else:
                out.append(item)
        return sorted(set(out))

    projects = []
    for j in range(n_projects):
        b = j % block_count
        project_tags = draw(tag_pools[b], tags, 1, 3)
        comps = draw(comp_pools[b], component_ids, 6, 10, skew=True)
        libs = draw(lib_pools[b], libraries, 1, 4, skew=True)
        pid = f"p{j:04d}"
        sketch = "\n".join(f"#include <{lib}.h>" for lib in libs)
        sketch += "\n\nvoid setup() {\n}\n\nvoid loop() {\n}\n"
        projects.append(
            ProjectRecord(
                id=pid,
                title=f"Project {j:04d}",
                description=f"Synthetic block-{b} project",
                url=f"https://example.org/projects/{pid}",
                views=rng.randrange(0, 5000),
                respects=rng.randrange(0, 300),
                comments=rng.randrange(0, 50),
                tags=tuple(project_tags),
                components=tuple(
                    ComponentRef(id=cid, name=f"component {cid[1:]}") for cid in comps
                ),
                libraries=tuple(libs),
                source_files=(SourceFile(name="sketch.ino", code=sketch),),
            )
        )
    corpus = Corpus(projects=tuple(projects))
    _validate_corpus(corpus.projects)
    return corpus
