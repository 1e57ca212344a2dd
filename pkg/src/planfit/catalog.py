"""Exercise catalog: CSV loading, hashed bag-of-words embeddings, cosine retrieval.

The catalog is a small curated table (about a hundred rows), so retrieval is
exact brute-force cosine over all entries.  Embeddings come from either a
remote provider or, by default, a fully offline fallback embedder:

    lowercase -> split on non-alphanumerics -> FNV-1a 32-bit hash of each
    token -> bucket = hash % dims -> accumulate counts -> L2-normalize

FNV-1a is fixed here (offset 0x811C9DC5, prime 0x01000193, over UTF-8 bytes)
so vectors are bitwise reproducible across runs and platforms.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .errors import (
    DimensionMismatch,
    DuplicateRowId,
    EmptyQuery,
    EmptyText,
    IndexNotBuilt,
    MalformedRow,
    ProviderUnavailable,
    UnknownExercise,
    UnknownIntensity,
    ZeroVector,
)
from .vocab import Category, Intensity

CSV_COLUMNS = ("row_id", "name", "alt_keywords", "intensity", "description", "muscles")

_TOKEN_RE = re.compile(r"[a-z0-9]+")

_FNV_OFFSET = 0x811C9DC5
_FNV_PRIME = 0x01000193

_STRENGTH_MARKERS = (
    "strength",
    "resistance",
    "muscle",
    "core",
    "toning",
    "flexibility",
    "mobility",
    "balance",
)


@dataclass(frozen=True)
class ExerciseEntry:
    row_id: str
    name: str
    alt_keywords: tuple[str, ...]
    intensity: Intensity
    description: str
    muscles: str
    category: Category

    def index_text(self, style: str = "full") -> str:
        """Text embedded for retrieval; ``name_description`` restricts the fields."""
        if style == "name_description":
            parts: Iterable[str] = (self.name, self.description)
        else:
            parts = (self.name, *self.alt_keywords, self.description, self.muscles)
        return " ".join(p for p in parts if p)

    def to_json(self) -> dict:
        return {
            "row_id": self.row_id,
            "name": self.name,
            "alt_keywords": list(self.alt_keywords),
            "intensity": self.intensity.value,
            "description": self.description,
            "muscles": self.muscles,
            "category": self.category.value,
        }


@dataclass(frozen=True)
class EmbeddingVector:
    dims: int
    values: tuple[float, ...]
    norm: float


@dataclass(frozen=True)
class RetrievalConfig:
    k: int = 5
    embedder_mode: str = "fallback"  # "fallback" | "remote"
    fallback_dims: int = 256
    index_style: str = "full"  # "full" | "name_description"
    remote_embedder: Callable[[str], list[float]] | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.fallback_dims < 16:
            raise ValueError("fallback_dims must be >= 16")


def _fnv1a(token: str) -> int:
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFF
    return h


def token_bucket(token: str, dims: int) -> int:
    """Bucket index assigned to *token* by the documented FNV-1a hash."""
    return _fnv1a(token) % dims


def embed_text(text: str, config: RetrievalConfig) -> EmbeddingVector:
    """Embed *text* deterministically (fallback mode) or via the remote provider."""
    if not text or not text.strip():
        raise EmptyText(text)
    if config.embedder_mode == "remote":
        if config.remote_embedder is None:
            raise ProviderUnavailable("no remote embedder configured")
        raw = list(config.remote_embedder(text))
        norm = math.sqrt(sum(v * v for v in raw))
        if norm == 0:
            raise ZeroVector("remote embedder returned a zero vector")
        values = tuple(v / norm for v in raw)
        return EmbeddingVector(len(values), values, math.sqrt(sum(v * v for v in values)))

    counts = [0.0] * config.fallback_dims
    tokens = _TOKEN_RE.findall(text.lower())
    if not tokens:
        raise EmptyText(text)
    for tok in tokens:
        counts[token_bucket(tok, config.fallback_dims)] += 1.0
    norm = math.sqrt(sum(v * v for v in counts))
    values = tuple(v / norm for v in counts)
    return EmbeddingVector(config.fallback_dims, values, math.sqrt(sum(v * v for v in values)))


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dims != b.dims:
        raise DimensionMismatch(a.dims, b.dims)
    if a.norm == 0 or b.norm == 0:
        raise ZeroVector("cosine undefined for zero vectors")
    dot = sum(x * y for x, y in zip(a.values, b.values))
    return dot / (a.norm * b.norm)


@dataclass(frozen=True)
class CatalogIndex:
    embedder_mode: str
    index_style: str
    dims: int
    vectors: dict[str, EmbeddingVector]  # row_id -> vector


@dataclass
class Catalog:
    """Immutable after construction; index is built once and then read-only."""

    entries: tuple[ExerciseEntry, ...]
    _by_id: dict[str, ExerciseEntry] = field(init=False, repr=False)
    _index: CatalogIndex | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self._by_id = {e.row_id: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, row_id: str) -> bool:
        return row_id in self._by_id

    def get(self, row_id: str) -> ExerciseEntry:
        try:
            return self._by_id[row_id]
        except KeyError:
            raise UnknownExercise(row_id) from None

    @property
    def index(self) -> CatalogIndex | None:
        return self._index

    def build_index(self, config: RetrievalConfig) -> CatalogIndex:
        vectors = {
            e.row_id: embed_text(e.index_text(config.index_style), config)
            for e in self.entries
        }
        dims = next(iter(vectors.values())).dims if vectors else config.fallback_dims
        self._index = CatalogIndex(config.embedder_mode, config.index_style, dims, vectors)
        return self._index


def _parse_category(muscles: str, line: int) -> Category:
    tokens = [t.strip() for t in re.split(r"[;,]", muscles) if t.strip()]
    if not tokens:
        raise MalformedRow(line, "empty muscles field")
    last = tokens[-1].lower()
    if "cardio" in last:
        return Category.CARDIO
    if any(marker in last for marker in _STRENGTH_MARKERS):
        return Category.STRENGTH
    raise MalformedRow(line, f"cannot derive category from muscles token {last!r}")


def load_catalog(csv_source) -> Catalog:
    """Load a catalog from a UTF-8 CSV byte stream, path, or text.

    Expected header: row_id, name, alt_keywords (semicolon-separated),
    intensity, description, muscles.  The exercise category is derived from
    the trailing delimiter-separated token of the muscles field.
    """
    if isinstance(csv_source, (str, Path)) and "\n" not in str(csv_source):
        text = Path(csv_source).read_text(encoding="utf-8")
    elif isinstance(csv_source, bytes):
        text = csv_source.decode("utf-8")
    elif isinstance(csv_source, str):
        text = csv_source
    elif hasattr(csv_source, "read"):
        raw = csv_source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        raise TypeError(f"unsupported catalog source {type(csv_source)!r}")

    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != list(CSV_COLUMNS):
        raise MalformedRow(1, f"header must be {','.join(CSV_COLUMNS)}")

    entries: list[ExerciseEntry] = []
    seen: set[str] = set()
    for i, row in enumerate(reader, start=2):
        if any(row.get(col) is None for col in CSV_COLUMNS):
            raise MalformedRow(i, "missing columns")
        row_id = row["row_id"].strip()
        name = row["name"].strip()
        if not row_id or not name:
            raise MalformedRow(i, "row_id and name must be non-empty")
        if row_id in seen:
            raise DuplicateRowId(row_id)
        seen.add(row_id)
        intensity_token = row["intensity"].strip().lower()
        try:
            intensity = Intensity(intensity_token)
        except ValueError:
            raise UnknownIntensity(row["intensity"].strip()) from None
        keywords = tuple(k.strip() for k in row["alt_keywords"].split(";") if k.strip())
        muscles = row["muscles"].strip()
        entries.append(
            ExerciseEntry(
                row_id=row_id,
                name=name,
                alt_keywords=keywords,
                intensity=intensity,
                description=row["description"].strip(),
                muscles=muscles,
                category=_parse_category(muscles, i),
            )
        )
    return Catalog(tuple(entries))


def retrieve_top_k(
    query_keywords: list[str], catalog: Catalog, config: RetrievalConfig
) -> list[tuple[ExerciseEntry, float]]:
    """Rank catalog entries by cosine similarity to the joined query keywords.

    Returns min(k, catalog size) entries, scores non-increasing, ties broken
    by ascending row_id.
    """
    keywords = [k.strip() for k in query_keywords if k and k.strip()]
    if not keywords:
        raise EmptyQuery("at least one non-empty keyword required")
    if len(catalog) == 0:
        raise EmptyQuery("catalog is empty")
    index = catalog.index
    if index is None or index.embedder_mode != config.embedder_mode:
        raise IndexNotBuilt(
            "catalog index missing or built with a different embedder mode"
        )
    query_vec = embed_text(" ".join(keywords), config)
    scored = [
        (entry, cosine_similarity(query_vec, index.vectors[entry.row_id]))
        for entry in catalog.entries
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0].row_id))
    return scored[: config.k]


def bundled_catalog_path() -> Path:
    return Path(__file__).parent / "data" / "catalog.csv"


def load_bundled_catalog() -> Catalog:
    return load_catalog(bundled_catalog_path())
