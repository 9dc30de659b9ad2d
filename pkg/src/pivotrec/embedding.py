"""Pivot-table embeddings, pairwise distance, and max-min set diversity.

The deterministic baseline provider hashes query tokens and grid features
into fixed-size vectors; a remote provider can swap in learned encoders
behind the same interface. Distances are (1 - cosine) / 2, so they live in
[0, 1], and the diversity of a set is its smallest pairwise distance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._util import fnv1a64, tokenize
from .pivot import CanonicalPivotSpec, PivotGrid

DEFAULT_HALF_DIM = 64

# Leading slots of the content vector reserved for grid statistics; the
# rest take hashed header tokens.
_STAT_SLOTS = 8

# Scaffold tokens present in every canonical query string. Hashing them too
# gives all query vectors a large shared component that compresses pairwise
# distances toward zero; only the informative tokens are embedded.
_QUERY_STOPWORDS = frozenset({"select", "from", "d", "group", "by"})


class EmbeddingConfigError(ValueError):
    """Mismatched providers or dimensions."""


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray
    provider_id: str
    fallback: bool = False

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.values)):
            raise EmbeddingConfigError("embedding entries must be finite")


def _normalized(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm > 0:
        return vec / norm
    return vec


def _hash_tokens(tokens: list[str], dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=np.float64)
    for tok in tokens:
        vec[fnv1a64(tok) % dim] += 1.0
    return vec


class BaselineEmbeddingProvider:
    """Deterministic offline embeddings.

    Query half: hashed bag of lowercase tokens of the canonical query
    string, so it depends only on the query, never on the data. Content
    half: grid shape/density/value statistics plus hashed header tokens;
    every feature is symmetric in rows vs columns, which makes the content
    embedding transpose-invariant.
    """

    def __init__(self, half_dim: int = DEFAULT_HALF_DIM):
        if half_dim <= _STAT_SLOTS:
            raise EmbeddingConfigError(f"half_dim must exceed {_STAT_SLOTS}")
        self.half_dim = half_dim
        self.provider_id = f"baseline-{half_dim}"

    def embed_query(self, spec: CanonicalPivotSpec) -> EmbeddingVector:
        tokens = [
            t for t in tokenize(spec.query_string()) if t not in _QUERY_STOPWORDS
        ]
        vec = _normalized(_hash_tokens(tokens, self.half_dim))
        return EmbeddingVector(values=vec, provider_id=self.provider_id)

    def embed_content(self, g: PivotGrid) -> EmbeddingVector:
        cells = g.cells[np.isfinite(g.cells)] if g.cells.size else np.array([])
        # Sorting fixes the summation order, so the statistics are bitwise
        # identical however the cells were laid out (e.g. transposed).
        cells = np.sort(cells)
        stats = np.zeros(_STAT_SLOTS, dtype=np.float64)
        lo, hi = sorted((g.n, g.m))
        stats[0] = 1.0 / (1.0 + lo)
        stats[1] = 1.0 / (1.0 + hi)
        stats[2] = (g.non_null_count() / g.cell_count) if g.cell_count else 0.0
        if cells.size:
            spread = float(cells.max() - cells.min())
            if spread > 0:
                low = float(cells.min())
                stats[3] = (float(cells.mean()) - low) / spread
                stats[4] = float(cells.std()) / spread
                q1, q2, q3 = np.quantile(cells, [0.25, 0.5, 0.75])
                stats[5] = (float(q1) - low) / spread
                stats[6] = (float(q2) - low) / spread
                stats[7] = (float(q3) - low) / spread

        header_tokens: list[str] = []
        for header in (*g.row_headers, *g.col_headers):
            for part in header:
                header_tokens.extend(tokenize(part))
        hashed = _hash_tokens(sorted(header_tokens), self.half_dim - _STAT_SLOTS)

        vec = _normalized(np.concatenate([stats, hashed]))
        return EmbeddingVector(values=vec, provider_id=self.provider_id)

    def embed_pivot(self, spec: CanonicalPivotSpec, g: PivotGrid) -> EmbeddingVector:
        return concat_embedding(self.embed_query(spec), self.embed_content(g))


class RemoteEmbeddingProvider:
    """JSON-over-HTTP encoder: POST {"kind", "payload"} -> {"vector"}.

    Vectors are L2-normalized on receipt. A failed call falls back to the
    baseline provider; the returned vector carries the baseline provider id
    and is flagged, so it is never silently compared against genuine remote
    vectors.
    """

    def __init__(self, endpoint: str, timeout: float = 10.0,
                 fallback: BaselineEmbeddingProvider | None = None,
                 max_in_flight: int = 4):
        import httpx

        self.endpoint = endpoint
        self.fallback = fallback or BaselineEmbeddingProvider()
        self.provider_id = f"remote:{endpoint}"
        self._client = httpx.Client(
            timeout=timeout,
            limits=httpx.Limits(max_connections=max_in_flight),
        )

    def _post(self, kind: str, payload: object) -> EmbeddingVector | None:
        import httpx

        try:
            resp = self._client.post(self.endpoint, json={"kind": kind, "payload": payload})
            resp.raise_for_status()
            raw = np.asarray(resp.json()["vector"], dtype=np.float64)
        except (httpx.HTTPError, KeyError, ValueError):
            return None
        if raw.ndim != 1 or raw.size == 0 or not np.all(np.isfinite(raw)):
            return None
        return EmbeddingVector(values=_normalized(raw), provider_id=self.provider_id)

    def embed_query(self, spec: CanonicalPivotSpec) -> EmbeddingVector:
        vec = self._post("query", spec.query_string())
        if vec is not None:
            return vec
        return replace(self.fallback.embed_query(spec), fallback=True)

    def embed_content(self, g: PivotGrid) -> EmbeddingVector:
        vec = self._post("content", g.to_json_dict())
        if vec is not None:
            return vec
        return replace(self.fallback.embed_content(g), fallback=True)

    def embed_pivot(self, spec: CanonicalPivotSpec, g: PivotGrid) -> EmbeddingVector:
        query = self.embed_query(spec)
        content = self.embed_content(g)
        if query.fallback or content.fallback:
            # One degraded half makes the concatenation incomparable with
            # fully-remote vectors; degrade both halves together.
            return replace(self.fallback.embed_pivot(spec, g), fallback=True)
        return concat_embedding(query, content)


def concat_embedding(query: EmbeddingVector, content: EmbeddingVector) -> EmbeddingVector:
    """[E_Q ; E_C]: the full pivot embedding."""
    if query.provider_id != content.provider_id:
        raise EmbeddingConfigError(
            f"cannot concatenate vectors from {query.provider_id!r} "
            f"and {content.provider_id!r}"
        )
    return EmbeddingVector(
        values=np.concatenate([query.values, content.values]),
        provider_id=query.provider_id,
        fallback=query.fallback or content.fallback,
    )


def pairwise_distance(e1: EmbeddingVector, e2: EmbeddingVector) -> float:
    """(1 - cosine similarity) / 2, in [0, 1]. A zero-norm operand has no
    direction; its cosine is treated as 0, giving distance 0.5."""
    if e1.provider_id != e2.provider_id or e1.dim != e2.dim:
        raise EmbeddingConfigError(
            f"incomparable embeddings: {e1.provider_id}/{e1.dim} "
            f"vs {e2.provider_id}/{e2.dim}"
        )
    n1 = float(np.linalg.norm(e1.values))
    n2 = float(np.linalg.norm(e2.values))
    if n1 == 0.0 or n2 == 0.0:
        cos = 0.0
    else:
        cos = float(np.dot(e1.values, e2.values) / (n1 * n2))
        cos = min(1.0, max(-1.0, cos))
    return (1.0 - cos) / 2.0


def set_diversity(embeddings: list[EmbeddingVector]) -> float:
    """Smallest pairwise distance within the set; 1.0 for empty or
    singleton sets, where the constraint is vacuous."""
    if len(embeddings) <= 1:
        return 1.0
    best = 1.0
    for i in range(len(embeddings)):
        for j in range(i + 1, len(embeddings)):
            best = min(best, pairwise_distance(embeddings[i], embeddings[j]))
    return best
