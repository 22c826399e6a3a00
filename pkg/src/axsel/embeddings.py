"""Word embedding store: text-format loading, cosine similarity, exact top-k.

Vocabularies of the sizes this package targets (up to a few million
tokens) are scanned exactly with one matrix-vector product; there is no
approximate index. Ties are always broken by vocabulary load order so
repeated runs rank identically.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import AxselError


class EmbeddingError(AxselError):
    pass


class DimensionMismatch(EmbeddingError):
    pass


class DuplicateToken(EmbeddingError):
    pass


class ZeroVector(EmbeddingError):
    pass


class EmbeddingParseError(EmbeddingError):
    pass


class KTooLarge(AxselError):
    pass


@dataclass(frozen=True)
class SimilarityHit:
    token: str
    score: float


class EmbeddingStore:
    """Immutable token -> dense vector table with cached norms."""

    def __init__(self, tokens: Sequence[str], vectors: Iterable[Sequence[float]] | np.ndarray):
        matrix = np.asarray(vectors, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens):
            raise EmbeddingParseError(
                f"expected one vector per token, got matrix shape {matrix.shape} "
                f"for {len(tokens)} tokens"
            )
        if matrix.shape[0] == 0 or matrix.shape[1] == 0:
            raise EmbeddingParseError("embedding must have at least one token and one dimension")
        index: dict[str, int] = {}
        for row, token in enumerate(tokens):
            if token in index:
                raise DuplicateToken(f"token {token!r} appears twice")
            index[token] = row
        norms = np.linalg.norm(matrix, axis=1)
        zero_rows = np.flatnonzero(norms == 0.0)
        if zero_rows.size:
            raise ZeroVector(f"zero vector for token {tokens[zero_rows[0]]!r}")
        self.tokens: tuple[str, ...] = tuple(tokens)
        self.matrix = matrix
        self.norms = norms
        self._index = index
        matrix.setflags(write=False)
        norms.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def row(self, token: str) -> int:
        return self._index[token]

    def vector(self, token: str) -> np.ndarray:
        return self.matrix[self._index[token]]

    def digest(self) -> str:
        h = hashlib.sha256()
        for token in self.tokens:
            h.update(token.encode("utf-8"))
            h.update(b"\x00")
        h.update(self.matrix.tobytes())
        return h.hexdigest()


def load_embedding(source: IO[str]) -> EmbeddingStore:
    """Read the common text format: optional `count dim` header, then one
    `token v1 ... vn` line per token."""
    tokens: list[str] = []
    seen: set[str] = set()
    rows: list[list[float]] = []
    dim: int | None = None
    declared_count: int | None = None
    lineno = 0
    for lineno, line in enumerate(source, start=1):
        fields = line.split()
        if not fields:
            continue
        if lineno == 1 and len(fields) == 2:
            try:
                declared_count, dim = int(fields[0]), int(fields[1])
            except ValueError:
                pass
            else:
                if declared_count <= 0 or dim <= 0:
                    raise EmbeddingParseError(f"invalid header counts on line {lineno}")
                continue
        token = fields[0]
        try:
            values = [float(v) for v in fields[1:]]
        except ValueError as exc:
            raise EmbeddingParseError(f"non-numeric vector component on line {lineno}: {exc}") from None
        if not values:
            raise EmbeddingParseError(f"no vector components on line {lineno}")
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise DimensionMismatch(
                f"line {lineno}: expected {dim} components, got {len(values)}"
            )
        if not any(values):
            raise ZeroVector(f"zero vector for token {token!r} on line {lineno}")
        if token in seen:
            raise DuplicateToken(f"token {token!r} appears twice (line {lineno})")
        seen.add(token)
        tokens.append(token)
        rows.append(values)
    if not tokens:
        raise EmbeddingParseError("embedding source contains no vectors")
    if declared_count is not None and declared_count != len(tokens):
        raise EmbeddingParseError(
            f"header declares {declared_count} vectors but {len(tokens)} were read"
        )
    return EmbeddingStore(tokens, rows)


def cos_sim(u: Sequence[float] | np.ndarray, v: Sequence[float] | np.ndarray) -> float:
    """Cosine of the angle between u and v, clamped into [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"vectors of shape {u.shape} and {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine similarity of a zero vector is undefined")
    value = float(np.dot(u, v) / (nu * nv))
    return min(1.0, max(-1.0, value))


def _ranked_rows(store: EmbeddingStore, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All rows ranked by cosine to q: (row order, clamped scores)."""
    qnorm = np.linalg.norm(q)
    if qnorm == 0.0:
        raise ZeroVector("cannot rank against a zero query vector")
    if q.shape != (store.dim,):
        raise DimensionMismatch(f"query of shape {q.shape} against dimension {store.dim}")
    scores = np.clip((store.matrix @ q) / (store.norms * qnorm), -1.0, 1.0)
    # Stable sort on the negated scores keeps vocabulary order among ties.
    order = np.argsort(-scores, kind="stable")
    return order, scores


def top_k_vectors(store: EmbeddingStore, q: Sequence[float] | np.ndarray, k: int) -> list[SimilarityHit]:
    """Exact top-k tokens by cosine to q, descending, ties in vocabulary order."""
    if k < 0 or k > len(store):
        raise KTooLarge(f"k={k} out of range for a store of {len(store)} vectors")
    order, scores = _ranked_rows(store, np.asarray(q, dtype=np.float64))
    return [SimilarityHit(store.tokens[row], float(scores[row])) for row in order[:k]]


def simwords(store: EmbeddingStore, w: str, k: int) -> list[SimilarityHit]:
    """The k vocabulary tokens most similar to token w, excluding w itself.

    Returns [] when w is not in the vocabulary.
    """
    if k < 0 or k >= len(store):
        raise KTooLarge(f"k={k} out of range for a vocabulary of {len(store)} tokens")
    if w not in store:
        return []
    self_row = store.row(w)
    order, scores = _ranked_rows(store, store.matrix[self_row])
    hits: list[SimilarityHit] = []
    for row in order:
        if len(hits) == k:
            break
        if row == self_row:
            continue
        hits.append(SimilarityHit(store.tokens[row], float(scores[row])))
    return hits
