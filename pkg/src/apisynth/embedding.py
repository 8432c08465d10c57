"""Word-embedding model: vector lookup, expression vectors, cosine, neighbors.

The model is an immutable map from normalized tokens (unigrams and
underscore-joined n-grams) to fixed-dimension real vectors.  It is loaded
from a plain text file: an optional ``"<count> <dimension>"`` header line
followed by one ``"<token> <c1> ... <cd>"`` line per token.
"""

from __future__ import annotations

import io
import re
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import (
    AllTokensOOV,
    DimensionMismatch,
    DuplicateToken,
    EmptyModel,
    MalformedLine,
    TokenOOV,
    ZeroVector,
)

_WHITESPACE = re.compile(r"\s+")

Source = Union[str, Path, io.IOBase]


def normalize_token(token: str) -> str:
    """Canonical vocabulary form: lowercased, internal whitespace runs
    replaced by a single underscore ("New York" -> "new_york")."""
    return _WHITESPACE.sub("_", token.strip().lower())


class EmbeddingModel:
    """Vocabulary of tokens mapped to vectors of one shared dimension.

    Immutable after construction; safe for concurrent readers.
    """

    def __init__(self, vectors: Iterable[tuple[str, Sequence[float]]]):
        tokens: list[str] = []
        index: dict[str, int] = {}
        rows: list[np.ndarray] = []
        for token, components in vectors:
            normalized = normalize_token(token)
            if normalized in index:
                raise DuplicateToken(normalized)
            row = np.asarray(components, dtype=np.float64)
            if row.ndim != 1:
                raise MalformedLine(0, f"vector for {token!r} is not one-dimensional")
            if not np.all(np.isfinite(row)):
                raise MalformedLine(0, f"vector for {token!r} has non-finite components")
            if not row.any():
                raise MalformedLine(0, f"vector for {token!r} is all-zero")
            index[normalized] = len(tokens)
            tokens.append(normalized)
            rows.append(row)
        if not tokens:
            raise EmptyModel("model contains no tokens")
        matrix = np.vstack(rows)
        if len({r.shape[0] for r in rows}) != 1:
            raise MalformedLine(0, "vectors do not share one dimension")
        matrix.flags.writeable = False
        self._tokens = tuple(tokens)
        self._index = index
        self._matrix = matrix
        self._norms = np.linalg.norm(matrix, axis=1)

    @property
    def dimension(self) -> int:
        return self._matrix.shape[1]

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return normalize_token(token) in self._index

    def tokens(self) -> tuple[str, ...]:
        return self._tokens

    def vector_of(self, token: str) -> Optional[np.ndarray]:
        """Vector for the normalized token, or None when out-of-vocabulary."""
        row = self._index.get(normalize_token(token))
        if row is None:
            return None
        return self._matrix[row]

    def expression_vector(self, tokens: Sequence[str]) -> np.ndarray:
        """Component-wise sum of the vectors of all in-vocabulary tokens.

        Out-of-vocabulary tokens are skipped; raises AllTokensOOV when no
        token resolves (the expression cannot be embedded).
        """
        if not tokens:
            raise AllTokensOOV("expression has no tokens")
        total = np.zeros(self.dimension, dtype=np.float64)
        found = False
        for token in tokens:
            vec = self.vector_of(token)
            if vec is not None:
                total += vec
                found = True
        if not found:
            raise AllTokensOOV(f"no token of {list(tokens)!r} is in the vocabulary")
        return total

    def nearest_neighbors(self, token: str, k: int) -> list[tuple[str, float]]:
        """The k most-similar other tokens by cosine, best first.

        Ties are broken by lexicographic token order; fewer than k pairs are
        returned when the vocabulary is small.
        """
        normalized = normalize_token(token)
        row = self._index.get(normalized)
        if row is None:
            raise TokenOOV(token)
        if k <= 0:
            return []
        query = self._matrix[row]
        sims = (self._matrix @ query) / (self._norms * self._norms[row])
        np.clip(sims, -1.0, 1.0, out=sims)
        pairs = [
            (other, float(sims[i]))
            for i, other in enumerate(self._tokens)
            if i != row
        ]
        pairs.sort(key=lambda p: (-p[1], p[0]))
        return pairs[:k]


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity dot(u,v) / (|u|*|v|), clamped into [-1, 1]."""
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise DimensionMismatch(f"vector shapes differ: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine is undefined for an all-zero vector")
    value = float(np.dot(a, b)) / (norm_a * norm_b)
    return max(-1.0, min(1.0, value))


def _read_lines(source: Source) -> list[str]:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    return text.splitlines()


def _is_header(fields: list[str]) -> bool:
    if len(fields) != 2:
        return False
    try:
        int(fields[0]), int(fields[1])
    except ValueError:
        return False
    return True


def load_embeddings(source: Source) -> EmbeddingModel:
    """Load a text vector file from a path or a readable (byte) stream.

    The optional first line "<count> <dimension>" is recognized when it holds
    exactly two integer fields; with a header, count or dimension mismatches
    are rejected.  The dimension is otherwise taken from the first vector
    line.  Tokens must be unique after normalization and every vector must be
    finite and nonzero.
    """
    lines = _read_lines(source)
    expected_count: Optional[int] = None
    expected_dim: Optional[int] = None
    dimension: Optional[int] = None
    entries: list[tuple[str, np.ndarray]] = []
    seen: set[str] = set()

    start = 0
    for line_no, line in enumerate(lines, start=1):
        if line.strip():
            if _is_header(line.split()):
                expected_count, expected_dim = (int(f) for f in line.split())
                start = line_no
            break

    for line_no, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        fields = line.split(" ")
        if len(fields) < 2:
            raise MalformedLine(line_no, "expected '<token> <c1> ... <cd>'")
        token, raw_components = fields[0], fields[1:]
        try:
            components = np.asarray([float(c) for c in raw_components], dtype=np.float64)
        except ValueError:
            raise MalformedLine(line_no, f"non-numeric component in {line!r}") from None
        if not np.all(np.isfinite(components)):
            raise MalformedLine(line_no, "non-finite component")
        if not components.any():
            raise MalformedLine(line_no, f"all-zero vector for token {token!r}")
        if dimension is None:
            dimension = expected_dim if expected_dim is not None else len(components)
        if len(components) != dimension:
            raise MalformedLine(
                line_no, f"expected {dimension} components, found {len(components)}"
            )
        normalized = normalize_token(token)
        if normalized in seen:
            raise DuplicateToken(normalized)
        seen.add(normalized)
        entries.append((normalized, components))

    if not entries:
        raise EmptyModel("vector file lists no tokens")
    if expected_count is not None and len(entries) != expected_count:
        raise MalformedLine(
            1, f"header declares {expected_count} tokens, file has {len(entries)}"
        )
    return EmbeddingModel(entries)
