"""Dense-vector primitives: named embeddings, normalization, cosine similarity.

All similarity math promotes to float64 internally and divides by norms on
the fly, so stored vectors never need to be pre-normalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateName,
    EmptySet,
    NonFiniteVector,
    ZeroVector,
)

EPS_NORM = 1e-12


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Embedding:
    """A named, fixed-dimension real vector."""

    name: str
    vector: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.vector)
        arr.flags.writeable = False
        object.__setattr__(self, "vector", arr)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteVector(f"embedding {self.name!r} has non-finite components")

    @property
    def dim(self) -> int:
        return self.vector.shape[0]


class EmbeddingSet:
    """Ordered collection of same-dimension embeddings with unique names.

    Order is significant: ties in every downstream ranking operation are
    broken by position in this set.
    """

    def __init__(self, entries):
        entries = list(entries)
        if not entries:
            raise EmptySet("embedding set must contain at least one entry")
        dim = entries[0].dim
        seen = set()
        for e in entries:
            if e.dim != dim:
                raise DimensionMismatch(
                    f"entry {e.name!r} has dim {e.dim}, set declares {dim}"
                )
            if e.name in seen:
                raise DuplicateName(f"duplicate entry name {e.name!r}")
            seen.add(e.name)
        self._entries = tuple(entries)
        self._dim = dim
        self._index = {e.name: i for i, e in enumerate(entries)}

    @classmethod
    def from_matrix(cls, names, matrix) -> "EmbeddingSet":
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or len(names) != matrix.shape[0]:
            raise DimensionMismatch(
                f"need one row per name: {len(names)} names, matrix {matrix.shape}"
            )
        return cls(Embedding(n, row) for n, row in zip(names, matrix))

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def names(self) -> tuple:
        return tuple(e.name for e in self._entries)

    def matrix(self) -> np.ndarray:
        """Stacked vectors, one row per entry, in set order."""
        return np.stack([e.vector for e in self._entries])

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __getitem__(self, key) -> Embedding:
        if isinstance(key, str):
            return self._entries[self._index[key]]
        return self._entries[key]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def subset(self, names) -> "EmbeddingSet":
        return EmbeddingSet([self[n] for n in names])


def l2_normalize(v) -> np.ndarray:
    """Return v / ||v||, raising ZeroVector when the norm is below 1e-12."""
    arr = _as_vector(v)
    norm = float(np.linalg.norm(arr))
    if norm <= EPS_NORM:
        raise ZeroVector(f"cannot normalize vector with norm {norm:.3e}")
    return arr / norm


def cosine_sim(a, b) -> float:
    """Cosine similarity of two raw vectors, clamped to [-1, 1]."""
    va, vb = _as_vector(a), _as_vector(b)
    if va.shape != vb.shape:
        raise DimensionMismatch(f"dims differ: {va.shape[0]} vs {vb.shape[0]}")
    na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
    if na <= EPS_NORM or nb <= EPS_NORM:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    return float(np.clip(np.dot(va, vb) / (na * nb), -1.0, 1.0))


def mean_embedding(emb_set: EmbeddingSet, normalize_result: bool = False,
                   name: str = "mean") -> Embedding:
    """Componentwise mean of a set, optionally L2-normalized afterward."""
    mean = emb_set.matrix().mean(axis=0)
    if normalize_result:
        mean = l2_normalize(mean)
    return Embedding(name, mean)


def pairwise_sims(a: EmbeddingSet, b: EmbeddingSet) -> np.ndarray:
    """|A| x |B| matrix with entry (i, j) = cosine_sim(A_i, B_j)."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"set dims differ: {a.dim} vs {b.dim}")
    ma, mb = a.matrix(), b.matrix()
    na = np.linalg.norm(ma, axis=1)
    nb = np.linalg.norm(mb, axis=1)
    if np.any(na <= EPS_NORM) or np.any(nb <= EPS_NORM):
        raise ZeroVector("pairwise similarity undefined for zero vectors")
    sims = (ma @ mb.T) / np.outer(na, nb)
    return np.clip(sims, -1.0, 1.0)
