"""Coarse/fine reference neighborhoods for a target class.

The coarse set holds broader semantic groups the class must stay aligned
with; the fine set holds visually confusable hard negatives. Fine
candidates are pruned by mean text-to-exemplar-image similarity so only
the most confusable ones survive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EmbeddingSet, pairwise_sims
from .errors import (
    DimensionMismatch,
    EmptyCandidates,
    EmptyExemplars,
    InsufficientCandidates,
    LiteEmbedError,
    UnresolvedName,
)


@dataclass(frozen=True)
class CandidateSpec:
    """Named coarse and fine candidate lists for one target class.

    Candidate generation is an input, not part of this package: lists
    arrive via config and are resolved against a text-embedding lookup.
    """

    class_name: str
    coarse_candidates: tuple
    fine_candidates: tuple

    def __post_init__(self):
        object.__setattr__(self, "coarse_candidates", tuple(self.coarse_candidates))
        object.__setattr__(self, "fine_candidates", tuple(self.fine_candidates))
        if not self.coarse_candidates or not self.fine_candidates:
            raise LiteEmbedError("coarse and fine candidate lists must be nonempty")
        if self.class_name in self.coarse_candidates or self.class_name in self.fine_candidates:
            raise LiteEmbedError(
                f"target class {self.class_name!r} may not appear in its own candidates"
            )


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Resolved coarse set, retained fine negatives, and their union.

    union is the PCA fit input: coarse entries first, then fine, in
    stable order.
    """

    coarse: EmbeddingSet
    fine: EmbeddingSet
    union: EmbeddingSet


def filter_fine_negatives(candidates: EmbeddingSet, exemplar_images: EmbeddingSet,
                          keep_k: int) -> EmbeddingSet:
    """Keep the keep_k candidates most similar to the exemplar images.

    Each candidate is scored by its mean cosine similarity to all exemplar
    image embeddings; ties break by candidate order and the result is
    sorted by descending score.
    """
    if len(candidates) == 0:
        raise EmptyCandidates("no fine-negative candidates")
    if len(exemplar_images) == 0:
        raise EmptyExemplars("no exemplar images to score against")
    if candidates.dim != exemplar_images.dim:
        raise DimensionMismatch(
            f"candidate dim {candidates.dim} vs exemplar dim {exemplar_images.dim}"
        )
    if keep_k < 1:
        raise LiteEmbedError(f"keep_k must be >= 1, got {keep_k}")
    scores = pairwise_sims(candidates, exemplar_images).mean(axis=1)
    order = np.argsort(-scores, kind="stable")[: min(keep_k, len(candidates))]
    return EmbeddingSet([candidates[int(i)] for i in order])


def build_neighborhood(spec: CandidateSpec, text_lookup: EmbeddingSet,
                       exemplar_images: EmbeddingSet, keep_k: int = 5) -> NeighborhoodSpec:
    """Resolve candidate names and assemble the coarse/fine neighborhood.

    Every coarse name must resolve; fine names may be partially missing as
    long as at least keep_k resolve. Only the fine set is similarity
    filtered.
    """
    missing_coarse = [n for n in spec.coarse_candidates if n not in text_lookup]
    if missing_coarse:
        raise UnresolvedName(missing_coarse)
    coarse = text_lookup.subset(spec.coarse_candidates)

    fine_names = [n for n in spec.fine_candidates if n in text_lookup]
    if len(fine_names) < keep_k:
        raise InsufficientCandidates(
            f"only {len(fine_names)} fine candidates resolvable, need keep_k={keep_k}"
        )
    fine = filter_fine_negatives(text_lookup.subset(fine_names), exemplar_images, keep_k)

    union = EmbeddingSet(list(coarse) + list(fine))
    return NeighborhoodSpec(coarse=coarse, fine=fine, union=union)
