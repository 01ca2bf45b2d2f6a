"""Measurement protocols: zero-shot classification, cumulative accuracy
over sequentially added classes, retrieval precision, the mean-image
baseline, and vocabulary-drift diagnostics.

Every ranking here breaks ties by input order, so results are fully
deterministic for a given set ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Embedding, EmbeddingSet, mean_embedding, pairwise_sims
from .errors import EmptySet, GalleryTooSmall, TooFewPoints, UnknownLabel
from .optimizer import ClassRegistry
from .subspace import fit_pca


@dataclass(frozen=True)
class LabeledImageSet:
    """Image embeddings paired with ground-truth class names."""

    images: EmbeddingSet
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(self.images):
            raise UnknownLabel(
                f"{len(self.labels)} labels for {len(self.images)} images"
            )

    def __len__(self) -> int:
        return len(self.images)

    @property
    def dim(self) -> int:
        return self.images.dim


@dataclass(frozen=True)
class EvalResult:
    """Top-1 accuracy (percent), per-class accuracy, confusion counts."""

    overall: float
    per_class: dict
    confusion: dict
    predictions: tuple


def classify(images: LabeledImageSet, class_embs: EmbeddingSet) -> EvalResult:
    """Zero-shot classification: argmax cosine over class embeddings.

    Exact similarity ties go to the earlier class in class_embs.
    """
    for lab in images.labels:
        if lab not in class_embs:
            raise UnknownLabel(f"label {lab!r} has no class embedding")
    sims = pairwise_sims(images.images, class_embs)
    pred_idx = np.argmax(sims, axis=1)
    names = class_embs.names
    predictions = tuple(names[int(i)] for i in pred_idx)

    totals: dict[str, int] = {}
    corrects: dict[str, int] = {}
    confusion: dict[tuple, int] = {}
    for truth, pred in zip(images.labels, predictions):
        totals[truth] = totals.get(truth, 0) + 1
        if pred == truth:
            corrects[truth] = corrects.get(truth, 0) + 1
        confusion[(truth, pred)] = confusion.get((truth, pred), 0) + 1
    per_class = {
        lab: 100.0 * corrects.get(lab, 0) / totals[lab] for lab in totals
    }
    overall = 100.0 * sum(corrects.values()) / len(images)
    return EvalResult(overall, per_class, confusion, predictions)


def classify_cumulative(registry: ClassRegistry, images_per_task) -> list:
    """Accuracy after each task, over all images and classes seen so far."""
    images_per_task = list(images_per_task)
    accuracies = []
    for t in range(1, len(images_per_task) + 1):
        observed = registry.embedding_set(first=t)
        seen = images_per_task[:t]
        merged_images = [img for task in seen for img in task.images]
        merged_labels = [lab for task in seen for lab in task.labels]
        merged = LabeledImageSet(EmbeddingSet(merged_images), merged_labels)
        accuracies.append(classify(merged, observed).overall)
    return accuracies


def precision_at_k(query: Embedding, gallery: LabeledImageSet, k: int,
                   positive_class: str) -> float:
    """Fraction of the top-k gallery items labeled with the positive class."""
    if k < 1:
        raise GalleryTooSmall(f"k must be >= 1, got {k}")
    if len(gallery) < k:
        raise GalleryTooSmall(f"gallery has {len(gallery)} items, need {k}")
    sims = pairwise_sims(EmbeddingSet([query]), gallery.images)[0]
    order = np.argsort(-sims, kind="stable")[:k]
    hits = sum(1 for i in order if gallery.labels[int(i)] == positive_class)
    return hits / k


def mean_image_baseline(exemplars: LabeledImageSet) -> EmbeddingSet:
    """One normalized mean image embedding per class, as class representatives.

    Class order follows first appearance in the exemplar labels.
    """
    if len(exemplars) == 0:
        raise EmptySet("no exemplars")
    groups: dict[str, list] = {}
    for emb, lab in zip(exemplars.images, exemplars.labels):
        groups.setdefault(lab, []).append(emb)
    return EmbeddingSet([
        mean_embedding(EmbeddingSet(members), normalize_result=True, name=lab)
        for lab, members in groups.items()
    ])


def nearest_neighbors(z: Embedding, vocab: EmbeddingSet, n: int) -> list:
    """Top-n (name, similarity) pairs, descending, ties by vocab order."""
    if len(vocab) == 0:
        raise EmptySet("empty vocabulary")
    if n > len(vocab):
        raise GalleryTooSmall(f"n={n} exceeds vocabulary size {len(vocab)}")
    sims = pairwise_sims(EmbeddingSet([z]), vocab)[0]
    order = np.argsort(-sims, kind="stable")[:n]
    return [(vocab.names[int(i)], float(sims[int(i)])) for i in order]


def max_vocab_sim(z: Embedding, vocab: EmbeddingSet) -> tuple:
    """(name, similarity) of the single nearest vocabulary entry.

    This is the semantic-drift scalar: a low value means the embedding
    has left the reference text manifold.
    """
    return nearest_neighbors(z, vocab, 1)[0]


def project_2d(emb_set: EmbeddingSet) -> np.ndarray:
    """Coordinates of each embedding on the set's own top-2 PCA components.

    Rank-1 sets get a zero second coordinate.
    """
    if len(emb_set) < 3:
        raise TooFewPoints(f"need at least 3 points, got {len(emb_set)}")
    basis = fit_pca(emb_set, center=True)
    coords = (emb_set.matrix() - basis.center) @ basis.components.T
    out = np.zeros((len(emb_set), 2))
    out[:, : min(2, basis.rank)] = coords[:, :2]
    return out
