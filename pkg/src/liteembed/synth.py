"""Synthetic fixtures exercising the package's claimed behaviors at desk
scale.

Real vision-language embeddings are out of reach for unit tests, so these
builders produce small geometries with the same structural features: a
shared image hub separated from the text hub (the modality gap), class
contrast directions visible in both image and text space, a coarse
semantic neighborhood, and visually confusable hard negatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Embedding, EmbeddingSet
from .evaluate import LabeledImageSet
from .neighborhood import CandidateSpec


def hierarchical_categories(n_categories: int = 5, classes_per_category: int = 15,
                            dim: int = 32, coarse_scale: float = 1.5,
                            fine_scale: float = 1.0, jitter: float = 0.4,
                            seed: int = 7):
    """Clusters of clusters: category centers far apart on one axis, class
    offsets small and isotropic in the remaining axes.

    Returns (embeddings, labels). Coordinate 0 carries essentially all
    cross-category variance, so PC1 of a centered fit separates categories
    about coarse_scale/fine_scale times more strongly than any later
    component.
    """
    rng = np.random.default_rng(seed)
    vectors, names, labels = [], [], []
    for cat in range(n_categories):
        center = np.zeros(dim)
        center[0] = (cat - (n_categories - 1) / 2) * coarse_scale
        for cls in range(classes_per_category):
            fine = np.zeros(dim)
            fine[1:] = fine_scale * rng.normal(size=dim - 1) / np.sqrt(dim - 1)
            fine[0] = jitter * rng.normal()
            vectors.append(center + fine)
            names.append(f"cat{cat}_cls{cls}")
            labels.append(f"cat{cat}")
    return EmbeddingSet.from_matrix(names, np.array(vectors)), labels


@dataclass(frozen=True)
class CollapseFixture:
    """Two target classes whose exemplar images share one direction.

    Their base texts sit on opposite sides of the text hub along the
    class contrast axis, each class lists the other as a fine-negative
    candidate, and both share the same coarse neighborhood. Alignment-only
    optimization drags both embeddings to the shared image direction
    (discriminative collapse + semantic drift); the full objective holds
    them apart and anchored.
    """

    dim: int
    class_a: str
    class_b: str
    vocab: EmbeddingSet          # text lookup for candidates and drift checks
    base_texts: EmbeddingSet     # starting embedding per target class
    exemplars_a: EmbeddingSet
    exemplars_b: EmbeddingSet
    spec_a: CandidateSpec
    spec_b: CandidateSpec
    heldout: LabeledImageSet
    keep_k: int
    k: int


def collapse_fixture(seed: int = 3, dim: int = 16, gap_angle: float = 1.1,
                     text_offset: float = 0.35, coarse_offset: float = 1.0,
                     fine_spread: float = 0.9, heldout_delta: float = 0.35,
                     n_heldout: int = 5) -> CollapseFixture:
    """Build the two-class collapse geometry.

    Axes: e0 text hub, e1 modality gap (absent from every text, so PCA on
    the neighborhood never sees it and image alignment can drag embeddings
    along it unresisted), (e2 - e3)/sqrt(2) class contrast, e4 coarse
    group offset, e5 fine-negative spread, e6/e7 coarse wiggle, e8/e9
    co-negative private directions, e10/e11 decoy directions, e12+ image
    noise and distractor words.

    The coarse set has five members so the neighborhood union (7 points,
    rank 6) spans the contrast axis as its own low-variance direction.
    With k=2 the two cluster-geometry directions (group-vs-negatives and
    negative spread) stay coarse, leaving the contrast axis in the fine
    subspace where the separation loss acts on it.
    """
    rng = np.random.default_rng(seed)
    s_txt = np.zeros(dim)
    s_txt[0] = 1.0
    s_img = np.zeros(dim)
    s_img[0] = np.cos(gap_angle)
    s_img[1] = np.sin(gap_angle)
    d_a = np.zeros(dim)
    d_a[2] = 1.0
    d_b = np.zeros(dim)
    d_b[3] = 1.0
    contrast = (d_a - d_b) / np.sqrt(2.0)

    def unit(axis: int) -> np.ndarray:
        v = np.zeros(dim)
        v[axis] = 1.0
        return v

    # Each target text carries a private descriptor direction (e8 for a,
    # e9 for b) shared with its look-alike co-negative.
    t_a = s_txt + text_offset * contrast + 0.15 * unit(8)
    t_b = s_txt - text_offset * contrast + 0.15 * unit(9)

    # Confusable co-negatives: same contrast offset as the class they
    # resemble (so the negatives' internal spread carries no contrast
    # variance), displaced along a dedicated spread axis.
    near_b = s_txt - text_offset * contrast + fine_spread * unit(5) + 0.2 * unit(9)
    near_a = s_txt + text_offset * contrast + fine_spread * unit(5) + 0.2 * unit(8)
    # Decoys tilt away from the image hub, so exemplar-similarity pruning
    # drops them.
    decoy_1 = s_txt + 0.9 * unit(10) - 0.25 * unit(1)
    decoy_2 = s_txt + 0.9 * unit(11) - 0.25 * unit(1)

    # Two group members lean slightly toward one class each, keeping a
    # trace of the contrast axis inside the fine subspace.
    wiggles = [0.08 * unit(6) + 0.12 * contrast,
               -0.06 * unit(6) + 0.05 * unit(7) - 0.12 * contrast,
               -0.05 * unit(7), 0.04 * unit(6) - 0.04 * unit(7),
               -0.03 * unit(6) + 0.06 * unit(7)]
    coarse = [s_txt + coarse_offset * unit(4) + w for w in wiggles]

    distractors = [
        s_txt + 0.4 * rng.normal(size=dim) * _mask(dim, range(12, dim)) / np.sqrt(dim - 12)
        for _ in range(6)
    ]

    vocab_entries = (
        [Embedding("target_a", t_a), Embedding("target_b", t_b),
         Embedding("near_b", near_b), Embedding("near_a", near_a),
         Embedding("decoy_1", decoy_1), Embedding("decoy_2", decoy_2)]
        + [Embedding(f"group_{j}", c) for j, c in enumerate(coarse, start=1)]
        + [Embedding(f"word_{j}", v) for j, v in enumerate(distractors, start=1)]
    )
    vocab = EmbeddingSet(vocab_entries)

    def image(tag: str, class_dir: np.ndarray | None = None, delta: float = 0.0):
        noise = 0.05 * rng.normal(size=dim) * _mask(dim, range(12, dim)) / np.sqrt(dim - 12)
        vec = s_img + noise
        if class_dir is not None:
            vec = vec + delta * class_dir
        return Embedding(tag, vec)

    exemplars_a = EmbeddingSet([image(f"ex_a_{i}") for i in range(4)])
    exemplars_b = EmbeddingSet([image(f"ex_b_{i}") for i in range(4)])

    held = []
    held_labels = []
    for cls, class_dir in (("target_a", d_a), ("target_b", d_b)):
        for i in range(n_heldout):
            held.append(image(f"held_{cls}_{i}", class_dir, heldout_delta))
            held_labels.append(cls)
    heldout = LabeledImageSet(EmbeddingSet(held), held_labels)

    coarse_names = [f"group_{j}" for j in range(1, len(coarse) + 1)]
    spec_a = CandidateSpec("target_a", coarse_names, ["target_b", "near_b", "decoy_1"])
    spec_b = CandidateSpec("target_b", coarse_names, ["target_a", "near_a", "decoy_2"])

    base_texts = EmbeddingSet([Embedding("target_a", t_a), Embedding("target_b", t_b)])
    return CollapseFixture(
        dim=dim, class_a="target_a", class_b="target_b", vocab=vocab,
        base_texts=base_texts, exemplars_a=exemplars_a, exemplars_b=exemplars_b,
        spec_a=spec_a, spec_b=spec_b, heldout=heldout, keep_k=2, k=2,
    )


def _mask(dim: int, axes) -> np.ndarray:
    m = np.zeros(dim)
    for a in axes:
        m[a] = 1.0
    return m


@dataclass(frozen=True)
class SequentialFixture:
    """Well-separated classes for the class-incremental protocol."""

    classes: tuple            # (exemplars, z0, spec) per class, in order
    text_lookup: EmbeddingSet
    images_per_task: tuple    # LabeledImageSet per class, same order
    keep_k: int
    k: int = 2


def sequential_fixture(n_classes: int = 5, dim: int = 24, seed: int = 11,
                       n_exemplars: int = 4, n_eval: int = 4) -> SequentialFixture:
    """Each class owns an orthogonal image direction; texts mirror it.

    Every class's fine candidates are the other classes' texts plus a
    decoy, and all classes share one coarse neighborhood. Texts lean
    toward the shared group axis, toward the next class in a
    confusability ring, and along private descriptor directions, so in
    every class's neighborhood both subspaces see every participant.
    Fits here use k=2 (the two dominant directions are class-contrast
    mixes of the negatives).
    """
    rng = np.random.default_rng(seed)
    # axis map: 0 text hub, 1 image hub, [2, 2+n) class dirs, then the
    # group axis, 2 group wiggles, n private text dirs, rest image noise
    s_txt = np.zeros(dim)
    s_txt[0] = 1.0
    s_img = np.zeros(dim)
    s_img[1] = 1.0
    group_ax = 2 + n_classes
    wiggle_ax = group_ax + 1
    private_ax = wiggle_ax + 2
    noise_lo = private_ax + n_classes
    if noise_lo + 2 > dim:
        raise ValueError(f"dim {dim} too small for {n_classes} classes")

    class_dirs = [np.zeros(dim) for _ in range(n_classes)]
    for i in range(n_classes):
        class_dirs[i][2 + i] = 1.0

    def unit(axis):
        v = np.zeros(dim)
        v[axis] = 1.0
        return v

    names = [f"cls_{i}" for i in range(n_classes)]
    texts = [
        Embedding(names[i],
                  s_txt + 0.6 * class_dirs[i] + 0.15 * unit(group_ax)
                  + 0.05 * class_dirs[(i + 1) % n_classes]
                  + 0.1 * unit(private_ax + i)
                  + 0.05 * unit(private_ax + (i + 1) % n_classes))
        for i in range(n_classes)
    ]
    coarse = [Embedding(f"group_{j}",
                        s_txt + 0.5 * unit(group_ax) + 0.1 * unit(wiggle_ax + j))
              for j in range(2)]
    decoy = Embedding("decoy", s_txt + 0.9 * unit(dim - 1) - 0.3 * unit(1))
    lookup = EmbeddingSet(texts + coarse + [decoy])

    def image(tag, i):
        noise = 0.05 * rng.normal(size=dim) * _mask(dim, range(noise_lo, dim))
        return Embedding(tag, s_img + 0.8 * class_dirs[i] + noise)

    classes = []
    images_per_task = []
    for i in range(n_classes):
        ex = EmbeddingSet([image(f"ex_{i}_{j}", i) for j in range(n_exemplars)])
        fine_cands = [names[j] for j in range(n_classes) if j != i] + ["decoy"]
        spec = CandidateSpec(names[i], ["group_0", "group_1"], fine_cands)
        classes.append((ex, texts[i], spec))
        evals = EmbeddingSet([image(f"eval_{i}_{j}", i) for j in range(n_eval)])
        images_per_task.append(LabeledImageSet(evals, [names[i]] * n_eval))

    return SequentialFixture(tuple(classes), lookup, tuple(images_per_task),
                             keep_k=min(3, n_classes - 1))
