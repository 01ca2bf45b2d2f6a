"""PCA over an embedding neighborhood, split into coarse/fine subspaces.

The coarse part (top-variance components) carries broad category structure;
the fine part (remaining components) carries the small directions that
separate visually confusable classes. A per-component cross/within distance
ratio quantifies how strongly each component favors coarse separation and
backs the default choice of dropping only the first component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EmbeddingSet
from .errors import (
    DegenerateSet,
    DimensionMismatch,
    InsufficientLabels,
    InvalidSplit,
    TooFewPoints,
)

# Components with eigenvalue below this fraction of the leading eigenvalue
# are noise and would otherwise pollute the fine subspace.
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal PC basis with eigenvalues, fit center, and split index k.

    components[i] is the i-th principal direction (row vector); eigenvalues
    are sample variances (divisor n-1), nonincreasing. k defaults to 1:
    only the leading component is treated as coarse.
    """

    dim: int
    center: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    k: int = 1

    def __post_init__(self):
        for name in ("center", "components", "eigenvalues"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def rank(self) -> int:
        return self.components.shape[0]

    def with_k(self, k: int) -> "SubspaceBasis":
        if not 1 <= k < self.rank:
            raise InvalidSplit(f"k={k} outside [1, {self.rank - 1}]")
        return SubspaceBasis(self.dim, self.center, self.components,
                             self.eigenvalues, k)

    def checksum(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for arr in (self.center, self.components, self.eigenvalues):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(str(self.k).encode())
        return h.hexdigest()


def _orient(components: np.ndarray) -> np.ndarray:
    """Flip each component so its largest-magnitude coordinate is positive."""
    out = components.copy()
    for i, u in enumerate(out):
        j = int(np.argmax(np.abs(u)))
        if u[j] < 0:
            out[i] = -u
    return out


def fit_pca(emb_set: EmbeddingSet, center: bool = True, k: int = 1,
            method: str = "auto") -> SubspaceBasis:
    """Eigendecompose the sample covariance (divisor n-1) of a set.

    method picks the route: "cov" decomposes the d x d covariance, "gram"
    the n x n Gram matrix (identical spectra; cheaper when n < d), "auto"
    chooses by shape. Components are ordered by nonincreasing eigenvalue
    with a deterministic sign convention, and directions with eigenvalue
    below RANK_RTOL times the leading one are dropped.
    """
    n = len(emb_set)
    if n < 2:
        raise TooFewPoints(f"PCA needs at least 2 points, got {n}")
    x = emb_set.matrix()
    d = x.shape[1]
    mu = x.mean(axis=0) if center else np.zeros(d)
    xc = x - mu
    if not np.any(np.abs(xc) > 0):
        raise DegenerateSet("all points identical; no principal direction")

    if method == "auto":
        method = "gram" if n < d else "cov"
    if method == "cov":
        cov = (xc.T @ xc) / (n - 1)
        evals, evecs = np.linalg.eigh(cov)
        order = np.argsort(evals, kind="stable")[::-1]
        evals = evals[order]
        comps = evecs[:, order].T
    elif method == "gram":
        gram = (xc @ xc.T) / (n - 1)
        evals, evecs = np.linalg.eigh(gram)
        order = np.argsort(evals, kind="stable")[::-1]
        evals = evals[order]
        evecs = evecs[:, order]
        comps = np.zeros((len(evals), d))
        for i, lam in enumerate(evals):
            if lam > 0:
                comps[i] = (xc.T @ evecs[:, i]) / math.sqrt(lam * (n - 1))
    else:
        raise ValueError(f"unknown method {method!r}")

    evals = np.clip(evals, 0.0, None)
    keep = evals > RANK_RTOL * evals[0]
    max_rank = min(n - 1, d) if center else min(n, d)
    keep &= np.arange(len(evals)) < max_rank
    comps = _orient(comps[keep])
    return SubspaceBasis(d, mu, comps, evals[keep], k=min(k, max(1, comps.shape[0] - 1)))


def split(basis: SubspaceBasis, k: int | None = None):
    """Return (coarse, fine) component matrices: rows 0..k-1 and k..D-1."""
    if k is None:
        k = basis.k
    if not 1 <= k < basis.rank:
        raise InvalidSplit(f"k={k} outside [1, {basis.rank - 1}]")
    return basis.components[:k], basis.components[k:]


def project(part: np.ndarray, z, center) -> np.ndarray:
    """Coordinates of z in the given components after subtracting center."""
    part = np.atleast_2d(np.asarray(part, dtype=np.float64))
    z = np.asarray(z, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    if z.shape[0] != part.shape[1]:
        raise DimensionMismatch(
            f"vector dim {z.shape[0]} vs component dim {part.shape[1]}"
        )
    return part @ (z - center)


@dataclass(frozen=True)
class PcRatioReport:
    """Cross-category vs within-category mean distance, per component.

    ratios[i] refers to coordinates along components[i]; math.inf marks a
    component whose within-category mean distance is exactly zero.
    """

    ratios: tuple
    labels: tuple


def pc_ratio_report(emb_set: EmbeddingSet, labels, basis: SubspaceBasis) -> PcRatioReport:
    """Per-component ratio of mean cross-category to within-category distance.

    Distances are absolute differences of 1-D coordinates along each
    component, averaged over all cross-category or within-category pairs.
    """
    labels = list(labels)
    if len(labels) != len(emb_set):
        raise InsufficientLabels(
            f"{len(labels)} labels for {len(emb_set)} embeddings"
        )
    counts = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    if len(counts) < 2 or any(c < 2 for c in counts.values()):
        raise InsufficientLabels(
            "need at least 2 categories with at least 2 members each"
        )

    coords = (emb_set.matrix() - basis.center) @ basis.components.T
    lab_arr = np.asarray(labels)
    iu, ju = np.triu_indices(len(emb_set), k=1)
    cross = lab_arr[iu] != lab_arr[ju]
    ratios = []
    for c in range(basis.rank):
        diffs = np.abs(coords[iu, c] - coords[ju, c])
        within_mean = diffs[~cross].mean()
        cross_mean = diffs[cross].mean()
        ratios.append(math.inf if within_mean == 0.0 else float(cross_mean / within_mean))
    return PcRatioReport(tuple(ratios), tuple(labels))


def suggest_k(report: PcRatioReport, threshold: float = 3.0) -> int:
    """Length of the leading run of components with ratio >= threshold.

    Floored at 1 and capped at D-1 so the result is always a usable split.
    """
    if not report.ratios:
        raise InsufficientLabels("empty ratio report")
    count = 0
    for r in report.ratios:
        if r >= threshold:
            count += 1
        else:
            break
    d = len(report.ratios)
    return max(1, min(count, max(1, d - 1)))
