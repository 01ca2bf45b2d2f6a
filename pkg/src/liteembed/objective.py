"""Loss terms driving the embedding optimization, with analytic gradients.

Three terms act on one learnable embedding z:

* image alignment: negative mean cosine to the exemplar image embeddings,
* coarse anchoring: 1 - cosine to each coarse neighbor, computed on
  coarse-subspace coordinates,
* fine separation: cosine to each hard negative, computed on
  fine-subspace coordinates (minimizing pushes it toward -1).

Every gradient here is hand-derived; gradcheck verifies them against
central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EmbeddingSet
from .errors import EmptySet, NonFinite, ZeroProjection, ZeroVector
from .neighborhood import NeighborhoodSpec
from .subspace import SubspaceBasis, split

ZERO_PROJ_TOL = 1e-10


@dataclass(frozen=True)
class LossWeights:
    """Weights of the coarse anchoring and fine separation terms."""

    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class LossBreakdown:
    img_align: float
    coarse: float
    fine: float
    total: float


def _cos_and_grad_wrt_second(x: np.ndarray, z: np.ndarray):
    """cos(x, z) and its gradient with respect to z (x held constant)."""
    nx = float(np.linalg.norm(x))
    nz = float(np.linalg.norm(z))
    if nx <= ZERO_PROJ_TOL or nz <= ZERO_PROJ_TOL:
        raise ZeroVector("cosine gradient undefined at (near-)zero vector")
    c = float(np.dot(x, z) / (nx * nz))
    grad = x / (nx * nz) - c * z / (nz * nz)
    return c, grad


def loss_img_align(z, exemplars: EmbeddingSet):
    """Negative mean cosine similarity between z and each exemplar image."""
    z = np.asarray(z, dtype=np.float64)
    if len(exemplars) == 0:
        raise EmptySet("no exemplar images")
    total = 0.0
    grad = np.zeros_like(z)
    for e in exemplars:
        c, g = _cos_and_grad_wrt_second(e.vector, z)
        total += c
        grad += g
    n = len(exemplars)
    return -total / n, -grad / n


def _projected_cos_loss(z, neighbors: EmbeddingSet, part: np.ndarray,
                        center, one_minus: bool):
    """Mean (1 - cos) or cos over subspace coordinates, plus gradient wrt z.

    Coordinates are part @ (v - center); the gradient chains the projected
    cosine derivative back through the projection matrix.
    """
    z = np.asarray(z, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    part = np.atleast_2d(np.asarray(part, dtype=np.float64))
    a = part @ (z - center)
    if float(np.linalg.norm(a)) <= ZERO_PROJ_TOL:
        raise ZeroProjection("z is orthogonal to the subspace")
    total = 0.0
    grad_a = np.zeros_like(a)
    for nb in neighbors:
        b = part @ (nb.vector - center)
        if float(np.linalg.norm(b)) <= ZERO_PROJ_TOL:
            raise ZeroProjection(f"neighbor {nb.name!r} is orthogonal to the subspace")
        c, g = _cos_and_grad_wrt_second(b, a)
        if one_minus:
            total += 1.0 - c
            grad_a -= g
        else:
            total += c
            grad_a += g
    n = len(neighbors)
    return total / n, part.T @ (grad_a / n)


def loss_coarse(z, coarse: EmbeddingSet, components: np.ndarray, center):
    """Mean (1 - cos) between z and coarse neighbors in coarse coordinates."""
    return _projected_cos_loss(z, coarse, components, center, one_minus=True)


def loss_fine(z, fine: EmbeddingSet, components: np.ndarray, center):
    """Mean cos between z and hard negatives in fine coordinates."""
    return _projected_cos_loss(z, fine, components, center, one_minus=False)


def total_loss(z, exemplars: EmbeddingSet, neighborhood: NeighborhoodSpec,
               basis: SubspaceBasis, weights: LossWeights, center=None):
    """Combined objective and its gradient with respect to z.

    center defaults to the PCA center; pass zeros to project raw vectors
    instead. Weighted gradient terms are skipped entirely when their
    weight is zero, so a zero-weight run is bitwise identical to the
    reduced objective.
    """
    z = np.asarray(z, dtype=np.float64)
    if center is None:
        center = basis.center
    coarse_part, fine_part = split(basis)

    v_img, g_img = loss_img_align(z, exemplars)
    v_coarse, g_coarse = loss_coarse(z, neighborhood.coarse, coarse_part, center)
    v_fine, g_fine = loss_fine(z, neighborhood.fine, fine_part, center)

    total = v_img + weights.lambda1 * v_coarse + weights.lambda2 * v_fine
    grad = g_img.copy()
    if weights.lambda1 != 0.0:
        grad += weights.lambda1 * g_coarse
    if weights.lambda2 != 0.0:
        grad += weights.lambda2 * g_fine
    return LossBreakdown(v_img, v_coarse, v_fine, total), grad


def gradcheck(fn, z, h: float = 1e-4) -> float:
    """Max relative error between fn's analytic gradient and central FD.

    fn maps a vector to (value, gradient). The error at coordinate i is
    |g_fd - g_an| / max(1e-8, |g_fd| + |g_an|).
    """
    z = np.asarray(z, dtype=np.float64)
    _, g_an = fn(z)
    g_an = np.asarray(g_an, dtype=np.float64)
    worst = 0.0
    for i in range(z.shape[0]):
        zp, zm = z.copy(), z.copy()
        zp[i] += h
        zm[i] -= h
        fp, _ = fn(zp)
        fm, _ = fn(zm)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NonFinite(f"non-finite evaluation at coordinate {i}")
        g_fd = (fp - fm) / (2.0 * h)
        err = abs(g_fd - g_an[i]) / max(1e-8, abs(g_fd) + abs(g_an[i]))
        worst = max(worst, err)
    if not np.all(np.isfinite(g_an)):
        raise NonFinite("analytic gradient contains non-finite entries")
    return worst
