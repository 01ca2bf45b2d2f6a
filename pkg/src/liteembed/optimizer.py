"""Subspace-guided optimization of one class embedding, plus the
sequential (class-incremental) protocol.

The neighborhood is resolved and its PCA basis fitted once per class,
before any update step; the basis stays frozen for the whole run. The
variable being optimized is the encoder token (identity mode: the output
embedding itself), stepped by bias-corrected Adam under a linear warm-up
schedule.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .core import Embedding, EmbeddingSet, l2_normalize
from .encoder import PromptTemplate, default_template, make_encoder
from .errors import (
    DuplicateClass,
    NonFiniteGradient,
    OutOfRange,
    SplitInfeasible,
)
from .neighborhood import CandidateSpec, NeighborhoodSpec, build_neighborhood
from .objective import LossBreakdown, LossWeights, total_loss
from .subspace import SubspaceBasis, fit_pca


@dataclass(frozen=True)
class FitConfig:
    """Hyperparameters of one optimization run."""

    eta: float = 1e-4
    warmup_steps: int = 1000
    total_steps: int = 5000
    weights: LossWeights = field(default_factory=LossWeights)
    k: int = 1
    keep_k: int = 5
    seed: int = 0
    mode: str = "identity"
    renormalize_each_step: bool = False
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    log_interval: int = 50

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if not 0 < self.warmup_steps <= self.total_steps:
            raise ValueError(
                f"need 0 < warmup_steps <= total_steps, got "
                f"{self.warmup_steps}/{self.total_steps}"
            )

    def digest(self) -> str:
        blob = json.dumps(
            {
                "eta": self.eta, "warmup_steps": self.warmup_steps,
                "total_steps": self.total_steps,
                "lambda1": self.weights.lambda1, "lambda2": self.weights.lambda2,
                "k": self.k, "keep_k": self.keep_k, "seed": self.seed,
                "mode": self.mode,
                "renormalize_each_step": self.renormalize_each_step,
                "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps,
                "log_interval": self.log_interval,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, dim: int) -> "AdamState":
        return cls(np.zeros(dim), np.zeros(dim), 0)


def lr_at(config: FitConfig, t: int) -> float:
    """Linear warm-up to eta over warmup_steps, then constant."""
    if not 0 <= t < config.total_steps:
        raise OutOfRange(f"step {t} outside [0, {config.total_steps})")
    return config.eta * min(1.0, (t + 1) / config.warmup_steps)


def adam_step(state: AdamState, grad, lr: float, config: FitConfig):
    """One bias-corrected Adam update; returns (new state, update vector)."""
    g = np.asarray(grad, dtype=np.float64)
    if not np.all(np.isfinite(g)):
        raise NonFiniteGradient("gradient contains NaN/Inf")
    t = state.t + 1
    m = config.beta1 * state.m + (1.0 - config.beta1) * g
    v = config.beta2 * state.v + (1.0 - config.beta2) * g * g
    m_hat = m / (1.0 - config.beta1 ** t)
    v_hat = v / (1.0 - config.beta2 ** t)
    update = -lr * m_hat / (np.sqrt(v_hat) + config.eps)
    return AdamState(m, v, t), update


@dataclass(frozen=True)
class FitReport:
    """Everything one run produced: trajectory, final embedding, config echo."""

    class_name: str
    config: FitConfig
    initial: Embedding
    final: Embedding
    trajectory: tuple
    steps: int
    basis: SubspaceBasis
    neighborhood: NeighborhoodSpec
    final_token: np.ndarray | None = None


class ClassRegistry:
    """Insertion-ordered store of optimized class embeddings.

    Entries are immutable once added; re-registering a name raises.
    """

    def __init__(self):
        self._embeddings: dict[str, Embedding] = {}
        self._provenance: dict[str, str] = {}

    def add(self, embedding: Embedding, provenance: str):
        if embedding.name in self._embeddings:
            raise DuplicateClass(f"class {embedding.name!r} already registered")
        self._embeddings[embedding.name] = embedding
        self._provenance[embedding.name] = provenance

    @property
    def names(self) -> tuple:
        return tuple(self._embeddings)

    def provenance(self, name: str) -> str:
        return self._provenance[name]

    def __len__(self) -> int:
        return len(self._embeddings)

    def __getitem__(self, name: str) -> Embedding:
        return self._embeddings[name]

    def embedding_set(self, first: int | None = None) -> EmbeddingSet:
        names = self.names[: first if first is not None else len(self)]
        return EmbeddingSet([self._embeddings[n] for n in names])


def fit_class(exemplars: EmbeddingSet, z0: Embedding, spec: CandidateSpec,
              text_lookup: EmbeddingSet, config: FitConfig,
              encoder=None, template: PromptTemplate | None = None) -> FitReport:
    """Optimize one class embedding against its resolved neighborhood.

    Pipeline: resolve neighborhood, fit PCA on the coarse/fine union,
    split at config.k, then run total_steps of Adam on the encoder token.
    The basis and neighborhood are constants during the run.
    """
    neighborhood = build_neighborhood(spec, text_lookup, exemplars, config.keep_k)
    basis = fit_pca(neighborhood.union, center=True)
    if basis.rank < 2:
        raise SplitInfeasible(
            f"basis rank {basis.rank} < 2; enlarge the candidate sets"
        )
    basis = basis.with_k(config.k)

    if encoder is None:
        encoder = make_encoder(config.mode, dim=exemplars.dim, seed=config.seed)
    if template is None:
        template = default_template()

    if encoder.mode == "identity":
        var = z0.vector.copy()
    else:
        var = encoder.init_token()
    z_init = encoder.encode(template, var)
    initial = Embedding(z0.name, z_init)

    state = AdamState.zeros(var.shape[0])
    trajectory: list[LossBreakdown] = []
    for t in range(config.total_steps):
        z = encoder.encode(template, var)
        breakdown, g_z = total_loss(z, exemplars, neighborhood, basis, config.weights)
        if t % config.log_interval == 0:
            trajectory.append(breakdown)
        g_var = encoder.encode_vjp(template, var, g_z)
        state, update = adam_step(state, g_var, lr_at(config, t), config)
        var = var + update
        if config.renormalize_each_step:
            var = l2_normalize(var)

    z_final = encoder.encode(template, var)
    final_breakdown, _ = total_loss(z_final, exemplars, neighborhood, basis,
                                    config.weights)
    trajectory.append(final_breakdown)

    return FitReport(
        class_name=spec.class_name,
        config=config,
        initial=initial,
        final=Embedding(spec.class_name, z_final),
        trajectory=tuple(trajectory),
        steps=config.total_steps,
        basis=basis,
        neighborhood=neighborhood,
        final_token=var.copy() if encoder.mode != "identity" else None,
    )


def fit_sequential(classes, text_lookup: EmbeddingSet, config: FitConfig,
                   reports: list | None = None) -> ClassRegistry:
    """Fit each (exemplars, z0, spec) independently, in order.

    Classes never see each other: an earlier entry is bitwise identical
    whether or not later classes exist. Pass a list as `reports` to
    collect the per-class FitReports.
    """
    names = [spec.class_name for _, _, spec in classes]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise DuplicateClass(f"duplicate class names: {', '.join(dupes)}")
    registry = ClassRegistry()
    for exemplars, z0, spec in classes:
        report = fit_class(exemplars, z0, spec, text_lookup, config)
        registry.add(report.final, provenance=config.digest())
        if reports is not None:
            reports.append(report)
    return registry
