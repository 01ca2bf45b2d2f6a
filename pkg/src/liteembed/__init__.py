"""Few-shot adaptation of class text embeddings by subspace-guided
optimization, with the evaluation harness to verify its behavior.

LITEEMBED_THREADS caps BLAS threading (results are identical at any
setting); it must be handled before numpy's first import, hence at the
top of this module.
"""

import os as _os

_threads = _os.environ.get("LITEEMBED_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                 "NUMEXPR_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Embedding,
    EmbeddingSet,
    cosine_sim,
    l2_normalize,
    mean_embedding,
    pairwise_sims,
)
from .subspace import (  # noqa: E402
    PcRatioReport,
    SubspaceBasis,
    fit_pca,
    pc_ratio_report,
    project,
    split,
    suggest_k,
)
from .neighborhood import (  # noqa: E402
    CandidateSpec,
    NeighborhoodSpec,
    build_neighborhood,
    filter_fine_negatives,
)
from .objective import (  # noqa: E402
    LossBreakdown,
    LossWeights,
    gradcheck,
    loss_coarse,
    loss_fine,
    loss_img_align,
    total_loss,
)
from .encoder import (  # noqa: E402
    IdentityEncoder,
    LearnableToken,
    PromptTemplate,
    ToyTextEncoder,
    default_template,
    make_encoder,
)
from .optimizer import (  # noqa: E402
    AdamState,
    ClassRegistry,
    FitConfig,
    FitReport,
    adam_step,
    fit_class,
    fit_sequential,
    lr_at,
)
from .evaluate import (  # noqa: E402
    EvalResult,
    LabeledImageSet,
    classify,
    classify_cumulative,
    max_vocab_sim,
    mean_image_baseline,
    nearest_neighbors,
    precision_at_k,
    project_2d,
)
from .io import read_emb1, write_emb1  # noqa: E402

__all__ = [
    "Embedding", "EmbeddingSet", "cosine_sim", "l2_normalize",
    "mean_embedding", "pairwise_sims",
    "SubspaceBasis", "PcRatioReport", "fit_pca", "split", "project",
    "pc_ratio_report", "suggest_k",
    "CandidateSpec", "NeighborhoodSpec", "build_neighborhood",
    "filter_fine_negatives",
    "LossWeights", "LossBreakdown", "loss_img_align", "loss_coarse",
    "loss_fine", "total_loss", "gradcheck",
    "IdentityEncoder", "ToyTextEncoder", "PromptTemplate", "LearnableToken",
    "default_template", "make_encoder",
    "FitConfig", "AdamState", "FitReport", "ClassRegistry", "lr_at",
    "adam_step", "fit_class", "fit_sequential",
    "LabeledImageSet", "EvalResult", "classify", "classify_cumulative",
    "precision_at_k", "mean_image_baseline", "nearest_neighbors",
    "max_vocab_sim", "project_2d",
    "read_emb1", "write_emb1",
]
