# Two classes whose reference images look alike: what goes wrong with
# similarity-only optimization, and what the subspace terms fix.
#
# The fixture has two target classes sharing one exemplar image direction,
# base texts on opposite sides of the text hub, a shared coarse neighborhood,
# and each class listing the other as a hard-negative candidate.

import numpy as np

from liteembed import (
    EmbeddingSet,
    FitConfig,
    LossWeights,
    classify,
    cosine_sim,
    fit_class,
    max_vocab_sim,
    nearest_neighbors,
)
from liteembed.subspace import project, split
from liteembed.synth import collapse_fixture

fx = collapse_fixture()
print("classes:", fx.class_a, "and", fx.class_b)
print("base text mutual cosine:",
      round(cosine_sim(fx.base_texts[fx.class_a].vector,
                       fx.base_texts[fx.class_b].vector), 3))


def fit_both(weights):
    cfg = FitConfig(weights=weights, k=fx.k, keep_k=fx.keep_k)
    return (
        fit_class(fx.exemplars_a, fx.base_texts[fx.class_a], fx.spec_a, fx.vocab, cfg),
        fit_class(fx.exemplars_b, fx.base_texts[fx.class_b], fx.spec_b, fx.vocab, cfg),
    )


print("\n-- image-alignment only (both subspace weights zero) --")
ra, rb = fit_both(LossWeights(0.0, 0.0))
print("mutual cosine of the two optimized embeddings:",
      round(cosine_sim(ra.final.vector, rb.final.vector), 3), "(collapsed)")
name, sim = max_vocab_sim(ra.final, fx.vocab)
print(f"nearest vocabulary entry to optimized {fx.class_a}: "
      f"{name} at {sim:.3f} (drifted off the text manifold)")
acc = classify(fx.heldout, EmbeddingSet([ra.final, rb.final])).overall
print(f"held-out accuracy: {acc:.0f}%")

print("\n-- full objective (coarse anchoring + fine separation) --")
fa, fb = fit_both(LossWeights(1.0, 1.0))
print("mutual cosine:", round(cosine_sim(fa.final.vector, fb.final.vector), 3),
      "(separated)")
name, sim = max_vocab_sim(fa.final, fx.vocab)
print(f"nearest vocabulary entry: {name} at {sim:.3f} (still near its own text)")
print("neighbors:", [n for n, _ in nearest_neighbors(fa.final, fx.vocab, 3)])

u_coarse, _ = split(fa.basis)
a = project(u_coarse, fa.final.vector, fa.basis.center)
sims = []
for nb in fa.neighborhood.coarse:
    b = project(u_coarse, nb.vector, fa.basis.center)
    sims.append(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
print("coarse-subspace similarity to each group neighbor:",
      np.round(sims, 3))
acc = classify(fx.heldout, EmbeddingSet([fa.final, fb.final])).overall
print(f"held-out accuracy: {acc:.0f}%")

print("\nloss trajectory of the full fit (every 10th logged point):")
for i, b in enumerate(fa.trajectory[::10]):
    print(f"  step {i * 10 * fa.config.log_interval:5d}: total {b.total:+.4f} "
          f"(img {b.img_align:+.4f}, coarse {b.coarse:.4f}, fine {b.fine:+.4f})")
