# Adding classes one at a time: no earlier class is ever touched.
#
# Each class is fitted against its own neighborhood only, so the registry
# entry for a class is bitwise identical no matter when (or whether) other
# classes arrive. Accuracy can still drop as the candidate set grows; that
# is the price of a harder decision, not forgetting.

import numpy as np

from liteembed import FitConfig, classify_cumulative, fit_sequential
from liteembed.synth import sequential_fixture

fx = sequential_fixture()
cfg = FitConfig(k=fx.k, keep_k=fx.keep_k)

registry = fit_sequential(fx.classes, fx.text_lookup, cfg)
accs = classify_cumulative(registry, fx.images_per_task)
print("cumulative accuracy after each task:")
for t, acc in enumerate(accs, start=1):
    print(f"  {t} classes observed: {acc:.1f}%")

print("\nrefit in a different order and compare bitwise:")
order = [3, 0, 4, 1, 2]
shuffled = fit_sequential([fx.classes[i] for i in order], fx.text_lookup, cfg)
for name in registry.names:
    same = np.array_equal(registry[name].vector, shuffled[name].vector)
    print(f"  {name}: identical = {same}")

print("\nfit only the first class and compare with the 5-class run:")
solo = fit_sequential(fx.classes[:1], fx.text_lookup, cfg)
name = fx.classes[0][2].class_name
print(f"  {name}: identical =",
      np.array_equal(solo[name].vector, registry[name].vector))
