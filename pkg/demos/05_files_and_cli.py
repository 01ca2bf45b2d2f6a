# The file formats and the command-line surface, end to end.
#
# Everything the library computes is reachable from the `liteembed` CLI
# through three file kinds: EMB1 binary embedding sets, JSON configs and
# reports, and name,label CSVs. This script stages a full run in a temp
# directory and drives it through the CLI.

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from liteembed.io import read_emb1, write_emb1, write_labels_csv
from liteembed.synth import collapse_fixture


def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "liteembed.cli", *args],
                          capture_output=True, text=True)
    print(f"$ liteembed {' '.join(args)}")
    for line in (proc.stdout or proc.stderr).strip().splitlines():
        print(f"  {line}")
    return proc.returncode


fx = collapse_fixture()
with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    write_emb1(fx.vocab, tmp / "vocab.emb1")
    write_emb1(fx.exemplars_a, tmp / "exemplars.emb1")
    write_emb1(fx.base_texts, tmp / "base.emb1")
    write_emb1(fx.heldout.images, tmp / "images.emb1")
    write_labels_csv(zip(fx.heldout.images.names, fx.heldout.labels),
                     tmp / "labels.csv")

    config = {
        "class_name": fx.class_a,
        "exemplars_file": "exemplars.emb1",
        "base_text_file": "base.emb1",
        "vocab_file": "vocab.emb1",
        "candidates": {"coarse": list(fx.spec_a.coarse_candidates),
                       "fine": list(fx.spec_a.fine_candidates)},
        "keep_k": fx.keep_k,
        "k": fx.k,
        "output_file": "optimized.emb1",
    }
    (tmp / "run.json").write_text(json.dumps(config, indent=2))

    cli("fit", "--config", str(tmp / "run.json"),
        "--report", str(tmp / "report.json"))
    cli("pca", "--input", str(tmp / "vocab.emb1"),
        "--out", str(tmp / "basis.json"))
    cli("eval", "classify", "--classes", str(tmp / "base.emb1"),
        "--images", str(tmp / "images.emb1"), "--labels", str(tmp / "labels.csv"))
    cli("neighbors", "--query", f"{tmp / 'optimized.emb1'}:{fx.class_a}",
        "--vocab", str(tmp / "vocab.emb1"), "--n", "3")
    cli("gradcheck", "--instances", "10")

    out = read_emb1(tmp / "optimized.emb1")
    print(f"\noptimized EMB1 contains {out.names}, dim {out.dim}")
    report = json.loads((tmp / "report.json").read_text())
    print(f"report: {len(report['trajectory'])} logged loss points, "
          f"final total {report['trajectory'][-1]['total']:.4f}")
