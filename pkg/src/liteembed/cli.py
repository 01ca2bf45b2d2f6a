"""Command-line surface tying the library into reproducible runs.

Exit codes: 0 success, 2 validation error (bad flags, malformed or
missing inputs), 1 runtime error. Results go to --out when given, else
to stdout as JSON or CSV.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import EmbeddingSet
from .encoder import ToyTextEncoder, default_template
from .errors import (
    ConfigError,
    FormatError,
    LiteEmbedError,
    NonFinite,
    NonFiniteGradient,
)
from .evaluate import (
    LabeledImageSet,
    classify,
    mean_image_baseline,
    nearest_neighbors,
    precision_at_k,
    project_2d,
)
from .io import (
    basis_to_json,
    eval_result_to_csv,
    load_run_config,
    load_run_config_list,
    read_emb1,
    read_labels_csv,
    read_record,
    report_to_json,
    write_emb1,
    write_json,
)
from .neighborhood import CandidateSpec, filter_fine_negatives
from .objective import gradcheck, loss_coarse, loss_fine, loss_img_align
from .optimizer import fit_class
from .subspace import fit_pca, pc_ratio_report, split, suggest_k

GRADCHECK_TOL = 1e-5
GRADCHECK_VJP_TOL = 1e-4


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _labeled_images(emb_path: str, labels_path: str) -> LabeledImageSet:
    images = read_emb1(emb_path)
    labels = read_labels_csv(labels_path)
    missing = [n for n in images.names if n not in labels]
    if missing:
        raise ConfigError(f"{labels_path}: no label for image(s) {', '.join(missing)}")
    return LabeledImageSet(images, [labels[n] for n in images.names])


def _cmd_fit(args) -> int:
    cfg = load_run_config(args.config)
    run_one_fit(cfg, report_path=args.report)
    return 0


def run_one_fit(cfg, report_path=None):
    exemplars = read_emb1(cfg.exemplars_file)
    base_text = read_emb1(cfg.base_text_file)
    vocab = read_emb1(cfg.vocab_file)
    if cfg.class_name not in base_text:
        raise ConfigError(
            f"{cfg.base_text_file}: no base embedding named {cfg.class_name!r}"
        )
    spec = CandidateSpec(cfg.class_name, cfg.coarse, cfg.fine)
    report = fit_class(exemplars, base_text[cfg.class_name], spec, vocab,
                       cfg.fit_config())

    out = Path(cfg.output_file)
    if out.exists():
        existing = read_emb1(out)
        merged = EmbeddingSet(list(existing) + [report.final])
    else:
        merged = EmbeddingSet([report.final])
    write_emb1(merged, out)
    if report_path:
        write_json(report_to_json(report), report_path)
    final = report.trajectory[-1]
    print(f"{report.class_name}: total loss {report.trajectory[0].total:.6f} "
          f"-> {final.total:.6f} over {report.steps} steps, wrote {out}")
    return report


def _cmd_fit_seq(args) -> int:
    configs = load_run_config_list(args.config)
    names = [c.class_name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate class_name entries in sequential config")
    for cfg in configs:
        run_one_fit(cfg)
    return 0


def _cmd_pca(args) -> int:
    emb_set = read_emb1(args.input)
    basis = fit_pca(emb_set, center=True)
    doc = basis_to_json(basis)
    if args.labels:
        labels_map = read_labels_csv(args.labels)
        missing = [n for n in emb_set.names if n not in labels_map]
        if missing:
            raise ConfigError(f"{args.labels}: no label for {', '.join(missing)}")
        report = pc_ratio_report(emb_set, [labels_map[n] for n in emb_set.names], basis)
        doc["pc_ratios"] = [None if r == float("inf") else r for r in report.ratios]
        doc["suggested_k"] = suggest_k(report)
        if args.k is None:
            doc["k"] = doc["suggested_k"]
    if args.k is not None:
        if not 1 <= args.k < basis.rank:
            raise ConfigError(f"--k {args.k} outside [1, {basis.rank - 1}]")
        doc["k"] = args.k
    write_json(doc, args.out)
    print(f"fitted basis of rank {basis.rank} on {len(emb_set)} embeddings, "
          f"k={doc['k']}, wrote {args.out}")
    return 0


def _cmd_eval_classify(args) -> int:
    classes = read_emb1(args.classes)
    images = _labeled_images(args.images, args.labels)
    result = classify(images, classes)
    _emit(eval_result_to_csv(result), args.out)
    print(f"top-1 accuracy: {result.overall:.2f}% over {len(images)} images, "
          f"{len(classes)} classes")
    return 0


def _cmd_eval_retrieve(args) -> int:
    query = read_record(args.query)
    gallery = _labeled_images(args.gallery, args.labels)
    prec = precision_at_k(query, gallery, args.k, query.name)
    print(json.dumps({"query": query.name, "k": args.k, "precision": prec}))
    return 0


def _cmd_baseline_mean_image(args) -> int:
    exemplars = _labeled_images(args.exemplars, args.labels)
    baseline = mean_image_baseline(exemplars)
    write_emb1(baseline, args.out)
    print(f"wrote {len(baseline)} class representatives to {args.out}")
    return 0


def _cmd_neighbors(args) -> int:
    query = read_record(args.query)
    vocab = read_emb1(args.vocab)
    if args.n < 1 or args.n > len(vocab):
        raise ConfigError(f"--n {args.n} outside [1, {len(vocab)}]")
    ranked = nearest_neighbors(query, vocab, args.n)
    print(json.dumps([{"name": n, "similarity": s} for n, s in ranked]))
    return 0


def _cmd_filter_negatives(args) -> int:
    candidates = read_emb1(args.candidates)
    exemplars = read_emb1(args.exemplars)
    if args.keep < 1:
        raise ConfigError(f"--keep must be >= 1, got {args.keep}")
    kept = filter_fine_negatives(candidates, exemplars, args.keep)
    print(json.dumps(list(kept.names)))
    return 0


def _cmd_project2d(args) -> int:
    emb_set = read_emb1(args.input)
    coords = project_2d(emb_set)
    lines = ["name,x,y"]
    for name, (x, y) in zip(emb_set.names, coords):
        lines.append(f"{name},{x!r},{y!r}")
    _emit("\n".join(lines) + "\n", args.out)
    print(f"projected {len(emb_set)} embeddings, wrote {args.out or 'stdout'}")
    return 0


def _cmd_gradcheck(args) -> int:
    """Check every analytic gradient against central finite differences."""
    failures = []
    rng = np.random.default_rng(args.seed)
    d = 24
    for trial in range(args.instances):
        exemplars = EmbeddingSet.from_matrix(
            [f"x{i}" for i in range(4)], rng.normal(size=(4, d))
        )
        neighbors_m = rng.normal(size=(6, d))
        pool = EmbeddingSet.from_matrix([f"n{i}" for i in range(6)], neighbors_m)
        basis = fit_pca(pool, center=True)
        coarse_part, fine_part = split(basis.with_k(2))
        coarse_set = pool.subset(pool.names[:3])
        fine_set = pool.subset(pool.names[3:])
        z = rng.normal(size=d)

        checks = {
            "img_align": lambda v: loss_img_align(v, exemplars),
            "coarse": lambda v: loss_coarse(v, coarse_set, coarse_part, basis.center),
            "fine": lambda v: loss_fine(v, fine_set, fine_part, basis.center),
        }
        for name, fn in checks.items():
            err = gradcheck(fn, z)
            if err > GRADCHECK_TOL:
                failures.append(f"{name}[{trial}]: {err:.3e}")

        encoder = ToyTextEncoder.init_frozen(seed=args.seed + trial, d_tok=12, d=10)
        template = default_template()
        token = rng.normal(size=12)
        upstream = rng.normal(size=10)

        def scalar(v):
            return float(upstream @ encoder.encode(template, v)), \
                encoder.encode_vjp(template, v, upstream)

        err = gradcheck(scalar, token)
        if err > GRADCHECK_VJP_TOL:
            failures.append(f"encoder_vjp[{trial}]: {err:.3e}")

    if failures:
        print(f"gradcheck FAILED ({len(failures)} checks):")
        for f in failures[:20]:
            print(f"  {f}")
        return 1
    print(f"gradcheck passed: {args.instances} instances per loss, "
          f"tolerances {GRADCHECK_TOL:g}/{GRADCHECK_VJP_TOL:g} (vjp)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liteembed",
        description="Few-shot class-embedding optimization and evaluation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="optimize one class embedding from a run config")
    p.add_argument("--config", required=True)
    p.add_argument("--report")
    p.set_defaults(fn=_cmd_fit)

    p = sub.add_parser("fit-seq", help="fit a sequence of classes, in order")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=_cmd_fit_seq)

    p = sub.add_parser("pca", help="fit a PCA basis over an embedding file")
    p.add_argument("--input", required=True)
    p.add_argument("--labels")
    p.add_argument("--k", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_pca)

    ev = sub.add_parser("eval", help="evaluation protocols").add_subparsers(
        dest="eval_command", required=True
    )
    p = ev.add_parser("classify", help="zero-shot classification accuracy")
    p.add_argument("--classes", required=True)
    p.add_argument("--images", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_eval_classify)
    p = ev.add_parser("retrieve", help="precision at k for one query")
    p.add_argument("--query", required=True, metavar="EMB1:NAME")
    p.add_argument("--gallery", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=_cmd_eval_retrieve)

    bl = sub.add_parser("baseline", help="reference baselines").add_subparsers(
        dest="baseline_command", required=True
    )
    p = bl.add_parser("mean-image", help="mean image embedding per class")
    p.add_argument("--exemplars", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_baseline_mean_image)

    p = sub.add_parser("neighbors", help="nearest vocabulary entries to a record")
    p.add_argument("--query", required=True, metavar="EMB1:NAME")
    p.add_argument("--vocab", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=_cmd_neighbors)

    p = sub.add_parser("filter-negatives",
                       help="rank candidates by exemplar-image similarity")
    p.add_argument("--candidates", required=True)
    p.add_argument("--exemplars", required=True)
    p.add_argument("--keep", type=int, required=True)
    p.set_defaults(fn=_cmd_filter_negatives)

    p = sub.add_parser("gradcheck", help="verify analytic gradients numerically")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=100)
    p.set_defaults(fn=_cmd_gradcheck)

    p = sub.add_parser("project2d", help="top-2 PCA coordinates as CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_project2d)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (NonFinite, NonFiniteGradient) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (LiteEmbedError, FormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
