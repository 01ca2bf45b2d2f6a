"""Canonical file formats: the EMB1 binary embedding container, labels
CSV, run-config JSON, and JSON/CSV result exports.

EMB1 byte layout (all integers little-endian):

    magic "EMB1" | u32 version=1 | u32 dim | u32 count
    count x [u32 name_len | name bytes (UTF-8)]
    count*dim float32 values, row-major, rows in record order

Values are stored in binary32; reading promotes to float64 exactly, so a
read-write-read cycle is byte identical.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .core import Embedding, EmbeddingSet
from .errors import (
    BadMagic,
    BadVersion,
    ConfigError,
    DuplicateName,
    FormatError,
    NonUtf8Name,
    Truncated,
)
from .objective import LossWeights
from .optimizer import FitConfig, FitReport

MAGIC = b"EMB1"
VERSION = 1
ENC_MAGIC = b"ENC1"


def write_emb1(emb_set: EmbeddingSet, path):
    """Serialize a set; float64 vectors are rounded to binary32."""
    path = Path(path)
    chunks = [MAGIC, struct.pack("<III", VERSION, emb_set.dim, len(emb_set))]
    for e in emb_set:
        name = e.name.encode("utf-8")
        chunks.append(struct.pack("<I", len(name)))
        chunks.append(name)
    matrix = emb_set.matrix().astype("<f4")
    chunks.append(matrix.tobytes(order="C"))
    path.write_bytes(b"".join(chunks))


def read_emb1(path) -> EmbeddingSet:
    data = Path(path).read_bytes()
    view = memoryview(data)
    pos = 0

    def take(n: int, what: str) -> bytes:
        nonlocal pos
        if pos + n > len(data):
            raise Truncated(f"{path}: ran out of bytes reading {what}")
        out = view[pos: pos + n].tobytes()
        pos += n
        return out

    if take(4, "magic") != MAGIC:
        raise BadMagic(f"{path}: not an EMB1 file")
    version, dim, count = struct.unpack("<III", take(12, "header"))
    if version != VERSION:
        raise BadVersion(f"{path}: version {version}, expected {VERSION}")

    names = []
    for i in range(count):
        (name_len,) = struct.unpack("<I", take(4, f"name length {i}"))
        raw = take(name_len, f"name {i}")
        try:
            name = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise NonUtf8Name(f"{path}: record {i} name is not UTF-8") from exc
        if name in names:
            raise DuplicateName(f"{path}: duplicate record name {name!r}")
        names.append(name)

    payload = take(4 * count * dim, "vector payload")
    if pos != len(data):
        raise FormatError(f"{path}: {len(data) - pos} trailing bytes")
    matrix = np.frombuffer(payload, dtype="<f4").reshape(count, dim).astype(np.float64)
    return EmbeddingSet.from_matrix(names, matrix)


def read_record(path_and_name: str) -> Embedding:
    """Resolve a "FILE:NAME" reference to one record of an EMB1 file."""
    if ":" not in path_and_name:
        raise ConfigError(f"expected FILE:NAME, got {path_and_name!r}")
    path, name = path_and_name.rsplit(":", 1)
    emb_set = read_emb1(path)
    if name not in emb_set:
        raise ConfigError(f"{path}: no record named {name!r}")
    return emb_set[name]


# -- ENC1: frozen toy-encoder weights -----------------------------------------

_ENC_FIELDS = ("vocab", "pos", "wq", "wk", "wv", "wo", "w1", "w2", "w_out")


def write_enc1(encoder, path):
    """Serialize frozen encoder weights losslessly (binary64 payload)."""
    chunks = [ENC_MAGIC, struct.pack("<II", VERSION, len(_ENC_FIELDS))]
    for name in _ENC_FIELDS:
        arr = np.ascontiguousarray(getattr(encoder, name), dtype="<f8")
        raw = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack("<II", *arr.shape))
        chunks.append(arr.tobytes(order="C"))
    Path(path).write_bytes(b"".join(chunks))


def read_enc1(path):
    from .encoder import ToyTextEncoder

    data = Path(path).read_bytes()
    pos = 0

    def take(n, what):
        nonlocal pos
        if pos + n > len(data):
            raise Truncated(f"{path}: ran out of bytes reading {what}")
        out = data[pos: pos + n]
        pos += n
        return out

    if take(4, "magic") != ENC_MAGIC:
        raise BadMagic(f"{path}: not an ENC1 file")
    version, n_fields = struct.unpack("<II", take(8, "header"))
    if version != VERSION:
        raise BadVersion(f"{path}: version {version}, expected {VERSION}")
    weights = {}
    for i in range(n_fields):
        (name_len,) = struct.unpack("<I", take(4, f"field name length {i}"))
        name = take(name_len, f"field name {i}").decode("utf-8")
        rows, cols = struct.unpack("<II", take(8, f"shape of {name}"))
        raw = take(8 * rows * cols, f"payload of {name}")
        weights[name] = np.frombuffer(raw, dtype="<f8").reshape(rows, cols).copy()
    missing = set(_ENC_FIELDS) - set(weights)
    if missing:
        raise FormatError(f"{path}: missing weights {sorted(missing)}")
    return ToyTextEncoder(**weights)


# -- labels CSV ---------------------------------------------------------------

def write_labels_csv(pairs, path):
    """Rows of (name, label) under a `name,label` header; commas rejected."""
    lines = ["name,label"]
    for name, label in pairs:
        if "," in name or "," in label:
            raise ConfigError(f"comma not allowed in name/label: {name!r}/{label!r}")
        lines.append(f"{name},{label}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_labels_csv(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "name,label":
        raise ConfigError(f"{path}: first line must be 'name,label'")
    labels = {}
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 2:
            raise ConfigError(f"{path}:{i}: expected exactly one comma")
        name, label = parts
        if name in labels:
            raise ConfigError(f"{path}:{i}: duplicate name {name!r}")
        labels[name] = label
    return labels


# -- run configuration --------------------------------------------------------

RUN_CONFIG_REQUIRED = {
    "class_name", "exemplars_file", "base_text_file", "vocab_file",
    "candidates", "output_file",
}
RUN_CONFIG_OPTIONAL = {
    "keep_k": 5, "k": 1, "lambda1": 1.0, "lambda2": 1.0, "eta": 1e-4,
    "warmup_steps": 1000, "total_steps": 5000, "seed": 0, "mode": "identity",
}


class RunConfig:
    """One fit job: file references, candidate lists, and hyperparameters.

    File paths are resolved relative to the directory of the config file
    they were loaded from.
    """

    def __init__(self, doc: dict, base_dir: Path):
        unknown = set(doc) - RUN_CONFIG_REQUIRED - set(RUN_CONFIG_OPTIONAL)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        missing = RUN_CONFIG_REQUIRED - set(doc)
        if missing:
            raise ConfigError(f"missing config keys: {', '.join(sorted(missing))}")
        cands = doc["candidates"]
        if (not isinstance(cands, dict) or set(cands) != {"coarse", "fine"}
                or not all(isinstance(v, list) for v in cands.values())):
            raise ConfigError("candidates must be {'coarse': [...], 'fine': [...]}")

        self.class_name = doc["class_name"]
        self.exemplars_file = base_dir / doc["exemplars_file"]
        self.base_text_file = base_dir / doc["base_text_file"]
        self.vocab_file = base_dir / doc["vocab_file"]
        self.output_file = base_dir / doc["output_file"]
        self.coarse = list(cands["coarse"])
        self.fine = list(cands["fine"])
        for key, default in RUN_CONFIG_OPTIONAL.items():
            setattr(self, key, doc.get(key, default))
        if self.mode not in ("identity", "toy"):
            raise ConfigError(f"mode must be 'identity' or 'toy', got {self.mode!r}")
        for attr in ("exemplars_file", "base_text_file", "vocab_file"):
            p = getattr(self, attr)
            if not p.exists():
                raise ConfigError(f"{attr}: no such file: {p}")

    def fit_config(self) -> FitConfig:
        try:
            return FitConfig(
                eta=self.eta, warmup_steps=self.warmup_steps,
                total_steps=self.total_steps,
                weights=LossWeights(self.lambda1, self.lambda2),
                k=self.k, keep_k=self.keep_k, seed=self.seed, mode=self.mode,
            )
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid hyperparameters: {exc}") from exc


def load_run_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such config file: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return RunConfig(doc, path.parent)


def load_run_config_list(path) -> list:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such config file: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, list) or not doc:
        raise ConfigError(f"{path}: sequential config must be a nonempty JSON array")
    return [RunConfig(entry, path.parent) for entry in doc]


# -- JSON exports -------------------------------------------------------------

def basis_to_json(basis) -> dict:
    return {
        "dim": basis.dim,
        "k": basis.k,
        "center": basis.center.tolist(),
        "eigenvalues": basis.eigenvalues.tolist(),
        "components": basis.components.tolist(),
    }


def report_to_json(report: FitReport) -> dict:
    cfg = report.config
    return {
        "class_name": report.class_name,
        "config": {
            "eta": cfg.eta, "warmup_steps": cfg.warmup_steps,
            "total_steps": cfg.total_steps,
            "lambda1": cfg.weights.lambda1, "lambda2": cfg.weights.lambda2,
            "k": cfg.k, "keep_k": cfg.keep_k, "seed": cfg.seed,
            "mode": cfg.mode, "log_interval": cfg.log_interval,
        },
        "steps": report.steps,
        "initial_embedding": report.initial.vector.tolist(),
        "final_embedding": report.final.vector.tolist(),
        "coarse_names": list(report.neighborhood.coarse.names),
        "fine_names": list(report.neighborhood.fine.names),
        "trajectory": [
            {"img_align": b.img_align, "coarse": b.coarse,
             "fine": b.fine, "total": b.total}
            for b in report.trajectory
        ],
    }


def eval_result_to_csv(result) -> str:
    lines = ["class,accuracy_percent"]
    for lab, acc in result.per_class.items():
        lines.append(f"{lab},{acc!r}")
    lines.append(f"__overall__,{result.overall!r}")
    return "\n".join(lines) + "\n"


def eval_result_to_json(result) -> dict:
    return {
        "overall": result.overall,
        "per_class": dict(result.per_class),
        "confusion": [
            {"truth": t, "predicted": p, "count": c}
            for (t, p), c in sorted(result.confusion.items())
        ],
    }


def write_json(doc, path):
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
