"""Frozen text-encoder stand-ins mapping a learnable token to an embedding.

Identity mode returns the token unchanged, so optimization happens
directly in output space. Toy mode runs a small frozen network (one
single-head attention block and one tanh feed-forward block, both with
residuals, then a linear readout at the last position) so the gradient
path from output back to the single learnable token slot is nontrivial.
Both modes expose the vector-Jacobian product needed by the optimizer.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidTemplate

PLACEHOLDER_ID = -1


@dataclass(frozen=True)
class PromptTemplate:
    """Token ids with exactly one placeholder slot (id -1)."""

    token_ids: tuple
    l_ctx: int = 8

    def __post_init__(self):
        object.__setattr__(self, "token_ids", tuple(int(t) for t in self.token_ids))
        slots = [i for i, t in enumerate(self.token_ids) if t == PLACEHOLDER_ID]
        if len(slots) != 1:
            raise InvalidTemplate(f"need exactly one placeholder, found {len(slots)}")
        if len(self.token_ids) > self.l_ctx:
            raise InvalidTemplate(
                f"template length {len(self.token_ids)} exceeds context {self.l_ctx}"
            )
        object.__setattr__(self, "slot", slots[0])


def default_template(l_ctx: int = 8) -> PromptTemplate:
    """Three fixed context tokens followed by the placeholder."""
    return PromptTemplate((0, 1, 2, PLACEHOLDER_ID), l_ctx=l_ctx)


@dataclass(frozen=True)
class LearnableToken:
    """The only trainable parameter: the placeholder token's embedding."""

    class_name: str
    vector: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.vector, dtype=np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "vector", arr)


class IdentityEncoder:
    """z = token: the losses see the token directly (requires d_tok == d)."""

    mode = "identity"

    def __init__(self, dim: int | None = None):
        self.dim = dim

    def _check(self, token: np.ndarray):
        if self.dim is not None and token.shape[0] != self.dim:
            raise DimensionMismatch(f"token dim {token.shape[0]} != {self.dim}")

    def encode(self, template, token) -> np.ndarray:
        token = np.asarray(token, dtype=np.float64)
        self._check(token)
        return token.copy()

    def encode_vjp(self, template, token, upstream) -> np.ndarray:
        token = np.asarray(token, dtype=np.float64)
        self._check(token)
        return np.asarray(upstream, dtype=np.float64).copy()

    def checksum(self) -> str:
        return "identity"


@dataclass(frozen=True)
class ToyTextEncoder:
    """Small frozen network: attention + feed-forward blocks, linear readout.

    Weight shapes: vocab (V, d_tok), pos (L_ctx, d_tok), wq/wk/wv/wo
    (d_tok, d_tok), w1 (d_tok, 4*d_tok), w2 (4*d_tok, d_tok),
    w_out (d_tok, d). All weights stay constant for the life of the object.
    """

    mode = "toy"

    vocab: np.ndarray
    pos: np.ndarray
    wq: np.ndarray
    wk: np.ndarray
    wv: np.ndarray
    wo: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    w_out: np.ndarray

    def __post_init__(self):
        for name in ("vocab", "pos", "wq", "wk", "wv", "wo", "w1", "w2", "w_out"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def init_frozen(cls, seed: int, d_tok: int = 16, d: int = 16,
                    vocab_size: int = 32, l_ctx: int = 8) -> "ToyTextEncoder":
        """Deterministic init: one PCG64 stream, fixed draw order, scale 1/sqrt(d_tok)."""
        rng = np.random.default_rng(seed)
        s = 1.0 / np.sqrt(d_tok)

        def draw(*shape):
            return rng.uniform(-s, s, size=shape)

        return cls(
            vocab=draw(vocab_size, d_tok),
            pos=draw(l_ctx, d_tok),
            wq=draw(d_tok, d_tok),
            wk=draw(d_tok, d_tok),
            wv=draw(d_tok, d_tok),
            wo=draw(d_tok, d_tok),
            w1=draw(d_tok, 4 * d_tok),
            w2=draw(4 * d_tok, d_tok),
            w_out=draw(d_tok, d),
        )

    @property
    def d_tok(self) -> int:
        return self.vocab.shape[1]

    @property
    def d(self) -> int:
        return self.w_out.shape[1]

    @property
    def l_ctx(self) -> int:
        return self.pos.shape[0]

    def checksum(self) -> str:
        h = hashlib.sha256()
        for name in ("vocab", "pos", "wq", "wk", "wv", "wo", "w1", "w2", "w_out"):
            h.update(np.ascontiguousarray(getattr(self, name)).tobytes())
        return h.hexdigest()

    def init_token(self, token_id: int | None = None) -> np.ndarray:
        """Starting token: a vocab row, or the vocab-table mean by default."""
        if token_id is None:
            return self.vocab.mean(axis=0)
        return self.vocab[token_id].copy()

    def _validate(self, template: PromptTemplate, token: np.ndarray):
        if len(template.token_ids) > self.l_ctx:
            raise InvalidTemplate(
                f"template length {len(template.token_ids)} exceeds context {self.l_ctx}"
            )
        for t in template.token_ids:
            if t != PLACEHOLDER_ID and not 0 <= t < self.vocab.shape[0]:
                raise InvalidTemplate(f"token id {t} outside vocab")
        if token.shape[0] != self.d_tok:
            raise DimensionMismatch(f"token dim {token.shape[0]} != d_tok {self.d_tok}")

    def _forward(self, template: PromptTemplate, token: np.ndarray):
        ids = template.token_ids
        length = len(ids)
        x = np.empty((length, self.d_tok))
        for i, t in enumerate(ids):
            x[i] = (token if t == PLACEHOLDER_ID else self.vocab[t]) + self.pos[i]
        q, k, v = x @ self.wq, x @ self.wk, x @ self.wv
        scores = (q @ k.T) / np.sqrt(self.d_tok)
        scores -= scores.max(axis=1, keepdims=True)
        expd = np.exp(scores)
        attn = expd / expd.sum(axis=1, keepdims=True)
        x1 = x + (attn @ v) @ self.wo
        hidden = np.tanh(x1 @ self.w1)
        x2 = x1 + hidden @ self.w2
        out = x2[-1] @ self.w_out
        return out, (x, q, k, v, attn, x1, hidden)

    def encode(self, template: PromptTemplate, token) -> np.ndarray:
        token = np.asarray(token, dtype=np.float64)
        self._validate(template, token)
        out, _ = self._forward(template, token)
        return out

    def encode_vjp(self, template: PromptTemplate, token, upstream) -> np.ndarray:
        """(dz/dtoken)^T @ upstream via a hand-written reverse pass.

        Frozen weights receive no gradient; only the placeholder row of the
        input activations is read out at the end.
        """
        token = np.asarray(token, dtype=np.float64)
        upstream = np.asarray(upstream, dtype=np.float64)
        self._validate(template, token)
        if upstream.shape[0] != self.d:
            raise DimensionMismatch(f"upstream dim {upstream.shape[0]} != {self.d}")
        _, (x, q, k, v, attn, x1, hidden) = self._forward(template, token)

        g_x2 = np.zeros_like(x1)
        g_x2[-1] = self.w_out @ upstream

        g_hidden_pre = (g_x2 @ self.w2.T) * (1.0 - hidden ** 2)
        g_x1 = g_x2 + g_hidden_pre @ self.w1.T

        g_av = g_x1 @ self.wo.T
        g_attn = g_av @ v.T
        g_v = attn.T @ g_av
        g_scores = attn * (g_attn - (g_attn * attn).sum(axis=1, keepdims=True))
        g_scores /= np.sqrt(self.d_tok)
        g_q = g_scores @ k
        g_k = g_scores.T @ q

        g_x = g_x1 + g_q @ self.wq.T + g_k @ self.wk.T + g_v @ self.wv.T
        return g_x[template.slot]


def make_encoder(mode: str, dim: int, seed: int = 0, d_tok: int = 16,
                 vocab_size: int = 32, l_ctx: int = 8):
    """Build the encoder named by mode; toy output dim is forced to dim."""
    if mode == "identity":
        return IdentityEncoder(dim)
    if mode == "toy":
        return ToyTextEncoder.init_frozen(seed, d_tok=d_tok, d=dim,
                                          vocab_size=vocab_size, l_ctx=l_ctx)
    raise ValueError(f"unknown encoder mode {mode!r}")
