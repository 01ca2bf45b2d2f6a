import dataclasses

import numpy as np
import pytest

from liteembed.encoder import (
    PLACEHOLDER_ID,
    IdentityEncoder,
    PromptTemplate,
    ToyTextEncoder,
    default_template,
    make_encoder,
)
from liteembed.errors import DimensionMismatch, InvalidTemplate
from liteembed.objective import gradcheck


@pytest.fixture
def encoder():
    return ToyTextEncoder.init_frozen(seed=42, d_tok=12, d=10, vocab_size=20, l_ctx=8)


@pytest.fixture
def template():
    return default_template()


class TestPromptTemplate:
    def test_exactly_one_placeholder(self):
        with pytest.raises(InvalidTemplate):
            PromptTemplate((0, 1, 2))
        with pytest.raises(InvalidTemplate):
            PromptTemplate((PLACEHOLDER_ID, 1, PLACEHOLDER_ID))

    def test_length_capped_by_context(self):
        with pytest.raises(InvalidTemplate):
            PromptTemplate(tuple(range(8)) + (PLACEHOLDER_ID,), l_ctx=8)

    def test_slot_position(self):
        assert PromptTemplate((3, PLACEHOLDER_ID, 5)).slot == 1


class TestIdentityEncoder:
    def test_encode_is_identity(self, template):
        enc = IdentityEncoder()
        v = np.array([0.1, -0.5, 2.0])
        assert np.array_equal(enc.encode(template, v), v)

    def test_vjp_is_identity(self, template):
        enc = IdentityEncoder()
        up = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(enc.encode_vjp(template, np.zeros(3), up), up)

    def test_dim_checked(self, template):
        enc = IdentityEncoder(dim=4)
        with pytest.raises(DimensionMismatch):
            enc.encode(template, np.zeros(3))


class TestToyForward:
    def test_bitwise_reproducible(self, template):
        a = ToyTextEncoder.init_frozen(seed=42, d_tok=12, d=10)
        b = ToyTextEncoder.init_frozen(seed=42, d_tok=12, d=10)
        token = np.linspace(-1, 1, 12)
        assert np.array_equal(a.encode(template, token), b.encode(template, token))
        assert a.checksum() == b.checksum()

    def test_seeds_differ(self):
        a = ToyTextEncoder.init_frozen(seed=1, d_tok=8, d=8)
        b = ToyTextEncoder.init_frozen(seed=2, d_tok=8, d=8)
        assert a.checksum() != b.checksum()

    def test_unused_vocab_row_is_inert(self, encoder, template):
        token = np.linspace(-0.5, 0.5, 12)
        out1 = encoder.encode(template, token)
        vocab = encoder.vocab.copy()
        vocab[10] += 5.0  # token 10 not in (0, 1, 2, *)
        modified = dataclasses.replace(encoder, vocab=vocab)
        assert np.array_equal(modified.encode(template, token), out1)

    def test_used_vocab_row_matters(self, encoder, template):
        token = np.linspace(-0.5, 0.5, 12)
        out1 = encoder.encode(template, token)
        vocab = encoder.vocab.copy()
        vocab[0] += 5.0
        modified = dataclasses.replace(encoder, vocab=vocab)
        assert not np.array_equal(modified.encode(template, token), out1)

    def test_output_norm_positive_over_seeds(self):
        template = default_template()
        for seed in range(100):
            enc = ToyTextEncoder.init_frozen(seed=seed, d_tok=8, d=6, vocab_size=10)
            out = enc.encode(template, enc.init_token())
            assert np.all(np.isfinite(out))
            assert np.linalg.norm(out) > 0

    def test_template_validation(self, encoder):
        with pytest.raises(InvalidTemplate):
            encoder.encode(PromptTemplate((99, PLACEHOLDER_ID)), np.zeros(12))
        with pytest.raises(DimensionMismatch):
            encoder.encode(default_template(), np.zeros(5))

    def test_init_token_default_is_vocab_mean(self, encoder):
        assert np.array_equal(encoder.init_token(), encoder.vocab.mean(axis=0))
        assert np.array_equal(encoder.init_token(3), encoder.vocab[3])


class TestToyVjp:
    def test_matches_finite_differences(self, template):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            enc = ToyTextEncoder.init_frozen(seed=seed, d_tok=12, d=10)
            token = rng.normal(size=12)
            upstream = rng.normal(size=10)

            def scalar(v):
                return float(upstream @ enc.encode(template, v)), \
                    enc.encode_vjp(template, v, upstream)

            assert gradcheck(scalar, token) <= 1e-4

    def test_zero_upstream_gives_zero(self, encoder, template):
        out = encoder.encode_vjp(template, np.ones(12), np.zeros(10))
        assert np.array_equal(out, np.zeros(12))

    def test_linearity_in_upstream(self, encoder, template):
        rng = np.random.default_rng(0)
        token = rng.normal(size=12)
        u, w = rng.normal(size=10), rng.normal(size=10)
        a, b = 0.3, -1.7
        lhs = encoder.encode_vjp(template, token, a * u + b * w)
        rhs = a * encoder.encode_vjp(template, token, u) \
            + b * encoder.encode_vjp(template, token, w)
        assert np.max(np.abs(lhs - rhs)) <= 1e-9

    def test_weights_frozen_under_use(self, encoder, template):
        before = encoder.checksum()
        rng = np.random.default_rng(1)
        for _ in range(50):
            token = rng.normal(size=12)
            encoder.encode_vjp(template, token, rng.normal(size=10))
        assert encoder.checksum() == before


def test_make_encoder_dispatch():
    assert make_encoder("identity", dim=4).mode == "identity"
    toy = make_encoder("toy", dim=6, seed=0, d_tok=8)
    assert toy.mode == "toy" and toy.d == 6
    with pytest.raises(ValueError):
        make_encoder("other", dim=4)


def test_learnable_token_is_frozen():
    from liteembed.encoder import LearnableToken

    tok = LearnableToken("husky", [0.1, 0.2])
    with pytest.raises(ValueError):
        tok.vector[0] = 9.0
    assert tok.class_name == "husky"
