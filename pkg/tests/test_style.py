import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from facestyle import errors
from facestyle.style import (
    FusionParams,
    PrimitiveBank,
    aggregate_primitives,
    bank_from_dict,
    bank_to_dict,
    fuse_style,
    infuse_style,
    params_from_dict,
    params_to_dict,
    primitive_attention,
    style_pipeline,
)


def random_bank(rng, e=8, d_s=16, d_m=16):
    return PrimitiveBank(rng.normal(size=(e, d_m, d_m)), rng.normal(size=(e, d_m)),
                         rng.normal(size=(e, d_s)), rng.normal(size=e))


def test_fuse_zero_params(rng):
    S_r, S_a = rng.normal(size=4), rng.normal(size=4)
    S_g, bias = fuse_style(S_r, S_a, FusionParams.zeros(4))
    assert np.array_equal(S_g, S_r) and not bias.any()


def test_fuse_alpha_zero(rng):
    S_r, S_a = rng.normal(size=3), rng.normal(size=3)
    p = FusionParams(rng.normal(size=(3, 6)), rng.normal(size=3), alpha=0.0)
    assert np.array_equal(fuse_style(S_r, S_a, p)[0], S_r)


def test_fuse_hand_example():
    p = FusionParams([[1.0, 1.0]], [0.0], 0.1)
    S_g, bias = fuse_style([2.0], [3.0], p)
    assert bias.tolist() == [5.0]
    assert S_g.tolist() == [2.5]


def test_fuse_mismatch(rng):
    with pytest.raises(errors.DimensionMismatch):
        fuse_style(np.zeros(3), np.zeros(4), FusionParams.zeros(3))
    with pytest.raises(errors.DimensionMismatch):
        FusionParams(np.zeros((3, 5)), np.zeros(3))


def test_attention_uniform():
    bank = PrimitiveBank(np.zeros((4, 2, 2)), np.zeros((4, 2)), np.zeros((4, 3)), np.zeros(4))
    assert np.array_equal(primitive_attention(np.ones(3), bank), np.full(4, 0.25))


def test_attention_saturates_without_overflow():
    attn_b = np.zeros(5)
    attn_b[0] = 1000.0
    bank = PrimitiveBank(np.zeros((5, 2, 2)), np.zeros((5, 2)), np.zeros((5, 3)), attn_b)
    pi = primitive_attention(np.ones(3), bank)
    assert abs(pi[0] - 1.0) <= 1e-12 and np.all(pi[1:] <= 1e-12)


def test_attention_closed_form():
    bank = PrimitiveBank(np.zeros((2, 1, 1)), np.zeros((2, 1)), np.zeros((2, 1)),
                         [np.log(3.0), 0.0])
    assert np.allclose(primitive_attention([0.0], bank), [0.75, 0.25], atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-300, 300))
def test_attention_simplex_and_shift_invariance(seed, shift):
    rng = np.random.default_rng(seed)
    bank = random_bank(rng, e=6, d_s=5, d_m=2)
    bank = PrimitiveBank(bank.weights, bank.biases, bank.attn_W * 50, bank.attn_b)
    s = rng.normal(size=5)
    pi = primitive_attention(s, bank)
    assert abs(pi.sum() - 1.0) <= 1e-12
    assert np.all((pi >= 0) & (pi <= 1))
    shifted = PrimitiveBank(bank.weights, bank.biases, bank.attn_W, bank.attn_b + shift)
    assert np.allclose(primitive_attention(s, shifted), pi, atol=1e-12, rtol=0)


def test_aggregate_vertices_and_hull(rng):
    bank = random_bank(rng, e=3, d_s=2, d_m=3)
    for i in range(3):
        W, b = aggregate_primitives(np.eye(3)[i], bank)
        assert np.array_equal(W, bank.weights[i]) and np.array_equal(b, bank.biases[i])
    pi = rng.dirichlet(np.ones(3))
    W, _ = aggregate_primitives(pi, bank)
    assert np.all(W >= bank.weights.min(axis=0) - 1e-12)
    assert np.all(W <= bank.weights.max(axis=0) + 1e-12)


def test_aggregate_identical_primitives(rng):
    W0, b0 = rng.normal(size=(2, 2)), rng.normal(size=2)
    bank = PrimitiveBank(np.stack([W0] * 4), np.stack([b0] * 4), np.zeros((4, 1)), np.zeros(4))
    W, b = aggregate_primitives(rng.dirichlet(np.ones(4)), bank)
    assert np.allclose(W, W0, atol=1e-15) and np.allclose(b, b0, atol=1e-15)


def test_aggregate_hand_example():
    bank = PrimitiveBank([np.eye(2), 2 * np.eye(2)], np.zeros((2, 2)), np.zeros((2, 1)), np.zeros(2))
    W, _ = aggregate_primitives([0.5, 0.5], bank)
    assert np.array_equal(W, 1.5 * np.eye(2))
    with pytest.raises(errors.DimensionMismatch):
        aggregate_primitives([1.0], bank)


def test_infuse_examples(rng):
    Z = rng.normal(size=(5, 3))
    assert np.array_equal(infuse_style(Z, np.eye(3), np.zeros(3)), Z)
    b = rng.normal(size=3)
    assert np.array_equal(infuse_style(np.zeros((4, 3)), rng.normal(size=(3, 3)), b), np.tile(b, (4, 1)))
    out = infuse_style([[2.0, 3.0]], [[0.0, 1.0], [1.0, 0.0]], [1.0, 0.0])
    assert out.tolist() == [[4.0, 2.0]]
    with pytest.raises(errors.DimensionMismatch):
        infuse_style(Z, np.eye(2), np.zeros(2))


def test_infuse_linear_without_bias(rng):
    W = rng.normal(size=(3, 3))
    Z1, Z2 = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
    zero = np.zeros(3)
    lhs = infuse_style(2.0 * Z1 + 0.5 * Z2, W, zero)
    rhs = 2.0 * infuse_style(Z1, W, zero) + 0.5 * infuse_style(Z2, W, zero)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_pipeline_zero_and_identity(rng):
    Z = rng.normal(size=(6, 4))
    zero_bank = PrimitiveBank(np.zeros((3, 4, 4)), np.zeros((3, 4)), np.zeros((3, 2)), np.zeros(3))
    out = style_pipeline(np.ones(2), np.ones(2), FusionParams.zeros(2), zero_bank, Z)
    assert not out["Z_s"].any()
    ident = PrimitiveBank.identity(3, 4, 2)
    p = FusionParams(rng.normal(size=(2, 4)), rng.normal(size=2))
    out = style_pipeline(rng.normal(size=2), rng.normal(size=2), p, ident, Z)
    assert np.allclose(out["Z_s"], Z, atol=1e-15)


def test_pipeline_equals_manual_composition(rng):
    bank = random_bank(rng, e=8, d_s=6, d_m=5)
    params = FusionParams(rng.normal(size=(6, 12)), rng.normal(size=6))
    S_r, S_a, Z = rng.normal(size=6), rng.normal(size=6), rng.normal(size=(7, 5))
    out = style_pipeline(S_r, S_a, params, bank, Z)
    S_bias = params.W_s @ np.concatenate([S_r, S_a]) + params.b_s
    S_g = S_r + 0.1 * S_bias
    logits = bank.attn_W @ S_g + bank.attn_b
    pi = np.exp(logits - logits.max())
    pi /= pi.sum()
    W = sum(pi[i] * bank.weights[i] for i in range(8))
    b = sum(pi[i] * bank.biases[i] for i in range(8))
    assert np.allclose(out["S_g"], S_g, atol=1e-12)
    assert np.allclose(out["pi"], pi, atol=1e-12)
    assert np.allclose(out["Z_s"], Z @ W.T + b, atol=1e-12)


def test_json_roundtrip(rng):
    bank = random_bank(rng, e=2, d_s=3, d_m=2)
    back = bank_from_dict(bank_to_dict(bank))
    assert np.array_equal(back.weights, bank.weights) and np.array_equal(back.attn_W, bank.attn_W)
    p = FusionParams(rng.normal(size=(3, 6)), rng.normal(size=3), 0.25)
    q = params_from_dict(params_to_dict(p))
    assert q.alpha == 0.25 and np.array_equal(q.W_s, p.W_s)


def test_bank_schema_errors(rng):
    d = bank_to_dict(random_bank(rng, e=2, d_s=3, d_m=2))
    d["e"] = 3
    with pytest.raises(errors.FormatError):
        bank_from_dict(d)
    d = bank_to_dict(random_bank(rng, e=2, d_s=3, d_m=2))
    d["d_m"] = 5
    with pytest.raises(errors.DimensionMismatch):
        bank_from_dict(d)
    d = bank_to_dict(random_bank(rng, e=2, d_s=3, d_m=2))
    del d["attn_b"]
    with pytest.raises(errors.MissingKey):
        bank_from_dict(d)
