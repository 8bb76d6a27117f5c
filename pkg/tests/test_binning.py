import math

import numpy as np
import pytest

from oracles import as_dict, l1, rc_one_shot_brute
from strongcoord.binning import (
    bin_count,
    binning_uniformity_distance,
    build_one_shot,
    draw_binning,
    fixed_binning,
    mismatch_slc,
    rb_joint_generic,
    slc_error_probability,
)
from strongcoord.dist import joint, l1_distance, marginalize, uniform
from strongcoord.factors import TARGET_AXES, desk_instance, from_arrays, random_instance


def factor_arrays(f):
    return (
        f.p_u.probs.tolist(),
        f.w_given_u.probs.tolist(),
        f.x_given_uw.probs.tolist(),
        f.y_given_x.probs.tolist(),
        f.v_given_wy.probs.tolist(),
    )


def test_bin_count():
    assert bin_count(0) == 1
    assert bin_count(1) == 2
    assert bin_count(1.5) == 3
    assert bin_count(math.log2(5)) == 5
    with pytest.raises(ValueError):
        bin_count(-1)


def test_zero_rates_give_constant_maps():
    b = draw_binning(5, 0, 0, seed=3)
    assert b.count1 == b.count2 == 1
    assert not b.phi1.any() and not b.phi2.any()


def test_binning_deterministic_and_counter_based():
    a, b = draw_binning(6, 2, 1, 99), draw_binning(6, 2, 1, 99)
    assert np.array_equal(a.phi1, b.phi1) and np.array_equal(a.phi2, b.phi2)
    # extending the alphabet does not disturb existing symbols
    c = draw_binning(9, 2, 1, 99)
    assert np.array_equal(c.phi1[:6], a.phi1)


def test_collision_frequency_matches_birthday_oracle():
    count = 16
    hits = np.array([draw_binning(2, 4, 0, s).phi1 for s in range(4000)])
    freq = np.mean(hits[:, 0] == hits[:, 1])
    se = math.sqrt((1 / count) * (1 - 1 / count) / 4000)
    assert abs(freq - 1 / count) <= 4 * se
    # each bin equally likely
    counts = np.bincount(hits[:, 0], minlength=count) / 4000
    assert np.max(np.abs(counts - 1 / count)) < 0.02


def test_rb_joint_examples(rng):
    p = joint([("A", 3), ("B", 2)], rng.dirichlet(np.ones(6)).reshape(3, 2))
    one = rb_joint_generic(p, "A", np.zeros(3, dtype=int))
    assert one.prob({"A": 1, "B": 0, "K": 0}) == pytest.approx(p.prob({"A": 1, "B": 0}))
    inj = rb_joint_generic(p, "A", np.array([2, 0, 1]))
    for a, k in [(0, 2), (1, 0), (2, 1)]:
        for b in range(2):
            assert inj.prob({"A": a, "B": b, "K": k}) == pytest.approx(p.prob({"A": a, "B": b}))
            assert inj.prob({"A": a, "B": b, "K": (k + 1) % 3}) == 0.0
    assert l1_distance(marginalize(inj, ["A", "B"]), p) == 0.0


def test_slc_hand_normalisation():
    t = joint([("A", 3), ("B", 1)], [[0.5], [0.3], [0.2]])
    k = mismatch_slc(t, "A", np.array([0, 0, 1]))
    assert k.slice((0, 0)).probs.tolist() == pytest.approx([0.625, 0.375, 0.0])
    assert k.slice((0, 1)).probs.tolist() == pytest.approx([0.0, 0.0, 1.0])


def test_slc_one_bin_and_injective(rng):
    t = joint([("A", 3), ("B", 2)], rng.dirichlet(np.ones(6)).reshape(3, 2))
    k1 = mismatch_slc(t, "A", np.zeros(3, dtype=int))
    for b in range(2):
        post = t.probs[:, b] / t.probs[:, b].sum()
        np.testing.assert_allclose(k1.slice((b, 0)).probs, post, atol=1e-15)
    kinj = mismatch_slc(t, "A", np.array([1, 2, 0]))
    for b in range(2):
        assert kinj.slice((b, 1)).probs.tolist() == [1.0, 0.0, 0.0]
    assert not kinj.any_filled


def test_slc_empty_bin_is_uniform_and_flagged():
    t = joint([("A", 2), ("B", 1)], [[0.5], [0.5]])
    k = mismatch_slc(t, "A", {"K": (np.array([0, 0]), 3)})
    assert k.any_filled
    assert k.slice((0, 2)).probs.tolist() == [0.5, 0.5]


def test_uniformity_distance_oracle():
    # A uniform on 4 symbols, no side information except a constant B
    p = joint([("A", 4), ("B", 1)], np.full((4, 1), 0.25))
    phi = np.array([0, 0, 0, 1])
    # P(k) = (0.75, 0.25) vs uniform (0.5, 0.5)
    assert binning_uniformity_distance(p, "A", phi) == pytest.approx(0.5)


def test_slc_error_oracle():
    p = joint([("A", 2), ("B", 2)], [[0.45, 0.05], [0.05, 0.45]])
    # one bin: decoder samples A from P(A|B); error = sum_b P(b) (1 - sum_a P(a|b)^2)
    expect = 1 - (0.9**2 + 0.1**2)
    assert slc_error_probability(p, "A", np.zeros(2, dtype=int)) == pytest.approx(expect)
    assert slc_error_probability(p, "A", np.array([0, 1])) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_rc_joint_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    f = random_instance(rng, {"U": 2, "W": 3, "X": 2, "Y": 2, "V": 2})
    b = draw_binning(3, 1, 1, seed)
    s = build_one_shot(f, b)
    rc = marginalize(s.rc_joint, ["U", "X", "Y", "V"])
    oracle = rc_one_shot_brute(*factor_arrays(f), b.phi1.tolist(), b.count1, b.phi2.tolist(), b.count2)
    assert l1(as_dict(rc), oracle) < 1e-12


def test_rb_marginal_reproduces_target(rng):
    for seed in range(10):
        f = random_instance(rng, {"W": 3})
        s = build_one_shot(f, draw_binning(3, 1, 1, seed))
        assert l1_distance(marginalize(s.rb_joint, TARGET_AXES), f.joint()) <= 1e-12


def test_rc_bins_exactly_uniform(desk):
    s = build_one_shot(desk, draw_binning(2, 1, 1, 4))
    km = marginalize(s.rc_joint, ["K", "M"])
    np.testing.assert_allclose(km.probs, np.full((2, 2), 0.25), atol=1e-15)


def test_deterministic_w_one_bin_noiseless_is_exact():
    # W = U, X = W, Y = X: the decoder reads W off Y
    f = desk_instance(w_flip=0.0, channel_flip=0.0)
    s = build_one_shot(f, draw_binning(2, 0, 0, 0))
    assert l1_distance(marginalize(s.rc_joint, ["U", "V", "X", "Y"]), f.observed()) <= 1e-12


def test_deterministic_w_one_bin_v_ignoring_w_is_exact():
    f0 = desk_instance(w_flip=0.0)
    f = from_arrays(
        f0.p_u.probs, f0.w_given_u.probs, f0.x_given_uw.probs, f0.y_given_x.probs,
        [[[0.7, 0.3], [0.2, 0.8]]] * 2,
    )
    s = build_one_shot(f, draw_binning(2, 0, 0, 0))
    assert l1_distance(marginalize(s.rc_joint, ["U", "V", "X", "Y"]), f.observed()) <= 1e-12


def test_deterministic_w_one_bin_noisy_v_copy_is_not_exact():
    # V = W_hat is drawn from P(W | Y) independently of U, unlike the target
    f = desk_instance(w_flip=0.0)
    s = build_one_shot(f, draw_binning(2, 0, 0, 0))
    rc = marginalize(s.rc_joint, ["U", "V", "X", "Y"])
    oracle = rc_one_shot_brute(*factor_arrays(f), [0, 0], 1, [0, 0], 1)
    assert l1(as_dict(rc), oracle) < 1e-12
    assert l1_distance(rc, f.observed()) == pytest.approx(0.36, abs=1e-12)


def test_independent_w_injective_k_is_exact():
    # W uniform and independent of U; every (k, m) cell is hit exactly once
    f = desk_instance(w_flip=0.5)
    s = build_one_shot(f, fixed_binning([0, 1], [0, 0], 2, 1))
    assert l1_distance(marginalize(s.rc_joint, ["U", "V", "X", "Y"]), f.observed()) <= 1e-12


def test_desk_injective_pair_leaves_empty_cells(desk):
    # with |W| = 2 and four (k, m) cells, two cells are always empty; the RC
    # encoder falls back to a uniform W there, so RC differs from the target
    b = fixed_binning([0, 1], [0, 1], 2, 2)
    s = build_one_shot(desk, b)
    assert s.flags["encoder_posterior_filled"]
    rc = marginalize(s.rc_joint, ["U", "V", "X", "Y"])
    oracle = rc_one_shot_brute(*factor_arrays(desk), [0, 1], 2, [0, 1], 2)
    assert l1(as_dict(rc), oracle) < 1e-12
    assert l1_distance(rc, desk.observed()) > 0.1


def test_binning_size_mismatch(desk):
    with pytest.raises(ValueError):
        build_one_shot(desk, draw_binning(3, 1, 1, 0))


def test_fixed_binning_validation():
    with pytest.raises(ValueError):
        fixed_binning([0, 2], [0, 0], 2, 1)
    b = fixed_binning([0, 1], [0, 0], 2, 1)
    assert b.is_injective() and b.realized_R0 == 1.0 and b.realized_R == 0.0
    assert b.to_record()["phi1"] == [0, 1]


def test_from_arrays_checks_alphabets():
    with pytest.raises(ValueError):
        from_arrays([0.5, 0.5], [[1, 0], [0, 1]], [[[1, 0]] * 2] * 2, [[1, 0], [0, 1]], [[[1, 0]] * 3] * 2)
