import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import as_dict, entropy as h_oracle, h2, marginal
from strongcoord.dist import bsc, chain, identity_kernel, joint, kernel, uniform
from strongcoord.factors import random_instance
from strongcoord.info import (
    ValueDistribution,
    conditional_entropy,
    conditional_information,
    conditional_information_distributions,
    conditional_mutual_information,
    density_distribution,
    entropy,
    information_density,
    information_distribution,
    is_typical,
    mutual_information,
    parse_selector,
    per_symbol_value_distribution,
    self_information,
    tail_stats,
)


def wy(p_flip=0.1):
    return chain(uniform({"W": 2}), bsc(p_flip, "W", "Y"))


def test_self_information():
    u = uniform({"A": 2})
    assert self_information(u, (0,)) == 1.0
    d = joint([("A", 2)], [1.0, 0.0])
    assert self_information(d, (0,)) == 0.0
    assert self_information(d, (1,)) == math.inf


def test_conditional_information():
    assert conditional_information(identity_kernel(("A", 3), "B"), (1,), (1,)) == 0.0
    assert conditional_information(bsc(0.25, "A", "B"), (0,), (1,)) == pytest.approx(2.0)
    k = kernel([("A", 2)], [("B", 4)], np.full((2, 4), 0.25))
    assert conditional_information(k, (3,), (0,)) == pytest.approx(2.0)


def test_information_density():
    ind = joint([("A", 2), ("B", 2)], [[0.06, 0.14], [0.24, 0.56]])
    assert information_density(ind, ["A"], (1,), (0,)) == pytest.approx(0.0, abs=1e-12)
    corr = joint([("A", 2), ("B", 2)], [[0.5, 0.0], [0.0, 0.5]])
    assert information_density(corr, ["A"], (0,), (0,)) == pytest.approx(1.0)
    assert information_density(wy(), ["W"], (0,), (0,)) == pytest.approx(math.log2(2 * 0.9), abs=1e-12)
    assert information_density(wy(), ["W"], (0,), (0,)) == pytest.approx(0.8480, abs=1e-4)
    zero = joint([("A", 2), ("B", 2)], [[0.5, 0.5], [0.0, 0.0]])
    assert math.isnan(information_density(zero, ["A"], (1,), (0,)))


def test_shannon_quantities_closed_form():
    assert entropy(uniform({"A": 2})) == pytest.approx(1.0)
    prod = joint([("A", 2), ("B", 3)], np.outer([0.3, 0.7], [0.2, 0.3, 0.5]))
    assert mutual_information(prod, ["A"], ["B"]) == pytest.approx(0.0, abs=1e-12)
    assert mutual_information(wy(), ["W"], ["Y"]) == pytest.approx(1 - h2(0.1), abs=1e-12)
    assert mutual_information(wy(), ["W"], ["Y"]) == pytest.approx(0.5310, abs=1e-4)


def test_desk_informations(desk):
    p = desk.joint()
    assert mutual_information(p, ["W"], ["U"]) == pytest.approx(1 - h2(0.2), abs=1e-12)
    assert mutual_information(p, ["W"], ["U"]) == pytest.approx(0.2781, abs=1e-4)
    assert mutual_information(p, ["W"], ["Y"]) == pytest.approx(1 - h2(0.1), abs=1e-12)
    # V = X = W, so I(W; UXV | Y) = H(W | Y)
    assert conditional_mutual_information(p, ["W"], ["U", "X", "V"], ["Y"]) == pytest.approx(h2(0.1), abs=1e-12)


def test_entropy_against_dict_oracle(rng):
    f = random_instance(rng, {"U": 3, "W": 2, "X": 2, "Y": 3, "V": 2})
    p = f.joint()
    d = as_dict(p)
    names = list(p.names)
    for group in (["U"], ["U", "W"], ["W", "Y"], names):
        pos = [names.index(g) for g in group]
        assert entropy(p, group) == pytest.approx(h_oracle(marginal(d, pos)), abs=1e-12)
    pos_wy = [names.index("W"), names.index("Y")]
    pos_y = [names.index("Y")]
    expect = h_oracle(marginal(d, pos_wy)) - h_oracle(marginal(d, pos_y))
    assert conditional_entropy(p, ["W"], ["Y"]) == pytest.approx(expect, abs=1e-12)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60)
def test_mutual_information_identity(seed):
    rng = np.random.default_rng(seed)
    p = joint([("A", 3), ("B", 2)], rng.dirichlet(np.ones(6)).reshape(3, 2))
    i = mutual_information(p, ["A"], ["B"])
    assert i >= 0
    assert i == pytest.approx(entropy(p, ["A"]) - conditional_entropy(p, ["A"], ["B"]), abs=1e-10)


def test_typicality_examples():
    det = joint([("A", 2)], [1.0, 0.0])
    assert is_typical(det, [(0,)] * 5, 0.01)
    u = uniform({"A": 2})
    assert is_typical(u, [(0,), (1,), (1,)], 1e-6)
    p = joint([("A", 2)], [0.9, 0.1])
    # H = H2(0.1) = 0.469, window [10 H 0.9, 10 H 1.1] = [4.221, 5.159]
    # all zeros: -log2(0.9^10) = 1.520, below the window
    assert not is_typical(p, [(0,)] * 10, 0.1)
    # one 1: 9 * 0.152 + 3.322 = 4.690, inside
    assert is_typical(p, [(0,)] * 9 + [(1,)], 0.1)
    assert not is_typical(p, [(1,)] * 10, 0.1)
    with pytest.raises(ValueError):
        is_typical(p, [(0,)], -0.1)


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.5), st.floats(0.0, 0.5))
@settings(max_examples=80)
def test_typicality_monotone_in_eps(seed, e, extra):
    rng = np.random.default_rng(seed)
    p = joint([("A", 3)], rng.dirichlet(np.ones(3)))
    seq = [(int(s),) for s in rng.choice(3, size=8, p=p.probs)]
    if is_typical(p, seq, e):
        assert is_typical(p, seq, e + extra)


def test_bsc_value_distribution():
    v = information_distribution(wy(), ["W"], ["Y"])
    np.testing.assert_allclose(v.values, [-math.log2(0.9), -math.log2(0.1)], atol=1e-12)
    np.testing.assert_allclose(v.probs, [0.9, 0.1], atol=1e-12)
    assert v.mean() == pytest.approx(h2(0.1), abs=1e-12)


def test_identity_channel_point_mass():
    p = chain(uniform({"W": 2}), identity_kernel(("W", 2), "Y"))
    v = per_symbol_value_distribution(p, "h(W|Y)")
    assert v.atoms == [(0.0, 1.0)]


def test_tail_stats_examples():
    s = tail_stats(ValueDistribution.point(3.0))
    assert s.degenerate and s.mu_n == 3.0 and s.V_n == 0.0 and math.isnan(s.B_n)
    s = tail_stats(ValueDistribution.from_atoms([0, 2], [0.5, 0.5]))
    assert (s.mu_n, s.V_n, s.T_n, s.B_n) == pytest.approx((1.0, 1.0, 1.0, 6.0))
    s = tail_stats(information_distribution(wy(), ["W"], ["Y"]))
    assert s.mu_n == pytest.approx(0.4690, abs=1e-4)
    assert s.V_n == pytest.approx(0.9 * 0.1 * math.log2(9) ** 2, abs=1e-12)
    assert s.V_n == pytest.approx(0.9043, abs=1e-4)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40)
def test_selector_means_equal_entropies(seed):
    p = random_instance(np.random.default_rng(seed), {"U": 2, "W": 3, "Y": 3}).joint()
    for sel, (a, b) in {
        "h(W|U)": (["W"], ["U"]),
        "h(W|Y)": (["W"], ["Y"]),
        "h(W|UXYV)": (["W"], ["U", "X", "Y", "V"]),
    }.items():
        v = per_symbol_value_distribution(p, sel)
        assert v.mean() == pytest.approx(conditional_entropy(p, a, b), abs=1e-10)
    assert per_symbol_value_distribution(p, "i(W;Y)").mean() == pytest.approx(
        mutual_information(p, ["W"], ["Y"]), abs=1e-10
    )


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40)
def test_conditional_variances_of_h_and_density_agree(seed):
    p = random_instance(np.random.default_rng(seed), {"W": 3, "Y": 3}).joint()
    for _, mass, v in conditional_information_distributions(p, ["W"], ["Y"], ["W"]):
        # i(w;Y) = h(w) - h(w|Y), a constant shift once W = w is fixed
        shifted = ValueDistribution.from_atoms(-math.log2(mass) - v.values, v.probs)
        assert shifted.variance() == pytest.approx(v.variance(), abs=1e-10)


def test_density_distribution_mean():
    v = density_distribution(wy(), ["W"], ["Y"])
    assert v.mean() == pytest.approx(1 - h2(0.1), abs=1e-12)


def test_value_distribution_validation():
    with pytest.raises(ValueError):
        ValueDistribution.from_atoms([0, 1], [0.5, 0.6])
    with pytest.raises(ValueError):
        ValueDistribution.from_atoms([0, math.inf], [0.5, 0.5])
    v = ValueDistribution.from_atoms([1.0, 1.0 + 1e-14, 2.0], [0.25, 0.25, 0.5])
    assert len(v) == 2


def test_parse_selector():
    assert parse_selector("h(W|UXYV)") == ("h", ["W"], ["U", "X", "Y", "V"])
    assert parse_selector("i(W;Y)") == ("i", ["W"], ["Y"])
    with pytest.raises(ValueError):
        parse_selector("h(W;Y)")
