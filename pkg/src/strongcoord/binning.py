"""Uniform random binning, the mismatch stochastic likelihood coder, and the
one-shot random-binning / random-coding joints built from them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dist import (
    Alphabet,
    ChannelKernel,
    LabeledJoint,
    ShapeError,
    chain,
    condition,
    deterministic_kernel,
    joint,
    marginalize,
    rename,
    uniform,
    l1_distance,
    product,
    _arrange,
)
from .factors import TargetFactors

RB_AXES = ("K", "M", "U", "V", "W", "W_hat", "X", "Y")

# Bins: {bin axis name: (map from symbol to 0-based bin, bin count)}
Bins = Mapping[str, tuple[np.ndarray, int]]


def bin_count(rate: float) -> int:
    """Number of bins for a rate in bits: ceil(2^rate), guarding round-off."""
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    return max(1, math.ceil(2.0**rate - 1e-9))


def _bin_map(size: int, count: int, seed: int, stream: int) -> np.ndarray:
    out = np.empty(size, dtype=np.int64)
    key = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
    for i in range(size):
        # counter-based: each symbol's bin depends only on (seed, stream, i)
        gen = np.random.Generator(np.random.Philox(key=key, counter=[i, stream, 0, 0]))
        out[i] = gen.integers(count)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class BinningPair:
    """phi1: W -> K bins (common randomness), phi2: W -> M bins (extra
    randomness). Bin indices are 0-based."""

    phi1: np.ndarray
    phi2: np.ndarray
    count1: int
    count2: int
    R0: float
    R: float
    seed: int

    @property
    def realized_R0(self) -> float:
        return math.log2(self.count1)

    @property
    def realized_R(self) -> float:
        return math.log2(self.count2)

    @property
    def w_size(self) -> int:
        return self.phi1.size

    def bins(self) -> dict[str, tuple[np.ndarray, int]]:
        return {"K": (self.phi1, self.count1), "M": (self.phi2, self.count2)}

    def combined(self) -> np.ndarray:
        """Single bin index k * count2 + m of the pair (phi1, phi2)."""
        return self.phi1 * self.count2 + self.phi2

    def is_injective(self) -> bool:
        return np.unique(self.combined()).size == self.w_size

    def to_record(self) -> dict:
        return {
            "seed": int(self.seed),
            "w_size": int(self.w_size),
            "R0": self.R0,
            "R": self.R,
            "count1": int(self.count1),
            "count2": int(self.count2),
            "phi1": self.phi1.tolist(),
            "phi2": self.phi2.tolist(),
        }


def draw_binning(w_size: int, R0: float, R: float, seed: int) -> BinningPair:
    c1, c2 = bin_count(R0), bin_count(R)
    return BinningPair(_bin_map(w_size, c1, seed, 1), _bin_map(w_size, c2, seed, 2), c1, c2, R0, R, int(seed))


def fixed_binning(phi1, phi2, count1: int, count2: int, seed: int = -1) -> BinningPair:
    """Binning pair with explicit maps (tests, audits)."""
    phi1 = np.asarray(phi1, dtype=np.int64)
    phi2 = np.asarray(phi2, dtype=np.int64)
    if phi1.shape != phi2.shape:
        raise ShapeError("phi1 and phi2 must cover the same alphabet")
    if phi1.min() < 0 or phi1.max() >= count1 or phi2.min() < 0 or phi2.max() >= count2:
        raise ValueError("bin index out of range")
    phi1.setflags(write=False)
    phi2.setflags(write=False)
    return BinningPair(phi1, phi2, count1, count2, math.log2(count1), math.log2(count2), seed)


def _as_bins(phi, bin_axis: str) -> dict[str, tuple[np.ndarray, int]]:
    if isinstance(phi, Mapping):
        return {k: (np.asarray(v[0], dtype=np.int64), int(v[1])) for k, v in phi.items()}
    phi = np.asarray(phi, dtype=np.int64)
    return {bin_axis: (phi, int(phi.max()) + 1)}


def rb_joint_generic(p_ab: LabeledJoint, a_axis: str, phi, bin_axis: str = "K") -> LabeledJoint:
    """P^RB(a, b, k) = P_AB(a, b) 1{phi(a) = k}.

    ``phi`` is an array (bin count inferred as max + 1) or a Bins mapping.
    """
    out = p_ab
    size = p_ab.size_of(a_axis)
    for name, (m, count) in _as_bins(phi, bin_axis).items():
        if m.size != size:
            raise ShapeError(f"binning covers {m.size} symbols, axis {a_axis} has {size}")
        out = chain(out, deterministic_kernel([(a_axis, size)], (name, count), m))
    return out


def mismatch_slc(
    t_ab: LabeledJoint,
    a_axis: str,
    phi,
    bin_axis: str = "K",
    out_name: str | None = None,
) -> ChannelKernel:
    """T-hat(a_hat | b, k) proportional to T_{A|B}(a_hat | b) 1{phi(a_hat) = k}.

    The side-information axes b are every axis of ``t_ab`` except ``a_axis``.
    Bins that contain no symbol with positive posterior weight get the
    uniform distribution over the alphabet and are flagged in ``filled``.
    """
    bins = _as_bins(phi, bin_axis)
    out_name = out_name or f"{a_axis}_hat"
    a_size = t_ab.size_of(a_axis)
    b_names = [n for n in t_ab.names if n != a_axis]
    if b_names:
        post = condition(t_ab, b_names)
        b_axes = post.in_axes
        arr = post.probs
    else:
        b_axes = ()
        arr = t_ab.probs
    bin_axes = tuple(Alphabet(name, count) for name, (_, count) in bins.items())
    # indicator[a, k1, k2, ...] = 1{phi(a) = (k1, k2, ...)}
    ind = np.ones((a_size,) + tuple(a.size for a in bin_axes))
    for d, (name, (m, count)) in enumerate(bins.items()):
        if m.size != a_size:
            raise ShapeError(f"binning covers {m.size} symbols, axis {a_axis} has {a_size}")
        onehot = np.zeros((a_size, count))
        onehot[np.arange(a_size), m] = 1.0
        shape = [a_size] + [1] * len(bin_axes)
        shape[1 + d] = count
        ind = ind * onehot.reshape(shape)
    nb, nk = len(b_axes), len(bin_axes)
    # num[b..., k..., a] = T(a|b) * ind[a, k...]
    post_b_a = arr.reshape(tuple(a.size for a in b_axes) + (1,) * nk + (a_size,))
    ind_k_a = np.moveaxis(ind, 0, -1).reshape((1,) * nb + ind.shape[1:] + (a_size,))
    num = post_b_a * ind_k_a
    den = num.sum(axis=-1, keepdims=True)
    empty = den == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        probs = np.where(empty, 1.0 / a_size, num / np.where(empty, 1.0, den))
    return ChannelKernel(b_axes + bin_axes, (Alphabet(out_name, a_size),), probs, empty[..., 0])


def binning_uniformity_distance(p_ab: LabeledJoint, a_axis: str, phi, bin_axis: str = "K") -> float:
    """|| P^RB(b, k) - Q_K(k) P_B(b) ||_1 for one binning realisation."""
    bins = _as_bins(phi, bin_axis)
    rb = rb_joint_generic(p_ab, a_axis, bins)
    b_names = [n for n in p_ab.names if n != a_axis]
    keep = b_names + list(bins)
    observed = marginalize(rb, keep)
    q = uniform({name: count for name, (_, count) in bins.items()})
    ref = product(marginalize(p_ab, b_names), q) if b_names else q
    return l1_distance(observed, ref)


def slc_error_probability(
    p_ab: LabeledJoint, a_axis: str, phi, t_ab: LabeledJoint | None = None, bin_axis: str = "K"
) -> float:
    """P[A_hat != A] when (A, B) ~ P_AB, K = phi(A) and A_hat is drawn by the
    mismatch SLC built from ``t_ab`` (defaults to ``p_ab``)."""
    bins = _as_bins(phi, bin_axis)
    slc = mismatch_slc(t_ab if t_ab is not None else p_ab, a_axis, bins)
    rb = chain(rb_joint_generic(p_ab, a_axis, bins), slc)
    a_hat = slc.out_axis.name
    both = marginalize(rb, [a_axis, a_hat])
    arr = _arrange(both.probs, both.names, [a_axis, a_hat])
    return float(max(0.0, 1.0 - np.trace(arr)))


# ---------------------------------------------------------------------------
# one-shot scheme
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OneShotScheme:
    factors: TargetFactors
    target: LabeledJoint
    binning: BinningPair
    rb_joint: LabeledJoint
    rc_joint: LabeledJoint
    encoder_posterior: ChannelKernel
    slc: ChannelKernel

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "encoder_posterior_filled": self.encoder_posterior.any_filled,
            "slc_filled": self.slc.any_filled,
        }


def build_one_shot(factors: TargetFactors, binning: BinningPair, t_wy: LabeledJoint | None = None) -> OneShotScheme:
    """Materialise P^RB,os and P^RC,os for one binning realisation.

    The decoder is the mismatch SLC built from ``t_wy`` (default: the
    target's own W,Y marginal).
    """
    target = factors.joint()
    if binning.w_size != factors.sizes["W"]:
        raise ShapeError(f"binning covers {binning.w_size} symbols, |W| = {factors.sizes['W']}")
    bins = binning.bins()
    t = t_wy if t_wy is not None else marginalize(target, ["W", "Y"])
    slc = mismatch_slc(t, "W", bins, out_name="W_hat")

    rb = chain(rb_joint_generic(target, "W", bins), slc)
    enc = condition(marginalize(rb, ["K", "M", "U", "W"]), ["K", "M", "U"])

    decode_v = rename(factors.v_given_wy, {"W": "W_hat"})
    rc = product(uniform({"K": binning.count1, "M": binning.count2}), factors.p_u)
    rc = chain(rc, enc)
    rc = chain(rc, factors.x_given_uw)
    rc = chain(rc, factors.y_given_x)
    rc = chain(rc, slc)
    rc = chain(rc, decode_v)
    return OneShotScheme(factors, target, binning, rb, rc, enc, slc)
