"""Information functionals over labelled joints (all logarithms base 2)."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dist import (
    ChannelKernel,
    LabeledJoint,
    ShapeError,
    _arrange,
    _check_names,
    _index_tuple,
    condition,
    marginalize,
)

MERGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ValueDistribution:
    """Finitely supported real random variable, atoms sorted by value."""

    values: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_atoms(cls, values, probs, merge_tol: float = MERGE_TOL) -> "ValueDistribution":
        values = np.asarray(values, dtype=np.float64).ravel()
        probs = np.asarray(probs, dtype=np.float64).ravel()
        if values.shape != probs.shape:
            raise ValueError("values and probs differ in length")
        keep = probs > 0
        values, probs = values[keep], probs[keep]
        if not np.all(np.isfinite(values)):
            raise ValueError("atom values must be finite")
        if np.any(probs < 0):
            raise ValueError("negative probability")
        total = probs.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"atom probabilities sum to {total!r}")
        order = np.argsort(values, kind="stable")
        values, probs = values[order], probs[order]
        # group consecutive values lying within merge_tol of the group's first value
        starts = [0]
        for i in range(1, values.size):
            if values[i] - values[starts[-1]] > merge_tol:
                starts.append(i)
        idx = np.asarray(starts)
        p = np.add.reduceat(probs, idx)
        v = np.add.reduceat(values * probs, idx) / p
        v.setflags(write=False)
        p.setflags(write=False)
        return cls(v, p)

    @classmethod
    def point(cls, value: float) -> "ValueDistribution":
        return cls.from_atoms([value], [1.0])

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def __len__(self) -> int:
        return self.values.size

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def variance(self) -> float:
        mu = self.mean()
        return float(np.dot((self.values - mu) ** 2, self.probs))

    def third_abs_moment(self) -> float:
        mu = self.mean()
        return float(np.dot(np.abs(self.values - mu) ** 3, self.probs))

    def shifted(self, c: float) -> "ValueDistribution":
        return ValueDistribution.from_atoms(self.values + c, self.probs)

    def __repr__(self) -> str:
        body = ", ".join(f"({v:.6g}, {p:.6g})" for v, p in self.atoms[:6])
        more = "" if len(self) <= 6 else f", ... {len(self)} atoms"
        return f"ValueDistribution({body}{more})"


@dataclass(frozen=True)
class TailStats:
    mu_n: float
    V_n: float
    T_n: float
    B_n: float
    degenerate: bool


def tail_stats(v: ValueDistribution) -> TailStats:
    """Mean, variance, third absolute central moment and the Berry-Esseen
    constant ``6 T / V^{3/2}`` (NaN when the variance vanishes)."""
    mu, var, third = v.mean(), v.variance(), v.third_abs_moment()
    if var <= 1e-300:
        return TailStats(mu, 0.0, third, float("nan"), True)
    return TailStats(mu, var, third, 6.0 * third / var**1.5, False)


# ---------------------------------------------------------------------------
# pointwise quantities
# ---------------------------------------------------------------------------

def _bits(p: float) -> float:
    return float("inf") if p <= 0 else -math.log2(p)


def self_information(p: LabeledJoint, x) -> float:
    return _bits(p.prob(x))


def conditional_information(k: ChannelKernel, a, b) -> float:
    """h(a|b) = -log2 K(a|b)."""
    idx = _index_tuple(k.in_names, b) + _index_tuple(k.out_names, a)
    return _bits(float(k.probs[idx]))


def information_density(p: LabeledJoint, a_axes: Sequence[str], a, b) -> float:
    """log2 P(a,b) / (P(a) P(b)); the b-group is every axis not in ``a_axes``.

    Returns NaN when either marginal vanishes (the density is undefined).
    """
    a_axes = _check_names(p.names, a_axes)
    b_axes = [n for n in p.names if n not in a_axes]
    if not b_axes:
        raise ShapeError("information density needs two axis groups")
    pa = marginalize(p, a_axes).prob(a)
    pb = marginalize(p, b_axes).prob(b)
    if pa == 0 or pb == 0:
        return float("nan")
    sym = dict(zip(a_axes, _index_tuple(a_axes, a)))
    sym.update(zip(b_axes, _index_tuple(b_axes, b)))
    pab = p.prob(sym)
    if pab == 0:
        return float("-inf")
    return math.log2(pab / (pa * pb))


# ---------------------------------------------------------------------------
# Shannon quantities
# ---------------------------------------------------------------------------

def _h(arr: np.ndarray) -> float:
    q = arr[arr > 0]
    return float(-np.sum(q * np.log2(q)))


def entropy(p: LabeledJoint, axes: Iterable[str] | None = None) -> float:
    if axes is not None:
        p = marginalize(p, axes)
    return max(0.0, _h(p.probs))


def conditional_entropy(p: LabeledJoint, axes: Iterable[str], given: Iterable[str]) -> float:
    axes, given = list(axes), list(given)
    if not given:
        return entropy(p, axes)
    h = entropy(p, set(axes) | set(given)) - entropy(p, given)
    return max(0.0, h)


def mutual_information(p: LabeledJoint, a: Iterable[str], b: Iterable[str]) -> float:
    a, b = set(a), set(b)
    val = entropy(p, a) + entropy(p, b) - entropy(p, a | b)
    return _clamp(val)


def conditional_mutual_information(
    p: LabeledJoint, a: Iterable[str], b: Iterable[str], given: Iterable[str]
) -> float:
    a, b, g = set(a), set(b), set(given)
    if not g:
        return mutual_information(p, a, b)
    val = entropy(p, a | g) + entropy(p, b | g) - entropy(p, a | b | g) - entropy(p, g)
    return _clamp(val)


def _clamp(val: float) -> float:
    if val < -1e-10:
        raise ArithmeticError(f"information quantity {val} is negative beyond round-off")
    return max(0.0, val)


def is_typical(p: LabeledJoint, sequence, eps1: float) -> bool:
    """Multiplicative entropy typicality:
    2^{-nH(1+eps1)} <= P^n(seq) <= 2^{-nH(1-eps1)}."""
    if eps1 < 0:
        raise ValueError("eps1 must be nonnegative")
    seq = list(sequence)
    n = len(seq)
    h = entropy(p)
    neglog = 0.0
    for x in seq:
        px = p.prob(x)
        if px == 0:
            return False
        neglog -= math.log2(px)
    slack = 1e-12 * max(1.0, n * h)
    return n * h * (1 - eps1) - slack <= neglog <= n * h * (1 + eps1) + slack


# ---------------------------------------------------------------------------
# distributions of pointwise information
# ---------------------------------------------------------------------------

def information_distribution(
    p: LabeledJoint, of: Sequence[str], given: Sequence[str] = ()
) -> ValueDistribution:
    """Law of h(of | given) when all variables are drawn from ``p``.

    Cells with zero mass carry no atom.
    """
    of, given = list(of), list(given)
    sub = marginalize(p, of + given)
    if given:
        k = condition(sub, given)
        cond = _arrange(k.probs, k.in_names + k.out_names, sub.names)
        cond = np.broadcast_to(cond, sub.shape)
    else:
        cond = sub.probs
    mask = sub.probs > 0
    return ValueDistribution.from_atoms(-np.log2(cond[mask]), sub.probs[mask])


def density_distribution(p: LabeledJoint, a: Sequence[str], b: Sequence[str]) -> ValueDistribution:
    """Law of the information density i(A;B) under ``p``."""
    a, b = list(a), list(b)
    sub = marginalize(p, a + b)
    ma, mb = marginalize(sub, a), marginalize(sub, b)
    pa = np.broadcast_to(_arrange(ma.probs, ma.names, sub.names), sub.shape)
    pb = np.broadcast_to(_arrange(mb.probs, mb.names, sub.names), sub.shape)
    mask = sub.probs > 0
    dens = np.log2(sub.probs[mask]) - np.log2(pa[mask]) - np.log2(pb[mask])
    return ValueDistribution.from_atoms(dens, sub.probs[mask])


def conditional_information_distributions(
    p: LabeledJoint, of: Sequence[str], given: Sequence[str], by: Sequence[str]
) -> list[tuple[tuple[int, ...], float, ValueDistribution]]:
    """Law of h(of | given) with the ``by`` axes pinned to each symbol of
    positive mass and everything else drawn from P(. | by).

    Used for h(w|Y) with W=w fixed and Y ~ P(.|w). Returns
    ``(symbol, P(by=symbol), ValueDistribution)`` triples.
    """
    of, given, by = list(of), list(given), list(by)
    sub = marginalize(p, list(dict.fromkeys(of + given + by)))
    k = condition(sub, given)
    cond = np.broadcast_to(_arrange(k.probs, k.in_names + k.out_names, sub.names), sub.shape)
    pby = marginalize(sub, by)
    by_pos = [sub.names.index(n) for n in pby.names]
    out = []
    for sym in np.ndindex(*pby.shape):
        mass = float(pby.probs[sym])
        if mass == 0:
            continue
        sel = [slice(None)] * len(sub.names)
        for d, s in zip(by_pos, sym):
            sel[d] = s
        cells = sub.probs[tuple(sel)] / mass
        h = cond[tuple(sel)]
        mask = cells > 0
        out.append((sym, mass, ValueDistribution.from_atoms(-np.log2(h[mask]), cells[mask])))
    return out


_SELECTOR = re.compile(r"^\s*([hi])\(\s*([A-Za-z]+)\s*([|;])\s*([A-Za-z]*)\s*\)\s*$")


def parse_selector(selector: str) -> tuple[str, list[str], list[str]]:
    """'h(W|UXYV)' -> ('h', ['W'], ['U','X','Y','V']); single-letter axes."""
    m = _SELECTOR.match(selector)
    if not m or (m.group(1) == "h") != (m.group(3) == "|"):
        raise ValueError(f"unrecognised selector {selector!r}")
    return m.group(1), list(m.group(2)), list(m.group(4))


def per_symbol_value_distribution(p: LabeledJoint, selector: str) -> ValueDistribution:
    kind, left, right = parse_selector(selector)
    if kind == "h":
        return information_distribution(p, left, right)
    return density_distribution(p, left, right)
