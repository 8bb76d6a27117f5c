"""Finite-blocklength quantities of the coordination inner bound.

Tail probabilities of the three S-gamma sets are computed exactly by
convolving the per-symbol law of the relevant pointwise information on an
integer lattice; the lattice spacing ``delta`` only perturbs thresholds, by
at most ``n * delta`` bits, and that slack is always reported.

Threshold conventions: the S sets use a strict ">" so their complements are
"<=" (S_gamma1, S_gamma3) and ">=" (S_gamma2).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.signal import convolve
from scipy.special import erfc

from .dist import (
    LabeledJoint,
    ResourceCapError,
    ShapeError,
    _arrange,
    chain,
    condition,
    joint,
    kernel,
    l1_distance,
    marginalize,
)
from .factors import OBSERVED_AXES, TargetFactors
from .info import (
    ValueDistribution,
    conditional_entropy,
    conditional_information_distributions,
    conditional_mutual_information,
    entropy,
    information_distribution,
    mutual_information,
    tail_stats,
)
from .kernels import lattice_convolve

ATOM_CAP = 2_000_000
PAIR_BUDGET = 50_000_000
TARGET_SLACK = 1e-9
_MAX_KEY = 2**62


class SupportExplosionError(ResourceCapError):
    """Exact convolution support exceeds the atom cap; pass a coarser delta."""


class DegenerateError(ValueError):
    """A variance that must be positive vanished."""


# ---------------------------------------------------------------------------
# Gaussian tail
# ---------------------------------------------------------------------------

def q_function(t):
    """Standard normal upper tail Q(t)."""
    out = 0.5 * erfc(np.asarray(t, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def q_inverse(p: float) -> float:
    """t with Q(t) = p, by bracketing root search."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"q_inverse needs 0 < p < 1, got {p}")
    if p == 0.5:
        return 0.0
    return brentq(lambda t: q_function(t) - p, -40.0, 40.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


# ---------------------------------------------------------------------------
# exact i.i.d. sums
# ---------------------------------------------------------------------------

_DIRECTIONS = {">": "gt", ">=": "ge", "<": "lt", "<=": "le", "gt": "gt", "ge": "ge", "lt": "lt", "le": "le"}


@dataclass(frozen=True)
class TailProbability:
    prob: float
    upper: float  # probability after moving the threshold by ``slack`` in the enlarging direction
    slack: float  # bound on |quantised sum - true sum|, in bits
    delta: float
    atoms: int


@dataclass(frozen=True, eq=False)
class LatticeSum:
    """Law of sum_{i<=n} Z_i with each Z_i rounded to ``vmin + delta * k``.

    ``keys`` count multiples of ``spacing`` (a multiple of ``delta``) above
    ``offset``; ``tie`` is the half-width, in key units, inside which a key
    counts as equal to a threshold.
    """

    keys: np.ndarray
    probs: np.ndarray
    offset: float
    spacing: float
    delta: float
    n: int
    slack: float
    tie: float

    def _mask(self, threshold: float, direction: str, shift: float = 0.0) -> np.ndarray:
        d = _DIRECTIONS[direction]
        t = (threshold - self.offset + shift) / self.spacing
        k = self.keys.astype(np.float64)
        # half-width n*delta/2 in key units, plus a guard for float rounding in t
        w = self.tie + 1e-12 * max(1.0, abs(t))
        if d == "ge":
            return k >= t - w
        if d == "gt":
            return k > t + w
        if d == "le":
            return k <= t + w
        return k < t - w

    def tail(self, threshold: float, direction: str) -> TailProbability:
        d = _DIRECTIONS[direction]
        p = float(self.probs[self._mask(threshold, d)].sum())
        grow = -self.slack if d in ("ge", "gt") else self.slack
        up = float(self.probs[self._mask(threshold, d, grow)].sum())
        return TailProbability(min(1.0, p), min(1.0, max(up, p)), self.slack, self.delta, int(self.keys.size))


def _pick_delta(span: float, n: int, delta: float | None) -> float:
    if delta is None:
        delta = TARGET_SLACK / n
    if span > 0:
        delta = max(delta, n * span / _MAX_KEY)
    return delta


def _lattice(v: ValueDistribution, delta: float):
    keys = np.rint((v.values - v.values[0]) / delta).astype(np.int64)
    keys, inv = np.unique(keys, return_inverse=True)
    probs = np.bincount(inv, weights=v.probs)
    g = int(np.gcd.reduce(keys)) if keys.size > 1 else 1
    return keys // max(g, 1), probs, max(g, 1)


def sum_distribution(
    v: ValueDistribution, n: int, delta: float | None = None, atom_cap: int = ATOM_CAP, coarsen: bool = False
) -> LatticeSum:
    """Exact law of the i.i.d. sum on a lattice of spacing ``delta``.

    Keys are reduced by their gcd first, so laws with few atoms (whose
    lattice range grows only linearly in n) take a dense convolution path.
    With ``coarsen`` the spacing is widened instead of raising when the
    support would exceed ``atom_cap``; the reported slack grows accordingly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    vmin, span = float(v.values[0]), float(v.values[-1] - v.values[0])
    delta = _pick_delta(span, n, delta)
    keys, probs, g = _lattice(v, delta)
    slack = 0.5 * n * delta
    tie = 0.5 * n / g
    if n * int(keys[-1]) < atom_cap:
        k, p = _power_dense(keys, probs, n)
        return LatticeSum(k, p, n * vmin, delta * g, delta, n, slack, tie)
    try:
        k, p = _power_sparse(keys, probs, n, atom_cap)
        return LatticeSum(k, p, n * vmin, delta * g, delta, n, slack, tie)
    except SupportExplosionError:
        if not coarsen:
            raise
    delta = max(delta, n * span / (atom_cap - 1))
    keys, probs, g = _lattice(v, delta)
    k, p = _power_dense(keys, probs, n)
    return LatticeSum(k, p, n * vmin, delta * g, delta, n, 0.5 * n * delta, 0.5 * n / g)


def _power_sparse(keys, probs, n, atom_cap):
    k = keys.size
    # pair counts: repeated multiplication by the base vs the final squaring,
    # with supports bounded by the number of compositions
    sequential = k * math.comb(n + k - 1, k)
    squaring = math.comb(n // 2 + k - 1, k - 1) ** 2
    if sequential <= squaring:
        rk, rp = keys, probs
        for _ in range(n - 1):
            rk, rp = _conv_checked(rk, rp, keys, probs, atom_cap)
        return rk, rp
    rk, rp = np.zeros(1, dtype=np.int64), np.ones(1)
    bk, bp = keys, probs
    m = n
    while True:
        if m & 1:
            rk, rp = _conv_checked(rk, rp, bk, bp, atom_cap)
        m >>= 1
        if not m:
            return rk, rp
        bk, bp = _conv_checked(bk, bp, bk, bp, atom_cap)


def _conv_checked(ka, pa, kb, pb, atom_cap):
    if ka.size * kb.size > PAIR_BUDGET:
        raise SupportExplosionError(
            f"convolution of {ka.size} x {kb.size} atoms exceeds the pair budget; use a coarser delta"
        )
    k, p = lattice_convolve(ka, pa, kb, pb)
    if k.size > atom_cap:
        raise SupportExplosionError(f"sum support has {k.size} atoms, above the cap of {atom_cap}; use a coarser delta")
    return k, p


def _power_dense(keys, probs, n):
    base = np.zeros(int(keys.max()) + 1)
    np.add.at(base, keys, probs)
    res = np.ones(1)
    m = n
    while True:
        if m & 1:
            res = np.clip(convolve(res, base), 0.0, None)
        m >>= 1
        if not m:
            break
        base = np.clip(convolve(base, base), 0.0, None)
    res /= res.sum()
    idx = np.nonzero(res > 0)[0]
    return idx.astype(np.int64), res[idx]


def iid_sum_tail(
    v: ValueDistribution,
    n: int,
    threshold: float,
    direction: str = ">=",
    delta: float | None = None,
    atom_cap: int = ATOM_CAP,
    coarsen: bool = False,
) -> TailProbability:
    """P{ sum_{i=1}^n Z_i (direction) threshold } for Z_i i.i.d. ~ v."""
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {sorted(_DIRECTIONS)}")
    return sum_distribution(v, n, delta, atom_cap, coarsen).tail(threshold, direction)


# ---------------------------------------------------------------------------
# epsilon terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaChoice:
    gamma1: float
    gamma2: float
    gamma3: float

    def __post_init__(self):
        if min(self.gamma1, self.gamma2, self.gamma3) <= 0:
            raise ValueError("every gamma must be positive")

    @classmethod
    def default(cls, n: int) -> "GammaChoice":
        """(log n, log n / 2, log n), base 2; undefined at n = 1 where log n = 0."""
        if n < 2:
            raise ValueError("the default gammas vanish at n = 1; supply them explicitly")
        lg = math.log2(n)
        return cls(lg, lg / 2, lg)


@dataclass(frozen=True)
class BoundTerm:
    """tail + power, with the tail evaluated conservatively (upper)."""

    tail: float
    power: float
    slack: float

    @property
    def value(self) -> float:
        return self.tail + self.power


def _as_target(p) -> LabeledJoint:
    return p.joint() if isinstance(p, TargetFactors) else p


def _split_infinite(p_ab: LabeledJoint, values: np.ndarray, mask: np.ndarray):
    """Return the finite ValueDistribution and the mass at infinite values."""
    probs = p_ab.probs[mask]
    fin = np.isfinite(values)
    inf_mass = float(probs[~fin].sum())
    if not fin.any():
        return None, 1.0
    v = ValueDistribution.from_atoms(values[fin], probs[fin] / probs[fin].sum())
    return v, inf_mass


def approximation_increments(p_ab: LabeledJoint, a_axes: Sequence[str], t_b: LabeledJoint | None = None):
    """Law of h_P(a, b) - h_T(b) under P_AB (``t_b`` defaults to P_B).

    Returns (finite part, mass at -inf); -inf arises where T_B vanishes.
    """
    a_axes = list(a_axes)
    b_axes = [x for x in p_ab.names if x not in a_axes]
    if t_b is None:
        return information_distribution(p_ab, a_axes, b_axes), 0.0
    if set(t_b.names) != set(b_axes):
        raise ShapeError("t_b must live on the side-information axes")
    tb = np.broadcast_to(_arrange(t_b.probs, t_b.names, p_ab.names), p_ab.shape)
    mask = p_ab.probs > 0
    with np.errstate(divide="ignore"):
        vals = -np.log2(p_ab.probs[mask]) + np.log2(tb[mask])
    return _split_infinite(p_ab, vals, mask)


def _with_infinite(tail: float, inf_mass: float, n: int) -> float:
    # one infinite increment in the block puts the whole sum in the complement
    inf_part = 1.0 - (1.0 - inf_mass) ** n
    return min(1.0, inf_part + (1.0 - inf_part) * tail)


def decoding_increments(p_ab: LabeledJoint, a_axes: Sequence[str], t_ab: LabeledJoint | None = None):
    """Law of h_T(a|b) under P_AB; returns (finite part, mass at +inf)."""
    a_axes = list(a_axes)
    b_axes = [x for x in p_ab.names if x not in a_axes]
    t = p_ab if t_ab is None else t_ab
    if set(t.names) != set(p_ab.names):
        raise ShapeError("t_ab must live on the same axes as p_ab")
    if b_axes:
        k = condition(t, b_axes)
        cond = np.broadcast_to(_arrange(k.probs, k.in_names + k.out_names, p_ab.names), p_ab.shape)
    else:
        cond = np.broadcast_to(_arrange(t.probs, t.names, p_ab.names), p_ab.shape)
    mask = p_ab.probs > 0
    with np.errstate(divide="ignore"):
        vals = -np.log2(cond[mask])
    return _split_infinite(p_ab, vals, mask)


def eps_app_generic(
    p_ab: LabeledJoint,
    a_axes: Sequence[str],
    rate: float,
    gamma: float,
    n: int = 1,
    t_b: LabeledJoint | None = None,
    delta: float | None = None,
) -> BoundTerm:
    """P(S_gamma^c) + 2^{-(gamma+1)/2} with S_gamma = {sum h(a|b) - n rate > gamma}."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    power = 2.0 ** (-(gamma + 1) / 2)
    v, inf_mass = approximation_increments(p_ab, a_axes, t_b)
    if v is None:
        return BoundTerm(1.0, power, 0.0)
    tail = sum_distribution(v, n, delta, coarsen=True).tail(n * rate + gamma, "<=")
    return BoundTerm(_with_infinite(tail.upper, inf_mass, n), power, tail.slack)


def eps_dec_generic(
    p_ab: LabeledJoint,
    a_axes: Sequence[str],
    rate: float,
    gamma: float,
    n: int = 1,
    t_ab: LabeledJoint | None = None,
    delta: float | None = None,
) -> BoundTerm:
    """P(S_gamma^c) + 2^{-|gamma|} with S_gamma = {n rate - sum h_T(a|b) > gamma}."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    v, inf_mass = decoding_increments(p_ab, a_axes, t_ab)
    if v is None:
        return BoundTerm(1.0, 2.0 ** (-abs(gamma)), 0.0)
    tail = sum_distribution(v, n, delta, coarsen=True).tail(n * rate - gamma, ">=")
    return BoundTerm(_with_infinite(tail.upper, inf_mass, n), 2.0 ** (-abs(gamma)), tail.slack)


def eps_app(target, sum_rate: float, n: int, gamma1: float, delta: float | None = None) -> BoundTerm:
    """Binning (K, M) of W at rate R + R0 against side information U."""
    p = marginalize(_as_target(target), ["U", "W"])
    return eps_app_generic(p, ["W"], sum_rate, gamma1, n, delta=delta)


def eps_dec(target, sum_rate: float, n: int, gamma2: float, delta: float | None = None) -> BoundTerm:
    """Mismatch SLC decoding W from Y and the (K, M) bins."""
    p = marginalize(_as_target(target), ["W", "Y"])
    return eps_dec_generic(p, ["W"], sum_rate, gamma2, n, delta=delta)


def eps_app2(target, rate: float, n: int, gamma3: float, delta: float | None = None) -> BoundTerm:
    """Binning M of W at rate R against side information (U, X, Y, V). The
    random-binning marginal over (U,X,Y,V,W) is the i.i.d. target, so the
    increments are computed under the target."""
    return eps_app_generic(_as_target(target), ["W"], rate, gamma3, n, delta=delta)


def eps_tot(eps_app2_value: float, eps_app_value: float, eps_dec_value: float) -> float:
    for x in (eps_app2_value, eps_app_value, eps_dec_value):
        if x < 0:
            raise ValueError("epsilon components must be nonnegative")
    return 2.0 * (eps_app2_value + eps_app_value + 5.0 * eps_dec_value)


def eps_tot_theoretical(eps5: float, n: float) -> float:
    """10 eps5 + (10 + 2 sqrt 2) / sqrt n."""
    if eps5 < 0 or n < 1:
        raise ValueError("need eps5 >= 0 and n >= 1")
    return 10.0 * eps5 + (10.0 + 2.0 * math.sqrt(2.0)) / math.sqrt(n)


@dataclass
class EpsilonLedger:
    eps_app: float
    eps_dec: float
    eps_app2: float
    eps_tot: float
    eps2: float
    eps3: float
    eps4: float
    eps5: float
    notes: dict[str, str] = field(default_factory=dict)


def epsilon_ledger(
    target,
    n: int,
    R0: float,
    R: float,
    gammas: GammaChoice | None = None,
    eps1: float = 0.0,
    eps4: float | None = None,
    eps5: float | None = None,
) -> EpsilonLedger:
    p = _as_target(target)
    g = gammas or GammaChoice.default(n)
    a = eps_app(p, R + R0, n, g.gamma1)
    d = eps_dec(p, R + R0, n, g.gamma2)
    a2 = eps_app2(p, R, n, g.gamma3)
    e2, e3 = typicality_constants(p, eps1)
    e4, e5 = _eps45(dispersion(p), n, eps4, eps5)
    notes = {
        "eps_app": f"P(S1^c)={a.tail:.12g} (slack {a.slack:.3g} bits) + 2^-(g1+1)/2={a.power:.12g}, g1={g.gamma1:.6g}",
        "eps_dec": f"P(S2^c)={d.tail:.12g} (slack {d.slack:.3g} bits) + 2^-|g2|={d.power:.12g}, g2={g.gamma2:.6g}",
        "eps_app2": f"P(S3^c)={a2.tail:.12g} (slack {a2.slack:.3g} bits) + 2^-(g3+1)/2={a2.power:.12g}, g3={g.gamma3:.6g}",
        "eps2": "eps1 (H(UW) + H(U))",
        "eps3": "eps1 (H(UWXYV) + H(W))",
        "eps4": "eps5 + B_n / sqrt(n)",
    }
    return EpsilonLedger(a.value, d.value, a2.value, eps_tot(a2.value, a.value, d.value), e2, e3, e4, e5, notes)


def _eps45(disp: "Dispersion", n: float, eps4, eps5):
    be = 0.0 if disp.degenerate or math.isinf(n) else disp.B / math.sqrt(n)
    if eps4 is None and eps5 is None:
        return float("nan"), float("nan")
    if eps4 is None:
        return eps5 + be, eps5
    return eps4, eps4 - be


# ---------------------------------------------------------------------------
# dispersion, typicality constants, Berry-Esseen
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Dispersion:
    V: float
    T: float
    B: float
    mean: float
    degenerate: bool


def dispersion(p) -> Dispersion:
    """W-averaged variance (and third absolute central moment) of h(w|Y)
    with Y ~ P(.|w), for the scheme's own W distribution.

    Accepts a joint containing W and Y (other axes are summed out) or the
    factors of a target.
    """
    p = marginalize(_as_target(p), ["W", "Y"])
    mean = var = third = 0.0
    for _, mass, v in conditional_information_distributions(p, ["W"], ["Y"], ["W"]):
        st = tail_stats(v)
        mean += mass * st.mu_n
        var += mass * st.V_n
        third += mass * st.T_n
    if var <= 1e-300:
        return Dispersion(0.0, third, float("nan"), mean, True)
    return Dispersion(var, third, 6.0 * third / var**1.5, mean, False)


def minimum_dispersion(y_given_w, resolution: int = 50) -> tuple[float, np.ndarray]:
    """min over input laws P_W (simplex grid) of the averaged variance of
    i(W;Y) given W. Optional companion to ``dispersion``."""
    w = y_given_w.in_axis if hasattr(y_given_w, "in_axis") else y_given_w.in_axes[0]
    size = w.size
    best = (math.inf, None)
    for counts in _compositions(resolution, size):
        pw = np.asarray(counts, dtype=float) / resolution
        if np.count_nonzero(pw) == 0:
            continue
        pj = chain(joint([w], pw), y_given_w)
        d = dispersion(pj)
        if d.V < best[0]:
            best = (d.V, pw)
    return best


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def typicality_constants(p, eps1: float) -> tuple[float, float]:
    """(eps2, eps3) = eps1 (H(UW) + H(U)), eps1 (H(UWXYV) + H(W))."""
    if eps1 < 0:
        raise ValueError("eps1 must be nonnegative")
    p = _as_target(p)
    e2 = eps1 * (entropy(p, ["U", "W"]) + entropy(p, ["U"]))
    e3 = eps1 * (entropy(p, ["U", "W", "X", "Y", "V"]) + entropy(p, ["W"]))
    return e2, e3


@dataclass(frozen=True)
class BerryEsseenCheck:
    exact_tail: float
    normal_approx: float
    diff: float
    bound: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.diff <= self.bound


def berry_esseen_check(v: ValueDistribution, n: int, t: float, lattice: LatticeSum | None = None) -> BerryEsseenCheck:
    """Compare P{sum Z_i > n(mu + t sqrt(V/n))} with Q(t) and B/sqrt(n)."""
    st = tail_stats(v)
    if st.degenerate:
        raise DegenerateError("Berry-Esseen check needs a nondegenerate distribution")
    lat = lattice if lattice is not None else sum_distribution(v, n)
    thr = n * (st.mu_n + t * math.sqrt(st.V_n / n))
    tail = lat.tail(thr, ">")
    q = q_function(t)
    return BerryEsseenCheck(tail.prob, q, abs(tail.prob - q), st.B_n / math.sqrt(n), tail.slack)


# ---------------------------------------------------------------------------
# decomposition and rate regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Validation:
    valid: bool
    residual: float
    tol: float


def four_factor_target(p_u, x_given_u, y_given_x, v_given_uxy) -> LabeledJoint:
    """P_U P_{X|U} P_{Y|X} P_{V|UXY} as a joint over U, X, Y, V."""
    p = chain(p_u, x_given_u)
    p = chain(p, y_given_x)
    return chain(p, v_given_uxy)


def validate_decomposition(factors: TargetFactors, target: LabeledJoint | None = None, tol: float = 1e-9) -> Validation:
    """Check that the five-factor chain marginalises to the four-factor target.

    Without an explicit ``target`` the four-factor form is rebuilt from the
    chain's own U, X, Y, V marginal and the given channel, which checks that
    the channel acts on X alone.
    """
    observed = factors.observed()
    if target is None:
        p_u = marginalize(observed, ["U"])
        x_u = condition(marginalize(observed, ["U", "X"]), ["U"])
        v_uxy = condition(observed, ["U", "X", "Y"])
        target = four_factor_target(p_u, x_u, factors.y_given_x, v_uxy)
    if set(target.names) != set(OBSERVED_AXES):
        raise ShapeError(f"target must live on {OBSERVED_AXES}, got {target.names}")
    if target.axes != observed.axes:
        raise ShapeError(f"alphabet mismatch: {target.axes} vs {observed.axes}")
    r = l1_distance(observed, target)
    return Validation(r <= tol, r, tol)


@dataclass(frozen=True)
class AsymptoticCheck:
    info_constraint: bool
    R0_constraint: bool
    I_WU: float
    I_WY: float
    I_W_UXV_given_Y: float


def asymptotic_region_point(target, R0: float) -> AsymptoticCheck:
    p = _as_target(target)
    i_wu = mutual_information(p, ["W"], ["U"])
    i_wy = mutual_information(p, ["W"], ["Y"])
    i_r0 = conditional_mutual_information(p, ["W"], ["U", "X", "V"], ["Y"])
    tol = 1e-12
    return AsymptoticCheck(i_wu <= i_wy + tol, R0 >= i_r0 - tol, i_wu, i_wy, i_r0)


@dataclass
class RegionReport:
    n: float
    R: float
    R0: float
    I_WU: float
    I_WY: float
    I_W_UXV_given_Y: float
    H_W_given_Y: float
    H_W_given_U: float
    H_W_given_UXYV: float
    V_disp: float
    B_n: float
    eps1: float
    eps2: float
    eps3: float
    eps4: float
    eps5: float
    eps_app: float
    eps_dec: float
    eps_app2: float
    eps_tot: float
    gamma1: float
    gamma2: float
    gamma3: float
    qinv_term: float
    corr_finite_n: float
    corr_info: float
    corr_R0: float
    info_threshold: float
    info_constraint_satisfied: bool
    info_constraint_combined: bool
    R0_min: float
    R0_feasible: bool
    sum_rate_lower: float
    sum_rate_upper: float
    R_upper: float
    rate_window_nonempty: bool
    asymptotic_info: bool
    asymptotic_R0: bool
    degenerate_dispersion: bool
    notes: dict[str, str] = field(default_factory=dict)


def rate_region_point(
    target,
    n: float,
    eps1: float,
    eps4: float | None = None,
    R0: float | None = None,
    R: float = 0.0,
    eps5: float | None = None,
    gammas: GammaChoice | None = None,
    with_ledger: bool = True,
) -> RegionReport:
    """Evaluate the finite-n rate conditions with every term itemised.

    Supply ``eps4`` or ``eps5`` (eps4 = eps5 + B_n / sqrt n). ``n`` may be
    ``math.inf`` for the limit where every n-dependent term vanishes.
    """
    p = _as_target(target)
    if eps4 is None and eps5 is None:
        raise ValueError("supply eps4 or eps5")
    if eps1 < 0:
        raise ValueError("eps1 must be nonnegative")
    disp = dispersion(p)
    e4, e5 = _eps45(disp, n, eps4, eps5)
    notes: dict[str, str] = {}
    if not 0.0 < e4 < 1.0:
        raise ValueError(f"eps4 must lie in (0, 1), got {e4}")
    if e5 < 0:
        notes["eps5"] = "negative: B_n/sqrt(n) exceeds eps4, the Berry-Esseen step gives no guarantee"
    e2, e3 = typicality_constants(p, eps1)
    i_wu = mutual_information(p, ["W"], ["U"])
    i_wy = mutual_information(p, ["W"], ["Y"])
    i_r0 = conditional_mutual_information(p, ["W"], ["U", "X", "V"], ["Y"])
    h_wy = conditional_entropy(p, ["W"], ["Y"])
    h_wu = conditional_entropy(p, ["W"], ["U"])
    h_wall = conditional_entropy(p, ["W"], ["U", "X", "Y", "V"])

    finite = not math.isinf(n)
    if disp.degenerate:
        qterm = 0.0
        notes["dispersion"] = "zero dispersion: Q^-1 term dropped"
    else:
        qterm = q_inverse(e4) * math.sqrt(disp.V / n) if finite else 0.0
    log_term = 1.5 * math.log2(n) / n if finite else 0.0
    corr = log_term + qterm
    corr_info, corr_r0 = e2 + corr, e3 + corr
    info_thr = i_wy + corr_info
    r0_min = i_r0 + corr_r0

    if gammas is None and finite:
        gammas = GammaChoice.default(int(n)) if n >= 2 else None
    if gammas is not None:
        g1, g2, g3 = gammas.gamma1, gammas.gamma2, gammas.gamma3
        lower = h_wy + qterm + (g2 / n if finite else 0.0)
        upper = h_wu - e2 - (g1 / n if finite else 0.0)
        r_up = h_wall - e3 - (g3 / n if finite else 0.0)
    else:
        g1 = g2 = g3 = float("nan")
        lower, upper, r_up = h_wy + qterm, h_wu - e2, h_wall - e3
    r0_eval = r0_min if R0 is None else R0

    led = None
    if with_ledger and finite and gammas is not None:
        led = epsilon_ledger(p, int(n), r0_eval, R, gammas, eps1, eps4=e4)
        notes.update({f"ledger.{k}": v for k, v in led.notes.items()})

    asym = asymptotic_region_point(p, r0_eval)
    nan = float("nan")
    return RegionReport(
        n=n,
        R=R,
        R0=r0_eval,
        I_WU=i_wu,
        I_WY=i_wy,
        I_W_UXV_given_Y=i_r0,
        H_W_given_Y=h_wy,
        H_W_given_U=h_wu,
        H_W_given_UXYV=h_wall,
        V_disp=disp.V,
        B_n=disp.B,
        eps1=eps1,
        eps2=e2,
        eps3=e3,
        eps4=e4,
        eps5=e5,
        eps_app=led.eps_app if led else nan,
        eps_dec=led.eps_dec if led else nan,
        eps_app2=led.eps_app2 if led else nan,
        eps_tot=led.eps_tot if led else nan,
        gamma1=g1,
        gamma2=g2,
        gamma3=g3,
        qinv_term=qterm,
        corr_finite_n=corr,
        corr_info=corr_info,
        corr_R0=corr_r0,
        info_threshold=info_thr,
        info_constraint_satisfied=i_wu < info_thr if finite else i_wu <= info_thr,
        info_constraint_combined=(i_wu < i_wy - corr_info) if finite else (i_wu <= i_wy - corr_info),
        R0_min=r0_min,
        R0_feasible=(r0_eval > r0_min) if finite else (r0_eval >= r0_min),
        sum_rate_lower=lower,
        sum_rate_upper=upper,
        R_upper=r_up,
        rate_window_nonempty=lower < upper,
        asymptotic_info=asym.info_constraint,
        asymptotic_R0=asym.R0_constraint,
        degenerate_dispersion=disp.degenerate,
        notes=notes,
    )


def region_sweep(
    target,
    n_list: Iterable[float],
    eps1_list: Iterable[float] = (0.01,),
    eps4_list: Iterable[float] = (0.05,),
    R0: float | None = None,
    R: float = 0.0,
    with_ledger: bool = True,
) -> list[RegionReport]:
    """One report per (n, eps1, eps4) grid point, in grid order."""
    rows = []
    for e1 in eps1_list:
        for e4 in eps4_list:
            for n in n_list:
                rows.append(rate_region_point(target, n, e1, e4, R0=R0, R=R, with_ledger=with_ledger))
    return rows


def sweep_monotonicity(reports: Sequence[RegionReport]) -> dict[str, bool]:
    """Within each (eps1, eps4) group ordered by n: the n-dependent correction
    strictly decreases; across eps4 at fixed n the Q^-1 term never grows."""
    groups: dict[tuple, list[RegionReport]] = {}
    for r in reports:
        groups.setdefault((r.eps1, r.eps4), []).append(r)
    dec_n = all(
        all(a.corr_finite_n > b.corr_finite_n for a, b in zip(g, g[1:]))
        for g in (sorted(v, key=lambda r: r.n) for v in groups.values())
    )
    by_n: dict[tuple, list[RegionReport]] = {}
    for r in reports:
        by_n.setdefault((r.n, r.eps1), []).append(r)
    q_ok = all(
        all(a.qinv_term >= b.qinv_term - 1e-15 for a, b in zip(g, g[1:]))
        for g in (sorted(v, key=lambda r: r.eps4) for v in by_n.values())
    )
    return {"correction_decreasing_in_n": dec_n, "qinv_nonincreasing_in_eps4": q_ok}


REGION_COLUMNS = (
    "n", "R", "R0", "I_WU", "I_WY", "I_WUXV_Y", "V_disp", "B_n",
    "eps1", "eps2", "eps3", "eps4", "eps5",
    "eps_app", "eps_dec", "eps_app2", "eps_tot",
    "corr_info", "corr_R0", "feasible_info", "R0_min",
)


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.12g}"


def region_row(r: RegionReport) -> list[str]:
    vals = (
        r.n, r.R, r.R0, r.I_WU, r.I_WY, r.I_W_UXV_given_Y, r.V_disp, r.B_n,
        r.eps1, r.eps2, r.eps3, r.eps4, r.eps5,
        r.eps_app, r.eps_dec, r.eps_app2, r.eps_tot,
        r.corr_info, r.corr_R0, r.info_constraint_satisfied, r.R0_min,
    )
    return [fmt(v) for v in vals]


def region_csv(reports: Sequence[RegionReport], header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REGION_COLUMNS)
    for r in reports:
        w.writerow(region_row(r))
    return buf.getvalue()


def report_dict(r: RegionReport) -> dict:
    return asdict(r)
