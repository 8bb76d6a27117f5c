"""Fixed-length scheme: n-fold product of the one-shot schemes, exact induced
joints at tiny n, Monte Carlo episodes, and the choice of the shared
extra-randomness instance F = f."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .binning import OneShotScheme
from .dist import (
    DEFAULT_CELL_CAP,
    ChannelKernel,
    LabeledJoint,
    ResourceCapError,
    ShapeError,
    as_rng,
    check_cells,
    condition,
    l1_distance,
    marginalize,
    product_of,
    product_power,
    rename,
)
from .factors import OBSERVED_AXES, TARGET_AXES
from .kernels import categorical_draw

ENUMERATION_CAP = 4096
EPISODE_FIELDS = ("u", "w", "x", "y", "w_hat", "v", "k", "m")
_AXIS_OF = {"u": "U", "w": "W", "x": "X", "y": "Y", "w_hat": "W_hat", "v": "V", "k": "K", "m": "M"}


@dataclass(frozen=True, eq=False)
class FixedLengthScheme:
    """n uses of one one-shot scheme; the binning pair is shared by all
    symbols, so C = K^n and F = M^n are per-symbol index vectors."""

    one_shot: OneShotScheme
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("blocklength must be positive")

    @property
    def m_bins(self) -> int:
        return self.one_shot.binning.count2

    @property
    def k_bins(self) -> int:
        return self.one_shot.binning.count1


@dataclass(frozen=True, eq=False)
class Episode:
    u: np.ndarray
    w: np.ndarray
    x: np.ndarray
    y: np.ndarray
    w_hat: np.ndarray
    v: np.ndarray
    k: np.ndarray
    m: np.ndarray

    @property
    def decode_error_count(self) -> int:
        return int(np.count_nonzero(self.w_hat != self.w))

    def rows(self):
        for i in range(self.u.size):
            yield i, tuple(int(getattr(self, f)[i]) for f in EPISODE_FIELDS)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

class _Sampler:
    """Ancestral sampler over the one-shot random-coding chain."""

    def __init__(self, scheme: OneShotScheme):
        f = scheme.factors
        self.steps: list[tuple[str, ChannelKernel]] = [
            ("U", _as_kernel(f.p_u)),
            ("W", scheme.encoder_posterior),
            ("X", f.x_given_uw),
            ("Y", f.y_given_x),
            ("W_hat", scheme.slc),
            ("V", rename(f.v_given_wy, {"W": "W_hat"})),
        ]
        self.tables = []
        for _, k in self.steps:
            rows = int(np.prod([a.size for a in k.in_axes], dtype=np.int64))
            cdf = np.cumsum(k.probs.reshape(rows, -1), axis=1)
            self.tables.append(cdf)
        self.k_bins = scheme.binning.count1
        self.m_bins = scheme.binning.count2

    def draw(self, rng: np.random.Generator, shape, m_fixed=None) -> dict[str, np.ndarray]:
        size = int(np.prod(shape))
        vals: dict[str, np.ndarray] = {}
        vals["K"] = rng.integers(self.k_bins, size=size)
        if m_fixed is None:
            vals["M"] = rng.integers(self.m_bins, size=size)
        else:
            vals["M"] = np.broadcast_to(np.asarray(m_fixed, dtype=np.int64), shape).reshape(size).copy()
        for (name, k), cdf in zip(self.steps, self.tables):
            if k.in_axes:
                row = np.ravel_multi_index(tuple(vals[a.name] for a in k.in_axes), tuple(a.size for a in k.in_axes))
            else:
                row = np.zeros(size, dtype=np.int64)
            vals[name] = categorical_draw(cdf, row, rng.random(size))
        return {name: v.reshape(shape) for name, v in vals.items()}


def _as_kernel(p: LabeledJoint) -> ChannelKernel:
    return ChannelKernel((), p.axes, p.probs)


def simulate_episode(scheme: FixedLengthScheme, rng, f=None) -> Episode:
    """One block of n symbols of the random-coding scheme. ``f`` pins the
    extra randomness M^n; otherwise it is drawn uniformly like K^n."""
    rng = as_rng(rng)
    d = _Sampler(scheme.one_shot).draw(rng, (scheme.n,), f)
    return Episode(**{fld: d[_AXIS_OF[fld]] for fld in EPISODE_FIELDS})


def simulate_episodes(scheme: FixedLengthScheme, count: int, rng, f=None) -> dict[str, np.ndarray]:
    """``count`` independent blocks; arrays of shape (count, n) keyed by axis."""
    rng = as_rng(rng)
    return _Sampler(scheme.one_shot).draw(rng, (count, scheme.n), f)


# ---------------------------------------------------------------------------
# exact induced distributions
# ---------------------------------------------------------------------------

def _rc_observed_given_m(os: OneShotScheme) -> list[LabeledJoint]:
    k = condition(marginalize(os.rc_joint, OBSERVED_AXES + ("M",)), ["M"])
    return [k.slice((m,)) for m in range(os.binning.count2)]


def _rb_observed_given_m(os: OneShotScheme) -> list[LabeledJoint | None]:
    """P^RB_{UXYV | M=m}; ``None`` where the bin is empty under P^RB."""
    sub = marginalize(os.rb_joint, OBSERVED_AXES + ("M",))
    k = condition(sub, ["M"])
    return [None if k.filled[m] else k.slice((m,)) for m in range(os.binning.count2)]


def exact_induced(scheme: FixedLengthScheme, f=None, cap: int = DEFAULT_CELL_CAP) -> LabeledJoint:
    """P^RC over (U, X, Y, V)^n, optionally conditioned on F = f."""
    os = scheme.one_shot
    if f is None:
        return product_power(marginalize(os.rc_joint, OBSERVED_AXES), scheme.n, cap)
    f = _check_f(scheme, f)
    per_m = _rc_observed_given_m(os)
    return product_of([per_m[m] for m in f], cap)


def exact_rb_given_f(scheme: FixedLengthScheme, f, cap: int = DEFAULT_CELL_CAP) -> LabeledJoint | None:
    f = _check_f(scheme, f)
    per_m = _rb_observed_given_m(scheme.one_shot)
    if any(per_m[m] is None for m in f):
        return None
    return product_of([per_m[m] for m in f], cap)


def _check_f(scheme: FixedLengthScheme, f) -> tuple[int, ...]:
    f = tuple(int(m) for m in f)
    if len(f) != scheme.n:
        raise ShapeError(f"f has length {len(f)}, blocklength is {scheme.n}")
    if any(m < 0 or m >= scheme.m_bins for m in f):
        raise ValueError(f"f entries must lie in [0, {scheme.m_bins})")
    return f


def target_product(scheme: FixedLengthScheme, cap: int = DEFAULT_CELL_CAP) -> LabeledJoint:
    return product_power(scheme.one_shot.factors.observed(), scheme.n, cap)


def l1_to_target(scheme: FixedLengthScheme, induced: LabeledJoint, n: int | None = None) -> float:
    n = scheme.n if n is None else n
    ref = product_power(scheme.one_shot.factors.observed(), n)
    return l1_distance(induced, ref)


def rb_marginal_gap(scheme: FixedLengthScheme, cap: int = DEFAULT_CELL_CAP) -> float:
    """L1 between the P^RB marginal over (U,W,X,Y,V)^n and the i.i.d. target."""
    os = scheme.one_shot
    rb = marginalize(os.rb_joint, TARGET_AXES)
    return l1_distance(product_power(rb, scheme.n, cap), product_power(os.target, scheme.n, cap))


def first_bound_distances(scheme: FixedLengthScheme, cap: int = DEFAULT_CELL_CAP) -> dict[str, float]:
    """Exact ||P^RB - P^RC||_1 on the tuple without V and on the full tuple."""
    os = scheme.one_shot
    no_v = [a for a in os.rb_joint.names if a != "V"]
    rb_nv = product_power(marginalize(os.rb_joint, no_v), scheme.n, cap)
    rc_nv = product_power(marginalize(os.rc_joint, no_v), scheme.n, cap)
    out = {"without_v": l1_distance(rb_nv, rc_nv)}
    rb = product_power(os.rb_joint, scheme.n, cap)
    rc = product_power(os.rc_joint, scheme.n, cap)
    out["full"] = l1_distance(rb, rc)
    return out


def decode_error_probability(scheme: FixedLengthScheme) -> float:
    """Per-symbol P[W_hat != W] under the random-coding joint."""
    rc = marginalize(scheme.one_shot.rc_joint, ["W", "W_hat"])
    return float(max(0.0, 1.0 - np.trace(rc.probs)))


def telescoping_bound(per_symbol_distances) -> float:
    """Sum of per-symbol L1 distances: an upper bound on the L1 distance
    between the two products."""
    d = np.asarray(list(per_symbol_distances), dtype=float)
    if np.any(d < 0) or np.any(d > 2 + 1e-12):
        raise ValueError("per-symbol L1 distances must lie in [0, 2]")
    return float(d.sum())


# ---------------------------------------------------------------------------
# choosing F = f
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FChoice:
    f: tuple[int, ...]
    value: float
    exact: bool
    strategy: str
    reference: str


def _per_symbol_refs(scheme: FixedLengthScheme, reference: str) -> list[LabeledJoint | None]:
    os = scheme.one_shot
    if reference == "target":
        return [os.factors.observed()] * scheme.m_bins
    if reference == "rb":
        return _rb_observed_given_m(os)
    raise ValueError("reference must be 'target' or 'rb'")


def select_f(
    scheme: FixedLengthScheme,
    strategy: str = "exhaustive",
    reference: str = "target",
    k: int = 32,
    rng=None,
    cap: int = ENUMERATION_CAP,
) -> FChoice:
    """Pick the extra-randomness instance f.

    ``exhaustive`` returns the exact minimiser of the L1 distance between
    P^RC_{.|F=f} and the reference (the i.i.d. target, or P^RB_{.|F=f});
    ``greedy`` and ``sampled`` return the telescoping upper bound of their
    choice. Instances where P^RB_{.|F=f} is undefined are skipped.
    """
    n, bins = scheme.n, scheme.m_bins
    rc = _rc_observed_given_m(scheme.one_shot)
    refs = _per_symbol_refs(scheme, reference)
    usable = [m for m in range(bins) if refs[m] is not None]
    if not usable:
        raise ValueError("no extra-randomness bin has positive probability under the reference")
    per_symbol = {m: l1_distance(rc[m], refs[m]) for m in usable}

    if strategy == "exhaustive":
        # L1 between products is invariant under permuting the factors, so
        # multisets suffice; the count of candidates is still capped.
        if math.comb(len(usable) + n - 1, n) > cap:
            raise ResourceCapError(
                f"exhaustive search over {len(usable)} bins at n={n} exceeds the cap of {cap} candidates"
            )
        check_cells(rc[0].probs.size ** n, DEFAULT_CELL_CAP, "exhaustive f evaluation")
        best = None
        for combo in itertools.combinations_with_replacement(usable, n):
            d = l1_distance(product_of([rc[m] for m in combo]), product_of([refs[m] for m in combo]))
            if best is None or d < best[1] - 1e-15:
                best = (combo, d)
        return FChoice(tuple(best[0]), best[1], True, strategy, reference)

    if strategy == "greedy":
        m_star = min(usable, key=lambda m: (per_symbol[m], m))
        f = (m_star,) * n
        return FChoice(f, telescoping_bound([per_symbol[m_star]] * n), False, strategy, reference)

    if strategy == "sampled":
        rng = as_rng(rng)
        best = None
        for _ in range(k):
            f = tuple(int(m) for m in rng.choice(usable, size=n))
            b = telescoping_bound(per_symbol[m] for m in f)
            if best is None or b < best[1]:
                best = (f, b)
        return FChoice(best[0], best[1], False, strategy, reference)

    raise ValueError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# empirical L1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalL1:
    estimate: float
    stderr: float
    num_samples: int


def empirical_l1(scheme: FixedLengthScheme, f, num_samples: int, rng, bootstrap: int = 100) -> EmpiricalL1:
    """Plug-in L1 between the empirical law of (U,X,Y,V)^n over simulated
    blocks and the exact i.i.d. target, with a bootstrap standard error."""
    rng = as_rng(rng)
    target = target_product(scheme)
    one = scheme.one_shot.factors.observed()
    if one.probs.size > 4096:
        raise ResourceCapError(f"one-symbol state space {one.probs.size} exceeds 4096")
    if scheme.n * math.log2(one.probs.size) > 20 + 1e-9:
        raise ResourceCapError("n * log2(states) exceeds 20 bits; empirical pmf is not estimable")
    draws = simulate_episodes(scheme, num_samples, rng, f)
    coords = []
    for axis in target.axes:
        base, idx = axis.name.rsplit("_", 1)
        coords.append(draws[base][:, int(idx) - 1])
    cells = np.ravel_multi_index(tuple(coords), target.shape)
    counts = np.bincount(cells, minlength=target.probs.size)
    ref = target.probs.ravel()
    est = float(np.abs(counts / num_samples - ref).sum())
    boots = rng.multinomial(num_samples, counts / num_samples, size=bootstrap)
    l1s = np.abs(boots / num_samples - ref[None, :]).sum(axis=1)
    return EmpiricalL1(est, float(l1s.std(ddof=1)) if bootstrap > 1 else 0.0, num_samples)
