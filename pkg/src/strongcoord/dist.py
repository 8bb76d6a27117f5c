"""Exact finite probability engine over small labelled product alphabets.

Every pmf is a dense float64 array whose axes carry names. Axes are kept in a
canonical order (sorted by name, with ``_<int>`` suffixes compared
numerically) so two joints over the same variables always have the same
array layout and can be compared cell by cell.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

NORM_TOL = 1e-12
DEFAULT_CELL_CAP = 10**7

_SUFFIX = re.compile(r"^(.*)_(\d+)$")


class ShapeError(ValueError):
    """Operands live on incompatible axes."""


class ResourceCapError(RuntimeError):
    """A dense representation would exceed the configured cell cap."""


def axis_key(name: str) -> tuple[str, int]:
    m = _SUFFIX.match(name)
    if m:
        return (m.group(1), int(m.group(2)))
    return (name, -1)


@dataclass(frozen=True)
class Alphabet:
    name: str
    size: int

    def __post_init__(self):
        if int(self.size) < 1:
            raise ValueError(f"alphabet {self.name!r} needs size >= 1, got {self.size}")


def as_alphabets(axes) -> tuple[Alphabet, ...]:
    if isinstance(axes, Mapping):
        out = [Alphabet(k, int(v)) for k, v in axes.items()]
    else:
        out = [a if isinstance(a, Alphabet) else Alphabet(a[0], int(a[1])) for a in axes]
    names = [a.name for a in out]
    if len(set(names)) != len(names):
        raise ShapeError(f"duplicate axis names in {names}")
    return tuple(out)


def _canonical(axes: tuple[Alphabet, ...]) -> list[int]:
    return sorted(range(len(axes)), key=lambda i: axis_key(axes[i].name))


def _check_norm(total: float, size: int) -> None:
    tol = max(NORM_TOL, 4e-16 * size)
    if abs(total - 1.0) > tol:
        raise ValueError(f"pmf sums to {total!r}, off by more than {tol:g}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabeledJoint:
    """Dense pmf over a product of named finite alphabets."""

    axes: tuple[Alphabet, ...]
    probs: np.ndarray

    def __post_init__(self):
        axes = as_alphabets(self.axes)
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != tuple(a.size for a in axes):
            raise ShapeError(
                f"array shape {probs.shape} does not match axes "
                f"{[(a.name, a.size) for a in axes]}"
            )
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("pmf entries must be finite and nonnegative")
        _check_norm(float(probs.sum()), probs.size)
        order = _canonical(axes)
        object.__setattr__(self, "axes", tuple(axes[i] for i in order))
        object.__setattr__(self, "probs", _frozen(np.transpose(probs, order)))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.probs.shape

    def size_of(self, name: str) -> int:
        return self.axes[self.names.index(name)].size

    def prob(self, symbols) -> float:
        return float(self.probs[_index_tuple(self.names, symbols)])

    def __repr__(self) -> str:
        spec = ", ".join(f"{a.name}:{a.size}" for a in self.axes)
        return f"LabeledJoint({spec})"


@dataclass(frozen=True, eq=False)
class ChannelKernel:
    """Conditional pmf P(out | in).

    ``probs`` is laid out as ``in_axes + out_axes``. ``filled`` marks input
    configurations whose conditional was undefined (zero mass) and was
    replaced by the uniform distribution.
    """

    in_axes: tuple[Alphabet, ...]
    out_axes: tuple[Alphabet, ...]
    probs: np.ndarray
    filled: np.ndarray | None = field(default=None)

    def __post_init__(self):
        ins = as_alphabets(self.in_axes)
        outs = as_alphabets(self.out_axes)
        if not outs:
            raise ShapeError("kernel needs at least one output axis")
        if {a.name for a in ins} & {a.name for a in outs}:
            raise ShapeError("kernel input and output axes overlap")
        probs = np.asarray(self.probs, dtype=np.float64)
        want = tuple(a.size for a in ins + outs)
        if probs.shape != want:
            raise ShapeError(f"kernel array shape {probs.shape}, expected {want}")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("kernel entries must be finite and nonnegative")
        out_dims = tuple(range(len(ins), len(ins) + len(outs)))
        sums = probs.sum(axis=out_dims)
        bad = np.abs(sums - 1.0) > max(NORM_TOL, 4e-16 * np.prod([a.size for a in outs]))
        if np.any(bad):
            idx = tuple(int(i) for i in np.argwhere(np.atleast_1d(bad))[0])
            raise ValueError(f"kernel row {idx} sums to {np.atleast_1d(sums)[idx]!r}")
        io, oo = _canonical(ins), _canonical(outs)
        perm = io + [len(ins) + j for j in oo]
        filled = self.filled
        if filled is None:
            filled = np.zeros(tuple(a.size for a in ins), dtype=bool)
        else:
            filled = np.transpose(np.asarray(filled, dtype=bool), io)
        filled.setflags(write=False)
        object.__setattr__(self, "in_axes", tuple(ins[i] for i in io))
        object.__setattr__(self, "out_axes", tuple(outs[j] for j in oo))
        object.__setattr__(self, "probs", _frozen(np.transpose(probs, perm)))
        object.__setattr__(self, "filled", filled)

    @property
    def in_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.in_axes)

    @property
    def out_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.out_axes)

    @property
    def out_axis(self) -> Alphabet:
        if len(self.out_axes) != 1:
            raise ShapeError(f"kernel has {len(self.out_axes)} output axes")
        return self.out_axes[0]

    @property
    def any_filled(self) -> bool:
        return bool(self.filled.any())

    def slice(self, given) -> LabeledJoint:
        """Conditional pmf of the outputs for one input configuration."""
        idx = _index_tuple(self.in_names, given)
        return LabeledJoint(self.out_axes, self.probs[idx])

    def __repr__(self) -> str:
        ins = ",".join(self.in_names)
        outs = ",".join(self.out_names)
        return f"ChannelKernel({outs}|{ins})"


def _index_tuple(names: Sequence[str], symbols) -> tuple[int, ...]:
    if isinstance(symbols, Mapping):
        missing = set(names) - set(symbols)
        if missing:
            raise ShapeError(f"missing symbols for axes {sorted(missing)}")
        return tuple(int(symbols[n]) for n in names)
    if np.isscalar(symbols):
        symbols = (symbols,)
    symbols = tuple(int(s) for s in symbols)
    if len(symbols) != len(names):
        raise ShapeError(f"expected {len(names)} symbols for axes {list(names)}, got {len(symbols)}")
    return symbols


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------

def joint(axes, probs, normalize: bool = False) -> LabeledJoint:
    """Build a joint; ``normalize`` rescales once at construction."""
    probs = np.asarray(probs, dtype=np.float64)
    if normalize:
        probs = probs / probs.sum()
    return LabeledJoint(as_alphabets(axes), probs)


def uniform(axes) -> LabeledJoint:
    axes = as_alphabets(axes)
    shape = tuple(a.size for a in axes)
    return LabeledJoint(axes, np.full(shape, 1.0 / int(np.prod(shape))))


def point_mass(axes, symbols) -> LabeledJoint:
    axes = as_alphabets(axes)
    probs = np.zeros(tuple(a.size for a in axes))
    probs[_index_tuple([a.name for a in axes], symbols)] = 1.0
    return LabeledJoint(axes, probs)


def kernel(in_axes, out_axes, probs, normalize: bool = False) -> ChannelKernel:
    ins, outs = as_alphabets(in_axes), as_alphabets(out_axes)
    probs = np.asarray(probs, dtype=np.float64)
    if normalize:
        dims = tuple(range(len(ins), probs.ndim))
        probs = probs / probs.sum(axis=dims, keepdims=True)
    return ChannelKernel(ins, outs, probs)


def deterministic_kernel(in_axes, out_axis, table) -> ChannelKernel:
    """Kernel putting all mass on ``table[in_config]``."""
    ins = as_alphabets(in_axes)
    (out,) = as_alphabets([out_axis])
    table = np.asarray(table, dtype=np.int64).reshape(tuple(a.size for a in ins))
    probs = np.zeros(table.shape + (out.size,))
    np.put_along_axis(probs, table[..., None], 1.0, axis=-1)
    return ChannelKernel(ins, (out,), probs)


def identity_kernel(in_axis, out_name: str) -> ChannelKernel:
    (a,) = as_alphabets([in_axis])
    return deterministic_kernel([a], Alphabet(out_name, a.size), np.arange(a.size))


def constant_kernel(dist: LabeledJoint) -> ChannelKernel:
    """Kernel with no inputs; chaining it is an independent product."""
    return ChannelKernel((), dist.axes, dist.probs)


def bsc(p: float, in_name: str, out_name: str) -> ChannelKernel:
    return kernel([(in_name, 2)], [(out_name, 2)], [[1 - p, p], [p, 1 - p]])


def rename(obj, mapping: Mapping[str, str]):
    """Rename axes of a joint or kernel."""
    def ren(axes):
        return tuple(Alphabet(mapping.get(a.name, a.name), a.size) for a in axes)

    if isinstance(obj, LabeledJoint):
        return LabeledJoint(ren(obj.axes), obj.probs)
    return ChannelKernel(ren(obj.in_axes), ren(obj.out_axes), obj.probs, obj.filled)


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------

def _require_same_axes(p: LabeledJoint, q: LabeledJoint) -> None:
    if p.axes != q.axes:
        raise ShapeError(f"axis mismatch: {p.axes} vs {q.axes}")


def l1_distance(p: LabeledJoint, q: LabeledJoint) -> float:
    _require_same_axes(p, q)
    return float(np.abs(p.probs - q.probs).sum())


def kl_divergence(p: LabeledJoint, q: LabeledJoint) -> float:
    """D(p||q) in bits; ``inf`` when p is not absolutely continuous w.r.t. q."""
    _require_same_axes(p, q)
    mask = p.probs > 0
    if np.any(q.probs[mask] == 0):
        return float("inf")
    pp, qq = p.probs[mask], q.probs[mask]
    return max(0.0, float(np.sum(pp * (np.log2(pp) - np.log2(qq)))))


def _check_names(have: Sequence[str], want: Iterable[str]) -> list[str]:
    want = list(want)
    unknown = [w for w in want if w not in have]
    if unknown:
        raise ShapeError(f"unknown axes {unknown}; available {list(have)}")
    return want


def marginalize(p: LabeledJoint, keep: Iterable[str]) -> LabeledJoint:
    keep = set(_check_names(p.names, keep))
    drop = tuple(i for i, n in enumerate(p.names) if n not in keep)
    axes = tuple(a for a in p.axes if a.name in keep)
    return LabeledJoint(axes, p.probs.sum(axis=drop))


def _arrange(arr: np.ndarray, names: Sequence[str], target: Sequence[str]) -> np.ndarray:
    """Permute ``arr`` (axes ``names``) into ``target`` order, inserting
    singleton dimensions for target axes it lacks."""
    present = [t for t in target if t in names]
    arr = np.transpose(arr, [list(names).index(t) for t in present])
    shape = []
    it = iter(arr.shape)
    for t in target:
        shape.append(next(it) if t in names else 1)
    return arr.reshape(shape)


def condition(p: LabeledJoint, given: Iterable[str]) -> ChannelKernel:
    """Kernel P(rest | given); zero-mass conditioning slices become uniform
    and are recorded in ``filled``."""
    given = _check_names(p.names, given)
    rest = [n for n in p.names if n not in given]
    if not rest:
        raise ShapeError("conditioning on every axis leaves nothing to describe")
    g_axes = tuple(a for a in p.axes if a.name in given)
    r_axes = tuple(a for a in p.axes if a.name not in given)
    g_names = [a.name for a in g_axes]
    r_names = [a.name for a in r_axes]
    arr = _arrange(p.probs, p.names, g_names + r_names)
    r_dims = tuple(range(len(g_axes), arr.ndim))
    mass = arr.sum(axis=r_dims, keepdims=True)
    empty = mass == 0
    r_cells = int(np.prod([a.size for a in r_axes]))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(empty, 1.0 / r_cells, arr / np.where(empty, 1.0, mass))
    filled = empty.reshape(tuple(a.size for a in g_axes))
    return ChannelKernel(g_axes, r_axes, out, filled)


def chain(p: LabeledJoint, k: ChannelKernel) -> LabeledJoint:
    """Joint P(x) K(y | x) over the union of axes."""
    _check_names(p.names, k.in_names)
    clash = [n for n in k.out_names if n in p.names]
    if clash:
        raise ShapeError(f"kernel output axes {clash} already present")
    for a in k.in_axes:
        if p.size_of(a.name) != a.size:
            raise ShapeError(f"axis {a.name} size {p.size_of(a.name)} vs kernel {a.size}")
    axes = p.axes + k.out_axes
    target = [a.name for a in axes]
    arr = _arrange(p.probs, p.names, target) * _arrange(k.probs, k.in_names + k.out_names, target)
    return LabeledJoint(axes, arr)


def product(*dists: LabeledJoint) -> LabeledJoint:
    out = dists[0]
    for d in dists[1:]:
        out = chain(out, constant_kernel(d))
    return out


def check_cells(count: int, cap: int = DEFAULT_CELL_CAP, what: str = "joint") -> None:
    if count > cap:
        raise ResourceCapError(f"{what} needs {count} cells, above the cap of {cap}")


def indexed(p: LabeledJoint, i: int) -> LabeledJoint:
    """Copy of ``p`` with every axis renamed ``name_i``."""
    return rename(p, {n: f"{n}_{i}" for n in p.names})


def product_of(dists: Sequence[LabeledJoint], cap: int = DEFAULT_CELL_CAP) -> LabeledJoint:
    """Independent product of per-symbol joints, axis ``name`` of the i-th
    factor becoming ``name_{i+1}``."""
    check_cells(int(np.prod([d.probs.size for d in dists], dtype=object)), cap)
    arr = np.ones(())
    axes: list[Alphabet] = []
    for i, d in enumerate(dists, start=1):
        arr = np.multiply.outer(arr, d.probs)
        axes.extend(Alphabet(f"{a.name}_{i}", a.size) for a in d.axes)
    return LabeledJoint(tuple(axes), arr)


def product_power(p: LabeledJoint, n: int, cap: int = DEFAULT_CELL_CAP) -> LabeledJoint:
    """i.i.d. n-fold product; axis ``A`` becomes ``A_1 .. A_n``."""
    if n < 1:
        raise ValueError("n must be positive")
    check_cells(p.probs.size ** n, cap, f"{n}-fold product")
    return product_of([p] * n, cap)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_many(p: LabeledJoint | ChannelKernel, size: int, rng, given=None) -> np.ndarray:
    """Inverse-CDF draws; rows are symbol tuples in canonical axis order."""
    from .kernels import categorical_draw

    if isinstance(p, ChannelKernel):
        p = p.slice(given)
    rng = as_rng(rng)
    flat = p.probs.ravel()
    cdf = np.cumsum(flat)[None, :]
    u = rng.random(size)
    cells = categorical_draw(cdf, np.zeros(size, dtype=np.int64), u)
    return np.stack(np.unravel_index(cells, p.shape), axis=1)


def sample(p: LabeledJoint | ChannelKernel, rng, given=None) -> tuple[int, ...]:
    return tuple(int(v) for v in sample_many(p, 1, rng, given)[0])
