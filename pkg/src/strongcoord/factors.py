"""The five-factor decomposition P_U P_{W|U} P_{X|UW} P_{Y|X} P_{V|WY} and a
few stock instances used by tests, examples and the CLI."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import (
    ChannelKernel,
    LabeledJoint,
    ShapeError,
    as_rng,
    bsc,
    chain,
    deterministic_kernel,
    joint,
    kernel,
    marginalize,
    uniform,
)

TARGET_AXES = ("U", "V", "W", "X", "Y")
OBSERVED_AXES = ("U", "V", "X", "Y")


@dataclass(frozen=True, eq=False)
class TargetFactors:
    p_u: LabeledJoint
    w_given_u: ChannelKernel
    x_given_uw: ChannelKernel
    y_given_x: ChannelKernel
    v_given_wy: ChannelKernel

    def __post_init__(self):
        want = {
            "p_u": ((), ("U",)),
            "w_given_u": (("U",), ("W",)),
            "x_given_uw": (("U", "W"), ("X",)),
            "y_given_x": (("X",), ("Y",)),
            "v_given_wy": (("W", "Y"), ("V",)),
        }
        for attr, (ins, outs) in want.items():
            obj = getattr(self, attr)
            got_in = () if isinstance(obj, LabeledJoint) else obj.in_names
            got_out = obj.names if isinstance(obj, LabeledJoint) else obj.out_names
            if tuple(got_in) != ins or tuple(got_out) != outs:
                raise ShapeError(f"{attr} must map {ins} -> {outs}, got {got_in} -> {got_out}")
        sizes = {}
        for obj in (self.p_u, self.w_given_u, self.x_given_uw, self.y_given_x, self.v_given_wy):
            axes = obj.axes if isinstance(obj, LabeledJoint) else obj.in_axes + obj.out_axes
            for a in axes:
                if sizes.setdefault(a.name, a.size) != a.size:
                    raise ShapeError(f"alphabet {a.name} has inconsistent sizes {sizes[a.name]} and {a.size}")

    @property
    def sizes(self) -> dict[str, int]:
        return {
            "U": self.p_u.size_of("U"),
            "W": self.w_given_u.out_axis.size,
            "X": self.x_given_uw.out_axis.size,
            "Y": self.y_given_x.out_axis.size,
            "V": self.v_given_wy.out_axis.size,
        }

    def joint(self) -> LabeledJoint:
        """The one-shot target P-bar^os over U, W, X, Y, V."""
        p = chain(self.p_u, self.w_given_u)
        p = chain(p, self.x_given_uw)
        p = chain(p, self.y_given_x)
        return chain(p, self.v_given_wy)

    def observed(self) -> LabeledJoint:
        return marginalize(self.joint(), OBSERVED_AXES)


def from_arrays(p_u, w_given_u, x_given_uw, y_given_x, v_given_wy) -> TargetFactors:
    """Factors from nested arrays indexed [u], [u][w], [u][w][x], [x][y], [w][y][v]."""
    p_u = np.asarray(p_u, dtype=float)
    w_u = np.asarray(w_given_u, dtype=float)
    x_uw = np.asarray(x_given_uw, dtype=float)
    y_x = np.asarray(y_given_x, dtype=float)
    v_wy = np.asarray(v_given_wy, dtype=float)
    nu, nw = w_u.shape
    nx = x_uw.shape[2]
    ny = y_x.shape[1]
    nv = v_wy.shape[2]
    return TargetFactors(
        joint([("U", nu)], p_u),
        kernel([("U", nu)], [("W", nw)], w_u),
        kernel([("U", nu), ("W", nw)], [("X", nx)], x_uw),
        kernel([("X", nx)], [("Y", ny)], y_x),
        kernel([("W", nw), ("Y", ny)], [("V", nv)], v_wy),
    )


def desk_instance(w_flip: float = 0.2, channel_flip: float = 0.1) -> TargetFactors:
    """Binary everything: U uniform, W = U through BSC(w_flip), X = W,
    Y = X through BSC(channel_flip), V = W."""
    return TargetFactors(
        uniform({"U": 2}),
        bsc(w_flip, "U", "W"),
        deterministic_kernel([("U", 2), ("W", 2)], ("X", 2), [[0, 1], [0, 1]]),
        bsc(channel_flip, "X", "Y"),
        deterministic_kernel([("W", 2), ("Y", 2)], ("V", 2), [[0, 0], [1, 1]]),
    )


def random_instance(rng, sizes: dict[str, int] | None = None, concentration: float = 1.0) -> TargetFactors:
    """Dirichlet-random factors; every row has full support almost surely."""
    rng = as_rng(rng)
    s = {"U": 2, "W": 2, "X": 2, "Y": 2, "V": 2}
    s.update(sizes or {})

    def rows(*shape):
        return rng.dirichlet(np.full(shape[-1], concentration), size=shape[:-1])

    return from_arrays(
        rows(s["U"]),
        rows(s["U"], s["W"]),
        rows(s["U"], s["W"], s["X"]),
        rows(s["X"], s["Y"]),
        rows(s["W"], s["Y"], s["V"]),
    )
