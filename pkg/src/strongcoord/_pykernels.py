"""Pure numpy implementations of the hot kernels.

Semantics are identical to the compiled versions in ``_ckernels``; the two
are cross-checked in the test-suite and compared in ``benchmarks/``.
"""
import numpy as np


def lattice_convolve(keys_a, probs_a, keys_b, probs_b):
    """Distribution of the sum of two independent integer-lattice variables.

    Inputs are sorted, duplicate-free int64 keys with float64 masses. Returns
    sorted unique keys and merged masses; zero-mass atoms are dropped.
    """
    keys = (np.asarray(keys_a, dtype=np.int64)[:, None] + np.asarray(keys_b, dtype=np.int64)[None, :]).ravel()
    probs = (np.asarray(probs_a)[:, None] * np.asarray(probs_b)[None, :]).ravel()
    uniq, inv = np.unique(keys, return_inverse=True)
    merged = np.bincount(inv, weights=probs, minlength=uniq.size)
    keep = merged > 0
    return uniq[keep], merged[keep]


def categorical_draw(cdf, rows, uniforms):
    """Inverse-CDF draw: for sample ``s`` return the smallest ``j`` with
    ``uniforms[s] < cdf[rows[s], j]`` (clipped to the last column)."""
    cdf = np.asarray(cdf, dtype=np.float64)
    table = cdf[np.asarray(rows, dtype=np.int64)]
    out = (np.asarray(uniforms)[:, None] >= table).sum(axis=1)
    return np.minimum(out, cdf.shape[1] - 1).astype(np.int64)
