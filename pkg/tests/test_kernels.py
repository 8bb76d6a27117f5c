import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongcoord import _pykernels, kernels

try:
    from strongcoord import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def lattice_oracle(ka, pa, kb, pb):
    acc = {}
    for x, p in zip(ka, pa):
        for y, q in zip(kb, pb):
            acc[int(x + y)] = acc.get(int(x + y), 0.0) + p * q
    keys = sorted(k for k, v in acc.items() if v > 0)
    return np.array(keys, dtype=np.int64), np.array([acc[k] for k in keys])


def sorted_law(rng, size, span):
    keys = np.unique(rng.integers(-span, span, size=size))
    return keys, rng.dirichlet(np.ones(keys.size))


@pytest.mark.parametrize("impl", [_pykernels, pytest.param(_ckernels, marks=needs_ext)])
@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_lattice_convolve_matches_oracle(impl, seed):
    rng = np.random.default_rng(seed)
    ka, pa = sorted_law(rng, int(rng.integers(1, 12)), 20)
    kb, pb = sorted_law(rng, int(rng.integers(1, 12)), 20)
    k, p = impl.lattice_convolve(ka, pa, kb, pb)
    ok, op = lattice_oracle(ka, pa, kb, pb)
    np.testing.assert_array_equal(k, ok)
    np.testing.assert_allclose(p, op, rtol=0, atol=1e-15)


@needs_ext
def test_backends_agree_on_large_keys():
    rng = np.random.default_rng(7)
    ka = np.sort(rng.choice(2**60, size=300, replace=False)).astype(np.int64)
    kb = np.sort(rng.choice(2**60, size=200, replace=False)).astype(np.int64)
    pa, pb = rng.dirichlet(np.ones(300)), rng.dirichlet(np.ones(200))
    k1, p1 = _pykernels.lattice_convolve(ka, pa, kb, pb)
    k2, p2 = _ckernels.lattice_convolve(ka, pa, kb, pb)
    np.testing.assert_array_equal(k1, k2)
    np.testing.assert_allclose(p1, p2, rtol=1e-13, atol=0)


@pytest.mark.parametrize("impl", [_pykernels, pytest.param(_ckernels, marks=needs_ext)])
def test_lattice_convolve_drops_zero_mass(impl):
    k, p = impl.lattice_convolve(np.array([0, 1]), np.array([1.0, 0.0]), np.array([0, 5]), np.array([0.5, 0.5]))
    np.testing.assert_array_equal(k, [0, 5])
    np.testing.assert_allclose(p, [0.5, 0.5])


@pytest.mark.parametrize("impl", [_pykernels, pytest.param(_ckernels, marks=needs_ext)])
def test_categorical_draw_against_searchsorted(impl, rng):
    pmf = rng.dirichlet(np.ones(5), size=4)
    cdf = np.cumsum(pmf, axis=1)
    rows = rng.integers(0, 4, size=10_000)
    u = rng.random(10_000)
    want = np.array([min(np.searchsorted(cdf[r], x, side="right"), 4) for r, x in zip(rows, u)])
    np.testing.assert_array_equal(impl.categorical_draw(cdf, rows, u), want)
    # boundary values land on the next category, the last column absorbs u = 1
    edge = impl.categorical_draw(np.array([[0.5, 1.0]]), np.array([0, 0, 0]), np.array([0.5, 0.0, 1.0]))
    np.testing.assert_array_equal(edge, [1, 0, 1])


def test_categorical_draw_frequencies(rng):
    pmf = np.array([[0.1, 0.2, 0.7]])
    x = kernels.categorical_draw(np.cumsum(pmf, axis=1), np.zeros(200_000, dtype=np.int64), rng.random(200_000))
    freq = np.bincount(x, minlength=3) / x.size
    se = np.sqrt(pmf[0] * (1 - pmf[0]) / x.size)
    assert np.all(np.abs(freq - pmf[0]) <= 4 * se)


def test_env_var_forces_python_backend():
    env = dict(os.environ, STRONGCOORD_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from strongcoord import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@needs_ext
def test_default_backend_is_compiled():
    env = {k: v for k, v in os.environ.items() if k != "STRONGCOORD_PURE_PYTHON"}
    out = subprocess.run(
        [sys.executable, "-c", "from strongcoord import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "cython"


def test_tail_identical_across_backends():
    code = (
        "import numpy as np;"
        "from strongcoord.info import ValueDistribution;"
        "from strongcoord.bounds import iid_sum_tail;"
        "rng=np.random.default_rng(5);"
        "v=ValueDistribution.from_atoms(rng.normal(size=3), rng.dirichlet(np.ones(3)));"
        "print(repr(iid_sum_tail(v, 40, 40*v.mean(), '>=').prob))"
    )
    vals = set()
    for flag in ("0", "1"):
        env = dict(os.environ, STRONGCOORD_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        vals.add(float(out.stdout))
    a, b = sorted(vals) if len(vals) == 2 else (vals.pop(),) * 2
    assert abs(a - b) <= 1e-13
