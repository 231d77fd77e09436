import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obstructa import gf2
from obstructa._backend import HAVE_NUMBA, get_backend, set_backend


@pytest.fixture
def both():
    prev = get_backend()
    yield ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    set_backend(prev)


def run_with(backend, fn):
    set_backend(backend)
    return fn()


def rank_numpy_reference(a):
    a = a.copy() & 1
    r = 0
    for c in range(a.shape[1]):
        piv = [i for i in range(r, a.shape[0]) if a[i, c]]
        if not piv:
            continue
        a[[r, piv[0]]] = a[[piv[0], r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


@given(st.integers(1, 90), st.integers(1, 150), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_backends_agree_on_rank(rows, cols, seed):
    a = np.random.default_rng(seed).integers(0, 2, size=(rows, cols), dtype=np.uint8)
    prev = get_backend()
    try:
        got = {b: run_with(b, lambda: gf2.rank_dense(a))
               for b in ["numpy"] + (["numba"] if HAVE_NUMBA else [])}
    finally:
        set_backend(prev)
    assert set(got.values()) == {rank_numpy_reference(a)}


def test_backends_agree_on_rref_and_kernel(both):
    a = np.random.default_rng(7).integers(0, 2, size=(40, 70), dtype=np.uint8)
    out = {}
    for b in both:
        set_backend(b)
        red, piv = gf2.rref(gf2.pack(a), 70)
        out[b] = (gf2.unpack(red, 70).tolist(), piv.tolist(), gf2.left_kernel(a.T).tolist())
    assert len({repr(v) for v in out.values()}) == 1


def test_backends_agree_on_resolution(both):
    from obstructa.ext_a1.module import stunted_module
    from obstructa.ext_a1.resolution import minimal_resolution

    got = {}
    for b in both:
        set_backend(b)
        got[b] = minimal_resolution(stunted_module(9, 40), 6, 40).gen_degrees
    assert len({repr(v) for v in got.values()}) == 1


def test_set_backend_validates():
    with pytest.raises(ValueError):
        set_backend("fortran")


def test_env_flag_selects_numpy():
    env = dict(os.environ, OBSTRUCTA_BACKEND="numpy")
    code = ("from obstructa._backend import get_backend; "
            "from obstructa.ext_a1.chart import ko_order; "
            "print(get_backend(), ko_order(13, 49))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert out.stdout.split() == ["numpy", "3"]


def test_env_flag_rejects_garbage():
    env = dict(os.environ, OBSTRUCTA_BACKEND="gpu")
    out = subprocess.run([sys.executable, "-c", "import obstructa.gf2"], env=env,
                         capture_output=True, text=True)
    assert out.returncode != 0
    assert "OBSTRUCTA_BACKEND" in out.stderr


def test_pack_unpack_round_trip():
    a = np.random.default_rng(3).integers(0, 2, size=(5, 130), dtype=np.uint8)
    assert np.array_equal(gf2.unpack(gf2.pack(a), 130), a)


def test_span_helpers():
    rows = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
    assert gf2.in_span(np.array([1, 1, 0], dtype=np.uint8), rows)
    assert not gf2.in_span(np.array([0, 0, 1], dtype=np.uint8), rows)
    assert gf2.extend_basis(rows, np.array([[1, 1, 0], [0, 0, 1]], dtype=np.uint8)) == [1]
