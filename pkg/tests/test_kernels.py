import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from magnonadd import _backend
from magnonadd.channels import heralded_add
from magnonadd.fock import DensityMatrix, coherent_state, thermal_state
from magnonadd.metrics import wigner_numeric

compiled = pytest.mark.skipif(_backend.compiled_wigner_points is None, reason="compiled kernel not built")


def random_state(seed, dim, rank=3):
    rng = np.random.default_rng(seed)
    vecs = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    vecs[dim // 2 :] = 0.0
    rho = vecs @ vecs.conj().T
    return DensityMatrix.from_array(rho)


def alphas(n, radius, seed=0):
    rng = np.random.default_rng(seed)
    return radius * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))


@pytest.mark.parametrize("seed", range(4))
def test_fallback_matches_displaced_parity(seed):
    rho = random_state(seed, 40)
    pts = alphas(25, 2.5, seed)
    got = _backend.python_wigner_points(rho.elements, pts)
    want = np.array([wigner_numeric(rho, a) for a in pts])
    np.testing.assert_allclose(got, want, atol=1e-12)


@compiled
@given(st.integers(0, 2**32 - 1), st.integers(2, 60))
def test_compiled_matches_fallback(seed, dim):
    rho = random_state(seed, dim, rank=2)
    pts = alphas(150, 2.0, seed)  # crosses the 64-point block boundary
    np.testing.assert_allclose(
        _backend.compiled_wigner_points(rho.elements, pts),
        _backend.python_wigner_points(rho.elements, pts),
        atol=1e-13,
    )


@compiled
def test_compiled_matches_fallback_large_amplitude():
    rho = heralded_add(coherent_state(4.0, 121), 0.99)[0]
    pts = alphas(500, 8.0)
    np.testing.assert_allclose(
        _backend.compiled_wigner_points(rho.elements, pts),
        _backend.python_wigner_points(rho.elements, pts),
        atol=1e-12,
    )


def test_kernels_handle_empty_and_chunked_input():
    rho = thermal_state(0.5)
    assert _backend.wigner_points(rho.elements, np.empty(0, dtype=complex)).shape == (0,)
    pts = np.linspace(-2, 2, 9000).astype(complex)  # more than one fallback chunk
    out = _backend.python_wigner_points(rho.elements, pts)
    np.testing.assert_allclose(out, 2 / np.pi / 2 * np.exp(-pts.real**2), atol=1e-13)


def test_backend_selection_respects_environment():
    env = dict(os.environ, MAGNONADD_NO_EXT="1")
    out = subprocess.run(
        [sys.executable, "-c", "import magnonadd; print(magnonadd.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "numpy"


@compiled
def test_default_backend_is_compiled():
    assert _backend.BACKEND == "cython"
    assert _backend.wigner_points is _backend.compiled_wigner_points
