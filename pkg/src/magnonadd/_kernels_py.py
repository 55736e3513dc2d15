"""Pure-NumPy Wigner-grid kernel, used when the compiled extension is absent.

Vectorized over points, looping over Fock indices. Mirrors ``_wigner_ext.pyx``.
"""
import numpy as np

# complex128 scratch per point is dim * 16 bytes; bound memory per chunk
_CHUNK = 8192


def wigner_points(rho: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    alphas = np.ascontiguousarray(alphas, dtype=np.complex128).ravel()
    out = np.empty(alphas.shape[0], dtype=np.float64)
    for start in range(0, alphas.shape[0], _CHUNK):
        stop = min(start + _CHUNK, alphas.shape[0])
        out[start:stop] = _chunk(rho, alphas[start:stop])
    return out


def _chunk(rho, a):
    dim = rho.shape[0]
    sq = np.sqrt(np.arange(dim, dtype=np.float64))
    a2 = 2.0 * a
    a2c = np.conj(a2)
    # list of rows so that swapping a row is a rebind, not a copy
    wl = [None] * dim
    wl[0] = np.exp(-2.0 * np.abs(a) ** 2) / np.pi + 0j
    acc = rho[0, 0].real * wl[0].real
    for n in range(1, dim):
        wl[n] = a2 * wl[n - 1] / sq[n]
        acc += 2.0 * (rho[0, n] * wl[n]).real
    for m in range(1, dim):
        sm = sq[m]
        temp = wl[m]
        wl[m] = (a2c * temp - sm * wl[m - 1]) / sm
        acc += (rho[m, m] * wl[m]).real
        for n in range(m + 1, dim):
            temp2 = (a2 * wl[n - 1] - sm * temp) / sq[n]
            temp = wl[n]
            wl[n] = temp2
            acc += 2.0 * (rho[m, n] * wl[n]).real
    return 2.0 * acc
