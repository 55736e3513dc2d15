import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_laguerre

from magnonadd import analytic as an
from magnonadd.channels import heralded_add, loss_channel
from magnonadd.errors import NormalizationError, TruncationError, UndefinedQError
from magnonadd.fock import coherent_state, fock_state, thermal_state, vacuum
from magnonadd.metrics import (
    WignerMap,
    default_radius,
    grid_axis,
    mandel_q_numeric,
    negativity_converged,
    quadrature_variance_numeric,
    simpson_2d,
    wigner_grid,
    wigner_numeric,
    wigner_points,
)

DELTA_FOCK1 = 2 * (2 * math.exp(-0.5) - 1)


def fock_wigner(n, alpha):
    """Oracle: W_n = (2/pi) (-1)^n exp(-2|a|^2) L_n(4|a|^2)."""
    r2 = abs(alpha) ** 2
    return 2 / math.pi * (-1) ** n * math.exp(-2 * r2) * eval_laguerre(n, 4 * r2)


def test_mandel_q_of_reference_states():
    assert mandel_q_numeric(coherent_state(1.3, 40)) == pytest.approx(0.0, abs=1e-12)
    assert mandel_q_numeric(fock_state(3, 10)) == pytest.approx(-1.0, abs=1e-14)
    assert mandel_q_numeric(thermal_state(0.7)) == pytest.approx(0.7, abs=1e-10)
    with pytest.raises(UndefinedQError):
        mandel_q_numeric(vacuum(10))


def test_quadrature_variance_of_reference_states():
    assert quadrature_variance_numeric(vacuum(10), 0.4) == pytest.approx(0.25, abs=1e-15)
    assert quadrature_variance_numeric(coherent_state(1 + 1j, 40), 1.1) == pytest.approx(0.25, abs=1e-12)
    assert quadrature_variance_numeric(fock_state(2, 10), 0.0) == pytest.approx(1.25, abs=1e-14)
    assert quadrature_variance_numeric(thermal_state(0.5), 0.0) == pytest.approx(0.5, abs=1e-10)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
@pytest.mark.parametrize("alpha", [0.0, 0.3 - 0.2j, 1.1 + 0.9j, -2.0])
def test_wigner_numeric_fock_states(n, alpha):
    rho = fock_state(n, 40)
    assert wigner_numeric(rho, alpha) == pytest.approx(fock_wigner(n, alpha), abs=1e-12)


def test_wigner_numeric_vacuum_peak():
    assert wigner_numeric(vacuum(30), 0.0) == pytest.approx(2 / math.pi, abs=1e-15)


def test_wigner_truncation_guard():
    with pytest.raises(TruncationError):
        wigner_numeric(vacuum(30), 3.0)
    with pytest.raises(TruncationError):
        wigner_points(vacuum(30), np.array([0.0, 3.0]))
    with pytest.raises(TruncationError):
        wigner_grid(fock_state(1, 30), (-4, 4), (-4, 4), 0.1)


@given(st.complex_numbers(max_magnitude=2.5, allow_nan=False, allow_infinity=False))
def test_points_agree_with_displaced_parity(alpha):
    rho = heralded_add(coherent_state(1.2 - 0.5j, 60), 0.95)[0]
    assert wigner_points(rho, np.array([alpha]))[0] == pytest.approx(wigner_numeric(rho, alpha), abs=1e-12)


def test_points_keep_shape():
    rho = fock_state(1, 30)
    out = wigner_points(rho, np.zeros((2, 3), dtype=complex))
    assert out.shape == (2, 3)
    np.testing.assert_allclose(out, -2 / math.pi, atol=1e-15)


def test_grid_axis():
    x = grid_axis(-1.0, 1.0, 0.25)
    assert x.size == 9 and x[0] == -1.0 and x[-1] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        grid_axis(1.0, -1.0, 0.1)


def test_simpson_2d_exact_for_polynomials():
    x = np.linspace(-1, 1, 21)
    p = np.linspace(0, 2, 11)
    vals = (x[None, :] ** 2) * (p[:, None] ** 3)
    assert simpson_2d(vals, x, p) == pytest.approx((2 / 3) * 4, rel=1e-12)


def test_negativity_of_fock_one():
    wmap = wigner_grid(fock_state(1, 49), (-4, 4), (-4, 4), 0.05)
    assert wmap.integral == pytest.approx(1.0, abs=1e-6)
    assert wmap.delta == pytest.approx(DELTA_FOCK1, abs=1e-3)


def test_negativity_of_gaussian_states_vanishes():
    assert wigner_grid(vacuum(49), (-4, 4), (-4, 4), 0.05).delta == 0.0
    assert wigner_grid(thermal_state(1.0, 64), (-5, 5), (-5, 5), 0.1).delta == 0.0


def test_grid_normalization_error():
    with pytest.raises(NormalizationError):
        wigner_grid(coherent_state(1.5, 40), (-1, 1), (-1, 1), 0.05)


def test_wigner_map_is_read_only_and_checks_shape():
    wmap = wigner_grid(vacuum(49), (-4, 4), (-4, 4), 0.2)
    with pytest.raises(ValueError):
        wmap.values[0, 0] = 1.0
    with pytest.raises(ValueError):
        WignerMap(wmap.x, wmap.p, wmap.values[:, :-1], 0.2)
    assert wmap.x_range == (-4.0, 4.0)


def test_grid_matches_closed_form_readout():
    M, beta, eta = 0.99, 1.0, 0.7
    fam = an.StateFamily.macs(M, beta)
    rho = loss_channel(heralded_add(coherent_state(beta, 64), M)[0], eta)
    wmap = wigner_grid(rho, (-5, 5), (-5, 5), 0.1)
    alphas = wmap.x[None, :] + 1j * wmap.p[:, None]
    np.testing.assert_allclose(wmap.values, an.readout_macs_wigner(alphas, fam, eta), atol=1e-12)


def test_negativity_converged():
    rho = fock_state(1, 49)
    assert not negativity_converged(rho, 4.0, 0.1)[2]
    coarse, fine, ok = negativity_converged(rho, 4.0, 0.05)
    assert ok
    assert fine == pytest.approx(DELTA_FOCK1, abs=1e-4)


def test_default_radius():
    assert default_radius(2.0) == 6.0
    assert default_radius(0.0, 4.0) == 6.0
