import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from magnonadd.errors import DomainError, InvalidStateError, TruncationError
from magnonadd.fock import (
    DensityMatrix,
    OperatorKind,
    annihilation_op,
    coherent_ket,
    coherent_state,
    creation_op,
    default_dim_coherent,
    default_dim_thermal,
    displaced_parity_op,
    displacement_op,
    expectation,
    fidelity,
    fock_state,
    ket_fidelity,
    mean_number,
    number_distribution,
    number_op,
    parity_op,
    quadrature_op,
    quadrature_sq_op,
    safe_radius_dim,
    thermal_state,
    vacuum,
)

amplitudes = st.complex_numbers(max_magnitude=2.5, allow_nan=False, allow_infinity=False)


def padded_displacement(alpha, dim, pad=140):
    """Oracle: expm of the generator in a much larger space, top-left block."""
    a = np.diag(np.sqrt(np.arange(1, pad)), 1)
    gen = alpha * a.conj().T - np.conj(alpha) * a
    return expm(gen)[:dim, :dim]


# -- operators -----------------------------------------------------------------

def test_ladder_operator_elements():
    a = annihilation_op(6).elements
    for n in range(1, 6):
        assert a[n - 1, n] == pytest.approx(math.sqrt(n))
    assert np.count_nonzero(a) == 5
    assert np.array_equal(creation_op(6).elements, a.conj().T)


def test_commutator_is_identity_below_top_level():
    a = annihilation_op(12).elements
    comm = a @ a.conj().T - a.conj().T @ a
    np.testing.assert_allclose(comm[:-1, :-1], np.eye(11), atol=1e-14)


def test_number_and_parity():
    assert np.allclose(np.diag(number_op(5).elements), np.arange(5))
    assert np.allclose(np.diag(parity_op(5).elements), [1, -1, 1, -1, 1])
    assert parity_op(5).kind is OperatorKind.PARITY


def test_operators_are_read_only():
    op = annihilation_op(4)
    with pytest.raises(ValueError):
        op.elements[0, 1] = 3.0


def test_quadrature_square_is_normal_ordered_exact():
    # <n|x^2|n> = (2n + 1) / 4 for every n, including the top level
    dim = 8
    x2 = quadrature_sq_op(0.3, dim).elements
    np.testing.assert_allclose(np.diag(x2).real, (2 * np.arange(dim) + 1) / 4, atol=1e-15)
    x = quadrature_op(0.3, dim).elements
    np.testing.assert_allclose((x @ x)[:-1, :-1], x2[:-1, :-1], atol=1e-14)


@pytest.mark.parametrize("alpha", [0.3, 1.2 - 0.7j, -2.0j, 3.0 + 1.0j])
def test_displacement_matches_padded_exponential(alpha):
    dim = 30
    np.testing.assert_allclose(displacement_op(alpha, dim).elements, padded_displacement(alpha, dim), atol=1e-11)


def test_displacement_of_vacuum_is_coherent_state():
    beta = 1.1 + 0.4j
    col = displacement_op(beta, 40).elements[:, 0]
    np.testing.assert_allclose(col, coherent_ket(beta, 40), atol=1e-14)


@given(amplitudes)
def test_displacement_inverse(alpha):
    dim = 25
    D = displacement_op(alpha, dim).elements
    Dm = displacement_op(-alpha, dim).elements
    # D(-a) is the adjoint of D(a) element by element
    np.testing.assert_allclose(Dm, D.conj().T, atol=1e-12)


def test_displaced_parity_identity():
    alpha, dim = 0.7 - 0.4j, 30
    D = padded_displacement(alpha, 140, pad=140)
    P = np.diag((-1.0) ** np.arange(140))
    oracle = (D @ P @ D.conj().T)[:dim, :dim]
    np.testing.assert_allclose(displaced_parity_op(alpha, dim).elements, oracle, atol=1e-10)


# -- states ------------------------------------------------------------------

def test_fock_state_requires_headroom():
    assert fock_state(3, 10).elements[3, 3] == 1.0
    with pytest.raises(TruncationError):
        fock_state(9, 10)


def test_vacuum_default_dimension():
    assert vacuum().dim == 30


@given(amplitudes)
def test_coherent_state_mean_field(beta):
    rho = coherent_state(beta)
    a = annihilation_op(rho.dim)
    assert expectation(rho, a) == pytest.approx(beta, abs=1e-10)
    assert mean_number(rho) == pytest.approx(abs(beta) ** 2, abs=1e-9)


def test_coherent_state_truncation_guard():
    with pytest.raises(TruncationError):
        coherent_state(4.0, 40)


def test_thermal_distribution_is_geometric():
    nbar = 0.8
    p = number_distribution(thermal_state(nbar))
    n = np.arange(p.size)
    np.testing.assert_allclose(p, nbar**n / (1 + nbar) ** (n + 1) / np.sum(nbar**n / (1 + nbar) ** (n + 1)))
    assert mean_number(thermal_state(nbar)) == pytest.approx(nbar, abs=1e-10)


def test_thermal_rejects_negative_occupation():
    with pytest.raises(DomainError):
        thermal_state(-0.1)


def test_default_dimensions():
    assert default_dim_coherent(0.4) == 30
    assert default_dim_coherent(0.5) == 31
    assert default_dim_coherent(4.0) == 81
    assert default_dim_thermal(2.0) == 75
    assert safe_radius_dim(4.0) == 49


# -- invariants --------------------------------------------------------------

def test_density_matrix_rejects_non_hermitian():
    arr = np.diag([0.5, 0.5, 0]).astype(complex)
    arr[0, 1] = 0.1
    with pytest.raises(InvalidStateError):
        DensityMatrix(arr)


def test_density_matrix_rejects_bad_trace():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([0.5, 0.4, 0.0]))


def test_density_matrix_rejects_negative_eigenvalue():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.1, -0.1, 0.0]))


def test_density_matrix_rejects_populated_top_level():
    with pytest.raises(TruncationError):
        DensityMatrix(np.diag([0.5, 0.25, 0.25]))


def test_embed_pads_with_zeros():
    rho = fock_state(1, 4).embed(9)
    assert rho.dim == 9 and rho.elements[1, 1] == 1.0
    with pytest.raises(DomainError):
        rho.embed(3)


def test_expectation_dimension_mismatch():
    with pytest.raises(DomainError):
        expectation(vacuum(10), number_op(11))


def test_fidelity_mixed_states():
    # commuting diagonal states: F = (sum sqrt(p q))^2
    a, b = thermal_state(0.5, 40), thermal_state(1.0, 40)
    p, q = np.diag(a.elements).real, np.diag(b.elements).real
    assert fidelity(a, b) == pytest.approx(np.sum(np.sqrt(p * q)) ** 2, abs=1e-10)


def test_fidelity():
    a = coherent_state(0.5, 30)
    b = coherent_state(0.6, 30)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-10)
    assert fidelity(a, b) == pytest.approx(math.exp(-0.01), abs=1e-10)
    assert ket_fidelity(a, coherent_ket(0.6, 30)) == pytest.approx(math.exp(-0.01), abs=1e-10)
