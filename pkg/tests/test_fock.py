import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampbench import fock
from ampbench.errors import InvalidInputError, TruncationWarning


def test_vacuum_coherent_state():
    psi = fock.coherent_state(0.0, 8)
    expected = np.zeros(8)
    expected[0] = 1.0
    np.testing.assert_allclose(psi.amplitudes, expected, atol=0)


def test_coherent_ground_amplitude():
    psi = fock.coherent_state(1.0, 32)
    assert psi.amplitudes[0] == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert psi.amplitudes[0] == pytest.approx(0.606531, abs=1e-6)


def test_coherent_norm_deficit_is_poisson_tail():
    psi = fock.coherent_state(2.0, 64)
    assert abs(psi.norm2 - 1.0) < 1e-12
    D = 12
    tail = 1.0 - sum(math.exp(-4) * 4 ** n / math.factorial(n) for n in range(D))
    assert 1.0 - fock.coherent_state(2.0, D).norm2 == pytest.approx(tail, rel=1e-10)


@pytest.mark.parametrize("alpha", [complex("nan"), complex(float("inf"), 0)])
def test_coherent_rejects_nonfinite(alpha):
    with pytest.raises(InvalidInputError):
        fock.coherent_state(alpha, 8)


def test_unnormalized_vectors_batch_against_series():
    alpha = np.array([0.3 + 0.4j, -1.2j, 0.0])
    vecs = fock.coherent_amplitudes(alpha, 10, normalized=False)
    for a, v in zip(alpha, vecs):
        ref = [a ** n / math.sqrt(math.factorial(n)) for n in range(10)]
        np.testing.assert_allclose(v, ref, rtol=1e-13, atol=1e-300)


def test_quadrature_matrix_elements():
    x = fock.quadrature_operator("x", 4)
    assert x.entries[0, 1] == pytest.approx(1 / math.sqrt(2))
    assert fock.expectation(x, fock.fock_state(0, 4)).real == 0.0
    for which in "xp":
        m = fock.quadrature_operator(which, 6).entries
        np.testing.assert_allclose(m, m.conj().T, atol=1e-12)


def test_commutator_on_leading_block():
    D = 10
    x = fock.quadrature_operator("x", D).entries
    p = fock.quadrature_operator("p", D).entries
    comm = x @ p - p @ x
    np.testing.assert_allclose(comm[: D - 1, : D - 1], 1j * np.eye(D - 1), atol=1e-13)


def test_quadrature_square_is_projected_square():
    # P x^2 P from a larger space, not (P x P)^2
    D = 9
    big = fock.quadrature_operator("x", 2 * D).entries
    ref = (big @ big)[:D, :D]
    np.testing.assert_allclose(fock.quadrature_square("x", D).entries, ref, atol=1e-13)
    bigp = fock.quadrature_operator("p", 2 * D).entries
    np.testing.assert_allclose(fock.quadrature_square("p", D).entries, (bigp @ bigp)[:D, :D], atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2.5, 2.5), st.floats(-2.5, 2.5))
def test_coherent_quadrature_moments(re, im):
    alpha = complex(re, im)
    m = abs(alpha)
    D = int(math.ceil(m * m + 6 * m + 10)) + 1
    D = max(D, 40)
    psi = fock.coherent_state(alpha, D)
    x_alpha = math.sqrt(2) * alpha.real
    p_alpha = math.sqrt(2) * alpha.imag
    x1 = fock.expectation(fock.quadrature_operator("x", D), psi).real
    p1 = fock.expectation(fock.quadrature_operator("p", D), psi).real
    x2 = fock.expectation(fock.quadrature_square("x", D), psi).real
    assert abs(x1 - x_alpha) < 1e-9
    assert abs(p1 - p_alpha) < 1e-9
    assert abs(x2 - (x_alpha ** 2 + 0.5)) < 1e-8


def test_squeezer_identity_at_zero():
    s = fock.squeeze_operator(0.0, 12)
    np.testing.assert_allclose(s.entries, np.eye(12), atol=0)
    assert s.metadata["leakage"] == 0.0


def test_squeezer_unitary_on_leading_block():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        op = fock.squeeze_operator(0.3, 40)
        ref = fock.squeeze_operator(0.3, 80).entries
    s = op.entries
    gram = s.conj().T @ s
    assert np.abs(gram[:20, :20] - np.eye(20)).max() < 1e-10
    assert op.metadata["unitarity_defect"] < 1e-10
    # low columns match the larger reference; the cutoff edge degrades later ones
    assert np.abs(s[:, :5] - ref[:40, :5]).max() < 1e-8


def test_squeeze_compression_matches_reference():
    c = fock.squeeze_compression(0.3, 40)
    ref = fock.squeeze_operator(0.3, 160).entries
    assert np.abs(c[:, :20] - ref[:40, :20]).max() < 1e-8
    assert np.linalg.norm(c, 2) <= 1 + 1e-12


def test_squeezer_leakage_warning():
    with pytest.warns(TruncationWarning):
        fock.squeeze_operator(1.5, 20)


def test_squeezer_range():
    with pytest.raises(InvalidInputError):
        fock.squeeze_operator(2.5, 20)


@pytest.mark.parametrize("r", [0.2, -0.2])
def test_squeezed_vacuum_variance(r):
    D = 40
    s = fock.squeeze_operator(r, D).entries
    vac = np.zeros(D)
    vac[0] = 1.0
    out = s @ vac
    x2 = np.vdot(out, fock.quadrature_square("x", D).entries @ out).real
    p2 = np.vdot(out, fock.quadrature_square("p", D).entries @ out).real
    assert x2 == pytest.approx(math.exp(-2 * r) / 2, abs=1e-8)
    assert p2 == pytest.approx(math.exp(2 * r) / 2, abs=1e-8)


def test_two_mode_squeezed_amplitudes():
    psi = fock.two_mode_squeezed_state(0.0, 5)
    assert psi.amplitudes[0] == 1.0 and np.count_nonzero(psi.amplitudes) == 1
    psi = fock.two_mode_squeezed_state(0.5, 32)
    assert psi.amplitudes[1 * 32 + 1] == pytest.approx(math.sqrt(0.75) * 0.5, abs=1e-15)
    assert psi.amplitudes[1 * 32 + 1] == pytest.approx(0.433013, abs=1e-6)


def test_two_mode_squeezed_norm_large_xi():
    psi = fock.two_mode_squeezed_state(0.9, 256)
    assert abs(psi.norm2 - 1.0) < 1e-10


def test_two_mode_squeezed_rejects_xi_one():
    with pytest.raises(InvalidInputError):
        fock.two_mode_squeezed_state(1.0, 8)


def test_partial_trace_product_state():
    rng = np.random.default_rng(3)
    D = 4
    a = rng.normal(size=D) + 1j * rng.normal(size=D)
    b = rng.normal(size=D) + 1j * rng.normal(size=D)
    a /= np.linalg.norm(a)
    b /= 2 * np.linalg.norm(b)
    rho_a, rho_b = np.outer(a, a.conj()), np.outer(b, b.conj())
    rho = fock.DensityMatrix(D, 2, np.kron(rho_a, rho_b))
    np.testing.assert_allclose(fock.partial_trace(rho, "A").entries, rho_a * np.trace(rho_b), atol=1e-14)
    np.testing.assert_allclose(fock.partial_trace(rho, "B").entries, rho_b * np.trace(rho_a), atol=1e-14)


def test_partial_trace_of_tmss_is_thermal():
    xi, D = 0.5, 40
    red = fock.partial_trace(fock.two_mode_squeezed_state(xi, D), "A")
    n_mean = np.trace(fock.number_operator(D) @ red.entries).real
    assert n_mean == pytest.approx(1 / 3, abs=1e-10)
    evals = np.sort(np.linalg.eigvalsh(red.entries))[::-1]
    expected = (1 - xi ** 2) * xi ** (2 * np.arange(D))
    np.testing.assert_allclose(evals, expected, atol=1e-10)


def test_partial_trace_preserves_trace_random():
    rng = np.random.default_rng(11)
    D = 3
    m = rng.normal(size=(D * D, D * D)) + 1j * rng.normal(size=(D * D, D * D))
    rho = m @ m.conj().T
    rho *= 0.7 / np.trace(rho).real
    out = fock.partial_trace(fock.DensityMatrix(D, 2, rho), "B")
    assert out.trace == pytest.approx(0.7, abs=1e-12)
    assert np.linalg.eigvalsh(out.entries).min() > -1e-12


def test_partial_trace_needs_two_modes():
    with pytest.raises(InvalidInputError):
        fock.partial_trace(fock.coherent_state(0.5, 6).density(), "A")


def test_density_matrix_validation():
    with pytest.raises(InvalidInputError):
        fock.DensityMatrix(2, 1, np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(InvalidInputError):
        fock.DensityMatrix(2, 1, np.diag([1.0, 0.5]))
    with pytest.raises(InvalidInputError):
        fock.DensityMatrix(2, 1, np.diag([1.0, -0.1]))


def test_state_vector_rejects_super_normalized():
    with pytest.raises(InvalidInputError):
        fock.StateVector(2, 1, np.array([1.0, 0.1]))


def test_default_dim_policy():
    assert fock.default_dim(0.0) == 20
    assert fock.default_dim(2.0) == 44


@pytest.mark.parametrize("alpha", [0.5, 1 + 1j, -1.5j])
def test_expectations_stable_under_dim_doubling(alpha):
    vals = []
    for D in (48, 96):
        psi = fock.coherent_state(alpha, D)
        vals.append([fock.expectation(fock.quadrature_square(q, D), psi).real for q in "xp"])
    np.testing.assert_allclose(vals[0], vals[1], atol=1e-9)
