import numpy as np
import pytest

from unsharpbell import linalg
from unsharpbell.linalg import I2, I4, bloch_operator, eigvals_hermitian, is_psd, pauli, tensor
from unsharpbell.observables import UnsharpSpin, unsharp_effect
from unsharpbell.states import singlet

from conftest import random_hermitian, random_unit


def test_pauli_z_is_diagonal():
    np.testing.assert_array_equal(pauli("Z"), np.diag([1, -1]))


@pytest.mark.parametrize("axis", ["X", "Y", "Z"])
def test_pauli_traceless_involution(axis):
    s = pauli(axis)
    assert linalg.trace(s) == 0
    np.testing.assert_allclose(s @ s, I2)
    np.testing.assert_allclose(s, s.conj().T)


def test_pauli_rejects_unknown_axis():
    with pytest.raises(linalg.LinalgError):
        pauli("W")


def test_bloch_operator_examples():
    np.testing.assert_array_equal(bloch_operator((0, 0, 1)), pauli("Z"))
    np.testing.assert_array_equal(bloch_operator((0, 0, 0)), np.zeros((2, 2)))
    # eigenvalues +-|v| = +-1 for (0.6, 0, 0.8)
    np.testing.assert_allclose(eigvals_hermitian(bloch_operator((0.6, 0, 0.8))), [-1, 1], atol=1e-15)


def test_bloch_operator_squares_to_identity(rng):
    for _ in range(100):
        v = random_unit(rng)
        b = bloch_operator(v)
        assert np.max(np.abs(b @ b - I2)) < 1e-12


def test_tensor_examples():
    np.testing.assert_array_equal(tensor(I2, I2), I4)
    np.testing.assert_array_equal(tensor(pauli("Z"), pauli("Z")), np.diag([1, -1, -1, 1]))


def test_tensor_block_convention():
    a = np.arange(4).reshape(2, 2) + 1j
    b = np.arange(4, 8).reshape(2, 2)
    t = tensor(a, b)
    for i, j, k, l in np.ndindex(2, 2, 2, 2):
        assert t[2 * i + k, 2 * j + l] == a[i, j] * b[k, l]


def test_tensor_rejects_wrong_dims():
    with pytest.raises(linalg.LinalgError):
        tensor(I4, I2)


def test_trace_multiplicative(rng):
    for _ in range(100):
        a = random_hermitian(rng, 2)
        b = random_hermitian(rng, 2)
        assert abs(linalg.trace(tensor(a, b)) - linalg.trace(a) * linalg.trace(b)) < 1e-12


def test_hermitian_symmetrizes_small_drift():
    h = np.array([[1, 1e-14], [0, 2]], dtype=complex)
    out = linalg.hermitian(h)
    np.testing.assert_array_equal(out, out.conj().T)


def test_hermitian_rejects_asymmetric():
    with pytest.raises(linalg.NotHermitianError):
        linalg.hermitian([[1, 1], [0, 2]])


def test_hermitian_rejects_odd_dimension():
    with pytest.raises(linalg.LinalgError):
        linalg.hermitian(np.eye(3))


def test_unsharp_effect_spectrum():
    # reality degree (1 + lam)/2 and unsharpness (1 - lam)/2 for lam = 0.6
    e = unsharp_effect(UnsharpSpin(0.6, (0, 0, 1)), +1)
    np.testing.assert_allclose(eigvals_hermitian(e), [0.2, 0.8], atol=1e-15)


def test_eigvals_identity_and_singlet():
    assert eigvals_hermitian(I4) == [1, 1, 1, 1]
    np.testing.assert_allclose(eigvals_hermitian(singlet().rho), [0, 0, 0, 1], atol=1e-13)


def test_jacobi_against_numpy(rng):
    for _ in range(100):
        h = random_hermitian(rng, 4) * rng.uniform(0.1, 10)
        ours = np.array(eigvals_hermitian(h))
        np.testing.assert_allclose(ours, np.linalg.eigvalsh(h), atol=1e-10 * max(1, np.abs(h).max()))


def test_jacobi_trace_and_determinant(rng):
    for _ in range(100):
        h = random_hermitian(rng, 4)
        lam = np.array(eigvals_hermitian(h))
        assert abs(lam.sum() - np.trace(h).real) < 1e-10
        assert abs(np.prod(lam) - np.linalg.det(h).real) < 1e-8
        assert list(lam) == sorted(lam)


def test_jacobi_matches_closed_form_on_blocks(rng):
    for _ in range(50):
        a = random_hermitian(rng, 2)
        b = random_hermitian(rng, 2)
        block = np.zeros((4, 4), dtype=complex)
        block[:2, :2] = a
        block[2:, 2:] = b
        expected = sorted(eigvals_hermitian(a) + eigvals_hermitian(b))
        np.testing.assert_allclose(linalg.jacobi_eigvals(block), expected, atol=1e-10)


def test_jacobi_reports_nonconvergence(rng):
    h = random_hermitian(rng, 4)
    with pytest.raises(linalg.ConvergenceError):
        linalg.jacobi_eigvals(h, max_sweeps=1)


def test_is_psd():
    assert is_psd(I2)
    assert not is_psd(pauli("Z"))


def test_unsharp_effects_are_psd(rng):
    for _ in range(100):
        u = UnsharpSpin(rng.uniform(1e-6, 1), random_unit(rng))
        assert is_psd(unsharp_effect(u, +1))
        assert is_psd(unsharp_effect(u, -1))
