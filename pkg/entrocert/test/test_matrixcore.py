import unittest

import numpy as np
from pydantic_core import PydanticCustomError

from entrocert.cmn.errors import DimensionMismatch, NotHermitian, NotSquare
from entrocert.cmn.sampling import Sampler
from entrocert.matrixcore.schema import EigenSystem, from_complex_matrix, to_complex_matrix
from entrocert.matrixcore.service import MatrixService


def _random_hermitian(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2.0


class TestHermitianEig(unittest.TestCase):
    def test_matches_numpy_eigenvalues(self):
        rng = np.random.default_rng(7)
        for d in (1, 2, 3, 5, 8, 16):
            a = _random_hermitian(rng, d)
            eig = MatrixService.hermitian_eig(a)
            expected = np.sort(np.linalg.eigvalsh(a))[::-1]
            np.testing.assert_allclose(eig.eigenvalues, expected, atol=1e-9)
            self.assertLess(eig.gram_residual(), 1e-10)
            np.testing.assert_allclose(eig.reconstruct(), a, atol=1e-9)

    def test_eigenvalues_nonincreasing(self):
        a = np.diag([0.1, 0.7, 0.2])
        eig = MatrixService.hermitian_eig(a)
        np.testing.assert_allclose(eig.eigenvalues, [0.7, 0.2, 0.1])
        self.assertTrue(np.all(np.diff(eig.eigenvalues) <= 0))

    def test_deterministic_on_degenerate_spectrum(self):
        a = np.eye(4) / 4.0
        first = MatrixService.hermitian_eig(a)
        second = MatrixService.hermitian_eig(a.copy())
        np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)
        np.testing.assert_array_equal(first.eigenvalues, second.eigenvalues)

    def test_pauli_y(self):
        y = np.array([[0, -1j], [1j, 0]])
        eig = MatrixService.hermitian_eig(y)
        np.testing.assert_allclose(eig.eigenvalues, [1.0, -1.0], atol=1e-12)
        np.testing.assert_allclose(eig.reconstruct(), y, atol=1e-12)

    def test_rejects_non_square(self):
        with self.assertRaises(NotSquare):
            MatrixService.hermitian_eig(np.zeros((2, 3)))

    def test_rejects_non_hermitian(self):
        with self.assertRaises(NotHermitian) as ctx:
            MatrixService.hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
        self.assertAlmostEqual(ctx.exception.residual, 1.0)

    def test_apply_matrix_function(self):
        a = np.diag([4.0, 1.0])
        root = MatrixService.hermitian_eig(a).apply(np.sqrt)
        np.testing.assert_allclose(root, np.diag([2.0, 1.0]), atol=1e-12)


class TestTensorAndPartialTrace(unittest.TestCase):
    def test_tensor_is_kron(self):
        a = np.array([[1, 2], [3, 4]])
        b = np.eye(3)
        np.testing.assert_array_equal(MatrixService.tensor(a, b), np.kron(a, b))

    def test_tensor_associative_and_trace_multiplicative(self):
        rng = np.random.default_rng(4)
        a, b, c = (_random_hermitian(rng, d) for d in (2, 3, 2))
        left = MatrixService.tensor(MatrixService.tensor(a, b), c)
        right = MatrixService.tensor(a, MatrixService.tensor(b, c))
        np.testing.assert_allclose(left, right, atol=1e-14)
        self.assertAlmostEqual(complex(np.trace(MatrixService.tensor(a, b))),
                               complex(np.trace(a) * np.trace(b)), places=12)

    def test_partial_trace_of_product(self):
        sampler = Sampler(3)
        a = sampler.density_matrix(2).matrix
        b = sampler.density_matrix(3).matrix
        w = MatrixService.tensor(a, b)
        np.testing.assert_allclose(MatrixService.partial_trace(w, (2, 3), "first"), a, atol=1e-12)
        np.testing.assert_allclose(MatrixService.partial_trace(w, (2, 3), "second"), b, atol=1e-12)

    def test_partial_trace_of_bell_state(self):
        psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        w = np.outer(psi, psi)
        np.testing.assert_allclose(MatrixService.partial_trace(w, (2, 2), "first"), np.eye(2) / 2, atol=1e-15)

    def test_partial_trace_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            MatrixService.partial_trace(np.eye(4), (2, 3))

    def test_apply_to_subsystem_identity(self):
        w = Sampler(5).density_matrix(6).matrix
        out = MatrixService.apply_to_subsystem(lambda a: a, w, (2, 3))
        np.testing.assert_allclose(out, w, atol=1e-15)

    def test_apply_to_subsystem_trace_map(self):
        w = Sampler(6).density_matrix(4).matrix
        out = MatrixService.apply_to_subsystem(lambda a: np.trace(a).reshape(1, 1), w, (2, 2))
        np.testing.assert_allclose(out, MatrixService.partial_trace(w, (2, 2), "second"), atol=1e-15)


class TestComplexMatrixWire(unittest.TestCase):
    def test_pair_form(self):
        m = to_complex_matrix([[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [2.0, 0.0]]])
        np.testing.assert_array_equal(m, np.array([[1, -1j], [1j, 2]]))

    def test_real_form(self):
        m = to_complex_matrix([[0.5, 0.0], [0.0, 0.5]])
        self.assertEqual(m.dtype, np.complex128)

    def test_back_to_pairs(self):
        m = np.array([[1, -1j], [1j, 2]])
        np.testing.assert_array_equal(to_complex_matrix(from_complex_matrix(m)), m)

    def test_rejects_non_finite_entries(self):
        for bad in ([[float("nan"), 0.0], [0.0, 1.0]], [[[1.0, float("inf")], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
                    np.array([[1.0, np.inf], [0.0, 1.0]])):
            with self.assertRaises(PydanticCustomError):
                to_complex_matrix(bad)

    def test_eigensystem_gram_residual_empty(self):
        e = EigenSystem(eigenvalues=np.zeros(0), eigenvectors=np.zeros((0, 0)))
        self.assertEqual(e.gram_residual(), 0.0)


if __name__ == "__main__":
    unittest.main()
