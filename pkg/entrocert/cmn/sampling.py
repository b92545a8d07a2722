from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.linalg import fractional_matrix_power

from entrocert.channels.schema import KrausChannel
from entrocert.classical.schema import ClassicalEnsemble, Distribution
from entrocert.cmn.errors import DimensionMismatch
from entrocert.matrixcore.service import MatrixService
from entrocert.quantum.schema import DensityMatrix, QuantumEnsemble


class Sampler:
    """Seeded generators for audit inputs.

    Backed by numpy's ``default_rng`` (PCG64), so one seed fixes every draw.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def _ginibre(self, *shape: int) -> np.ndarray:
        return (self.rng.standard_normal(shape) + 1j * self.rng.standard_normal(shape)) / np.sqrt(2.0)

    def distribution(self, n: int, zeros: int = 0) -> Distribution:
        p = self.rng.dirichlet(np.ones(n))
        if zeros:
            p[self.rng.choice(n, size=min(zeros, n - 1), replace=False)] = 0.0
        return Distribution.of(p / p.sum())

    def weights(self, n: int) -> np.ndarray:
        return self.rng.dirichlet(np.ones(n))

    def density_matrix(self, d: int, rank: Optional[int] = None) -> DensityMatrix:
        """G G† / Tr(G G†) with G a complex Gaussian d × rank matrix."""
        g = self._ginibre(d, rank or d)
        w = g @ g.conj().T
        w = (w + w.conj().T) / 2.0
        return DensityMatrix.of(w / np.trace(w).real)

    def pure_state(self, d: int) -> DensityMatrix:
        return DensityMatrix.pure(self._ginibre(d))

    def unitary(self, d: int) -> np.ndarray:
        """Eigenvectors of a random Hermitian matrix."""
        h = self._ginibre(d, d)
        return MatrixService.hermitian_eig((h + h.conj().T) / 2.0).eigenvectors

    def channel(self, dim_in: int, dim_out: int, m: int) -> KrausChannel:
        """Gaussian Kraus stack normalised on the right by (Σ Vⱼ†Vⱼ)^(-1/2).

        Needs m·dim_out ≥ dim_in, otherwise Σ Vⱼ†Vⱼ is singular.
        """
        if m * dim_out < dim_in:
            raise DimensionMismatch("too few Kraus operators for a trace-preserving channel",
                                    dim_in=dim_in, dim_out=dim_out, m=m)
        g = self._ginibre(m, dim_out, dim_in)
        s = np.einsum("kji,kjl->il", g.conj(), g)
        root = fractional_matrix_power((s + s.conj().T) / 2.0, -0.5)
        return KrausChannel.of([v @ root for v in g])

    def classical_ensemble(self, n: int, members: int) -> ClassicalEnsemble:
        return ClassicalEnsemble(
            weights=tuple(self.weights(members)),
            members=[self.distribution(n) for _ in range(members)],
        )

    def quantum_ensemble(self, d: int, members: int) -> QuantumEnsemble:
        return QuantumEnsemble(
            weights=tuple(self.weights(members)),
            members=[self.density_matrix(d) for _ in range(members)],
        )
