from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from scipy.special import entr

from entrocert.cmn.errors import BarycenterMismatch, DimensionMismatch, ValidationError
from entrocert.cmn.logging import get_logger
from entrocert.config import get_settings
from entrocert.matrixcore.service import MatrixService
from entrocert.quantum.schema import DensityMatrix, QuantumEnsemble


logger = get_logger("quantum")


class QuantumService:
    @staticmethod
    def rank(rho: DensityMatrix) -> int:
        return int(np.count_nonzero(rho.spectrum > get_settings().tol("QUANTUM_SUPPORT")))

    @staticmethod
    def von_neumann_entropy(rho: DensityMatrix) -> float:
        return float(math.fsum(entr(rho.spectrum)))

    @staticmethod
    def quantum_relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
        """H(ρ‖σ) = Tr ρ ln ρ − Tr ρ ln σ, or +inf when supp ρ ⊄ supp σ."""
        if rho.dim != sigma.dim:
            raise DimensionMismatch("states act on different spaces", dims=(rho.dim, sigma.dim))
        tol = get_settings().tol("QUANTUM_SUPPORT")
        t, f = sigma.spectrum, sigma.eigenvectors
        # ⟨f_l|ρ|f_l⟩ for every eigenvector of σ
        overlaps = np.real(np.einsum("il,ij,jl->l", f.conj(), rho.matrix, f))
        kernel = t <= tol
        if math.fsum(overlaps[kernel]) > tol:
            return math.inf
        cross = math.fsum(overlaps[~kernel] * np.log(t[~kernel]))
        return max(0.0, -QuantumService.von_neumann_entropy(rho) - cross)

    @staticmethod
    def spectral_ensemble(rho: DensityMatrix) -> QuantumEnsemble:
        s, v = rho.spectrum, rho.eigenvectors
        keep = np.flatnonzero(s > get_settings().tol("QUANTUM_SUPPORT"))
        total = math.fsum(s[keep])
        members = []
        for j in keep:
            onehot = np.zeros(rho.dim)
            onehot[j] = 1.0
            members.append(DensityMatrix.from_spectrum(onehot, v))
        return QuantumEnsemble(weights=tuple(float(s[j] / total) for j in keep), members=members)

    @staticmethod
    def rank_k_decomposition(rho: DensityMatrix, k: int) -> QuantumEnsemble:
        """Consecutive blocks of k eigenvalues (largest first), one mixed member per block."""
        if k < 1:
            raise ValidationError("rank bound must be at least 1", k=k)
        r = QuantumService.rank(rho)
        if r <= k:
            return QuantumEnsemble(weights=(1.0,), members=[rho])
        s, v = rho.spectrum, rho.eigenvectors
        total = math.fsum(s[:r])
        weights, members = [], []
        for start in range(0, r, k):
            block = slice(start, min(start + k, r))
            lam = math.fsum(s[block])
            values = np.zeros(rho.dim)
            values[block] = s[block] / lam
            weights.append(lam / total)
            members.append(DensityMatrix.from_spectrum(values, v))
        return QuantumEnsemble(weights=tuple(weights), members=members)

    @staticmethod
    def check_barycenter(rho: DensityMatrix, e: QuantumEnsemble) -> float:
        if e.dim != rho.dim:
            raise DimensionMismatch("ensemble and state act on different spaces", dims=(e.dim, rho.dim))
        residual = float(np.max(np.abs(e.barycenter() - rho.matrix)))
        if residual > get_settings().tol("BARYCENTER"):
            raise BarycenterMismatch("ensemble barycenter differs from the state", residual=residual)
        return residual

    @staticmethod
    def _gap_terms(rho: DensityMatrix, e: QuantumEnsemble) -> Tuple[float, float]:
        QuantumService.check_barycenter(rho, e)
        gap = math.fsum(w * QuantumService.quantum_relative_entropy(m, rho) for w, m in zip(e.weights, e.members))
        direct = QuantumService.von_neumann_entropy(rho) - math.fsum(
            w * QuantumService.von_neumann_entropy(m) for w, m in zip(e.weights, e.members)
        )
        return gap, direct

    @staticmethod
    def quantum_ensemble_gap(rho: DensityMatrix, e: QuantumEnsemble) -> float:
        """Σ πᵢ H(ρᵢ‖ρ), audited against H(ρ) − Σ πᵢ H(ρᵢ)."""
        gap, direct = QuantumService._gap_terms(rho, e)
        if abs(gap - direct) > get_settings().tol("QUANTUM_IDENTITY"):
            logger.warning("quantum entropy gap identity off by %.3e", abs(gap - direct))
        return gap

    @staticmethod
    def entropy_gap_identity_residual(rho: DensityMatrix, e: QuantumEnsemble) -> float:
        gap, direct = QuantumService._gap_terms(rho, e)
        return abs(gap - direct)

    @staticmethod
    def delta_k_vn_bound(rho: DensityMatrix, k: int) -> float:
        if k < 1:
            raise ValidationError("rank bound must be at least 1", k=k)
        if QuantumService.rank(rho) <= k:
            return 0.0
        return QuantumService.quantum_ensemble_gap(rho, QuantumService.rank_k_decomposition(rho, k))

    @staticmethod
    def vn_approximant_lower_bound(rho: DensityMatrix, k: int) -> float:
        return QuantumService.von_neumann_entropy(rho) - QuantumService.delta_k_vn_bound(rho, k)

    @staticmethod
    def purify(rho: DensityMatrix) -> np.ndarray:
        """Σⱼ √sⱼ |eⱼ⟩⊗|j⟩ on the doubled space (eigenbasis ⊗ standard basis)."""
        weighted = rho.eigenvectors * np.sqrt(rho.spectrum)
        return weighted.reshape(-1)

    @staticmethod
    def marginals(omega: DensityMatrix, dims: Tuple[int, int]) -> Tuple[DensityMatrix, DensityMatrix]:
        if omega.dim != dims[0] * dims[1]:
            raise DimensionMismatch("bipartite state does not match the given dims", dim=omega.dim, dims=tuple(dims))
        first = DensityMatrix.of(MatrixService.partial_trace(omega.matrix, dims, "first"))
        second = DensityMatrix.of(MatrixService.partial_trace(omega.matrix, dims, "second"))
        return first, second

    @staticmethod
    def product_state(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
        """a ⊗ b with its eigensystem taken from the factors."""
        return DensityMatrix.from_spectrum(
            np.kron(a.spectrum, b.spectrum), MatrixService.tensor(a.eigenvectors, b.eigenvectors)
        )

    @staticmethod
    def lemma_old_identity_check(omega: DensityMatrix, dims: Tuple[int, int]) -> float:
        """|H(ω) − H(ω_A) − H(ω_B) + H(ω‖ω_A⊗ω_B)|."""
        first, second = QuantumService.marginals(omega, dims)
        mutual = QuantumService.quantum_relative_entropy(omega, QuantumService.product_state(first, second))
        h = QuantumService.von_neumann_entropy
        return abs(h(omega) - h(first) - h(second) + mutual)
