from __future__ import annotations

import math

import numpy as np

from entrocert.channels.schema import ComplementaryChannel, KrausChannel, MiBracket
from entrocert.cmn.errors import DimensionMismatch, InfiniteDivergence
from entrocert.config import get_settings
from entrocert.matrixcore.service import MatrixService
from entrocert.quantum.schema import DensityMatrix, QuantumEnsemble
from entrocert.quantum.service import QuantumService


def _check_input(phi: KrausChannel, rho: DensityMatrix) -> None:
    if rho.dim != phi.dim_in:
        raise DimensionMismatch("state does not fit the channel input", dim=rho.dim, dim_in=phi.dim_in)


def _state(a: np.ndarray) -> DensityMatrix:
    """Channel output as a state; the trace is renormalised within the Kraus tolerance."""
    return DensityMatrix.of(a / np.trace(a).real)


def _weighted_divergence(weights, states, reference: DensityMatrix) -> float:
    return math.fsum(w * QuantumService.quantum_relative_entropy(s, reference) for w, s in zip(weights, states))


class ChannelService:
    # ----- standard channels -----
    @staticmethod
    def identity(d: int) -> KrausChannel:
        return KrausChannel.of([np.eye(d)])

    @staticmethod
    def dephasing(d: int) -> KrausChannel:
        """Complete dephasing in the standard basis: Kraus |i⟩⟨i|."""
        ops = []
        for i in range(d):
            p = np.zeros((d, d))
            p[i, i] = 1.0
            ops.append(p)
        return KrausChannel.of(ops)

    @staticmethod
    def completely_depolarizing(d: int) -> KrausChannel:
        """A ↦ Tr(A) I/d with Kraus |i⟩⟨j|/√d."""
        ops = []
        for i in range(d):
            for j in range(d):
                op = np.zeros((d, d))
                op[i, j] = 1.0 / math.sqrt(d)
                ops.append(op)
        return KrausChannel.of(ops)

    @staticmethod
    def amplitude_damping(gamma: float) -> KrausChannel:
        if gamma < 0 or gamma > 1:
            raise ValueError("gamma must be in [0, 1]")
        k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]])
        k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]])
        return KrausChannel.of([k0, k1])

    @staticmethod
    def trace_out(d: int) -> KrausChannel:
        """Trace-and-replace onto the one-dimensional output: Kraus ⟨i|."""
        return KrausChannel.of([np.eye(d)[i:i + 1, :] for i in range(d)])

    # ----- action -----
    @staticmethod
    def apply_matrix(phi: KrausChannel, a: np.ndarray) -> np.ndarray:
        v = phi.stack
        return np.einsum("kij,jl,kml->im", v, np.asarray(a, dtype=np.complex128), v.conj())

    @staticmethod
    def apply(phi: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
        _check_input(phi, rho)
        return _state(ChannelService.apply_matrix(phi, rho.matrix))

    @staticmethod
    def complementary(phi: KrausChannel) -> ComplementaryChannel:
        return ComplementaryChannel(channel=phi)

    @staticmethod
    def apply_complementary(phi: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
        _check_input(phi, rho)
        return _state(ChannelService.complementary(phi)(rho.matrix))

    # ----- entropic characteristics -----
    @staticmethod
    def output_entropy(phi: KrausChannel, rho: DensityMatrix) -> float:
        return QuantumService.von_neumann_entropy(ChannelService.apply(phi, rho))

    @staticmethod
    def complementary_output_entropy(phi: KrausChannel, rho: DensityMatrix) -> float:
        return QuantumService.von_neumann_entropy(ChannelService.apply_complementary(phi, rho))

    @staticmethod
    def output_entropy_gap(phi: KrausChannel, rho: DensityMatrix, e: QuantumEnsemble) -> float:
        """Σπᵢ H(Φρᵢ‖Φρ)."""
        _check_input(phi, rho)
        QuantumService.check_barycenter(rho, e)
        outputs = [ChannelService.apply(phi, m) for m in e.members]
        return _weighted_divergence(e.weights, outputs, ChannelService.apply(phi, rho))

    @staticmethod
    def output_gap_identity_residual(phi: KrausChannel, rho: DensityMatrix, e: QuantumEnsemble) -> float:
        """|H_Φ(ρ) − Σπᵢ H_Φ(ρᵢ) − Σπᵢ H(Φρᵢ‖Φρ)|."""
        gap = ChannelService.output_entropy_gap(phi, rho, e)
        direct = ChannelService.output_entropy(phi, rho) - math.fsum(
            w * ChannelService.output_entropy(phi, m) for w, m in zip(e.weights, e.members)
        )
        return abs(direct - gap)

    @staticmethod
    def mutual_information_sum(phi: KrausChannel, rho: DensityMatrix) -> float:
        """I(ρ,Φ) = H(ρ) + H(Φ(ρ)) − H(Φ̃(ρ))."""
        return (
            QuantumService.von_neumann_entropy(rho)
            + ChannelService.output_entropy(phi, rho)
            - ChannelService.complementary_output_entropy(phi, rho)
        )

    @staticmethod
    def mutual_information_rel(phi: KrausChannel, rho: DensityMatrix) -> float:
        """I(ρ,Φ) = H((Φ⊗Id)(|φ_ρ⟩⟨φ_ρ|) ‖ Φ(ρ)⊗ρ_K).

        ρ_K, the reference marginal of the purification, is ρ written in its
        own eigenbasis, i.e. diag(spectrum).
        """
        _check_input(phi, rho)
        d = rho.dim
        psi = QuantumService.purify(rho)
        joint = MatrixService.apply_to_subsystem(
            lambda a: ChannelService.apply_matrix(phi, a), np.outer(psi, psi.conj()), (d, d)
        )
        reference = QuantumService.product_state(ChannelService.apply(phi, rho), DensityMatrix.diagonal(rho.spectrum))
        return QuantumService.quantum_relative_entropy(_state(joint), reference)

    @staticmethod
    def mi_bracket(phi: KrausChannel, rho: DensityMatrix, e: QuantumEnsemble) -> MiBracket:
        _check_input(phi, rho)
        QuantumService.check_barycenter(rho, e)
        tilde = ChannelService.complementary(phi)
        env = [_state(tilde(m.matrix)) for m in e.members]
        return MiBracket(
            input_term=_weighted_divergence(e.weights, e.members, rho),
            output_term=_weighted_divergence(e.weights, [ChannelService.apply(phi, m) for m in e.members],
                                             ChannelService.apply(phi, rho)),
            environment_term=_weighted_divergence(e.weights, env, _state(tilde(rho.matrix))),
        )

    @staticmethod
    def delta_k_mi_bound(phi: KrausChannel, rho: DensityMatrix, k: int) -> float:
        """Bracketed MI gap evaluated on the eigenblock ensemble of ρ."""
        _check_input(phi, rho)
        if QuantumService.rank(rho) <= k:
            return 0.0
        return ChannelService.mi_bracket(phi, rho, QuantumService.rank_k_decomposition(rho, k)).value

    @staticmethod
    def chi_lower_bound(phi: KrausChannel, rho: DensityMatrix, e: QuantumEnsemble) -> float:
        """Holevo quantity of one ensemble; a lower bound on χ_Φ(ρ), never its value."""
        return ChannelService.output_entropy_gap(phi, rho, e)

    # ----- degradability and monotonicity -----
    @staticmethod
    def verify_degrading(phi: KrausChannel, lam: KrausChannel) -> float:
        """max over matrix units E_ab of ‖Λ(Φ(E_ab)) − Φ̃(E_ab)‖_max."""
        if lam.dim_in != phi.dim_out or lam.dim_out != phi.environment_dim:
            raise DimensionMismatch(
                "degrading map must send the channel output to its environment",
                lam=(lam.dim_in, lam.dim_out), expected=(phi.dim_out, phi.environment_dim),
            )
        tilde = ChannelService.complementary(phi)
        residual = 0.0
        for a in range(phi.dim_in):
            for b in range(phi.dim_in):
                unit = np.zeros((phi.dim_in, phi.dim_in), dtype=np.complex128)
                unit[a, b] = 1.0
                diff = ChannelService.apply_matrix(lam, ChannelService.apply_matrix(phi, unit)) - tilde(unit)
                residual = max(residual, float(np.max(np.abs(diff))))
        return residual

    @staticmethod
    def is_degradable(phi: KrausChannel, lam: KrausChannel) -> bool:
        return ChannelService.verify_degrading(phi, lam) < get_settings().tol("DEGRADING")

    @staticmethod
    def data_processing_check(phi: KrausChannel, rho: DensityMatrix, sigma: DensityMatrix) -> float:
        """H(ρ‖σ) − H(Φρ‖Φσ); nonnegative up to rounding."""
        _check_input(phi, rho)
        _check_input(phi, sigma)
        before = QuantumService.quantum_relative_entropy(rho, sigma)
        if math.isinf(before):
            raise InfiniteDivergence("H(rho||sigma) is infinite")
        after = QuantumService.quantum_relative_entropy(ChannelService.apply(phi, rho), ChannelService.apply(phi, sigma))
        return before - after
