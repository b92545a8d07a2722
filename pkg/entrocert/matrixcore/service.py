from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from entrocert.cmn.errors import DimensionMismatch, NotHermitian, NotSquare
from entrocert.cmn.logging import get_logger
from entrocert.config import get_settings
from entrocert.matrixcore.schema import EigenSystem, MatrixMap, Subsystem


logger = get_logger("matrixcore")


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """One complex Jacobi rotation zeroing a[p, q], applied in place to a and v."""
    b = a[p, q]
    mag = abs(b)
    if mag == 0.0:
        return
    app, aqq = a[p, p].real, a[q, q].real
    theta = (aqq - app) / (2.0 * mag)
    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    # B = D R D† with D = diag(1, e^{-i phi}); U = D P diagonalises B.
    phase = np.conj(b / mag)
    u = np.array([[c, s], [-s * phase, c * phase]], dtype=np.complex128)
    idx = [p, q]
    a[:, idx] = a[:, idx] @ u
    a[idx, :] = u.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    a[p, p], a[q, q] = a[p, p].real, a[q, q].real
    v[:, idx] = v[:, idx] @ u


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Make the first non-negligible entry of every column real and positive."""
    out = v.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        lead = np.flatnonzero(np.abs(col) > 1e-6)
        if lead.size:
            z = col[lead[0]]
            out[:, j] = col * (abs(z) / z)
    return out


def _canonical_order(vals: np.ndarray, vecs: np.ndarray, digits: int) -> np.ndarray:
    degenerate = 10.0 ** (-digits)
    clusters: list[list[int]] = []
    for j in np.argsort(-vals, kind="stable"):
        if clusters and vals[clusters[-1][-1]] - vals[j] <= degenerate:
            clusters[-1].append(int(j))
        else:
            clusters.append([int(j)])

    def key(j: int) -> tuple:
        return tuple(x for z in vecs[:, j] for x in (round(z.real, digits), round(z.imag, digits)))

    return np.array([j for cl in clusters for j in sorted(cl, key=key, reverse=True)], dtype=int)


class MatrixService:
    @staticmethod
    def hermitian_residual(a: np.ndarray) -> float:
        a = np.asarray(a)
        if a.size == 0:
            return 0.0
        return float(np.max(np.abs(a - a.conj().T)))

    @staticmethod
    def hermitian_eig(a: np.ndarray) -> EigenSystem:
        """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

        Eigenvalues come back nonincreasing; inside a degenerate cluster the
        eigenvectors are ordered by their rounded entries so identical inputs
        always give identical outputs.
        """
        settings = get_settings()
        a = np.asarray(a, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NotSquare("matrix must be square", shape=a.shape)
        residual = MatrixService.hermitian_residual(a)
        if residual > settings.tol("HERMITIAN"):
            raise NotHermitian("matrix is not Hermitian", residual=residual)

        n = a.shape[0]
        work = (a + a.conj().T) / 2.0
        vecs = np.eye(n, dtype=np.complex128)
        threshold = settings.tol("JACOBI_OFF") * max(1.0, float(np.linalg.norm(work)))
        sweeps = 0
        while _off_norm(work) >= threshold:
            if sweeps >= settings.JACOBI_MAX_SWEEPS:
                logger.warning("Jacobi sweep cap %d reached, off-norm %.3e", sweeps, _off_norm(work))
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    _rotate(work, vecs, p, q)
            sweeps += 1

        vals = np.real(np.diag(work)).copy()
        vecs = _fix_phase(vecs)
        order = _canonical_order(vals, vecs, settings.EIG_ROUND_DIGITS)
        return EigenSystem(eigenvalues=vals[order], eigenvectors=vecs[:, order])

    @staticmethod
    def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # np.kron uses the row-major convention i_a * dim_b + i_b.
        return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))

    @staticmethod
    def _split(w: np.ndarray, dims: Tuple[int, int]) -> np.ndarray:
        w = np.asarray(w, dtype=np.complex128)
        da, db = dims
        side = da * db
        if w.shape != (side, side):
            raise DimensionMismatch("bipartite matrix has the wrong side", shape=w.shape, dims=tuple(dims))
        return w.reshape(da, db, da, db)

    @staticmethod
    def partial_trace(w: np.ndarray, dims: Tuple[int, int], keep: Subsystem = "first") -> np.ndarray:
        t = MatrixService._split(w, dims)
        if keep == "first":
            return np.einsum("ijkj->ik", t)
        if keep == "second":
            return np.einsum("ijil->jl", t)
        raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")

    @staticmethod
    def apply_to_subsystem(action: MatrixMap, w: np.ndarray, dims: Tuple[int, int]) -> np.ndarray:
        """(action ⊗ Id)(w) for a linear map acting on the first factor."""
        t = MatrixService._split(w, dims)
        da, db = dims
        out = None
        for j in range(db):
            for l in range(db):
                block = np.asarray(action(t[:, j, :, l]), dtype=np.complex128)
                if out is None:
                    do = block.shape[0]
                    if block.shape != (do, do):
                        raise DimensionMismatch("map output must be square", shape=block.shape)
                    out = np.zeros((do, db, do, db), dtype=np.complex128)
                out[:, j, :, l] = block
        do = out.shape[0]
        return out.reshape(do * db, do * db)
