from __future__ import annotations

import itertools
import math
from typing import Iterator, List, Sequence

import numpy as np
from scipy.special import entr, rel_entr

from entrocert.classical.schema import ClassicalEnsemble, Distribution, Ordering
from entrocert.cmn.errors import BarycenterMismatch, SupportTooLarge, ValidationError
from entrocert.cmn.logging import get_logger
from entrocert.config import get_settings


logger = get_logger("classical")


def _check_k(k: int) -> None:
    if k < 1:
        raise ValidationError("coarse-graining order must be at least 1", k=k)


def _order(x: Distribution, ordering: Ordering) -> np.ndarray:
    if ordering == "nonincreasing":
        return np.argsort(-x.array, kind="stable")
    return np.arange(len(x))


def _set_partitions(items: Sequence[int], cap: int) -> Iterator[List[List[int]]]:
    """Every set partition of ``items`` into blocks of size at most ``cap``."""
    if not items:
        yield []
        return
    first, rest = items[0], list(items[1:])
    for size in range(min(cap - 1, len(rest)) + 1):
        for combo in itertools.combinations(range(len(rest)), size):
            chosen = set(combo)
            block = [first] + [rest[i] for i in combo]
            remaining = [r for i, r in enumerate(rest) if i not in chosen]
            for tail in _set_partitions(remaining, cap):
                yield [block] + tail


class ClassicalService:
    @staticmethod
    def geometric(r: float, n: int) -> Distribution:
        """First n terms of (1-r) r^(j-1), renormalised."""
        terms = (1.0 - r) * r ** np.arange(n)
        return Distribution.of(terms / math.fsum(terms))

    @staticmethod
    def support_size(x: Distribution) -> int:
        return int(np.count_nonzero(x.array > get_settings().tol("SUPPORT")))

    @staticmethod
    def shannon_entropy(x: Distribution) -> float:
        return float(math.fsum(entr(x.array)))

    @staticmethod
    def kl_divergence(x: Distribution, y: Distribution) -> float:
        n = max(len(x), len(y))
        p, q = x.padded(n), y.padded(n)
        tol = get_settings().tol("SUPPORT")
        in_p = p > tol
        if np.any(in_p & (q <= tol)):
            return math.inf
        return max(0.0, float(math.fsum(rel_entr(np.where(in_p, p, 0.0), q))))

    @staticmethod
    def coarse_grain(x: Distribution, k: int, ordering: Ordering = "nonincreasing") -> Distribution:
        _check_k(k)
        if k == 1 and ordering == "as-given":
            return x
        arr = x.array[_order(x, ordering)]
        pad = (-arr.size) % k
        blocks = np.concatenate([arr, np.zeros(pad)]).reshape(-1, k)
        return Distribution.of([math.fsum(b) for b in blocks])

    @staticmethod
    def coarse_decomposition(x: Distribution, k: int, ordering: Ordering = "nonincreasing") -> ClassicalEnsemble:
        """x = Σ λᵢ pᵢ with λᵢ the i-th block mass and pᵢ x conditioned on block i."""
        _check_k(k)
        arr = x.array
        order = _order(x, ordering)
        weights, members = [], []
        for start in range(0, arr.size, k):
            idx = order[start:start + k]
            lam = math.fsum(arr[idx])
            if lam <= 0:
                continue
            member = np.zeros(arr.size)
            member[idx] = arr[idx] / lam
            weights.append(lam)
            members.append(Distribution.of(member))
        return ClassicalEnsemble(weights=tuple(weights), members=members)

    @staticmethod
    def _gap_terms(x: Distribution, e: ClassicalEnsemble) -> tuple[float, float]:
        n = max(len(x), e.support_length)
        residual = float(np.max(np.abs(e.barycenter(n) - x.padded(n))))
        if residual > get_settings().tol("BARYCENTER"):
            raise BarycenterMismatch("ensemble barycenter differs from the distribution", residual=residual)
        gap = math.fsum(w * ClassicalService.kl_divergence(m, x) for w, m in zip(e.weights, e.members))
        direct = ClassicalService.shannon_entropy(x) - math.fsum(
            w * ClassicalService.shannon_entropy(m) for w, m in zip(e.weights, e.members)
        )
        return gap, direct

    @staticmethod
    def ensemble_entropy_gap(x: Distribution, e: ClassicalEnsemble) -> float:
        """Σ πᵢ S(xᵢ‖x), audited against S(x) − Σ πᵢ S(xᵢ)."""
        gap, direct = ClassicalService._gap_terms(x, e)
        if abs(gap - direct) > get_settings().tol("GAP_IDENTITY"):
            logger.warning("entropy gap identity off by %.3e", abs(gap - direct))
        return gap

    @staticmethod
    def entropy_gap_identity_residual(x: Distribution, e: ClassicalEnsemble) -> float:
        gap, direct = ClassicalService._gap_terms(x, e)
        return abs(gap - direct)

    @staticmethod
    def delta_k_shannon_bound(x: Distribution, k: int) -> float:
        """S(k(x)) under nonincreasing ordering: an upper bound on the k-th gap."""
        _check_k(k)
        if ClassicalService.support_size(x) <= k:
            return 0.0
        return ClassicalService.shannon_entropy(ClassicalService.coarse_grain(x, k, "nonincreasing"))

    @staticmethod
    def best_partition_ensemble(x: Distribution, k: int) -> ClassicalEnsemble:
        """Partition-induced decomposition with the smallest gap (exhaustive search)."""
        _check_k(k)
        settings = get_settings()
        arr = x.array
        support = [int(i) for i in np.flatnonzero(arr > settings.tol("SUPPORT"))]
        if len(support) > settings.ORACLE_MAX_SUPPORT:
            raise SupportTooLarge("support too large for exhaustive partition search",
                                  support=len(support), limit=settings.ORACLE_MAX_SUPPORT)
        best, best_score = None, math.inf
        # For a block B the term λ_B S(x|_B / λ_B ‖ x) equals -λ_B ln λ_B.
        for partition in _set_partitions(support, k):
            masses = [math.fsum(arr[b]) for b in partition]
            score = math.fsum(-m * math.log(m) for m in masses)
            if score < best_score:
                best, best_score = partition, score
        weights, members = [], []
        for block in best:
            lam = math.fsum(arr[block])
            member = np.zeros(arr.size)
            member[block] = arr[block] / lam
            weights.append(lam)
            members.append(Distribution.of(member))
        total = math.fsum(weights)
        return ClassicalEnsemble(weights=tuple(w / total for w in weights), members=members)

    @staticmethod
    def delta_k_shannon_oracle(x: Distribution, k: int) -> float:
        """Minimum gap over partition-induced decompositions; an upper bound on the exact infimum."""
        _check_k(k)
        settings = get_settings()
        n = ClassicalService.support_size(x)
        if n > settings.ORACLE_MAX_SUPPORT:
            raise SupportTooLarge("support too large for exhaustive partition search",
                                  support=n, limit=settings.ORACLE_MAX_SUPPORT)
        if k >= n:
            return 0.0
        ensemble = ClassicalService.best_partition_ensemble(x, k)
        return ClassicalService.ensemble_entropy_gap(x, ensemble)

    @staticmethod
    def majorizes(x: Distribution, y: Distribution) -> bool:
        """True iff x ≺ y in the Uhlmann sense, i.e. y is more chaotic than x."""
        n = max(len(x), len(y))
        cx = np.cumsum(np.sort(x.padded(n))[::-1])
        cy = np.cumsum(np.sort(y.padded(n))[::-1])
        return bool(np.all(cx >= cy - get_settings().tol("MAJORIZATION")))

    @staticmethod
    def approximant_lower_bound(x: Distribution, k: int) -> float:
        """Ensemble average of S over the coarse decomposition, S(x) − S(k(x))."""
        return ClassicalService.shannon_entropy(x) - ClassicalService.delta_k_shannon_bound(x, k)

    @staticmethod
    def approximant_oracle(x: Distribution, k: int) -> float:
        return ClassicalService.shannon_entropy(x) - ClassicalService.delta_k_shannon_oracle(x, k)
