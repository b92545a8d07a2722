from __future__ import annotations

from typing import Any, Optional


class EntroCertError(Exception):
    """Base error. ``exit_code`` is what the CLI returns when it escapes a command."""

    exit_code: int = 3

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def __str__(self) -> str:
        if not self.context:
            return self.detail
        extra = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.detail} ({extra})"


class CertificationFailed(EntroCertError):
    exit_code = 1


class ParseError(EntroCertError):
    exit_code = 2

    def __init__(self, detail: str, *, path: Optional[str] = None, field: Optional[str] = None, **context: Any):
        super().__init__(detail, path=path, field=field, **context)
        self.path = path
        self.field = field


class ValidationError(EntroCertError):
    exit_code = 3

    def __init__(self, detail: str, *, residual: Optional[float] = None, **context: Any):
        super().__init__(detail, residual=residual, **context)
        self.residual = residual


class IoError(EntroCertError):
    exit_code = 4


# ---- numerical precondition failures ----
class NotSquare(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class BarycenterMismatch(ValidationError):
    pass


class SupportTooLarge(ValidationError):
    pass


class InfiniteEntropyDominator(ValidationError):
    pass


class InfiniteDivergence(ValidationError):
    pass


class UnsupportedStateSet(ValidationError):
    pass


class ResidualError(ValueError):
    """Raised inside model validators; pydantic keeps the instance, so ``residual`` survives to the CLI."""

    def __init__(self, detail: str, residual: float):
        super().__init__(detail)
        self.residual = residual
