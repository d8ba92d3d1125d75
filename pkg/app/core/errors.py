from typing import Any, Optional, Sequence


class ValuationError(Exception):
    """Base error of the valuation engine; `exit_code` is what the CLI returns."""

    exit_code: int = 2

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class DimensionError(ValuationError):
    """A claim, density or strategy does not match the outcome count."""


class ConditioningError(ValuationError):
    """A conditioning cell carries zero weight under the required measure."""

    def __init__(self, detail: str, cell: Optional[Sequence[int]] = None) -> None:
        super().__init__(detail)
        self.cell = tuple(cell) if cell is not None else None


class DomainError(ValuationError):
    """A parameter lies outside the domain of an operation."""


class HedgingError(ValuationError):
    """The quadratic hedge is not identifiable (singular Gram matrix)."""

    def __init__(self, detail: str, dependent_assets: Sequence[int] = ()) -> None:
        super().__init__(detail)
        self.dependent_assets = tuple(dependent_assets)


class ContractViolationError(ValuationError):
    """An operation was called with an argument that breaks its contract."""


class ConfigurationError(ValuationError):
    """Run configuration is unusable."""


class ConfigParseError(ConfigurationError):
    def __init__(self, detail: str, line_number: int) -> None:
        super().__init__(f"line {line_number}: {detail}")
        self.line_number = line_number


class ConfigValidationError(ConfigurationError):
    def __init__(self, detail: str, key: str) -> None:
        super().__init__(f"{key}: {detail}")
        self.key = key


class VerificationError(ValuationError):
    """A property suite found a counterexample."""

    exit_code = 1

    def __init__(self, suite: str, counterexample: dict[str, Any]) -> None:
        super().__init__(f"suite {suite} failed")
        self.suite = suite
        self.counterexample = counterexample
