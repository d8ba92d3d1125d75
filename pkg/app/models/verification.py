from typing import Any, Optional

from pydantic import BaseModel, Field

from app.core.errors import VerificationError


class Counterexample(BaseModel):
    """A concrete claim (or pair of claims) on a concrete space breaking a property."""

    name: str = Field(..., description="Name of the violated property")
    space: Optional[dict[str, list[float]]] = Field(None, description="Outcome table")
    claim: Optional[list[float]] = None
    other_claim: Optional[list[float]] = None
    expected: Optional[float] = None
    actual: Optional[float] = None
    detail: Optional[str] = None
    parameters: Optional[dict[str, Any]] = None

    def to_json(self) -> str:
        return self.model_dump_json(exclude_none=True)


class SuiteResult(BaseModel):
    name: str
    trials: int = Field(..., ge=0)
    counterexample: Optional[Counterexample] = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


class VerifyReport(BaseModel):
    seed: int
    suites: list[SuiteResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(suite.passed for suite in self.suites)

    @property
    def first_failure(self) -> Optional[SuiteResult]:
        return next((suite for suite in self.suites if not suite.passed), None)

    def render(self) -> str:
        lines = []
        for suite in self.suites:
            if suite.passed:
                lines.append(f"PASS {suite.name} (trials={suite.trials})")
            else:
                lines.append(f"FAIL {suite.name}: {suite.counterexample.to_json()}")
        summary = "all suites passed" if self.passed else "verification failed"
        lines.append(f"{summary} (seed={self.seed})")
        return "\n".join(lines) + "\n"

    def raise_for_failure(self) -> None:
        failure = self.first_failure
        if failure is not None:
            raise VerificationError(failure.name, failure.counterexample.model_dump(exclude_none=True))
