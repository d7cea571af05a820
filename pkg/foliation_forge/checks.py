from dataclasses import dataclass, field
from typing import Any, Optional, Tuple


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a verification. A failed check is a finding, not an error."""

    name: str
    passed: bool
    exact: bool
    residual: Any = 0
    witness: Optional[Tuple] = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed
