from pydantic import BaseModel, Field
from typing import Any, Dict, Literal, Optional

CheckStatus = Literal["passed", "failed", "inconclusive"]


class VerificationReport(BaseModel):
    check_name: str
    target: Dict[str, Any] = Field(default_factory=dict)
    measured: float
    expected: float
    measured_imag: float = 0.0
    expected_imag: float = 0.0
    tolerance: float = Field(ge=0)
    tolerance_origin: str
    passed: bool
    status: CheckStatus
    samples_or_nodes: int = Field(ge=0)
    rng_seed: Optional[int] = None
    standard_error: Optional[float] = None
    notes: str = ""

    @classmethod
    def build(
        cls,
        check_name: str,
        target: Dict[str, Any],
        measured: complex,
        expected: complex,
        tolerance: float,
        tolerance_origin: str,
        samples_or_nodes: int,
        rng_seed: Optional[int] = None,
        standard_error: Optional[float] = None,
        inconclusive: bool = False,
        notes: str = "",
    ) -> "VerificationReport":
        measured = complex(measured)
        expected = complex(expected)
        passed = abs(measured - expected) <= tolerance
        if inconclusive:
            status = "inconclusive"
        else:
            status = "passed" if passed else "failed"
        return cls(
            check_name=check_name,
            target=target,
            measured=measured.real,
            expected=expected.real,
            measured_imag=measured.imag,
            expected_imag=expected.imag,
            tolerance=tolerance,
            tolerance_origin=tolerance_origin,
            passed=passed,
            status=status,
            samples_or_nodes=samples_or_nodes,
            rng_seed=rng_seed,
            standard_error=standard_error,
            notes=notes,
        )

    @property
    def discrepancy(self) -> float:
        return abs(complex(self.measured, self.measured_imag) - complex(self.expected, self.expected_imag))
