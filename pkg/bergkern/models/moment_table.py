from pydantic import BaseModel, ConfigDict, Field
from typing import List, Literal, Optional, Tuple

MomentMethod = Literal["closed_form", "quadrature"]


class MomentEntry(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    alpha: Tuple[int, ...]
    log_value: float
    method: MomentMethod
    abs_error_estimate: float = Field(ge=0)
    rel_error_estimate: float = Field(default=0.0, ge=0)
    rel_tol: Optional[float] = None
    converged: bool = True


class MomentAgreement(BaseModel):
    """Closed form against quadrature for one multi-index."""

    alpha: Tuple[int, ...]
    rel_discrepancy: float
    tolerance: float
    agrees: bool


class MomentFailure(BaseModel):
    alpha: Tuple[int, ...]
    error: str


class MomentTableRecord(BaseModel):
    """JSON form of a moment table.

    ``entries`` holds one entry per (alpha, method) that was computed;
    ``agreement`` is filled for every alpha known by both methods.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    weight: dict
    shadow: dict
    entries: List[MomentEntry]
    agreement: List[MomentAgreement] = Field(default_factory=list)
    errors: List[MomentFailure] = Field(default_factory=list)
