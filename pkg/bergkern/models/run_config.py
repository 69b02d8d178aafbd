from bergkern.models.families import BallParams, CnParams, DnmParams, VEtaParams, build_family
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator
from typing import Any, Dict, List, Literal, Optional, Union

Command = Literal["moments", "eval", "verify", "compare"]
Suite = Literal[
    "cross_validate", "reproducing", "orthogonality", "parseval", "symmetry", "gram", "sphere", "veta_series"
]

MAX_TABLE_DEGREE = 200


class RunConfig(BaseModel):
    """Everything one CLI invocation needs, validated before any computation."""

    model_config = ConfigDict(extra="forbid")

    command: Command
    family: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    weight_file: Optional[str] = None
    pairs: List[str] = Field(default_factory=list)
    points_file: Optional[str] = None
    tol: Optional[float] = Field(default=None, gt=0)
    degree: int = Field(default=4, ge=0, le=MAX_TABLE_DEGREE)
    max_degree: Optional[int] = Field(default=None, ge=0)
    seed: Optional[int] = Field(default=None, ge=0)
    scheme: Literal["quadrature", "mc"] = "quadrature"
    samples: Optional[int] = Field(default=None, ge=2)
    suite: Suite = "cross_validate"
    num_points: int = Field(default=10, ge=1)
    moments: Literal["closed_form", "quadrature"] = "closed_form"
    format: Literal["json", "csv"] = "json"
    out: Optional[str] = None

    _family: Optional[Union[CnParams, DnmParams, VEtaParams, BallParams]] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check(self):
        if (self.family is None) == (self.weight_file is None):
            raise ValueError("exactly one of family or weight_file is required")
        if self.seed is None and (self.scheme == "mc" or (self.command == "verify" and self.suite == "sphere")):
            raise ValueError("a seed is required for Monte-Carlo runs")
        if self.family is not None:
            self._family = build_family(self.family, self.params)
        return self

    @property
    def family_params(self) -> Optional[Union[CnParams, DnmParams, VEtaParams, BallParams]]:
        return self._family
