from dataclasses import dataclass
from pydantic import BaseModel, ConfigDict, Field, field_serializer
from typing import List
import numpy as np


class KernelValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: complex
    truncation_estimate: float = Field(default=0.0, ge=0)
    degree_used: int = Field(default=0, ge=0)
    converged: bool = True

    @field_serializer("value")
    def _as_pair(self, value: complex) -> List[float]:
        return [value.real, value.imag]


@dataclass
class KernelBatch:
    """Kernel values K(x, y_i) for a batch of second arguments."""

    values: np.ndarray
    truncation: np.ndarray
    degree_used: np.ndarray
    converged: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def item(self, i: int) -> KernelValue:
        return KernelValue(
            value=complex(self.values[i]),
            truncation_estimate=float(self.truncation[i]),
            degree_used=int(self.degree_used[i]),
            converged=bool(self.converged[i]),
        )
