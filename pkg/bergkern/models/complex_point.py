from bergkern.exceptions import ArgumentError
from bergkern.models.multi_index import MultiIndex
from pydantic import BaseModel, ConfigDict, field_serializer, field_validator
from typing import List, Sequence, Tuple
import math
import numpy as np


class ComplexPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    coords: Tuple[complex, ...]

    @field_validator("coords", mode="before")
    @classmethod
    def _coerce(cls, value):
        if isinstance(value, np.ndarray):
            value = value.tolist()
        coords = []
        for c in value:
            if isinstance(c, (list, tuple)) and len(c) == 2:
                coords.append(complex(float(c[0]), float(c[1])))
            else:
                coords.append(complex(c))
        if not coords:
            raise ValueError("a point needs at least one coordinate")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in coords):
            raise ValueError("point coordinates must be finite")
        return tuple(coords)

    @field_serializer("coords")
    def _as_pairs(self, coords: Tuple[complex, ...]) -> List[List[float]]:
        return [[c.real, c.imag] for c in coords]

    @classmethod
    def of(cls, *coords: complex) -> "ComplexPoint":
        return cls(coords=coords)

    @classmethod
    def origin(cls, n: int) -> "ComplexPoint":
        return cls(coords=(0j,) * n)

    @property
    def arity(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=np.complex128)

    def moduli(self) -> Tuple[float, ...]:
        return tuple(abs(c) for c in self.coords)

    def norm(self) -> float:
        return math.sqrt(hermitian_product(self, self).real)

    def monomial(self, alpha: MultiIndex) -> complex:
        return monomial_eval(self, alpha)

    def split(self, sizes: Sequence[int]) -> Tuple["ComplexPoint", ...]:
        if sum(sizes) != self.arity:
            raise ArgumentError(f"block sizes {tuple(sizes)} do not add up to arity {self.arity}")
        blocks = []
        start = 0
        for size in sizes:
            blocks.append(ComplexPoint(coords=self.coords[start:start + size]))
            start += size
        return tuple(blocks)

    def concat(self, other: "ComplexPoint") -> "ComplexPoint":
        return ComplexPoint(coords=self.coords + other.coords)

    def __str__(self) -> str:
        return " ".join(f"{c.real!r},{c.imag!r}" for c in self.coords)


def monomial_eval(z: ComplexPoint, alpha: MultiIndex) -> complex:
    if z.arity != alpha.arity:
        raise ArgumentError(f"point arity {z.arity} does not match multi-index arity {alpha.arity}")
    value = 1 + 0j
    for c, a in zip(z.coords, alpha.entries):
        if a:
            value *= c ** a
    return value


def hermitian_product(z: ComplexPoint, w: ComplexPoint) -> complex:
    """<z, w> = sum z_j conj(w_j)."""
    if z.arity != w.arity:
        raise ArgumentError(f"arity mismatch: {z.arity} vs {w.arity}")
    return sum((a * b.conjugate() for a, b in zip(z.coords, w.coords)), 0j)
