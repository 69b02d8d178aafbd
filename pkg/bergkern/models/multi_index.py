from bergkern.exceptions import ArgumentError
from functools import lru_cache
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.special import gammaln
from typing import Sequence, Tuple
import numpy as np


class MultiIndex(BaseModel):
    """Ordered tuple of nonnegative integer exponents."""

    model_config = ConfigDict(frozen=True)

    entries: Tuple[int, ...]

    @field_validator("entries", mode="before")
    @classmethod
    def _coerce(cls, value):
        return tuple(int(v) for v in value)

    @field_validator("entries")
    @classmethod
    def _check(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(value) == 0:
            raise ValueError("multi-index must have at least one entry")
        if any(v < 0 for v in value):
            raise ValueError(f"multi-index entries must be nonnegative, got {value}")
        return value

    @classmethod
    def of(cls, *entries: int) -> "MultiIndex":
        return cls(entries=entries)

    @classmethod
    def zeros(cls, n: int) -> "MultiIndex":
        return cls(entries=(0,) * n)

    @classmethod
    def unit(cls, n: int, j: int) -> "MultiIndex":
        if not 0 <= j < n:
            raise ArgumentError(f"unit index {j} out of range for arity {n}")
        return cls(entries=tuple(1 if i == j else 0 for i in range(n)))

    @property
    def arity(self) -> int:
        return len(self.entries)

    def degree(self) -> int:
        return sum(self.entries)

    def factorial_log(self) -> float:
        return float(np.sum(gammaln(np.asarray(self.entries, dtype=float) + 1.0)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=np.int64)

    def split(self, sizes: Sequence[int]) -> Tuple["MultiIndex", ...]:
        """Cut into consecutive blocks, e.g. (alpha, beta) for a product domain."""
        if sum(sizes) != self.arity:
            raise ArgumentError(f"block sizes {tuple(sizes)} do not add up to arity {self.arity}")
        blocks = []
        start = 0
        for size in sizes:
            blocks.append(MultiIndex(entries=self.entries[start:start + size]))
            start += size
        return tuple(blocks)

    def concat(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(entries=self.entries + other.entries)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        if not isinstance(other, MultiIndex):
            return NotImplemented
        if other.arity != self.arity:
            raise ArgumentError(f"arity mismatch: {self.arity} vs {other.arity}")
        return MultiIndex(entries=tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __str__(self) -> str:
        return "(" + ",".join(str(e) for e in self.entries) + ")"


@lru_cache(maxsize=256)
def degree_shell_array(n: int, d: int) -> np.ndarray:
    """All exponent rows of length n and total degree d, lexicographically ascending."""
    if n < 1 or d < 0:
        raise ArgumentError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    if n == 1:
        shell = np.array([[d]], dtype=np.int64)
    else:
        parts = []
        for first in range(d + 1):
            rest = degree_shell_array(n - 1, d - first)
            parts.append(np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest]))
        shell = np.vstack(parts)
    shell.setflags(write=False)
    return shell
