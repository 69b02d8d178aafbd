from bergkern.exceptions import ArgumentError
from bergkern.models.complex_point import ComplexPoint
from bergkern.models.multi_index import MultiIndex
from typing import Dict, List, Mapping, Optional, Tuple
import numpy as np


class Polynomial:
    """Holomorphic polynomial f(w) = sum_alpha C_alpha w^alpha."""

    def __init__(self, arity: int, coefficients: Mapping[Tuple[int, ...], complex]):
        if arity < 1:
            raise ArgumentError("polynomial arity must be at least 1")
        self.arity = arity
        self.coefficients: Dict[Tuple[int, ...], complex] = {}
        for alpha, c in coefficients.items():
            key = tuple(int(a) for a in (alpha.entries if isinstance(alpha, MultiIndex) else alpha))
            if len(key) != arity or any(a < 0 for a in key):
                raise ArgumentError(f"bad exponent {key} for arity {arity}")
            if c != 0:
                self.coefficients[key] = self.coefficients.get(key, 0j) + complex(c)

    @classmethod
    def monomial(cls, alpha: MultiIndex, coefficient: complex = 1.0) -> "Polynomial":
        return cls(alpha.arity, {alpha.entries: coefficient})

    @classmethod
    def constant(cls, arity: int, value: complex) -> "Polynomial":
        return cls(arity, {(0,) * arity: value})

    @classmethod
    def random_sparse(cls, arity: int, degree: int, num_terms: int, rng: np.random.Generator) -> "Polynomial":
        coefficients = {}
        for _ in range(num_terms):
            d = int(rng.integers(0, degree + 1))
            cuts = np.sort(rng.integers(0, d + 1, size=arity - 1))
            alpha = np.diff(np.concatenate(([0], cuts, [d])))
            coefficients[tuple(int(a) for a in alpha)] = complex(rng.normal(), rng.normal())
        return cls(arity, coefficients)

    def terms(self) -> List[Tuple[MultiIndex, complex]]:
        return [(MultiIndex(entries=k), c) for k, c in sorted(self.coefficients.items())]

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.coefficients), default=0)

    def max_partial_degree(self) -> int:
        return max((max(k) for k in self.coefficients), default=0)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an array of points of shape (N, arity)."""
        points = np.asarray(points, dtype=np.complex128)
        if points.shape[-1] != self.arity:
            raise ArgumentError(f"expected points of arity {self.arity}, got {points.shape[-1]}")
        total = np.zeros(points.shape[:-1], dtype=np.complex128)
        for alpha, c in self.coefficients.items():
            total += c * np.prod(points ** np.asarray(alpha), axis=-1)
        return total

    def __call__(self, z: ComplexPoint) -> complex:
        return complex(self.evaluate(z.as_array()[None, :])[0])

    def to_dict(self, label: Optional[str] = None) -> dict:
        data = {
            "arity": self.arity,
            "terms": [[list(k), [c.real, c.imag]] for k, c in sorted(self.coefficients.items())],
        }
        if label:
            data["label"] = label
        return data

    def __repr__(self) -> str:
        return f"Polynomial(arity={self.arity}, terms={len(self.coefficients)})"
