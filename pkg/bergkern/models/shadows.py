from bergkern.exceptions import ArgumentError
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Callable, ClassVar, Literal, Optional, Sequence, Tuple
import numpy as np


class ShadowRegion(BaseModel):
    """Set of modulus tuples r >= 0 of a Reinhardt domain.

    Besides membership, a shadow tells the cubature how to walk it: an
    integration order over the axes and, for each axis, the upper limit of its
    section given the coordinates already fixed (``None`` when unbounded).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: str
    n: int = Field(ge=1)

    # sections cover the shadow exactly; otherwise the box is masked by contains()
    exact_sections: ClassVar[bool] = True

    @property
    def arity(self) -> int:
        return self.n

    def upper_bounds(self) -> Tuple[Optional[float], ...]:
        raise NotImplementedError

    def integration_order(self) -> Tuple[int, ...]:
        return tuple(range(self.arity))

    def section_upper(self, axis: int, r: np.ndarray) -> Optional[np.ndarray]:
        raise NotImplementedError

    def _inside(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        inside = np.all(r >= 0.0, axis=-1)
        for j, bound in enumerate(self.upper_bounds()):
            if bound is not None:
                inside &= r[..., j] < bound
        return inside & self._inside(r)

    def descriptor(self) -> dict:
        return self.model_dump(mode="json")


class OrthantShadow(ShadowRegion):
    """All of [0, inf)^n: the shadow of C^n."""

    kind: Literal["orthant"] = "orthant"

    def upper_bounds(self):
        return (None,) * self.n

    def section_upper(self, axis, r):
        return None

    def _inside(self, r):
        return np.ones(r.shape[:-1], dtype=bool)


class BallShadow(ShadowRegion):
    kind: Literal["ball"] = "ball"
    radius: float = Field(default=1.0, gt=0)

    def upper_bounds(self):
        return (self.radius,) * self.n

    def section_upper(self, axis, r):
        budget = self.radius ** 2 - np.sum(r[:, :axis] ** 2, axis=1)
        return np.sqrt(np.maximum(budget, 0.0))

    def _inside(self, r):
        return np.sum(r ** 2, axis=-1) < self.radius ** 2


class HartogsShadow(ShadowRegion):
    """||rho||^2 < exp(-mu1 ||r||^mu2) with r the first n axes and rho the last m."""

    kind: Literal["hartogs"] = "hartogs"
    m: int = Field(ge=1)
    mu1: float = Field(gt=0)
    mu2: float = Field(gt=0)

    @property
    def arity(self) -> int:
        return self.n + self.m

    def upper_bounds(self):
        return (None,) * self.n + (1.0,) * self.m

    def fiber_budget(self, r: np.ndarray) -> np.ndarray:
        base = np.sqrt(np.sum(r[..., :self.n] ** 2, axis=-1))
        return np.exp(-self.mu1 * base ** self.mu2)

    def section_upper(self, axis, r):
        if axis < self.n:
            return None
        budget = self.fiber_budget(r) - np.sum(r[:, self.n:axis] ** 2, axis=1)
        return np.sqrt(np.maximum(budget, 0.0))

    def _inside(self, r):
        return np.sum(r[..., self.n:] ** 2, axis=-1) < self.fiber_budget(r)


def stretched_squares(r: np.ndarray, n: int, m: int, eta: Sequence[float]) -> np.ndarray:
    """exp(eta_j rho^2) r_j^2 for the first n axes, in log space so r_j = 0 stays 0 for any rho."""
    rho2 = r[..., n + m] ** 2
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return np.exp(np.asarray(eta) * rho2[..., None] + 2.0 * np.log(r[..., :n]))


class VEtaShadow(ShadowRegion):
    """sum_j exp(eta_j rho^2) r_j^2 + ||r'||^2 < 1 over axes (r, r', rho)."""

    kind: Literal["veta"] = "veta"
    m: int = Field(ge=1)
    eta: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_eta(self):
        if len(self.eta) != self.n or any(e <= 0 for e in self.eta):
            raise ValueError(f"eta must hold {self.n} positive entries, got {self.eta}")
        return self

    @property
    def arity(self) -> int:
        return self.n + self.m + 1

    def upper_bounds(self):
        return (1.0,) * (self.n + self.m) + (None,)

    def integration_order(self):
        last = self.n + self.m
        return (last,) + tuple(range(last))

    def section_upper(self, axis, r):
        last = self.n + self.m
        if axis == last:
            return None
        stretched = stretched_squares(r, self.n, self.m, self.eta)
        if axis < self.n:
            budget = 1.0 - np.sum(stretched[:, :axis], axis=1)
            shrink = np.exp(-0.5 * self.eta[axis] * r[:, last] ** 2)
            return np.sqrt(np.maximum(budget, 0.0)) * shrink
        budget = 1.0 - np.sum(stretched, axis=1) - np.sum(r[:, self.n:axis] ** 2, axis=1)
        return np.sqrt(np.maximum(budget, 0.0))

    def _inside(self, r):
        stretched = stretched_squares(r, self.n, self.m, self.eta)
        total = np.sum(stretched, axis=-1) + np.sum(r[..., self.n:self.n + self.m] ** 2, axis=-1)
        return total < 1.0


class CustomShadow(ShadowRegion):
    kind: Literal["custom"] = "custom"
    bounds: Tuple[Optional[float], ...]
    membership: Optional[Callable[[np.ndarray], np.ndarray]] = Field(default=None, exclude=True)
    membership_path: Optional[str] = None
    label: str = "custom"

    exact_sections: ClassVar[bool] = False

    @model_validator(mode="after")
    def _check_bounds(self):
        if len(self.bounds) != self.n:
            raise ValueError(f"expected {self.n} axis bounds, got {len(self.bounds)}")
        if any(b is not None and b <= 0 for b in self.bounds):
            raise ValueError("axis bounds must be positive")
        return self

    def upper_bounds(self):
        return self.bounds

    def section_upper(self, axis, r):
        bound = self.bounds[axis]
        if bound is None:
            return None
        return np.full(r.shape[0], bound)

    def _inside(self, r):
        if self.membership is None:
            return np.ones(r.shape[:-1], dtype=bool)
        return np.asarray(self.membership(r), dtype=bool)


def shadow_contains(region: ShadowRegion, r: Sequence[float]) -> bool:
    r = np.asarray(r, dtype=float)
    if r.shape != (region.arity,):
        raise ArgumentError(f"expected {region.arity} moduli, got shape {r.shape}")
    if np.any(r < 0):
        raise ArgumentError(f"moduli must be nonnegative, got {tuple(r)}")
    return bool(region.contains(r))
