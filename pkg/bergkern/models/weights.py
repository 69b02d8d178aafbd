from bergkern.models.shadows import BallShadow, HartogsShadow, OrthantShadow, ShadowRegion, VEtaShadow, stretched_squares
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Callable, Literal, Optional, Tuple
import math
import numpy as np


def _power_log(base: np.ndarray, exponent: float) -> np.ndarray:
    """exponent * log(base), with the exponent-zero case identically 0."""
    if exponent == 0:
        return np.zeros(np.shape(base))
    with np.errstate(divide="ignore", invalid="ignore"):
        return exponent * np.log(base)


class RadialWeight(BaseModel):
    """Positive weight phi(|z_1|, ..., |z_n|), evaluated on arrays of moduli.

    Every weight carries a positive ``scale`` factor; ``log_evaluate`` is the
    primitive and works on arrays of shape (..., arity).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: str
    n: int = Field(ge=1)
    scale: float = Field(default=1.0, gt=0)

    @property
    def arity(self) -> int:
        return self.n

    def _log_base(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_evaluate(self, r: np.ndarray) -> np.ndarray:
        return math.log(self.scale) + self._log_base(np.asarray(r, dtype=float))

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        return np.exp(self.log_evaluate(r))

    def natural_shadow(self) -> Optional[ShadowRegion]:
        """Shadow on which this weight's closed-form moments hold, if any."""
        return None

    def scaled(self, c: float) -> "RadialWeight":
        return self.model_copy(update={"scale": self.scale * c})

    def descriptor(self) -> dict:
        return self.model_dump(mode="json")


class ExpPower(RadialWeight):
    """exp(-mu1 ||r||^mu2) on C^n."""

    kind: Literal["exp_power"] = "exp_power"
    mu1: float = Field(gt=0)
    mu2: float = Field(gt=0)

    def _log_base(self, r):
        return -self.mu1 * np.sqrt(np.sum(r ** 2, axis=-1)) ** self.mu2

    def natural_shadow(self):
        return OrthantShadow(n=self.n)


class HartogsPower(RadialWeight):
    """(exp(-mu1 ||r||^mu2) - ||rho||^2)^eta on the generalized Fock-Bargmann-Hartogs domain."""

    kind: Literal["hartogs_power"] = "hartogs_power"
    m: int = Field(ge=1)
    mu1: float = Field(gt=0)
    mu2: float = Field(gt=0)
    eta: float = Field(gt=-1)

    @property
    def arity(self) -> int:
        return self.n + self.m

    def _log_base(self, r):
        base = np.exp(-self.mu1 * np.sqrt(np.sum(r[..., :self.n] ** 2, axis=-1)) ** self.mu2)
        return _power_log(base - np.sum(r[..., self.n:] ** 2, axis=-1), self.eta)

    def natural_shadow(self):
        return HartogsShadow(n=self.n, m=self.m, mu1=self.mu1, mu2=self.mu2)


class VEtaPower(RadialWeight):
    """(1 - sum_j exp(eta_j rho^2) r_j^2 - ||r'||^2)^a over axes (r, r', rho)."""

    kind: Literal["veta_power"] = "veta_power"
    m: int = Field(ge=1)
    eta: Tuple[float, ...]
    a: float = Field(gt=-1)

    @model_validator(mode="after")
    def _check_eta(self):
        if len(self.eta) != self.n or any(e <= 0 for e in self.eta):
            raise ValueError(f"eta must hold {self.n} positive entries, got {self.eta}")
        return self

    @property
    def arity(self) -> int:
        return self.n + self.m + 1

    def _log_base(self, r):
        base = (
            1.0
            - np.sum(stretched_squares(r, self.n, self.m, self.eta), axis=-1)
            - np.sum(r[..., self.n:self.n + self.m] ** 2, axis=-1)
        )
        return _power_log(base, self.a)

    def natural_shadow(self):
        return VEtaShadow(n=self.n, m=self.m, eta=self.eta)


class BallPower(RadialWeight):
    """(R^2 - ||r||^2)^a on the ball of radius R; a = 0 is the plain volume measure."""

    kind: Literal["ball_power"] = "ball_power"
    a: float = Field(default=0.0, gt=-1)
    radius: float = Field(default=1.0, gt=0)

    def _log_base(self, r):
        return _power_log(self.radius ** 2 - np.sum(r ** 2, axis=-1), self.a)

    def natural_shadow(self):
        return BallShadow(n=self.n, radius=self.radius)


class CustomWeight(RadialWeight):
    kind: Literal["custom"] = "custom"
    function: Callable[[np.ndarray], np.ndarray] = Field(exclude=True)
    function_path: Optional[str] = None
    label: str = "custom"

    def _log_base(self, r):
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.function(r), dtype=float))


def unit_weight(r: np.ndarray) -> np.ndarray:
    return np.ones(np.shape(r)[:-1])


def gaussian_weight(r: np.ndarray) -> np.ndarray:
    return np.exp(-np.sum(np.asarray(r) ** 2, axis=-1))
