from bergkern.exceptions import ArgumentError, DomainError
from bergkern.models.complex_point import ComplexPoint
from bergkern.models.shadows import BallShadow, HartogsShadow, OrthantShadow, ShadowRegion, VEtaShadow
from bergkern.models.weights import BallPower, ExpPower, HartogsPower, RadialWeight, VEtaPower
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator
from typing import Annotated, Any, Dict, Literal, Tuple, Union
import numpy as np


class _Family(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(ge=1)

    @property
    def arity(self) -> int:
        return self.n

    @property
    def blocks(self) -> Tuple[int, ...]:
        return (self.n,)

    def weight(self) -> RadialWeight:
        raise NotImplementedError

    def shadow(self) -> ShadowRegion:
        return self.weight().natural_shadow()

    def contains(self, x: ComplexPoint) -> bool:
        if x.arity != self.arity:
            raise ArgumentError(f"{self.family} expects points of arity {self.arity}, got {x.arity}")
        return bool(self.shadow().contains(np.asarray(x.moduli())))

    def require_interior(self, x: ComplexPoint) -> None:
        if not self.contains(x):
            raise DomainError(f"point {x} lies outside the {self.family} domain")

    def label(self) -> str:
        fields = self.model_dump(exclude={"family"})
        return self.family + "(" + ", ".join(f"{k}={v}" for k, v in fields.items()) + ")"


class CnParams(_Family):
    family: Literal["cn"] = "cn"
    mu1: float = Field(gt=0)
    mu2: float = Field(gt=0)

    def weight(self):
        return ExpPower(n=self.n, mu1=self.mu1, mu2=self.mu2)


class DnmParams(_Family):
    family: Literal["dnm"] = "dnm"
    m: int = Field(ge=1)
    mu1: float = Field(gt=0)
    mu2: float = Field(gt=0)
    eta: float = Field(default=0.0, gt=-1)

    @property
    def arity(self):
        return self.n + self.m

    @property
    def blocks(self):
        return (self.n, self.m)

    def weight(self):
        return HartogsPower(n=self.n, m=self.m, mu1=self.mu1, mu2=self.mu2, eta=self.eta)


class VEtaParams(_Family):
    family: Literal["veta"] = "veta"
    m: int = Field(ge=1)
    eta: Tuple[float, ...]
    a: float = Field(default=0.0, gt=-1)

    @model_validator(mode="after")
    def _check_eta(self):
        if len(self.eta) != self.n or any(e <= 0 for e in self.eta):
            raise ValueError(f"eta must hold {self.n} positive entries, got {self.eta}")
        return self

    @property
    def arity(self):
        return self.n + self.m + 1

    @property
    def blocks(self):
        return (self.n, self.m, 1)

    def weight(self):
        return VEtaPower(n=self.n, m=self.m, eta=self.eta, a=self.a)


class BallParams(_Family):
    family: Literal["ball"] = "ball"
    a: float = Field(default=0.0, gt=-1)
    radius: float = Field(default=1.0, gt=0)

    def weight(self):
        return BallPower(n=self.n, a=self.a, radius=self.radius)


FamilyParams = Annotated[Union[CnParams, DnmParams, VEtaParams, BallParams], Field(discriminator="family")]

_family_adapter = TypeAdapter(FamilyParams)

_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "cn": {"n": 1, "mu1": 1.0, "mu2": 2.0},
    "dnm": {"n": 1, "m": 1, "mu1": 1.0, "mu2": 2.0, "eta": 0.0},
    "veta": {"n": 1, "m": 1, "a": 0.0},
    "ball": {"n": 1, "a": 0.0, "radius": 1.0},
}

# shorthand -> (family, pinned parameters)
_ALIASES: Dict[str, Tuple[str, Dict[str, Any]]] = {
    "fock": ("cn", {"mu2": 2.0}),
    "disc": ("ball", {"n": 1, "a": 0.0, "radius": 1.0}),
}


def _same_number(given: Any, pinned: float) -> bool:
    try:
        return float(given) == pinned
    except (TypeError, ValueError):
        return False


def build_family(name: str, params: Dict[str, Any]) -> Union[CnParams, DnmParams, VEtaParams, BallParams]:
    """Build family parameters from a CLI-style name and a flat parameter mapping.

    A scalar or comma-separated ``eta`` is accepted for V_eta; a scalar is
    repeated n times.
    """
    family, pinned = _ALIASES.get(name, (name, {}))
    if family not in _DEFAULTS:
        raise ArgumentError(f"unknown family {name!r}; expected one of {sorted(set(_DEFAULTS) | set(_ALIASES))}")
    for key, value in pinned.items():
        if key in params and not _same_number(params[key], value):
            raise ArgumentError(f"family {name!r} fixes {key}={value:g}, got {key}={params[key]}")
    data: Dict[str, Any] = {"family": family, **_DEFAULTS[family], **params, **pinned}
    if family == "veta":
        eta = data.get("eta", 1.0)
        if isinstance(eta, str):
            eta = [float(e) for e in eta.split(",")]
        if isinstance(eta, (int, float)):
            eta = [float(eta)] * int(data["n"])
        data["eta"] = tuple(eta)
    return _family_adapter.validate_python(data)
