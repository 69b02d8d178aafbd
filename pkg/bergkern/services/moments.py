from bergkern.config.config import config
from bergkern.exceptions import ArgumentError, ConvergenceError
from bergkern.models.moment_table import MomentAgreement, MomentEntry, MomentFailure, MomentMethod, MomentTableRecord
from bergkern.models.multi_index import MultiIndex, degree_shell_array
from bergkern.models.shadows import ShadowRegion
from bergkern.models.weights import BallPower, ExpPower, HartogsPower, RadialWeight, VEtaPower
from bergkern.services.quadrature import AdaptiveCubature
from scipy.special import gammaln
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)
# relative accuracy credited to a closed-form moment
CLOSED_FORM_REL_ERROR = 1e-14
# closed form and quadrature agree when within this multiple of the quadrature rel_tol
AGREEMENT_FACTOR = 100.0

LogMoments = Callable[[np.ndarray], np.ndarray]


def _index_array(indices) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(indices, dtype=np.int64))
    if np.any(arr < 0):
        raise ArgumentError("multi-index entries must be nonnegative")
    return arr


def _log_factorials(block: np.ndarray) -> np.ndarray:
    return np.sum(gammaln(block + 1.0), axis=1)


def log_sphere_monomial_integral(alpha: MultiIndex) -> float:
    """log of the integral of prod |x_j|^(2 alpha_j + 1) over the unit sphere of R^n."""
    n = alpha.arity
    return math.log(2.0) + alpha.factorial_log() - float(gammaln(alpha.degree() + n))


def sphere_monomial_integral(alpha: MultiIndex) -> float:
    return math.exp(log_sphere_monomial_integral(alpha))


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ArgumentError(f"{name} must be positive, got {value}")


# --- closed forms, vectorized over rows of an index array ---


def log_moments_cn(indices: np.ndarray, n: int, mu1: float, mu2: float, scale: float = 1.0) -> np.ndarray:
    _require_positive(mu1=mu1, mu2=mu2, scale=scale)
    idx = _index_array(indices)
    k = idx.sum(axis=1)
    s = (2.0 * k + 2.0 * n) / mu2
    return (
        math.log(2.0) + n * LOG_PI + _log_factorials(idx) + gammaln(s)
        - gammaln(k + n) - s * math.log(mu1) - math.log(mu2) + math.log(scale)
    )


def log_moments_dnm(
    indices: np.ndarray, n: int, m: int, mu1: float, mu2: float, eta: float, scale: float = 1.0
) -> np.ndarray:
    _require_positive(mu1=mu1, mu2=mu2, scale=scale)
    if not eta > -1:
        raise ArgumentError(f"eta must exceed -1, got {eta}")
    idx = _index_array(indices)
    a, b = idx[:, :n], idx[:, n:n + m]
    ka, kb = a.sum(axis=1), b.sum(axis=1)
    s = (2.0 * ka + 2.0 * n) / mu2
    return (
        math.log(2.0) + _log_factorials(a) + _log_factorials(b) + gammaln(eta + 1.0) + gammaln(s)
        + (n + m) * LOG_PI - math.log(mu2) - gammaln(kb + m + eta + 1.0) - gammaln(ka + n)
        - s * np.log(mu1 * (kb + m + eta)) + math.log(scale)
    )


def log_moments_veta(
    indices: np.ndarray, n: int, m: int, eta: Sequence[float], a: float, scale: float = 1.0
) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (n,) or np.any(eta <= 0):
        raise ArgumentError(f"eta must hold {n} positive entries, got {tuple(eta)}")
    if not a > -1:
        raise ArgumentError(f"a must exceed -1, got {a}")
    _require_positive(scale=scale)
    idx = _index_array(indices)
    al, be, ga = idx[:, :n], idx[:, n:n + m], idx[:, n + m]
    return (
        (n + m + 1) * LOG_PI + gammaln(a + 1.0) + _log_factorials(al) + _log_factorials(be) + gammaln(ga + 1.0)
        - gammaln(al.sum(axis=1) + be.sum(axis=1) + n + m + a + 1.0)
        - (ga + 1.0) * np.log(al @ eta + eta.sum()) + math.log(scale)
    )


def log_moments_ball(indices: np.ndarray, n: int, a: float = 0.0, radius: float = 1.0, scale: float = 1.0) -> np.ndarray:
    _require_positive(radius=radius, scale=scale)
    if not a > -1:
        raise ArgumentError(f"a must exceed -1, got {a}")
    idx = _index_array(indices)
    k = idx.sum(axis=1)
    return (
        n * LOG_PI + _log_factorials(idx) + gammaln(a + 1.0)
        + (2.0 * k + 2.0 * n + 2.0 * a) * math.log(radius) - gammaln(k + n + a + 1.0) + math.log(scale)
    )


# --- scalar entry points returning log I ---


def moment_closed_cn(alpha: MultiIndex, mu1: float, mu2: float, scale: float = 1.0) -> float:
    """log I(alpha) for the weight exp(-mu1 ||z||^mu2) on C^n."""
    return float(log_moments_cn(alpha.as_array(), alpha.arity, mu1, mu2, scale)[0])


def moment_closed_dnm(
    alpha: MultiIndex, beta: MultiIndex, mu1: float, mu2: float, eta: float, scale: float = 1.0
) -> float:
    """log I(alpha, beta) on D_{n,m} with weight (exp(-mu1 ||z||^mu2) - ||w||^2)^eta."""
    idx = alpha.concat(beta).as_array()
    return float(log_moments_dnm(idx, alpha.arity, beta.arity, mu1, mu2, eta, scale)[0])


def moment_closed_veta(
    alpha: MultiIndex, beta: MultiIndex, gamma: int, eta: Sequence[float], a: float, scale: float = 1.0
) -> float:
    """log I(alpha, beta, gamma) on V_eta with weight (1 - sum e^{eta_j|w|^2}|z_j|^2 - ||z'||^2)^a."""
    if gamma < 0:
        raise ArgumentError(f"gamma must be nonnegative, got {gamma}")
    idx = alpha.concat(beta).concat(MultiIndex.of(gamma)).as_array()
    return float(log_moments_veta(idx, alpha.arity, beta.arity, eta, a, scale)[0])


def moment_closed_ball(alpha: MultiIndex, a: float = 0.0, radius: float = 1.0, scale: float = 1.0) -> float:
    return float(log_moments_ball(alpha.as_array(), alpha.arity, a, radius, scale)[0])


def moment_lower_bound(alpha: MultiIndex, epsilon: float, delta: float) -> float:
    """log of (2 pi)^n eps prod delta^(2 alpha_k + 2) / (2 alpha_k + 2).

    Valid when the shadow contains the box [delta, 2 delta]^n and phi >= eps on it.
    """
    _require_positive(epsilon=epsilon, delta=delta)
    e = alpha.as_array().astype(float)
    return float(alpha.arity * LOG_2PI + math.log(epsilon) + np.sum((2 * e + 2) * math.log(delta) - np.log(2 * e + 2)))


def closed_form_for(weight: RadialWeight, shadow: ShadowRegion) -> Optional[LogMoments]:
    """Vectorized log-moment function when the pair is a known family, else None."""
    if weight.natural_shadow() is None or weight.natural_shadow() != shadow:
        return None
    if isinstance(weight, ExpPower):
        return lambda idx: log_moments_cn(idx, weight.n, weight.mu1, weight.mu2, weight.scale)
    if isinstance(weight, HartogsPower):
        return lambda idx: log_moments_dnm(idx, weight.n, weight.m, weight.mu1, weight.mu2, weight.eta, weight.scale)
    if isinstance(weight, VEtaPower):
        return lambda idx: log_moments_veta(idx, weight.n, weight.m, weight.eta, weight.a, weight.scale)
    if isinstance(weight, BallPower):
        return lambda idx: log_moments_ball(idx, weight.n, weight.a, weight.radius, weight.scale)
    return None


def moment_quadrature(shadow: ShadowRegion, weight: RadialWeight, alpha: MultiIndex, rel_tol: float) -> MomentEntry:
    """I(alpha) = (2 pi)^n int r^(2 alpha + 1) phi(r) dr by adaptive cubature, in log space."""
    if not 1e-12 < rel_tol < 1e-2:
        raise ArgumentError(f"rel_tol must lie in (1e-12, 1e-2), got {rel_tol}")
    if not shadow.arity == weight.arity == alpha.arity:
        raise ArgumentError(
            f"arity mismatch: shadow {shadow.arity}, weight {weight.arity}, multi-index {alpha.arity}"
        )
    powers = 2.0 * alpha.as_array() + 1.0

    def log_integrand(r: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.sum(powers * np.log(r), axis=1) + weight.log_evaluate(r)

    result = AdaptiveCubature(shadow, rel_tol=rel_tol).integrate(log_integrand, log_integrand=True)
    value = float(np.real(result.value))
    if not value > 0:
        raise ConvergenceError(f"nonpositive quadrature value for alpha={alpha}", estimate=value, error=result.abs_error)
    log_value = alpha.arity * LOG_2PI + math.log(value) + result.log_shift
    rel_error = result.abs_error / value
    entry = MomentEntry(
        alpha=alpha.entries,
        log_value=log_value,
        method="quadrature",
        abs_error_estimate=_scaled_error(log_value, rel_error),
        rel_error_estimate=rel_error,
        rel_tol=rel_tol,
        converged=result.converged,
    )
    if not result.converged:
        raise ConvergenceError(
            f"moment quadrature for alpha={alpha} stopped at relative error {rel_error:.3g} > {rel_tol:g}",
            estimate=entry,
            error=rel_error,
        )
    return entry


def _scaled_error(log_value: float, rel_error: float) -> float:
    if rel_error <= 0:
        return 0.0
    exponent = log_value + math.log(rel_error)
    return math.exp(exponent) if exponent < 709.0 else math.inf


class MomentTable:
    """Memoized moments I(alpha) of one weight on one shadow, stored in log space.

    ``entries`` holds the table's own method: closed-form families are
    evaluated on demand (vectorized) and cached there. Quadrature values live
    in ``quadrature_entries`` whatever the table's method, and are replaced
    when a tighter tolerance is requested.
    """

    def __init__(
        self,
        weight: RadialWeight,
        shadow: Optional[ShadowRegion] = None,
        prefer: MomentMethod = "closed_form",
        rel_tol: Optional[float] = None,
    ):
        shadow = shadow if shadow is not None else weight.natural_shadow()
        if shadow is None:
            raise ArgumentError(f"weight of kind {weight.kind!r} needs an explicit shadow")
        if shadow.arity != weight.arity:
            raise ArgumentError(f"shadow arity {shadow.arity} does not match weight arity {weight.arity}")
        self.weight = weight
        self.shadow = shadow
        self._closed = closed_form_for(weight, shadow)
        self.method: MomentMethod = "closed_form" if prefer == "closed_form" and self._closed else "quadrature"
        if rel_tol is None:
            rel_tol = config.CLOSED_FORM_TOL if weight.kind != "custom" else config.CUSTOM_TOL
        self.rel_tol = rel_tol
        self.entries: Dict[Tuple[int, ...], MomentEntry] = {}
        self.quadrature_entries: Dict[Tuple[int, ...], MomentEntry] = {}

    @property
    def arity(self) -> int:
        return self.weight.arity

    @property
    def has_closed_form(self) -> bool:
        return self._closed is not None

    @property
    def collapsible(self) -> bool:
        """True when I(alpha) / alpha! depends only on |alpha|."""
        return self.method == "closed_form" and isinstance(self.weight, (ExpPower, BallPower))

    def _check(self, alpha: MultiIndex) -> None:
        if alpha.arity != self.arity:
            raise ArgumentError(f"multi-index arity {alpha.arity} does not match table arity {self.arity}")

    def closed_entry(self, alpha: MultiIndex) -> MomentEntry:
        self._check(alpha)
        if self._closed is None:
            raise ArgumentError(f"no closed form for weight {self.weight.kind!r} on shadow {self.shadow.kind!r}")
        log_value = float(self._closed(alpha.as_array())[0])
        return MomentEntry(
            alpha=alpha.entries,
            log_value=log_value,
            method="closed_form",
            abs_error_estimate=_scaled_error(log_value, CLOSED_FORM_REL_ERROR),
            rel_error_estimate=CLOSED_FORM_REL_ERROR,
        )

    def _store_quadrature(self, entry: MomentEntry) -> None:
        # last writer wins; concurrent writers agree within tolerance
        self.quadrature_entries[entry.alpha] = entry
        if self.method == "quadrature":
            self.entries[entry.alpha] = entry

    def quadrature_entry(
        self, alpha: MultiIndex, rel_tol: Optional[float] = None, strict: bool = True
    ) -> MomentEntry:
        """Quadrature moment, cached. With ``strict=False`` an unconverged estimate is kept and returned."""
        self._check(alpha)
        rel_tol = rel_tol or self.rel_tol
        cached = self.quadrature_entries.get(alpha.entries)
        if (
            cached is not None
            and cached.rel_tol is not None
            and cached.rel_tol <= rel_tol
            and (cached.converged or not strict)
        ):
            return cached
        try:
            entry = moment_quadrature(self.shadow, self.weight, alpha, rel_tol)
        except ConvergenceError as exc:
            if strict or not isinstance(exc.estimate, MomentEntry):
                raise
            logger.warning("%s", exc)
            entry = exc.estimate
        self._store_quadrature(entry)
        return entry

    def entry(self, alpha: MultiIndex, rel_tol: Optional[float] = None) -> MomentEntry:
        if self.method == "closed_form":
            entry = self.entries.get(alpha.entries)
            if entry is None:
                entry = self.closed_entry(alpha)
                self.entries[alpha.entries] = entry
            return entry
        return self.quadrature_entry(alpha, rel_tol)

    def log_moment(self, alpha: MultiIndex, rel_tol: Optional[float] = None) -> float:
        return self.entry(alpha, rel_tol).log_value

    def log_moments(self, indices: np.ndarray) -> np.ndarray:
        """log I for every row of an integer array of shape (K, arity)."""
        indices = _index_array(indices)
        if indices.shape[1] != self.arity:
            raise ArgumentError(f"index rows of length {indices.shape[1]} do not match arity {self.arity}")
        if self.method == "closed_form":
            return self._closed(indices)
        return np.array([self.quadrature_entry(MultiIndex(entries=row)).log_value for row in indices])

    def populate(self, max_degree: int) -> List[MomentEntry]:
        entries = []
        for d in range(max_degree + 1):
            for row in degree_shell_array(self.arity, d):
                entries.append(self.entry(MultiIndex(entries=row)))
        return entries

    def scaled(self, c: float) -> "MomentTable":
        """Table of c * phi: every log-moment shifts by log c."""
        if not c > 0:
            raise ArgumentError(f"scale factor must be positive, got {c}")
        table = MomentTable(self.weight.scaled(c), self.shadow, prefer=self.method, rel_tol=self.rel_tol)
        shift = math.log(c)

        def shifted(entry: MomentEntry) -> MomentEntry:
            return entry.model_copy(
                update={"log_value": entry.log_value + shift, "abs_error_estimate": entry.abs_error_estimate * c}
            )

        table.entries = {key: shifted(entry) for key, entry in self.entries.items()}
        table.quadrature_entries = {key: shifted(entry) for key, entry in self.quadrature_entries.items()}
        return table

    def agreement(self, alpha: Tuple[int, ...]) -> Optional[MomentAgreement]:
        """Relative discrepancy of the cached quadrature entry against the closed form, tolerance 100 * rel_tol."""
        quadrature = self.quadrature_entries.get(alpha)
        if quadrature is None or self._closed is None:
            return None
        closed = self.entries.get(alpha) if self.method == "closed_form" else None
        closed = closed or self.closed_entry(MultiIndex(entries=alpha))
        discrepancy = abs(math.expm1(quadrature.log_value - closed.log_value))
        tolerance = AGREEMENT_FACTOR * (quadrature.rel_tol or self.rel_tol)
        return MomentAgreement(
            alpha=alpha, rel_discrepancy=discrepancy, tolerance=tolerance, agrees=discrepancy <= tolerance
        )

    def to_record(self, errors: Optional[Dict[Tuple[int, ...], str]] = None) -> MomentTableRecord:
        entries = list(self.entries.values())
        if self.method == "closed_form":
            entries.extend(self.quadrature_entries.values())
        entries.sort(key=lambda e: (sum(e.alpha), e.alpha, e.method))
        agreement = [self.agreement(k) for k in sorted(self.quadrature_entries, key=lambda k: (sum(k), k))]
        failures = [
            MomentFailure(alpha=k, error=v) for k, v in sorted((errors or {}).items(), key=lambda kv: (sum(kv[0]), kv[0]))
        ]
        return MomentTableRecord(
            weight=self.weight.descriptor(),
            shadow=self.shadow.descriptor(),
            entries=entries,
            agreement=[a for a in agreement if a is not None],
            errors=failures,
        )

    def to_json(self, indent: Optional[int] = 2, errors: Optional[Dict[Tuple[int, ...], str]] = None) -> str:
        return self.to_record(errors).model_dump_json(indent=indent)
