from bergkern.config.config import config
from bergkern.exceptions import ArgumentError, DomainError
from bergkern.models.complex_point import ComplexPoint, monomial_eval
from bergkern.models.kernel_value import KernelBatch, KernelValue
from bergkern.models.multi_index import MultiIndex, degree_shell_array
from bergkern.services.moments import MomentTable
from bergkern.services.series import StopRule
from typing import Dict, List, Optional
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)

# cap on N * shell_size * arity elements materialized per monomial block
_BLOCK_ELEMENTS = 4_000_000


def enumerate_degree_shell(n: int, d: int) -> List[MultiIndex]:
    """Multi-indices of length n and degree d in lexicographic order."""
    return [MultiIndex(entries=row) for row in degree_shell_array(n, d)]


def multinomial_collapse(z: ComplexPoint, w: ComplexPoint, d: int) -> complex:
    """Brute-force sum over |alpha| = d of (d!/alpha!) z^alpha conj(w)^alpha."""
    if z.arity != w.arity:
        raise ArgumentError(f"arity mismatch: {z.arity} vs {w.arity}")
    if d < 0:
        raise ArgumentError(f"degree must be nonnegative, got {d}")
    w_bar = ComplexPoint(coords=tuple(c.conjugate() for c in w.coords))
    log_d = math.lgamma(d + 1)
    total = 0j
    for alpha in enumerate_degree_shell(z.arity, d):
        weight = math.exp(log_d - alpha.factorial_log())
        total += weight * monomial_eval(z, alpha) * monomial_eval(w_bar, alpha)
    return total


def _monomials(points: np.ndarray, shell: np.ndarray) -> np.ndarray:
    """points (N, n), shell (S, n) -> (N, S) with entries prod_j points_j^shell_j."""
    return np.prod(points[:, None, :] ** shell[None, :, :], axis=2)


class KernelSeries:
    """K(z, w) = sum_alpha I(alpha)^-1 z^alpha conj(w)^alpha, summed shell by shell."""

    def __init__(self, moments: MomentTable, max_degree: Optional[int] = None, collapse: Optional[bool] = None):
        self.moments = moments
        self.max_degree = config.MAX_DEGREE if max_degree is None else max_degree
        if self.max_degree < 0:
            raise ArgumentError(f"max_degree must be nonnegative, got {self.max_degree}")
        self.collapse = moments.collapsible if collapse is None else (collapse and moments.collapsible)
        self._coefficients: Dict[int, np.ndarray] = {}

    @property
    def arity(self) -> int:
        return self.moments.arity

    def shell_coefficients(self, d: int) -> np.ndarray:
        coefficients = self._coefficients.get(d)
        if coefficients is None:
            if self.collapse:
                # I(alpha) / alpha! is constant on the shell, so the shell sums to I((d,0,..,0))^-1 <x, y>^d
                coefficients = np.exp(-self.moments.log_moments(self._head(d)))
            else:
                coefficients = np.exp(-self.moments.log_moments(degree_shell_array(self.arity, d)))
            self._coefficients[d] = coefficients
        return coefficients

    def shell_sum(self, d: int, x: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Sum of the degree-d terms of K(x, y_i) for every row y_i of Y."""
        coefficients = self.shell_coefficients(d)
        if self.collapse:
            return coefficients[0] * (Y.conj() @ x) ** d
        shell = degree_shell_array(self.arity, d)
        x_part = coefficients * np.prod(x[None, :] ** shell, axis=1)
        chunk = max(1, _BLOCK_ELEMENTS // max(1, shell.size))
        out = np.empty(Y.shape[0], dtype=np.complex128)
        for start in range(0, Y.shape[0], chunk):
            block = Y[start:start + chunk].conj()
            out[start:start + chunk] = _monomials(block, shell) @ x_part
        return out

    def _head(self, d: int) -> np.ndarray:
        head = np.zeros((1, self.arity), dtype=np.int64)
        head[0, 0] = d
        return head

    def _check_points(self, x: ComplexPoint, Y: np.ndarray) -> None:
        if x.arity != self.arity or Y.shape[1] != self.arity:
            raise ArgumentError(f"series of arity {self.arity} got points of arity {x.arity} and {Y.shape[1]}")
        shadow = self.moments.shadow
        if not shadow.contains(np.abs(x.as_array())) or not np.all(shadow.contains(np.abs(Y))):
            raise DomainError(f"series kernel evaluated outside the {shadow.kind} shadow")

    def evaluate_many(self, x: ComplexPoint, Y: np.ndarray, rel_tol: float = 1e-12) -> KernelBatch:
        Y = np.atleast_2d(np.asarray(Y, dtype=np.complex128))
        self._check_points(x, Y)
        if not rel_tol > 0:
            raise ArgumentError(f"rel_tol must be positive, got {rel_tol}")
        xa = x.as_array()
        rule = StopRule(Y.shape[0], rel_tol)
        for d in range(self.max_degree + 1):
            active = rule.active()
            rule.add(d, self.shell_sum(d, xa, Y[active]), active)
            if rule.finished:
                break
        result = rule.result()
        if not result.converged.all():
            logger.warning(
                "series kernel did not stabilize for %d of %d points by degree %d",
                int((~result.converged).sum()), Y.shape[0], self.max_degree,
            )
        return KernelBatch(result.values, result.last_term, result.degree_used, result.converged)

    def evaluate(self, x: ComplexPoint, y: ComplexPoint, rel_tol: float = 1e-12) -> KernelValue:
        return self.evaluate_many(x, y.as_array()[None, :], rel_tol).item(0)

    __call__ = evaluate


def kernel_series_eval(series: KernelSeries, z: ComplexPoint, w: ComplexPoint, rel_tol: float = 1e-12) -> KernelValue:
    return series.evaluate(z, w, rel_tol)
