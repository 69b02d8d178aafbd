from bergkern.config.config import config
from bergkern.exceptions import ArgumentError, ConvergenceError
from bergkern.models.shadows import ShadowRegion
from functools import lru_cache
from numpy.polynomial.legendre import leggauss
from typing import Callable, List, Optional, Tuple
import heapq
import itertools
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)

# (full order, embedded check order) per dimension
_ORDERS = {1: (20, 10), 2: (14, 7), 3: (10, 5), 4: (8, 4)}
_DEFAULT_ORDER = (6, 3)


@lru_cache(maxsize=None)
def _rule(p: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = leggauss(p)
    return 0.5 * (x + 1.0), 0.5 * w


class CubatureResult:
    def __init__(self, value: complex, abs_error: float, boxes: int, converged: bool, log_shift: float = 0.0):
        self.value = value
        self.abs_error = abs_error
        self.boxes = boxes
        self.converged = converged
        self.log_shift = log_shift

    def __repr__(self) -> str:
        return f"CubatureResult(value={self.value!r}, abs_error={self.abs_error:.3g}, boxes={self.boxes})"


class _Box:
    __slots__ = ("lo", "hi", "value", "error", "axis_errors")

    def __init__(self, lo, hi, value, axis_errors):
        self.lo = lo
        self.hi = hi
        self.value = value
        self.axis_errors = axis_errors
        self.error = float(np.sum(axis_errors))


class AdaptiveCubature:
    """Globally adaptive tensor Gauss-Legendre cubature over a shadow.

    The shadow is mapped onto the unit cube axis by axis in its integration
    order: unbounded axes through r = t / (1 - t), bounded axes through
    r = h sin(pi v / 2) where h is the section limit left by the earlier
    coordinates. Each box carries one error estimate per axis, the difference
    between the full rule and a half-order rule on that axis; the worst box is
    bisected along its worst axis until the summed error meets the tolerance.
    """

    def __init__(
        self,
        shadow: ShadowRegion,
        rel_tol: float = 1e-9,
        abs_tol: float = 0.0,
        max_boxes: Optional[int] = None,
        order: Optional[Tuple[int, int]] = None,
    ):
        if not 1e-14 <= rel_tol < 1.0:
            raise ArgumentError(f"rel_tol {rel_tol} outside [1e-14, 1)")
        self.shadow = shadow
        self.dim = shadow.arity
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.max_boxes = max_boxes or config.QUAD_MAX_BOXES
        self.order = order or _ORDERS.get(self.dim, _DEFAULT_ORDER)
        self._axis_order = shadow.integration_order()

    def map_to_shadow(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Map cube points u (P, d), columns in integration order, to moduli (P, d).

        Returns the moduli in natural axis order and the log-Jacobian.
        """
        r = np.zeros_like(u)
        log_jac = np.zeros(u.shape[0])
        with np.errstate(divide="ignore", invalid="ignore"):
            for col, axis in enumerate(self._axis_order):
                t = u[:, col]
                hi = self.shadow.section_upper(axis, r)
                if hi is None:
                    r[:, axis] = t / (1.0 - t)
                    log_jac -= 2.0 * np.log1p(-t)
                else:
                    angle = 0.5 * math.pi * t
                    r[:, axis] = hi * np.sin(angle)
                    log_jac += np.log(hi) + math.log(0.5 * math.pi) + np.log(np.cos(angle))
        return r, log_jac

    def _grid(self, lo: np.ndarray, hi: np.ndarray, orders: List[int]) -> Tuple[np.ndarray, np.ndarray]:
        nodes = []
        weights = []
        for j, p in enumerate(orders):
            x, w = _rule(p)
            nodes.append(lo[j] + (hi[j] - lo[j]) * x)
            weights.append((hi[j] - lo[j]) * w)
        u = np.stack([g.ravel() for g in np.meshgrid(*nodes, indexing="ij")], axis=1)
        wt = np.ones(1)
        for w in weights:
            wt = np.multiply.outer(wt, w).ravel()
        return u, wt

    def _evaluate(self, integrand, log_integrand: bool, u: np.ndarray, shift: float) -> np.ndarray:
        r, log_jac = self.map_to_shadow(u)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if log_integrand:
                values = np.exp(integrand(r) + log_jac - shift)
            else:
                values = integrand(r) * np.exp(log_jac - shift)
        if not self.shadow.exact_sections:
            values = np.where(self.shadow.contains(r), values, 0.0)
        values = np.where(np.isfinite(values), values, 0.0)
        return values

    def _box(self, integrand, log_integrand, lo, hi, shift) -> _Box:
        p, q = self.order
        u, wt = self._grid(lo, hi, [p] * self.dim)
        full = np.sum(wt * self._evaluate(integrand, log_integrand, u, shift))
        axis_errors = np.zeros(self.dim)
        for j in range(self.dim):
            orders = [p] * self.dim
            orders[j] = q
            u, wt = self._grid(lo, hi, orders)
            coarse = np.sum(wt * self._evaluate(integrand, log_integrand, u, shift))
            axis_errors[j] = abs(full - coarse)
        return _Box(lo, hi, full, axis_errors)

    def _shift(self, integrand, log_integrand: bool) -> float:
        if not log_integrand:
            return 0.0
        u, _ = self._grid(np.zeros(self.dim), np.ones(self.dim), [self.order[0]] * self.dim)
        r, log_jac = self.map_to_shadow(u)
        with np.errstate(invalid="ignore"):
            logs = integrand(r) + log_jac
        finite = logs[np.isfinite(logs)]
        return float(np.max(finite)) if finite.size else 0.0

    def integrate(self, integrand: Callable[[np.ndarray], np.ndarray], log_integrand: bool = False) -> CubatureResult:
        """Integrate ``integrand(r)`` over the shadow (r of shape (P, d), natural order).

        With ``log_integrand`` the callable returns log-values and the result is
        reported relative to ``exp(log_shift)``.
        """
        shift = self._shift(integrand, log_integrand)
        counter = itertools.count()
        root = self._box(integrand, log_integrand, np.zeros(self.dim), np.ones(self.dim), shift)
        heap = [(-root.error, next(counter), root)]
        total = root.value
        error = root.error
        boxes = 1
        tol_scale = math.exp(-shift) if log_integrand else 1.0
        while error > max(self.abs_tol * tol_scale, self.rel_tol * abs(total)):
            if boxes >= self.max_boxes:
                logger.info("cubature budget of %d boxes exhausted (error %.3g)", self.max_boxes, error)
                return CubatureResult(total, error, boxes, False, shift)
            _, _, box = heapq.heappop(heap)
            axis = int(np.argmax(box.axis_errors))
            mid = 0.5 * (box.lo[axis] + box.hi[axis])
            left_hi = box.hi.copy()
            left_hi[axis] = mid
            right_lo = box.lo.copy()
            right_lo[axis] = mid
            left = self._box(integrand, log_integrand, box.lo, left_hi, shift)
            right = self._box(integrand, log_integrand, right_lo, box.hi, shift)
            total += left.value + right.value - box.value
            error += left.error + right.error - box.error
            for child in (left, right):
                heapq.heappush(heap, (-child.error, next(counter), child))
            boxes += 1
        # re-add from the leaves to drop the running-sum drift
        total = sum(item[2].value for item in heap)
        error = sum(item[2].error for item in heap)
        return CubatureResult(total, error, boxes, True, shift)


def integrate_over_shadow(
    shadow: ShadowRegion,
    integrand: Callable[[np.ndarray], np.ndarray],
    rel_tol: float,
    abs_tol: float = 0.0,
    raise_on_failure: bool = True,
) -> CubatureResult:
    result = AdaptiveCubature(shadow, rel_tol=rel_tol, abs_tol=abs_tol).integrate(integrand)
    if not result.converged and raise_on_failure:
        raise ConvergenceError(
            f"cubature over {shadow.kind} shadow did not reach rel_tol={rel_tol}",
            estimate=result.value,
            error=result.abs_error,
        )
    return result
