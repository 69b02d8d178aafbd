from dataclasses import dataclass
from typing import Callable, Optional
import numpy as np


@dataclass
class SeriesSum:
    values: np.ndarray
    last_term: np.ndarray
    degree_used: np.ndarray
    converged: np.ndarray


class StopRule:
    """Element-wise "three consecutive small contributions" rule for a stream of terms.

    ``degree_used`` is the last index whose contribution was not small.
    """

    def __init__(self, size: int, rel_tol: float, run_length: int = 3):
        self.rel_tol = rel_tol
        self.run_length = run_length
        self.total = np.zeros(size, dtype=np.complex128)
        self.run = np.zeros(size, dtype=np.int64)
        self.done = np.zeros(size, dtype=bool)
        self.last = np.zeros(size)
        self.degree_used = np.zeros(size, dtype=np.int64)

    @property
    def finished(self) -> bool:
        return bool(self.done.all())

    def active(self) -> np.ndarray:
        return ~self.done

    def add(self, k: int, terms: np.ndarray, mask: Optional[np.ndarray] = None) -> None:
        """Add the k-th contribution; ``terms`` covers the elements selected by ``mask``."""
        mask = self.active() if mask is None else mask
        if not mask.any():
            return
        total = self.total[mask] + terms
        magnitude = np.abs(terms)
        small = magnitude <= self.rel_tol * np.abs(total)
        self.total[mask] = total
        self.last[mask] = magnitude
        self.degree_used[mask] = np.where(small, self.degree_used[mask], k)
        run = np.where(small, self.run[mask] + 1, 0)
        self.run[mask] = run
        self.done[mask] = run >= self.run_length

    def result(self) -> SeriesSum:
        return SeriesSum(self.total.copy(), self.last.copy(), self.degree_used.copy(), self.done.copy())


def sum_power_series(
    log_coeff: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    rel_tol: float,
    max_terms: int,
    block: int = 64,
) -> SeriesSum:
    """Sum sum_k exp(log_coeff(k)) x^k element-wise over an array of complex x.

    Terms are formed as exp(log c_k + k log x) on the principal branch, which is
    exact in k for integer powers; x = 0 contributes the k = 0 term only.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.complex128))
    rule = StopRule(x.size, rel_tol)
    zero = x == 0
    log_x = np.log(np.where(zero, 1.0, x))
    start = 0
    while start < max_terms and not rule.finished:
        ks = np.arange(start, min(start + block, max_terms))
        log_c = np.asarray(log_coeff(ks), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            terms = np.exp(log_c[None, :] + ks[None, :] * log_x[:, None])
        terms[zero, :] = 0.0
        if start == 0:
            terms[zero, 0] = np.exp(log_c[0])
        for j, k in enumerate(ks):
            active = rule.active()
            rule.add(int(k), terms[active, j], active)
            if rule.finished:
                break
        start += block
    return rule.result()
