from bergkern.config.config import config
from bergkern.exceptions import ArgumentError, DomainError, SingularityError
from bergkern.models.complex_point import ComplexPoint
from bergkern.models.families import BallParams, CnParams, DnmParams, VEtaParams
from bergkern.models.kernel_value import KernelBatch, KernelValue
from bergkern.services.series import StopRule, sum_power_series
from scipy.special import gammaln
from typing import Optional, Union
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)

# phi magnitudes below this are treated as the boundary singularity of V_eta
SINGULAR_PHI = 1e-12
# entire inner series in <z, s> may need many terms when mu1 <z, s> is large
INNER_MAX_TERMS = 4000

Params = Union[CnParams, DnmParams, VEtaParams, BallParams]


def _cn_log_coeff(n: int, mu1: float, mu2: float):
    """log of mu1^((2k+2n)/mu2) mu2 Gamma(k+n) / (2 pi^n k! Gamma((2k+2n)/mu2))."""
    base = math.log(mu2) - math.log(2.0) - n * math.log(math.pi)

    def log_coeff(k: np.ndarray) -> np.ndarray:
        s = (2.0 * k + 2.0 * n) / mu2
        return base + s * math.log(mu1) + gammaln(k + n) - gammaln(k + 1.0) - gammaln(s)

    return log_coeff


def cn_series(n: int, mu1: float, mu2: float, X: np.ndarray, rel_tol: float, max_terms: int = INNER_MAX_TERMS):
    """C^n kernel as a function of X = <z, w>; exponential form when mu2 == 2."""
    X = np.atleast_1d(np.asarray(X, dtype=np.complex128))
    if mu2 == 2.0:
        values = (mu1 / math.pi) ** n * np.exp(mu1 * X)
        zeros = np.zeros(X.shape)
        return values, zeros, zeros.astype(np.int64), np.ones(X.shape, dtype=bool)
    result = sum_power_series(_cn_log_coeff(n, mu1, mu2), X, rel_tol, max_terms)
    return result.values, result.last_term, result.degree_used, result.converged


class ClosedKernel:
    """Closed-form kernel of one family, evaluated as K(x, y_i) over batches."""

    def __init__(self, params: Params, rel_tol: float = 1e-15, max_degree: Optional[int] = None):
        self.params = params
        self.rel_tol = rel_tol
        self.max_degree = config.MAX_DEGREE if max_degree is None else max_degree
        self._shadow = params.shadow()

    @property
    def arity(self) -> int:
        return self.params.arity

    def _check(self, x: ComplexPoint, Y: np.ndarray) -> None:
        if x.arity != self.arity or Y.shape[1] != self.arity:
            raise ArgumentError(f"{self.params.family} kernel expects arity {self.arity}")
        if not self._shadow.contains(np.abs(x.as_array())):
            raise DomainError(f"point {x} lies outside the {self.params.family} domain")
        outside = ~self._shadow.contains(np.abs(Y))
        if outside.any():
            raise DomainError(
                f"{int(outside.sum())} point(s) lie outside the {self.params.family} domain, "
                f"first at {Y[np.argmax(outside)].tolist()}"
            )

    def evaluate_many(self, x: ComplexPoint, Y: np.ndarray) -> KernelBatch:
        Y = np.atleast_2d(np.asarray(Y, dtype=np.complex128))
        self._check(x, Y)
        p = self.params
        xa = x.as_array()
        if isinstance(p, CnParams):
            return KernelBatch(*cn_series(p.n, p.mu1, p.mu2, Y.conj() @ xa, self.rel_tol))
        if isinstance(p, DnmParams):
            return self._dnm(xa, Y)
        if isinstance(p, VEtaParams):
            return self._veta(xa, Y)
        return self._ball(xa, Y)

    def evaluate(self, x: ComplexPoint, y: ComplexPoint) -> KernelValue:
        return self.evaluate_many(x, y.as_array()[None, :]).item(0)

    __call__ = evaluate

    def _dnm(self, xa: np.ndarray, Y: np.ndarray) -> KernelBatch:
        p = self.params
        n, m = p.n, p.m
        X1 = Y[:, :n].conj() @ xa[:n]
        X2 = Y[:, n:].conj() @ xa[n:]
        zero = X2 == 0
        log_X2 = np.log(np.where(zero, 1.0, X2))
        rule = StopRule(Y.shape[0], self.rel_tol)
        inner_truncation = np.zeros(Y.shape[0])
        inner_converged = np.ones(Y.shape[0], dtype=bool)
        # outer k2 over the fiber variable <w, t>, inner entire series in <z, s>
        for k2 in range(self.max_degree + 1):
            active = rule.active()
            if not active.any():
                break
            lam = p.mu1 * (k2 + m + p.eta)
            log_a = gammaln(k2 + m + p.eta + 1.0) - m * math.log(math.pi) - gammaln(k2 + 1.0) - gammaln(p.eta + 1.0)
            inner, trunc, _, conv = cn_series(n, lam, p.mu2, X1[active], self.rel_tol)
            with np.errstate(over="ignore", invalid="ignore"):
                factor = np.exp(log_a + k2 * log_X2[active])
            rule.add(k2, factor * inner, active)
            inner_truncation[active] = np.maximum(inner_truncation[active], np.abs(factor) * trunc)
            inner_converged[active] &= conv
            if k2 == 0:
                # pairs with <w, t> = 0 carry the k2 = 0 block only
                rule.done[zero] = True
        result = rule.result()
        converged = result.converged & inner_converged
        if not converged.all():
            logger.warning("D_{n,m} kernel: %d point(s) did not converge within %d fiber terms",
                           int((~converged).sum()), self.max_degree)
        return KernelBatch(result.values, np.maximum(result.last_term, inner_truncation), result.degree_used, converged)

    def _veta(self, xa: np.ndarray, Y: np.ndarray) -> KernelBatch:
        p = self.params
        n, m = p.n, p.m
        eta = np.asarray(p.eta)
        z, zp, w = xa[:n], xa[n:n + m], xa[n + m]
        wt = w * Y[:, n + m].conj()
        zeta = np.exp(eta[None, :] * wt[:, None]) * z[None, :] * Y[:, :n].conj()
        phi = 1.0 - zeta.sum(axis=1) - Y[:, n:n + m].conj() @ zp
        if np.any(np.abs(phi) < SINGULAR_PHI):
            raise SingularityError(f"|phi| below {SINGULAR_PHI:g}: kernel is singular at this pair")
        if np.any(phi.real <= 0):
            raise DomainError(
                f"Re phi <= 0 (phi = {phi[np.argmax(phi.real <= 0)]!r}); principal branch is ambiguous here"
            )
        kappa = n + m + p.a + 1.0
        log_phi = np.log(phi)
        lead = np.exp(eta.sum() * wt) / (math.pi ** (n + m + 1))
        first = np.exp(gammaln(kappa + 1.0) - gammaln(p.a + 1.0) - (kappa + 1.0) * log_phi) * (zeta @ eta)
        second = eta.sum() * np.exp(gammaln(kappa) - gammaln(p.a + 1.0) - kappa * log_phi)
        values = lead * (first + second)
        size = Y.shape[0]
        return KernelBatch(values, np.zeros(size), np.zeros(size, dtype=np.int64), np.ones(size, dtype=bool))

    def _ball(self, xa: np.ndarray, Y: np.ndarray) -> KernelBatch:
        p = self.params
        kappa = p.n + p.a + 1.0
        log_c = gammaln(kappa) - gammaln(p.a + 1.0) - p.n * math.log(math.pi) - (2 * p.n + 2 * p.a) * math.log(p.radius)
        base = 1.0 - (Y.conj() @ xa) / p.radius ** 2
        values = np.exp(log_c - kappa * np.log(base))
        size = Y.shape[0]
        return KernelBatch(values, np.zeros(size), np.zeros(size, dtype=np.int64), np.ones(size, dtype=bool))


def kernel_cn(p: CnParams, z: ComplexPoint, w: ComplexPoint) -> KernelValue:
    return ClosedKernel(p).evaluate(z, w)


def kernel_dnm(p: DnmParams, x: ComplexPoint, y: ComplexPoint) -> KernelValue:
    """Kernel of D_{n,m} at x = (z, w) and y = (s, t), each of arity n + m."""
    return ClosedKernel(p).evaluate(x, y)


def kernel_veta(p: VEtaParams, x: ComplexPoint, y: ComplexPoint) -> KernelValue:
    """Kernel of V_eta at x = (z, z', w) and y = (s, s', t), each of arity n + m + 1."""
    return ClosedKernel(p).evaluate(x, y)


def kernel_ball(p: BallParams, z: ComplexPoint, w: ComplexPoint) -> KernelValue:
    return ClosedKernel(p).evaluate(z, w)
