from bergkern.config.config import config
from bergkern.exceptions import ArgumentError, ConvergenceError, DomainError
from bergkern.models.complex_point import ComplexPoint
from bergkern.models.families import BallParams, CnParams, DnmParams, VEtaParams
from bergkern.models.kernel_value import KernelBatch
from bergkern.models.moment_table import MomentEntry
from bergkern.models.multi_index import MultiIndex, degree_shell_array
from bergkern.models.polynomial import Polynomial
from bergkern.models.report import VerificationReport
from bergkern.models.shadows import ShadowRegion
from bergkern.models.weights import RadialWeight
from bergkern.services.closed_kernels import ClosedKernel
from bergkern.services.moments import AGREEMENT_FACTOR, MomentTable, log_moments_veta, log_sphere_monomial_integral, moment_quadrature
from bergkern.services.quadrature import integrate_over_shadow
from bergkern.services.sampling import interior_points, rng_stream, sampler_for, sphere_points
from bergkern.services.series_kernel import KernelSeries
from pydantic import BaseModel, Field
from scipy.special import gammaln
from typing import Callable, Dict, List, Literal, Optional, Protocol, Tuple, Union
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)

MAX_TEST_DEGREE = 10
# samples drawn per Monte-Carlo chunk
MC_CHUNK = 50_000
GRAM_TOL = 1e-8
SYMMETRY_TOL = 1e-11
# relative slack for estimates that are exact up to rounding
ROUNDING_FLOOR = 1e-12
# torus nodes held at once by angular means and coefficient grids
ANGULAR_BUDGET = 1 << 20
EVAL_CHUNK = 1 << 16
# torus radius as a fraction of the diagonal extent of the shadow
TORUS_FRACTION = 0.9
DIAGONAL_CAP = 1e6


class KernelEvaluator(Protocol):
    arity: int

    def evaluate_many(self, x: ComplexPoint, Y: np.ndarray) -> KernelBatch:
        ...


class QuadratureScheme(BaseModel):
    kind: Literal["quadrature"] = "quadrature"
    rel_tol: float = 1e-9
    angular_nodes: Optional[int] = Field(default=None, ge=1)
    tol: Optional[float] = Field(default=None, ge=0)


class MonteCarloScheme(BaseModel):
    kind: Literal["mc"] = "mc"
    samples: int = Field(default_factory=lambda: config.MC_SAMPLES, ge=2)
    seed: int
    tol: Optional[float] = Field(default=None, ge=0)


Scheme = Union[QuadratureScheme, MonteCarloScheme]


def _pairs(z: ComplexPoint) -> List[List[float]]:
    return [[c.real, c.imag] for c in z.coords]


def _check_arity(weight: RadialWeight, shadow: ShadowRegion, arity: int) -> None:
    if not weight.arity == shadow.arity == arity:
        raise ArgumentError(f"arity mismatch: weight {weight.arity}, shadow {shadow.arity}, argument {arity}")


def _angle_grid(d: int, nodes: int) -> np.ndarray:
    """exp(i theta) on the tensor trapezoid grid of [0, 2 pi)^d, shape (nodes^d, d)."""
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    grids = np.meshgrid(*([theta] * d), indexing="ij")
    return np.exp(1j * np.stack([g.ravel() for g in grids], axis=1))


def torus_nodes(requested: int, needed: int, d: int) -> int:
    """Nodes per angle: at least ``needed``, otherwise ``requested`` capped so nodes^d fits ANGULAR_BUDGET."""
    cap = max(2, int(math.floor(2.0 ** (math.log2(ANGULAR_BUDGET) / d) + 1e-9)))
    return max(needed, min(requested, cap))


def _angular_mean(values_at: Callable[[np.ndarray], np.ndarray], r: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Mean over the angle grid of values_at(r e^{i theta}), for each row of r."""
    rows = max(1, ANGULAR_BUDGET // angles.shape[0])
    out = np.empty(r.shape[0], dtype=np.complex128)
    for start in range(0, r.shape[0], rows):
        block = r[start:start + rows]
        points = (block[:, None, :] * angles[None, :, :]).reshape(-1, r.shape[1])
        out[start:start + rows] = values_at(points).reshape(block.shape[0], -1).mean(axis=1)
    return out


def _diagonal_extent(shadow: ShadowRegion, d: int) -> float:
    """sup of t with (t, ..., t) in the shadow; inf when the diagonal never leaves it."""

    def inside(t: float) -> bool:
        return bool(shadow.contains(np.full((1, d), t))[0])

    hi = 1.0
    while inside(hi):
        if hi > DIAGONAL_CAP:
            return math.inf
        hi *= 2.0
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise DomainError(f"{shadow.kind} shadow has no interior point on the diagonal")
    return lo


def torus_coefficients(kernel: KernelEvaluator, z0: ComplexPoint, radius: float, nodes: int) -> np.ndarray:
    """c[beta] = a_beta radius^|beta| for K(z0, w) = sum_beta a_beta conj(w)^beta, all beta < nodes.

    K(z0, .) is sampled on the torus |w_j| = radius and transformed with one inverse FFT;
    the kernel is evaluated in chunks of EVAL_CHUNK points.
    """
    d = z0.arity
    points = radius * _angle_grid(d, nodes)
    values = np.empty(points.shape[0], dtype=np.complex128)
    for start in range(0, points.shape[0], EVAL_CHUNK):
        values[start:start + EVAL_CHUNK] = kernel.evaluate_many(z0, points[start:start + EVAL_CHUNK]).values
    return np.fft.ifftn(values.reshape((nodes,) * d))


def _radial_cubature(
    weight: RadialWeight,
    shadow: ShadowRegion,
    angular_mean: Callable[[np.ndarray], np.ndarray],
    rel_tol: float,
    abs_tol: float,
):
    """Integrate (2 pi)^d prod(r) phi(r) * angular_mean(r) over the shadow."""
    d = shadow.arity
    log_2pi = d * math.log(2.0 * math.pi)

    def integrand(r: np.ndarray) -> np.ndarray:
        out = np.zeros(r.shape[0], dtype=np.complex128)
        with np.errstate(divide="ignore"):
            log_phi = weight.log_evaluate(r)
        keep = shadow.contains(r) & np.isfinite(log_phi) & (log_phi > -700.0)
        if keep.any():
            rk = r[keep]
            out[keep] = np.exp(log_2pi + np.sum(np.log(rk), axis=1) + log_phi[keep]) * angular_mean(rk)
        return out

    return integrate_over_shadow(shadow, integrand, rel_tol, abs_tol, raise_on_failure=False)


def _mc_estimate(
    weight: RadialWeight,
    shadow: ShadowRegion,
    g: Callable[[np.ndarray], np.ndarray],
    samples: int,
    rng: np.random.Generator,
) -> Tuple[complex, float]:
    """Mean and standard error of g(w) phi(w) / q(w) under the family sampler."""
    sampler = sampler_for(weight, shadow)
    values = []
    remaining = samples
    while remaining > 0:
        size = min(MC_CHUNK, remaining)
        points, log_q = sampler.sample(rng, size)
        log_ratio = sampler.log_ratio(points, log_q)
        h = np.zeros(size, dtype=np.complex128)
        keep = np.isfinite(log_ratio)
        if keep.any():
            h[keep] = g(points[keep]) * np.exp(log_ratio[keep])
        values.append(h)
        remaining -= size
    h = np.concatenate(values)
    mean = complex(h.mean())
    standard_error = float(math.sqrt(np.sum(np.abs(h - mean) ** 2) / (h.size - 1) / h.size))
    return mean, standard_error


def _mc_report(check_name, target, estimate, standard_error, expected, scheme: MonteCarloScheme, notes=""):
    scale = abs(expected)
    candidates = {
        "absolute": scheme.tol or 0.0,
        "4x standard error": 4.0 * standard_error,
        "rounding": ROUNDING_FLOOR * scale,
    }
    origin = max(candidates, key=candidates.get)
    tolerance = candidates[origin]
    inconclusive = scale > 0 and standard_error > 0.1 * scale
    if inconclusive:
        logger.warning("%s: standard error %.3g exceeds 10%% of |expected|; marking inconclusive", check_name, standard_error)
    return VerificationReport.build(
        check_name=check_name,
        target=target,
        measured=estimate,
        expected=expected,
        tolerance=tolerance,
        tolerance_origin=origin,
        samples_or_nodes=scheme.samples,
        rng_seed=scheme.seed,
        standard_error=standard_error,
        inconclusive=inconclusive,
        notes=notes,
    )


def _cubature_abs_tol(scheme: QuadratureScheme) -> float:
    # two digits below the check tolerance
    return 0.01 * (config.VERIFY_TOL if scheme.tol is None else scheme.tol)


def _deterministic_report(
    check_name, target, measured, expected, error, scheme: QuadratureScheme, nodes, notes="", converged=True
):
    floor = config.VERIFY_TOL if scheme.tol is None else scheme.tol
    tolerance = max(floor, error)
    return VerificationReport.build(
        check_name=check_name,
        target=target,
        measured=measured,
        expected=expected,
        tolerance=tolerance,
        tolerance_origin="absolute" if tolerance == floor else "quadrature error",
        samples_or_nodes=nodes,
        inconclusive=not converged,
        notes=notes,
    )


def check_reproducing(
    kernel: KernelEvaluator,
    weight: RadialWeight,
    shadow: ShadowRegion,
    f: Polynomial,
    z0: ComplexPoint,
    scheme: Scheme,
    check_index: int = 0,
    table: Optional[MomentTable] = None,
) -> VerificationReport:
    """Compare int K(z0, w) f(w) phi(|w|) dV(w) with f(z0).

    Monte-Carlo samples the integrand directly. The deterministic path expands
    K(z0, w) in conj(w)^beta, takes the coefficients of the terms of f from a torus
    FFT and pairs them with quadrature moments: the angular integral kills every
    other cross term.
    """
    _check_arity(weight, shadow, f.arity)
    if z0.arity != f.arity:
        raise ArgumentError(f"z0 has arity {z0.arity}, polynomial has arity {f.arity}")
    if f.degree > MAX_TEST_DEGREE:
        raise ArgumentError(f"test polynomials are limited to degree {MAX_TEST_DEGREE}, got {f.degree}")
    if not shadow.contains(np.abs(z0.as_array())):
        raise DomainError(f"z0 = {z0} is not an interior point")
    expected = f(z0)
    target = {"weight": weight.descriptor(), "z0": _pairs(z0), "f": f.to_dict(), "scheme": scheme.kind}
    d = f.arity

    if isinstance(scheme, MonteCarloScheme):
        rng = rng_stream(scheme.seed, check_index)

        def g(points):
            return kernel.evaluate_many(z0, points).values * f.evaluate(points)

        estimate, standard_error = _mc_estimate(weight, shadow, g, scheme.samples, rng)
        return _mc_report("reproducing", target, estimate, standard_error, expected, scheme)

    table = table or MomentTable(weight, shadow, prefer="quadrature")
    requested = scheme.angular_nodes or config.ANGULAR_NODES
    nodes = torus_nodes(requested, f.max_partial_degree() + 1, d)
    limit = TORUS_FRACTION * _diagonal_extent(shadow, d)
    entries = {alpha.entries: table.quadrature_entry(alpha, scheme.rel_tol, strict=False) for alpha, _ in f.terms()}
    log_volume = table.quadrature_entry(MultiIndex(entries=(0,) * d), scheme.rel_tol, strict=False).log_value

    by_degree: Dict[int, List[Tuple[MultiIndex, complex]]] = {}
    for alpha, c in f.terms():
        by_degree.setdefault(alpha.degree(), []).append((alpha, c))

    measured = 0j
    error = 0.0
    radii = []
    for k, terms in sorted(by_degree.items()):
        # torus where |w^beta|^2 phi carries its mass, kept inside the shadow
        if k == 0:
            radius = min(limit, 1.0)
        else:
            log_mean = float(np.mean([entries[alpha.entries].log_value for alpha, _ in terms]))
            radius = min(limit, math.exp((log_mean - log_volume) / (2 * k)))
        radii.append(radius)
        coefficients = torus_coefficients(kernel, z0, radius, nodes)
        for alpha, c in terms:
            entry = entries[alpha.entries]
            a = complex(coefficients[alpha.entries]) / radius ** k
            measured += c * a * math.exp(entry.log_value)
            error += abs(c * a) * entry.abs_error_estimate

    notes = (
        f"angular factor by inverse FFT of K(z0, .) on {nodes}^{d} torus nodes at radii "
        f"{[round(r, 6) for r in radii]}; radial factor from quadrature moments"
    )
    return _deterministic_report(
        "reproducing", target, measured, expected, error, scheme, nodes ** d * len(radii), notes,
        converged=all(entry.converged for entry in entries.values()),
    )


def check_orthogonality(
    weight: RadialWeight,
    shadow: ShadowRegion,
    alpha: MultiIndex,
    beta: MultiIndex,
    scheme: Scheme,
    check_index: int = 0,
    table: Optional[MomentTable] = None,
) -> VerificationReport:
    """<z^alpha, z^beta>_phi with the angular factor integrated in closed form."""
    _check_arity(weight, shadow, alpha.arity)
    if beta.arity != alpha.arity:
        raise ArgumentError(f"arity mismatch: {alpha.arity} vs {beta.arity}")
    target = {"weight": weight.descriptor(), "alpha": list(alpha.entries), "beta": list(beta.entries), "scheme": scheme.kind}
    seed = scheme.seed if isinstance(scheme, MonteCarloScheme) else None

    if alpha != beta:
        # prod_j int_0^{2 pi} exp(i (alpha_j - beta_j) theta) d theta vanishes
        return VerificationReport.build(
            check_name="orthogonality",
            target=target,
            measured=0.0,
            expected=0.0,
            tolerance=scheme.tol if scheme.tol is not None else config.VERIFY_TOL,
            tolerance_origin="closed-form angular factor",
            samples_or_nodes=0,
            rng_seed=seed,
            notes=(
                f"angular factor computed in closed form, zero for alpha != beta; "
                f"the {scheme.kind} scheme drew no samples and used no nodes"
            ),
        )

    table = table or MomentTable(weight, shadow)
    expected_entry = table.entry(alpha)
    expected = math.exp(expected_entry.log_value)
    powers = 2 * alpha.as_array()

    if isinstance(scheme, MonteCarloScheme):
        rng = rng_stream(scheme.seed, check_index)

        def g(points):
            return np.prod(np.abs(points) ** powers, axis=1)

        estimate, standard_error = _mc_estimate(weight, shadow, g, scheme.samples, rng)
        return _mc_report("orthogonality", target, estimate, standard_error, expected, scheme)

    try:
        measured_entry = moment_quadrature(shadow, weight, alpha, scheme.rel_tol)
    except ConvergenceError as exc:
        if not isinstance(exc.estimate, MomentEntry):
            raise
        measured_entry = exc.estimate
    measured = math.exp(measured_entry.log_value)
    error = measured_entry.abs_error_estimate + expected_entry.abs_error_estimate
    return _deterministic_report(
        "orthogonality", target, measured, expected, error, scheme, 0, converged=measured_entry.converged
    )


def check_parseval(
    f: Polynomial,
    weight: RadialWeight,
    shadow: ShadowRegion,
    scheme: Scheme,
    check_index: int = 0,
    table: Optional[MomentTable] = None,
) -> VerificationReport:
    """int |f|^2 phi dV against sum_alpha |C_alpha|^2 I(alpha)."""
    _check_arity(weight, shadow, f.arity)
    if f.degree > MAX_TEST_DEGREE:
        raise ArgumentError(f"test polynomials are limited to degree {MAX_TEST_DEGREE}, got {f.degree}")
    table = table or MomentTable(weight, shadow)
    expected = 0.0
    expected_error = 0.0
    for alpha, c in f.terms():
        entry = table.entry(alpha)
        expected += abs(c) ** 2 * math.exp(entry.log_value)
        expected_error += abs(c) ** 2 * entry.abs_error_estimate
    target = {"weight": weight.descriptor(), "f": f.to_dict(), "scheme": scheme.kind}
    notes = (
        "passing for every monomial of f implies the reproducing identity for f "
        "with error at most sum_alpha |C_alpha| * tol_alpha / I(alpha)"
    )

    if isinstance(scheme, MonteCarloScheme):
        rng = rng_stream(scheme.seed, check_index)

        def g(points):
            return np.abs(f.evaluate(points)) ** 2

        estimate, standard_error = _mc_estimate(weight, shadow, g, scheme.samples, rng)
        return _mc_report("parseval", target, estimate, standard_error, expected, scheme, notes)

    # trapezoid in each angle is exact for |f|^2 once nodes exceed the partial degree
    nodes = scheme.angular_nodes or f.max_partial_degree() + 1
    angles = _angle_grid(f.arity, nodes)

    def angular_mean(r):
        return _angular_mean(lambda points: np.abs(f.evaluate(points)) ** 2, r, angles)

    result = _radial_cubature(weight, shadow, angular_mean, scheme.rel_tol, _cubature_abs_tol(scheme))
    return _deterministic_report(
        "parseval", target, result.value.real, expected, result.abs_error + expected_error, scheme,
        result.boxes * angles.shape[0], notes, result.converged,
    )


def cross_validate_family(
    p: Union[CnParams, DnmParams, VEtaParams, BallParams],
    num_points: int,
    seed: int,
    rel_tol: float,
    slack: float = 0.3,
    max_degree: Optional[int] = None,
) -> List[VerificationReport]:
    """Closed-form kernel against the moment series built from closed-form moments."""
    if num_points < 1:
        raise ArgumentError("num_points must be positive")
    rng = rng_stream(seed, 0)
    X = interior_points(p, num_points, rng, slack)
    Y = interior_points(p, num_points, rng, slack)
    closed = ClosedKernel(p)
    series = KernelSeries(MomentTable(p.weight(), p.shadow()), max_degree=max_degree)
    series_tol = max(rel_tol * 1e-2, 1e-14)
    reports = []
    for i in range(num_points):
        x = ComplexPoint(coords=X[i])
        y = ComplexPoint(coords=Y[i])
        kc = closed.evaluate(x, y)
        ks = series.evaluate(x, y, series_tol)
        discrepancy = abs(kc.value - ks.value) / abs(kc.value)
        reports.append(
            VerificationReport.build(
                check_name="cross_validate",
                target={"family": p.model_dump(mode="json"), "x": _pairs(x), "y": _pairs(y)},
                measured=discrepancy,
                expected=0.0,
                tolerance=rel_tol,
                tolerance_origin="relative",
                samples_or_nodes=ks.degree_used,
                rng_seed=seed,
                inconclusive=not (ks.converged and kc.converged),
                notes=f"closed={kc.value!r} series={ks.value!r}",
            )
        )
    return reports


def check_moment_closed_form(table: MomentTable, alpha: MultiIndex, rel_tol: float) -> VerificationReport:
    """Ratio of the quadrature moment to the closed-form one, expected 1."""
    closed = table.closed_entry(alpha)
    try:
        quadrature = moment_quadrature(table.shadow, table.weight, alpha, rel_tol)
    except ConvergenceError as exc:
        if not isinstance(exc.estimate, MomentEntry):
            raise
        quadrature = exc.estimate
    return VerificationReport.build(
        check_name="moment_compare",
        target={"weight": table.weight.descriptor(), "alpha": list(alpha.entries)},
        measured=math.exp(quadrature.log_value - closed.log_value),
        expected=1.0,
        tolerance=AGREEMENT_FACTOR * rel_tol,
        tolerance_origin="relative, 100x quadrature rel_tol",
        samples_or_nodes=0,
        inconclusive=not quadrature.converged,
        notes=f"log closed={closed.log_value!r} log quadrature={quadrature.log_value!r}",
    )


def gram_matrix(kernel: KernelEvaluator, points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    rows = [kernel.evaluate_many(ComplexPoint(coords=x), points).values for x in points]
    return np.array(rows)


def check_gram_psd(kernel: KernelEvaluator, points: np.ndarray, label: str = "") -> VerificationReport:
    """Smallest eigenvalue of the Gram matrix against -GRAM_TOL times the largest."""
    gram = gram_matrix(kernel, points)
    eigenvalues = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    largest = float(np.max(np.abs(eigenvalues)))
    negativity = max(0.0, -float(eigenvalues.min()) / largest) if largest > 0 else 0.0
    return VerificationReport.build(
        check_name="gram_psd",
        target={"kernel": label, "points": [[[c.real, c.imag] for c in x] for x in np.atleast_2d(points)]},
        measured=negativity,
        expected=0.0,
        tolerance=GRAM_TOL,
        tolerance_origin="relative to largest eigenvalue",
        samples_or_nodes=gram.shape[0],
        notes=f"eigenvalues={eigenvalues.tolist()!r}",
    )


def check_hermitian_symmetry(kernel: KernelEvaluator, points: np.ndarray, label: str = "") -> VerificationReport:
    """max |K(x_i, x_j) - conj K(x_j, x_i)| relative to max |K|."""
    gram = gram_matrix(kernel, points)
    asymmetry = float(np.max(np.abs(gram - gram.conj().T)) / np.max(np.abs(gram)))
    return VerificationReport.build(
        check_name="hermitian_symmetry",
        target={"kernel": label, "points": [[[c.real, c.imag] for c in x] for x in np.atleast_2d(points)]},
        measured=asymmetry,
        expected=0.0,
        tolerance=SYMMETRY_TOL,
        tolerance_origin="relative",
        samples_or_nodes=gram.size,
    )


def check_sphere_integral(alpha: MultiIndex, samples: int, seed: int, check_index: int = 0) -> VerificationReport:
    """Monte-Carlo integral of prod |x_j|^(2 alpha_j + 1) over the unit sphere of R^n."""
    n = alpha.arity
    rng = rng_stream(seed, check_index)
    log_area = math.log(2.0) + 0.5 * n * math.log(math.pi) - float(gammaln(0.5 * n))
    powers = 2.0 * alpha.as_array() + 1.0
    values = []
    remaining = samples
    while remaining > 0:
        size = min(MC_CHUNK, remaining)
        x = sphere_points(rng, size, n)
        values.append(np.exp(log_area) * np.prod(np.abs(x) ** powers, axis=1))
        remaining -= size
    h = np.concatenate(values)
    estimate = float(h.mean())
    standard_error = float(h.std(ddof=1) / math.sqrt(h.size))
    scheme = MonteCarloScheme(samples=samples, seed=seed)
    expected = math.exp(log_sphere_monomial_integral(alpha))
    return _mc_report("sphere_integral", {"alpha": list(alpha.entries)}, estimate, standard_error, expected, scheme)


def veta_triple_series(p: VEtaParams, x: ComplexPoint, y: ComplexPoint, max_degree: int = 40) -> complex:
    """Brute-force sum of I(alpha, beta, gamma)^-1 x^(alpha beta gamma) conj(y)^(alpha beta gamma)."""
    xa, ya = x.as_array(), y.as_array().conj()
    total = 0j
    for d in range(max_degree + 1):
        shell = degree_shell_array(p.arity, d)
        coefficients = np.exp(-log_moments_veta(shell, p.n, p.m, p.eta, p.a))
        total += np.sum(coefficients * np.prod(xa[None, :] ** shell, axis=1) * np.prod(ya[None, :] ** shell, axis=1))
    return complex(total)


def check_veta_series(
    p: VEtaParams, x: ComplexPoint, y: ComplexPoint, max_degree: int = 40, rel_tol: float = 1e-6
) -> VerificationReport:
    closed = ClosedKernel(p).evaluate(x, y).value
    series = veta_triple_series(p, x, y, max_degree)
    return VerificationReport.build(
        check_name="veta_series",
        target={"family": p.model_dump(mode="json"), "x": _pairs(x), "y": _pairs(y)},
        measured=abs(closed - series) / abs(closed),
        expected=0.0,
        tolerance=rel_tol,
        tolerance_origin="relative",
        samples_or_nodes=max_degree,
        notes=f"closed={closed!r} series={series!r}",
    )


def default_polynomials(arity: int, rng: np.random.Generator, max_degree: int = 4, random_count: int = 3) -> List[Polynomial]:
    """Monomials up to ``max_degree`` followed by a few random sparse polynomials."""
    polynomials = []
    for d in range(max_degree + 1):
        for row in degree_shell_array(arity, d):
            polynomials.append(Polynomial(arity, {tuple(row): 1.0}))
    for _ in range(random_count):
        polynomials.append(Polynomial.random_sparse(arity, max_degree, 3, rng))
    return polynomials
