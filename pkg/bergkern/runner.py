from bergkern.config.config import config
from bergkern.exceptions import ArgumentError, BergkernError
from bergkern.models.complex_point import ComplexPoint
from bergkern.models.families import VEtaParams
from bergkern.models.moment_table import MomentTableRecord
from bergkern.models.multi_index import MultiIndex, degree_shell_array
from bergkern.models.report import VerificationReport
from bergkern.models.run_config import RunConfig
from bergkern.services.closed_kernels import ClosedKernel
from bergkern.services.files import (
    load_custom_weight,
    open_output,
    parse_pair,
    read_points_file,
    write_csv,
    write_json_lines,
)
from bergkern.services.moments import MomentTable
from bergkern.services.sampling import interior_points, rng_stream, sampler_for
from bergkern.services.series_kernel import KernelSeries
from bergkern.services.verify import (
    MAX_TEST_DEGREE,
    MonteCarloScheme,
    QuadratureScheme,
    check_gram_psd,
    check_hermitian_symmetry,
    check_moment_closed_form,
    check_orthogonality,
    check_parseval,
    check_reproducing,
    check_sphere_integral,
    check_veta_series,
    cross_validate_family,
    default_polynomials,
)
from functools import partial
from joblib import Parallel, delayed
from threadpoolctl import threadpool_limits
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_INCONCLUSIVE = 3

# stream index for setup draws (anchor points, test polynomials), apart from per-check streams
SETUP_STREAM = 1 << 32
GRAM_POINTS = 8
# coordinate shrink that keeps V_eta pairs inside the triple series' contraction region
VETA_SERIES_SHRINK = 0.6

MOMENT_COLUMNS = [
    "alpha", "degree", "method", "log_value", "value", "abs_error_estimate", "rel_error_estimate", "rel_tol",
    "converged", "rel_discrepancy", "agrees", "error",
]
EVAL_COLUMNS = [
    "index", "x", "y", "closed_re", "closed_im", "series_re", "series_im", "rel_discrepancy",
    "truncation_estimate", "degree_used", "converged", "error",
]
REPORT_COLUMNS = [
    "check_name", "status", "passed", "measured", "measured_imag", "expected", "expected_imag", "tolerance",
    "tolerance_origin", "standard_error", "samples_or_nodes", "rng_seed", "target", "notes", "error",
]

Record = Union[VerificationReport, Dict[str, Any]]


def _exp(log_value: float) -> float:
    return math.exp(log_value) if log_value < 709.0 else math.inf


def _pairs(z: ComplexPoint) -> List[List[float]]:
    return [[c.real, c.imag] for c in z.coords]


def _moment_rows(record: MomentTableRecord) -> List[Dict[str, Any]]:
    """One CSV row per (alpha, method); agreement columns sit on the quadrature row."""
    agreement = {a.alpha: a for a in record.agreement}
    rows: List[Dict[str, Any]] = []
    for entry in record.entries:
        row = entry.model_dump()
        row["alpha"] = list(entry.alpha)
        row["degree"] = sum(entry.alpha)
        row["value"] = _exp(entry.log_value)
        match = agreement.get(entry.alpha)
        if match is not None and entry.method == "quadrature":
            row["rel_discrepancy"] = match.rel_discrepancy
            row["agrees"] = match.agrees
        rows.append(row)
    for failure in record.errors:
        rows.append({"alpha": list(failure.alpha), "degree": sum(failure.alpha), "error": failure.error})
    return rows


def exit_code(records: Sequence[Record]) -> int:
    """0 when everything passed, 1 on any failure or error, 3 on inconclusive without failures."""
    statuses = [r.status if isinstance(r, VerificationReport) else "error" for r in records]
    if any(s in ("failed", "error") for s in statuses):
        return EXIT_FAILED
    if any(s == "inconclusive" for s in statuses):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


class ExperimentRunner:
    """Runs one CLI command end to end: fan-out, ordering and output."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.params = cfg.family_params
        if self.params is not None:
            self.weight = self.params.weight()
            self.shadow = self.params.shadow()
        else:
            self.weight, self.shadow = load_custom_weight(cfg.weight_file)
        self.table = MomentTable(self.weight, self.shadow, prefer=cfg.moments)
        self.arity = self.weight.arity
        logger.info("runner for %s on %s shadow, moments by %s", self.weight.kind, self.shadow.kind, self.table.method)

    def _parallel(self, fn: Callable[[int, Any], Any], items: Sequence[Any]) -> List[Any]:
        """Map fn over (index, item) on a thread pool; results keep input order."""
        if not items:
            return []
        with threadpool_limits(limits=1):
            return Parallel(n_jobs=min(config.THREADS, len(items)), prefer="threads")(
                delayed(fn)(i, item) for i, item in enumerate(items)
            )

    def run(self) -> int:
        handlers = {
            "moments": self.cmd_moments,
            "eval": self.cmd_eval,
            "verify": self.cmd_verify,
            "compare": self.cmd_compare,
        }
        return handlers[self.cfg.command]()

    def _write(self, records: Sequence[Record], columns: Sequence[str], schema: str) -> None:
        with open_output(self.cfg.out) as handle:
            if self.cfg.format == "csv":
                rows = [r.model_dump(mode="json") if isinstance(r, VerificationReport) else r for r in records]
                write_csv(rows, columns, schema, handle)
            else:
                write_json_lines(records, handle)

    def _indices(self, degree: int) -> List[MultiIndex]:
        return [MultiIndex(entries=row) for d in range(degree + 1) for row in degree_shell_array(self.arity, d)]

    def _quadrature_tol(self) -> float:
        rel_tol = self.cfg.tol or self.table.rel_tol
        if not 1e-12 < rel_tol < 1e-2:
            raise ArgumentError(f"quadrature tolerance must lie in (1e-12, 1e-2), got {rel_tol}")
        return rel_tol

    # moments

    def cmd_moments(self) -> int:
        rel_tol = self._quadrature_tol()
        indices = self._indices(self.cfg.degree)
        # closed-form entries whenever the family has them, whatever --moments says
        table = MomentTable(self.weight, self.shadow, rel_tol=self.table.rel_tol)
        logger.info("computing %d moments up to degree %d", len(indices), self.cfg.degree)
        failures = self._parallel(partial(self._fill_moment, table, rel_tol), indices)
        errors = {alpha.entries: error for alpha, error in zip(indices, failures) if error is not None}
        record = table.to_record(errors)
        with open_output(self.cfg.out) as handle:
            if self.cfg.format == "json":
                write_json_lines([record], handle)
            else:
                write_csv(_moment_rows(record), MOMENT_COLUMNS, "bergkern.moments", handle)
        return EXIT_OK

    def _fill_moment(self, table: MomentTable, rel_tol: float, index: int, alpha: MultiIndex) -> Optional[str]:
        try:
            if table.method == "closed_form":
                table.entry(alpha)
            table.quadrature_entry(alpha, rel_tol, strict=False)
        except BergkernError as exc:
            logger.error("moment %s: %s", alpha, exc)
            return f"{type(exc).__name__}: {exc}"
        return None

    # eval

    def _point_pairs(self) -> List[Tuple[ComplexPoint, ComplexPoint]]:
        pairs = [parse_pair(text, self.arity) for text in self.cfg.pairs]
        if self.cfg.points_file:
            pairs.extend(read_points_file(self.cfg.points_file, self.arity))
        return pairs

    def cmd_eval(self) -> int:
        pairs = self._point_pairs()
        if not pairs:
            raise ArgumentError("eval needs at least one point pair (--pair or --points)")
        closed = ClosedKernel(self.params) if self.params is not None else None
        series = KernelSeries(self.table, max_degree=self.cfg.max_degree)
        rel_tol = self.cfg.tol or 1e-12
        rows = self._parallel(partial(self._eval_row, closed, series, rel_tol), pairs)
        self._write(rows, EVAL_COLUMNS, "bergkern.eval")
        return EXIT_OK

    def _eval_row(self, closed, series, rel_tol, index, pair) -> Dict[str, Any]:
        x, y = pair
        row: Dict[str, Any] = {"index": index, "x": _pairs(x), "y": _pairs(y)}
        errors = []
        kc = ks = None
        if closed is not None:
            try:
                kc = closed.evaluate(x, y)
                row["closed_re"], row["closed_im"] = kc.value.real, kc.value.imag
            except BergkernError as exc:
                errors.append(f"closed: {type(exc).__name__}: {exc}")
        try:
            ks = series.evaluate(x, y, rel_tol)
            row["series_re"], row["series_im"] = ks.value.real, ks.value.imag
            row["truncation_estimate"] = ks.truncation_estimate
            row["degree_used"] = ks.degree_used
            row["converged"] = ks.converged
        except BergkernError as exc:
            errors.append(f"series: {type(exc).__name__}: {exc}")
        if kc is not None and ks is not None and kc.value != 0:
            row["rel_discrepancy"] = abs(kc.value - ks.value) / abs(kc.value)
        if errors:
            logger.error("pair %d: %s", index, "; ".join(errors))
            row["error"] = "; ".join(errors)
        return row

    # verify

    def _scheme(self) -> Union[QuadratureScheme, MonteCarloScheme]:
        if self.cfg.scheme == "mc":
            return MonteCarloScheme(samples=self.cfg.samples or config.MC_SAMPLES, seed=self.cfg.seed, tol=self.cfg.tol)
        rel_tol = config.CLOSED_FORM_TOL if self.params is not None else config.CUSTOM_TOL
        return QuadratureScheme(rel_tol=rel_tol, angular_nodes=None, tol=self.cfg.tol)

    def _seed(self) -> int:
        return self.cfg.seed if self.cfg.seed is not None else 0

    def _require_family(self, suite: str):
        if self.params is None:
            raise ArgumentError(f"suite {suite!r} needs a named family")
        return self.params

    def _anchor_points(self) -> List[ComplexPoint]:
        if self.cfg.pairs or self.cfg.points_file:
            return [x for x, _ in self._point_pairs()]
        if self.params is None:
            return [ComplexPoint.origin(self.arity)]
        rng = rng_stream(self._seed(), SETUP_STREAM)
        return [ComplexPoint(coords=row) for row in interior_points(self.params, 2, rng, slack=0.5)]

    def _sample_points(self, count: int) -> np.ndarray:
        rng = rng_stream(self._seed(), SETUP_STREAM)
        if self.params is not None:
            return interior_points(self.params, count, rng, slack=0.3)
        points, _ = sampler_for(self.weight, self.shadow).sample(rng, 16 * count)
        points = points[self.shadow.contains(np.abs(points))]
        if len(points) < count:
            raise ArgumentError("could not sample enough interior points of the custom shadow")
        return points[:count]

    def _kernels(self) -> List[Tuple[str, Any]]:
        kernels: List[Tuple[str, Any]] = []
        if self.params is not None:
            kernels.append(("closed", ClosedKernel(self.params)))
        kernels.append(("series", KernelSeries(self.table, max_degree=self.cfg.max_degree)))
        return kernels

    def _verify_tasks(self) -> List[Callable[[int], List[VerificationReport]]]:
        cfg = self.cfg
        suite = cfg.suite
        seed = self._seed()
        scheme = self._scheme()

        def single(check):
            return lambda check_index: [check(check_index)]

        if suite == "cross_validate":
            params = self._require_family(suite)
            return [
                lambda check_index: cross_validate_family(
                    params, cfg.num_points, seed, cfg.tol or 1e-7, max_degree=cfg.max_degree
                )
            ]

        if suite in ("reproducing", "parseval"):
            polynomials = default_polynomials(
                self.arity, rng_stream(seed, SETUP_STREAM + 1), max_degree=min(cfg.degree, MAX_TEST_DEGREE)
            )
            if suite == "parseval":
                return [
                    single(partial(self._parseval, f, scheme)) for f in polynomials
                ]
            kernel = self._kernels()[0][1]
            return [
                single(partial(self._reproducing, kernel, f, z0, scheme))
                for z0 in self._anchor_points()
                for f in polynomials
            ]

        if suite == "orthogonality":
            tasks = []
            for alpha in self._indices(cfg.degree):
                shifted = alpha + MultiIndex.unit(self.arity, self.arity - 1)
                for beta in (alpha, shifted):
                    tasks.append(single(partial(self._orthogonality, alpha, beta, scheme)))
            return tasks

        if suite in ("symmetry", "gram"):
            points = self._sample_points(GRAM_POINTS)
            check = check_hermitian_symmetry if suite == "symmetry" else check_gram_psd
            return [single(lambda _, k=kernel, name=name: check(k, points, name)) for name, kernel in self._kernels()]

        if suite == "sphere":
            samples = cfg.samples or config.MC_SAMPLES
            return [
                single(partial(check_sphere_integral, alpha, samples, seed))
                for alpha in self._indices(min(cfg.degree, 4))
            ]

        if suite == "veta_series":
            params = self._require_family(suite)
            if not isinstance(params, VEtaParams):
                raise ArgumentError("suite 'veta_series' needs the veta family")
            rng = rng_stream(seed, SETUP_STREAM)
            X = interior_points(params, cfg.num_points, rng, slack=0.3)
            Y = interior_points(params, cfg.num_points, rng, slack=0.3)
            head = params.n + params.m
            X[:, :head] *= VETA_SERIES_SHRINK
            Y[:, :head] *= VETA_SERIES_SHRINK
            return [
                single(
                    lambda _, x=ComplexPoint(coords=X[i]), y=ComplexPoint(coords=Y[i]): check_veta_series(
                        params, x, y, rel_tol=cfg.tol or 1e-6
                    )
                )
                for i in range(cfg.num_points)
            ]

        raise ArgumentError(f"unknown suite {suite!r}")

    def _reproducing(self, kernel, f, z0, scheme, check_index):
        return check_reproducing(kernel, self.weight, self.shadow, f, z0, scheme, check_index, table=self.table)

    def _parseval(self, f, scheme, check_index):
        return check_parseval(f, self.weight, self.shadow, scheme, check_index, table=self.table)

    def _orthogonality(self, alpha, beta, scheme, check_index):
        return check_orthogonality(self.weight, self.shadow, alpha, beta, scheme, check_index, table=self.table)

    def _run_check(self, check_index: int, task: Callable[[int], List[VerificationReport]]) -> List[Record]:
        try:
            return task(check_index)
        except BergkernError as exc:
            logger.error("check %d of suite %s: %s", check_index, self.cfg.suite, exc)
            return [{"check_name": self.cfg.suite, "status": "error", "error": f"{type(exc).__name__}: {exc}"}]

    def _finish(self, records: List[Record], schema: str) -> int:
        self._write(records, REPORT_COLUMNS, schema)
        code = exit_code(records)
        counts: Dict[str, int] = {}
        for r in records:
            status = r.status if isinstance(r, VerificationReport) else "error"
            counts[status] = counts.get(status, 0) + 1
        logger.info("%d checks: %s", len(records), counts)
        return code

    def cmd_verify(self) -> int:
        tasks = self._verify_tasks()
        logger.info("running %d checks of suite %s", len(tasks), self.cfg.suite)
        results = self._parallel(self._run_check, tasks)
        records = [record for batch in results for record in batch]
        return self._finish(records, "bergkern.verify")

    def cmd_compare(self) -> int:
        if not self.table.has_closed_form:
            raise ArgumentError("compare needs a family with closed-form moments")
        rel_tol = self._quadrature_tol()
        tasks = [
            lambda _, alpha=alpha: [check_moment_closed_form(self.table, alpha, rel_tol)]
            for alpha in self._indices(self.cfg.degree)
        ]
        results = self._parallel(self._run_check, tasks)
        records = [record for batch in results for record in batch]
        return self._finish(records, "bergkern.compare")
