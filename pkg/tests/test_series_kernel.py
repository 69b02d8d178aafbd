from bergkern.exceptions import ArgumentError, DomainError
from bergkern.models.complex_point import ComplexPoint, hermitian_product
from bergkern.models.families import BallParams, CnParams
from bergkern.services.moments import MomentTable
from bergkern.services.series import StopRule, sum_power_series
from bergkern.services.series_kernel import KernelSeries, enumerate_degree_shell, kernel_series_eval, multinomial_collapse
from bergkern.services.verify import gram_matrix
from conftest import assert_psd
import math
import numpy as np
import pytest


def _disc_kernel(z: complex, w: complex) -> complex:
    return 1.0 / (math.pi * (1.0 - z * w.conjugate()) ** 2)


@pytest.mark.parametrize("n, d, count", [(1, 5, 1), (2, 2, 3), (3, 4, 15)])
def test_shell_sizes(n, d, count):
    shell = enumerate_degree_shell(n, d)
    assert len(shell) == count
    assert all(alpha.degree() == d for alpha in shell)


def test_shell_order_is_graded_lexicographic():
    assert [alpha.entries for alpha in enumerate_degree_shell(2, 2)] == [(0, 2), (1, 1), (2, 0)]


def test_multinomial_collapse():
    z = ComplexPoint.of(1, 1)
    assert multinomial_collapse(z, z, 3) == pytest.approx(8.0)
    z = ComplexPoint.of(0.3 + 0.1j, -0.2j, 0.5)
    w = ComplexPoint.of(0.1, 0.4 - 0.3j, 0.2j)
    assert multinomial_collapse(z, w, 4) == pytest.approx(hermitian_product(z, w) ** 4)


class TestStopRule:
    def test_three_small_terms(self):
        rule = StopRule(1, 1e-3)
        for k, term in enumerate([1.0, 0.5, 1e-4, 1e-5, 1e-6]):
            rule.add(k, np.array([term]))
        result = rule.result()
        assert result.converged[0]
        assert result.degree_used[0] == 1
        assert result.values[0] == pytest.approx(1.5 + 1e-4 + 1e-5 + 1e-6)

    def test_geometric_series(self):
        x = np.array([0.5, -0.25j, 0.0])
        result = sum_power_series(lambda k: np.zeros(k.shape), x, 1e-15, 500)
        np.testing.assert_allclose(result.values, 1.0 / (1.0 - x), rtol=1e-14)
        assert result.degree_used[2] == 0
        assert result.converged.all()


class TestKernelSeries:
    def test_disc_value(self, disc):
        series = KernelSeries(MomentTable(disc.weight()))
        z, w = 0.5 + 0.1j, 0.3 - 0.4j
        kv = series.evaluate(ComplexPoint.of(z), ComplexPoint.of(w))
        assert kv.converged
        assert kv.value == pytest.approx(_disc_kernel(z, w), rel=1e-11)

    def test_fock_value(self, fock):
        series = KernelSeries(MomentTable(fock.weight()))
        kv = series.evaluate(ComplexPoint.of(0.5), ComplexPoint.of(0.5))
        assert kv.value.real == pytest.approx(0.408718, abs=1e-6)
        assert kv.value == pytest.approx(math.exp(0.25) / math.pi, rel=1e-12)
        assert kernel_series_eval(series, ComplexPoint.of(0.5), ComplexPoint.of(0.5)).value == kv.value

    def test_zero_second_argument(self, fock):
        kv = KernelSeries(MomentTable(fock.weight())).evaluate(ComplexPoint.of(0.7 - 0.2j), ComplexPoint.of(0))
        assert kv.value == pytest.approx(1.0 / math.pi, rel=1e-15)
        assert kv.degree_used == 0
        assert kv.converged

    def test_quadrature_moments(self, disc):
        series = KernelSeries(MomentTable(disc.weight(), prefer="quadrature"))
        rng = np.random.default_rng(11)
        for _ in range(20):
            z, w = 0.7 * np.sqrt(rng.random(2)) * np.exp(2j * math.pi * rng.random(2))
            kv = series.evaluate(ComplexPoint.of(z), ComplexPoint.of(w))
            assert kv.value == pytest.approx(_disc_kernel(complex(z), complex(w)), rel=1e-6)

    def test_budget_reported(self, disc):
        series = KernelSeries(MomentTable(disc.weight()), max_degree=2)
        kv = series.evaluate(ComplexPoint.of(0.9), ComplexPoint.of(0.9))
        assert not kv.converged
        assert kv.degree_used == 2
        assert kv.truncation_estimate > 0

    def test_outside_shadow(self, disc):
        series = KernelSeries(MomentTable(disc.weight()))
        with pytest.raises(DomainError):
            series.evaluate(ComplexPoint.of(1.2), ComplexPoint.of(0))
        with pytest.raises(ArgumentError):
            series.evaluate(ComplexPoint.of(0.1, 0.1), ComplexPoint.of(0.1, 0.1))

    def test_negative_budget(self, disc):
        with pytest.raises(ArgumentError):
            KernelSeries(MomentTable(disc.weight()), max_degree=-1)

    @pytest.mark.parametrize(
        "params", [CnParams(n=2, mu1=0.5, mu2=3.0), BallParams(n=3, a=0.5, radius=1.5)], ids=lambda p: p.family
    )
    def test_collapse_agrees_with_full_shells(self, params):
        table = MomentTable(params.weight())
        x = ComplexPoint(coords=[0.3 + 0.1j, -0.2, 0.1j][: params.n])
        y = ComplexPoint(coords=[0.1, 0.4 - 0.2j, 0.2][: params.n])
        collapsed = KernelSeries(table, collapse=True)
        full = KernelSeries(table, collapse=False)
        assert collapsed.collapse and not full.collapse
        assert collapsed.evaluate(x, y).value == pytest.approx(full.evaluate(x, y).value, rel=1e-10)

    def test_hermitian_and_psd(self, dnm):
        series = KernelSeries(MomentTable(dnm.weight()))
        points = np.array([[0.2, 0.1j], [0.1 - 0.3j, 0.2], [0.0, 0.5], [-0.4j, 0.3 + 0.2j]])
        gram = gram_matrix(series, points)
        np.testing.assert_allclose(gram, gram.conj().T, rtol=1e-10)
        assert_psd(gram)

    @pytest.mark.parametrize("c", [0.5, 3.0])
    def test_scaled_weight_divides_kernel(self, dnm, c):
        table = MomentTable(dnm.weight())
        x, y = ComplexPoint.of(0.2, 0.1j), ComplexPoint.of(-0.1, 0.3)
        base = KernelSeries(table).evaluate(x, y).value
        scaled = KernelSeries(table.scaled(c)).evaluate(x, y).value
        assert scaled == pytest.approx(base / c, rel=1e-12)
