from bergkern.exceptions import ArgumentError, DomainError, SingularityError
from bergkern.models.complex_point import ComplexPoint
from bergkern.models.families import BallParams, CnParams, DnmParams, VEtaParams
from bergkern.services.closed_kernels import (
    ClosedKernel,
    _cn_log_coeff,
    cn_series,
    kernel_ball,
    kernel_cn,
    kernel_dnm,
    kernel_veta,
)
from bergkern.services.moments import log_moments_cn
from bergkern.services.sampling import interior_points
from bergkern.services.series import sum_power_series
from bergkern.services.verify import gram_matrix
from conftest import ALL_FAMILIES, assert_psd
import math
import numpy as np
import pytest
import warnings


def test_gaussian_exponential_form():
    X = np.array([0.3 + 0.4j, -1.2, 2.0j])
    values, *_ = cn_series(2, 0.7, 2.0, X, 1e-15)
    summed = sum_power_series(_cn_log_coeff(2, 0.7, 2.0), X, 1e-15, 400)
    np.testing.assert_allclose(values, summed.values, rtol=1e-13)
    np.testing.assert_allclose(values, (0.7 / math.pi) ** 2 * np.exp(0.7 * X), rtol=1e-14)


def test_fock_value(fock):
    kv = kernel_cn(fock, ComplexPoint.of(0.5), ComplexPoint.of(0.5))
    assert kv.value.real == pytest.approx(0.408718, abs=1e-6)
    assert kv.value.imag == 0.0


def test_cn_at_origin_is_inverse_volume():
    p = CnParams(n=2, mu1=0.5, mu2=3.0)
    kv = kernel_cn(p, ComplexPoint.of(0.4j, 0.1), ComplexPoint.origin(2))
    expected = math.exp(-log_moments_cn(np.zeros((1, 2)), 2, 0.5, 3.0)[0])
    assert kv.value == pytest.approx(expected, rel=1e-14)


def test_dnm_origin(dnm):
    kv = kernel_dnm(dnm, ComplexPoint.origin(2), ComplexPoint.origin(2))
    assert kv.value == pytest.approx(1.0 / math.pi ** 2, rel=1e-14)
    assert kv.converged


@pytest.mark.parametrize("a, expected", [(0.0, 2.0 / math.pi ** 3), (1.0, 6.0 / math.pi ** 3)])
def test_veta_origin(a, expected):
    p = VEtaParams(n=1, m=1, eta=(1.0,), a=a)
    kv = kernel_veta(p, ComplexPoint.origin(3), ComplexPoint.origin(3))
    assert kv.value == pytest.approx(expected, rel=1e-14)


def test_veta_explicit_formula(veta):
    x = ComplexPoint.of(0.3, 0.2j, 0.4)
    y = ComplexPoint.of(0.1 + 0.2j, 0.3, -0.2)
    (z, zp, w), (s, sp, t) = x.coords, y.coords
    zeta = math.exp((w * t.conjugate()).real) * z * s.conjugate()
    phi = 1 - zeta - zp * sp.conjugate()
    expected = math.exp((w * t.conjugate()).real) / math.pi ** 3 * (6 * zeta / phi ** 4 + 2 / phi ** 3)
    assert kernel_veta(veta, x, y).value == pytest.approx(expected, rel=1e-13)


def test_ball_origin():
    kv = kernel_ball(BallParams(n=2, a=1.0, radius=2.0), ComplexPoint.origin(2), ComplexPoint.origin(2))
    assert kv.value == pytest.approx(6.0 / (64.0 * math.pi ** 2), rel=1e-14)


def test_disc_value(disc):
    z, w = 0.5 + 0.1j, 0.3 - 0.4j
    kv = kernel_ball(disc, ComplexPoint.of(z), ComplexPoint.of(w))
    assert kv.value == pytest.approx(1.0 / (math.pi * (1 - z * w.conjugate()) ** 2), rel=1e-14)


def test_veta_singularity(veta):
    x = ComplexPoint.of(0, math.sqrt(1 - 1e-13), 0)
    with pytest.raises(SingularityError):
        kernel_veta(veta, x, x)


def test_exterior_points(veta, dnm):
    with pytest.raises(DomainError):
        kernel_veta(veta, ComplexPoint.origin(3), ComplexPoint.of(0.9, 0.9, 0))
    with pytest.raises(DomainError):
        kernel_dnm(dnm, ComplexPoint.of(0, 1.5), ComplexPoint.origin(2))
    with pytest.raises(ArgumentError):
        kernel_dnm(dnm, ComplexPoint.origin(3), ComplexPoint.origin(3))


def test_dnm_truncation_flag():
    p = DnmParams(n=1, m=1, mu1=1.0, mu2=2.0, eta=0.5)
    x = ComplexPoint.of(0.1, 0.9)
    kv = ClosedKernel(p, max_degree=3).evaluate(x, x)
    assert not kv.converged
    assert kv.degree_used == 3


@pytest.mark.parametrize("params", ALL_FAMILIES, ids=lambda p: p.label())
def test_hermitian_psd(params):
    points = interior_points(params, 6, np.random.default_rng(4))
    gram = gram_matrix(ClosedKernel(params), points)
    np.testing.assert_allclose(gram, gram.conj().T, rtol=1e-11, atol=1e-14)
    assert_psd(gram)


def test_batch_matches_single(dnm):
    points = interior_points(dnm, 5, np.random.default_rng(9))
    kernel = ClosedKernel(dnm)
    x = ComplexPoint(coords=points[0])
    batch = kernel.evaluate_many(x, points)
    assert len(batch) == 5
    for i, y in enumerate(points):
        assert batch.values[i] == pytest.approx(kernel.evaluate(x, ComplexPoint(coords=y)).value, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("mu1", [0.5, 1.0, 2.0])
def test_gaussian_kernel_grid(n, mu1):
    p = CnParams(n=n, mu1=mu1, mu2=2.0)
    rng = np.random.default_rng(10 * n + int(4 * mu1))
    X = interior_points(p, 50, rng)
    Y = interior_points(p, 50, rng)
    kernel = ClosedKernel(p)
    for x, y in zip(X, Y):
        expected = (mu1 / math.pi) ** n * np.exp(mu1 * np.sum(x * y.conj()))
        value = kernel.evaluate(ComplexPoint(coords=x), ComplexPoint(coords=y)).value
        assert value == pytest.approx(expected, rel=1e-12)


def test_veta_far_along_last_axis(veta):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        kv = ClosedKernel(veta).evaluate(ComplexPoint.of(0, 0, 30), ComplexPoint.origin(3))
    assert kv.value == pytest.approx(2 / math.pi ** 3, rel=1e-13)
