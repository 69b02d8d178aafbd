from bergkern.config.config import config
from bergkern.exceptions import ArgumentError, ConvergenceError
from bergkern.models.moment_table import MomentEntry
from bergkern.models.multi_index import MultiIndex, degree_shell_array
from bergkern.models.shadows import CustomShadow
from bergkern.models.weights import BallPower, CustomWeight, unit_weight
from bergkern.services.moments import (
    MomentTable,
    moment_closed_ball,
    moment_closed_cn,
    moment_closed_dnm,
    moment_closed_veta,
    moment_lower_bound,
    moment_quadrature,
    sphere_monomial_integral,
)
from conftest import ALL_FAMILIES
from scipy.integrate import quad
import json
import math
import pytest


@pytest.mark.parametrize("alpha, expected", [((0,), 2.0), ((0, 0), 2.0), ((1, 0), 1.0), ((1, 1, 0), 1.0 / 12.0)])
def test_sphere_monomial_integral(alpha, expected):
    assert sphere_monomial_integral(MultiIndex(entries=alpha)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("k, expected", [(0, math.pi), (1, math.pi), (2, 2 * math.pi), (3, 6 * math.pi)])
def test_gaussian_moments(k, expected):
    assert math.exp(moment_closed_cn(MultiIndex.of(k), 1.0, 2.0)) == pytest.approx(expected, rel=1e-13)


def test_cn_scale_shifts_log():
    alpha = MultiIndex.of(1, 2)
    shift = moment_closed_cn(alpha, 0.5, 3.0, scale=4.0) - moment_closed_cn(alpha, 0.5, 3.0)
    assert shift == pytest.approx(math.log(4.0))


@pytest.mark.parametrize(
    "alpha, beta, expected",
    [((0,), (0,), math.pi ** 2), ((1,), (0,), math.pi ** 2), ((0,), (1,), math.pi ** 2 / 4), ((0,), (2,), math.pi ** 2 / 9)],
)
def test_hartogs_moments(alpha, beta, expected):
    value = moment_closed_dnm(MultiIndex(entries=alpha), MultiIndex(entries=beta), 1.0, 2.0, 0.0)
    assert math.exp(value) == pytest.approx(expected, rel=1e-13)


def test_veta_moments():
    value = moment_closed_veta(MultiIndex.of(0), MultiIndex.of(0), 0, (1.0,), 0.0)
    assert math.exp(value) == pytest.approx(math.pi ** 3 / 2, rel=1e-13)
    value = moment_closed_veta(MultiIndex.of(0), MultiIndex.of(0), 0, (1.0,), 1.0)
    assert math.exp(value) == pytest.approx(math.pi ** 3 / 6, rel=1e-13)
    with pytest.raises(ArgumentError):
        moment_closed_veta(MultiIndex.of(0), MultiIndex.of(0), -1, (1.0,), 0.0)


@pytest.mark.parametrize("k", range(5))
def test_disc_moments(k):
    assert math.exp(moment_closed_ball(MultiIndex.of(k))) == pytest.approx(math.pi / (k + 1), rel=1e-13)


@pytest.mark.parametrize("k", range(5))
def test_disc_quadrature(k):
    weight = BallPower(n=1)
    entry = moment_quadrature(weight.natural_shadow(), weight, MultiIndex.of(k), 1e-10)
    assert entry.method == "quadrature"
    assert entry.converged
    assert math.exp(entry.log_value) == pytest.approx(math.pi / (k + 1), rel=1e-9)


@pytest.mark.parametrize("params", ALL_FAMILIES, ids=lambda p: p.label())
def test_closed_form_matches_quadrature(params):
    weight, shadow = params.weight(), params.shadow()
    table = MomentTable(weight, shadow)
    rel = 1e-6 if params.family == "veta" else 1e-7
    for d in range(3):
        for row in degree_shell_array(params.arity, d):
            alpha = MultiIndex(entries=row)
            quadrature = moment_quadrature(shadow, weight, alpha, 1e-9)
            assert quadrature.log_value == pytest.approx(table.log_moment(alpha), abs=rel)


def test_quadrature_rejects_bad_arguments(disc):
    weight = disc.weight()
    with pytest.raises(ArgumentError):
        moment_quadrature(weight.natural_shadow(), weight, MultiIndex.of(0), 1e-13)
    with pytest.raises(ArgumentError):
        moment_quadrature(weight.natural_shadow(), weight, MultiIndex.of(0, 0), 1e-9)


def test_quadrature_budget_exhausted(monkeypatch):
    monkeypatch.setattr(config, "QUAD_MAX_BOXES", 1)
    weight = CustomWeight(n=2, function=unit_weight)
    shadow = CustomShadow(n=2, bounds=(1.0, 1.0), membership=lambda r: r[..., 0] < r[..., 1])
    with pytest.raises(ConvergenceError) as info:
        moment_quadrature(shadow, weight, MultiIndex.of(0, 0), 1e-10)
    assert isinstance(info.value.estimate, MomentEntry)
    assert not info.value.estimate.converged


def test_lower_bound_below_closed_form():
    alpha = MultiIndex.of(2)
    # the disc contains [0.3, 0.6] and phi = 1 there
    assert moment_lower_bound(alpha, 1.0, 0.3) <= moment_closed_ball(alpha)
    with pytest.raises(ArgumentError):
        moment_lower_bound(alpha, 0.0, 0.3)


class TestMomentTable:
    def test_closed_form_preferred(self, fock):
        table = MomentTable(fock.weight())
        assert table.method == "closed_form"
        assert table.collapsible
        assert math.exp(table.log_moment(MultiIndex.of(2))) == pytest.approx(2 * math.pi)

    def test_quadrature_preferred(self, disc):
        table = MomentTable(disc.weight(), prefer="quadrature")
        assert table.method == "quadrature"
        assert not table.collapsible
        entry = table.entry(MultiIndex.of(1))
        assert entry.method == "quadrature"
        assert table.entry(MultiIndex.of(1)) is entry

    def test_custom_weight_needs_shadow(self):
        with pytest.raises(ArgumentError):
            MomentTable(CustomWeight(n=1, function=unit_weight))

    def test_custom_weight_uses_quadrature(self):
        table = MomentTable(CustomWeight(n=1, function=unit_weight), CustomShadow(n=1, bounds=(1.0,)))
        assert table.method == "quadrature"
        assert table.rel_tol == config.CUSTOM_TOL
        assert math.exp(table.log_moment(MultiIndex.of(0))) == pytest.approx(math.pi, rel=1e-6)

    def test_arity_mismatch(self, disc):
        with pytest.raises(ArgumentError):
            MomentTable(disc.weight()).entry(MultiIndex.of(0, 0))

    def test_populate_and_json(self, dnm):
        table = MomentTable(dnm.weight())
        entries = table.populate(2)
        assert len(entries) == 6
        record = json.loads(table.to_json())
        assert record["weight"]["kind"] == "hartogs_power"
        assert [e["alpha"] for e in record["entries"]][:3] == [[0, 0], [0, 1], [1, 0]]

    def test_scaled(self, fock):
        table = MomentTable(fock.weight())
        table.populate(1)
        scaled = table.scaled(3.0)
        alpha = MultiIndex.of(1)
        assert scaled.log_moment(alpha) == pytest.approx(table.log_moment(alpha) + math.log(3.0))
        assert scaled.entries[(1,)].log_value == pytest.approx(table.entries[(1,)].log_value + math.log(3.0))
        with pytest.raises(ArgumentError):
            table.scaled(0.0)

    def test_vectorized_log_moments(self, fock):
        table = MomentTable(fock.weight())
        logs = table.log_moments(degree_shell_array(1, 3))
        assert math.exp(logs[0]) == pytest.approx(6 * math.pi)

    def test_quadrature_kept_apart_from_closed_form(self, fock):
        table = MomentTable(fock.weight())
        alpha = MultiIndex.of(2)
        quadrature = table.quadrature_entry(alpha, 1e-10)
        assert quadrature.method == "quadrature"
        assert table.method == "closed_form"
        assert table.entry(alpha).method == "closed_form"
        assert table.quadrature_entries[(2,)] is quadrature
        assert table.log_moment(alpha) == pytest.approx(table.log_moments([[2]])[0], rel=1e-15)
        record = table.to_record()
        assert [(e.alpha, e.method) for e in record.entries] == [((2,), "closed_form"), ((2,), "quadrature")]
        (agreement,) = record.agreement
        assert agreement.agrees
        assert agreement.rel_discrepancy < 1e-8

    def test_tighter_tolerance_replaces_quadrature(self, disc):
        table = MomentTable(disc.weight(), prefer="quadrature")
        alpha = MultiIndex.of(1)
        loose = table.quadrature_entry(alpha, 1e-6)
        assert table.quadrature_entry(alpha, 1e-5) is loose
        tight = table.quadrature_entry(alpha, 1e-10)
        assert tight is not loose
        assert table.entries[(1,)] is tight

    def test_unconverged_entry_kept_when_not_strict(self, monkeypatch):
        monkeypatch.setattr(config, "QUAD_MAX_BOXES", 1)
        shadow = CustomShadow(n=2, bounds=(1.0, 1.0), membership=lambda r: r[..., 0] < r[..., 1])
        table = MomentTable(CustomWeight(n=2, function=unit_weight), shadow)
        alpha = MultiIndex.of(0, 0)
        with pytest.raises(ConvergenceError):
            table.quadrature_entry(alpha, 1e-10)
        entry = table.quadrature_entry(alpha, 1e-10, strict=False)
        assert not entry.converged
        assert table.entries[(0, 0)] is entry
        assert table.to_record().agreement == []

    def test_scaled_shifts_quadrature_entries(self, disc):
        table = MomentTable(disc.weight())
        alpha = MultiIndex.of(1)
        table.quadrature_entry(alpha, 1e-9)
        scaled = table.scaled(2.0)
        assert scaled.quadrature_entries[(1,)].log_value == pytest.approx(
            table.quadrature_entries[(1,)].log_value + math.log(2.0)
        )
        assert scaled.agreement((1,)).agrees


@pytest.mark.parametrize("mu1", [0.5, 1.0, 2.0])
def test_gaussian_ratio_law(mu1):
    for d in range(5):
        for row in degree_shell_array(2, d):
            alpha = MultiIndex(entries=row)
            for j in range(2):
                step = moment_closed_cn(alpha + MultiIndex.unit(2, j), mu1, 2.0) - moment_closed_cn(alpha, mu1, 2.0)
                assert math.exp(step) == pytest.approx((row[j] + 1) / mu1, rel=1e-12)


@pytest.mark.parametrize("a, radius", [(0.0, 1.0), (1.0, 2.0), (0.5, 0.7)])
def test_ball_moments_factorize(a, radius):
    # polar coordinates: sphere part times a one-dimensional radial integral
    for d in range(5):
        radial, _ = quad(lambda r: r ** (2 * d + 3) * (radius ** 2 - r ** 2) ** a, 0.0, radius, epsabs=0.0, epsrel=1e-13)
        for row in degree_shell_array(2, d):
            alpha = MultiIndex(entries=row)
            expected = math.pi ** 2 * sphere_monomial_integral(alpha) * radial
            product = (
                2 * math.log(math.pi) + sum(math.lgamma(k + 1) for k in row) + math.lgamma(a + 1)
                + 2 * (d + 2 + a) * math.log(radius) - math.lgamma(d + 3 + a)
            )
            log_value = moment_closed_ball(alpha, a, radius)
            assert log_value == pytest.approx(product, abs=1e-12)
            assert math.exp(log_value) == pytest.approx(expected, rel=1e-10)
