from bergkern.exceptions import ArgumentError
from bergkern.models.families import CnParams, DnmParams, VEtaParams
from bergkern.models.shadows import CustomShadow
from bergkern.models.weights import CustomWeight, unit_weight
from bergkern.services.sampling import (
    BallSampler,
    ExpPowerSampler,
    HartogsSampler,
    PolydiscSampler,
    VEtaSampler,
    interior_points,
    rng_stream,
    sampler_for,
    sphere_points,
    uniform_ball,
)
from conftest import ALL_FAMILIES
import math
import numpy as np
import pytest


def test_streams_are_reproducible():
    a = rng_stream(7, 3).random(5)
    np.testing.assert_array_equal(a, rng_stream(7, 3).random(5))
    assert not np.array_equal(a, rng_stream(7, 4).random(5))
    assert not np.array_equal(a, rng_stream(8, 3).random(5))


@pytest.mark.parametrize("params", ALL_FAMILIES, ids=lambda p: p.label())
def test_interior_points_inside(params):
    points = interior_points(params, 200, rng_stream(1))
    assert points.shape == (200, params.arity)
    assert params.shadow().contains(np.abs(points)).all()


def test_interior_points_bad_slack(fock):
    with pytest.raises(ArgumentError):
        interior_points(fock, 3, rng_stream(1), slack=1.0)


def test_uniform_ball_radius():
    points = uniform_ball(rng_stream(2), 1000, 3, radius=0.5)
    assert np.all(np.linalg.norm(points, axis=1) < 0.5)


def test_sphere_points_have_unit_norm():
    np.testing.assert_allclose(np.linalg.norm(sphere_points(rng_stream(5), 100, 4), axis=1), 1.0, rtol=1e-14)


@pytest.mark.parametrize(
    "params, sampler_type, expected",
    [
        (CnParams(n=1, mu1=1.0, mu2=2.0), ExpPowerSampler, math.pi),
        (DnmParams(n=1, m=1, mu1=1.0, mu2=2.0, eta=0.0), HartogsSampler, math.pi ** 2),
        (VEtaParams(n=1, m=1, eta=(1.0,), a=0.0), VEtaSampler, math.pi ** 3 / 2),
    ],
    ids=["exp_power", "hartogs", "veta"],
)
def test_constant_weight_ratio(params, sampler_type, expected):
    sampler = sampler_for(params.weight(), params.shadow())
    assert isinstance(sampler, sampler_type)
    points, log_q = sampler.sample(rng_stream(3), 500)
    ratio = np.exp(sampler.log_ratio(points, log_q))
    np.testing.assert_allclose(ratio, expected, rtol=1e-12)


def test_ball_sampler(disc):
    sampler = sampler_for(disc.weight(), disc.shadow())
    assert isinstance(sampler, BallSampler)
    points, log_q = sampler.sample(rng_stream(4), 100)
    np.testing.assert_allclose(np.exp(-log_q), math.pi)


def test_hartogs_sampler_mean_modulus():
    # |z|^2 is exponential with rate m * mu1 under the uniform law on D_{1,1}
    params = DnmParams(n=1, m=1, mu1=1.0, mu2=2.0)
    points, _ = sampler_for(params.weight(), params.shadow()).sample(rng_stream(6), 100_000)
    assert np.mean(np.abs(points[:, 0]) ** 2) == pytest.approx(1.0, abs=0.02)


def test_polydisc_sampler():
    weight = CustomWeight(n=2, function=unit_weight)
    shadow = CustomShadow(n=2, bounds=(1.0, 2.0), membership=lambda r: r[..., 0] < 0.5)
    sampler = sampler_for(weight, shadow)
    assert isinstance(sampler, PolydiscSampler)
    points, log_q = sampler.sample(rng_stream(0), 1000)
    np.testing.assert_allclose(np.exp(-log_q), 4 * math.pi ** 2)
    ratio = sampler.log_ratio(points, log_q)
    inside = np.abs(points[:, 0]) < 0.5
    assert np.all(np.isneginf(ratio[~inside]))
    assert np.all(np.isfinite(ratio[inside]))


def test_polydisc_needs_bounds():
    weight = CustomWeight(n=1, function=unit_weight)
    with pytest.raises(ArgumentError):
        PolydiscSampler(weight, CustomShadow(n=1, bounds=(None,)))
