from bergkern.exceptions import ArgumentError
from bergkern.models.families import BallParams, CnParams, DnmParams, VEtaParams
from bergkern.models.shadows import CustomShadow, ShadowRegion
from bergkern.models.weights import BallPower, ExpPower, HartogsPower, RadialWeight, VEtaPower
from bergkern.services.moments import log_moments_cn
from scipy.special import gammaln
from typing import Tuple, Union
import math
import numpy as np


def rng_stream(seed: int, index: int = 0) -> np.random.Generator:
    """Private generator for check ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng([int(seed), int(index)])


def log_ball_volume(k: int, radius: float = 1.0) -> float:
    """log volume of the ball of radius R in C^k."""
    return k * math.log(math.pi) + 2 * k * math.log(radius) - float(gammaln(k + 1.0))


def uniform_ball(rng: np.random.Generator, size: int, k: int, radius=1.0) -> np.ndarray:
    """Uniform points in the ball of C^k; ``radius`` may be an array of length size."""
    g = rng.standard_normal((size, 2 * k))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radius = np.broadcast_to(np.asarray(radius, dtype=float), (size,))
    g *= (radius * rng.random(size) ** (1.0 / (2 * k)))[:, None]
    return g[:, :k] + 1j * g[:, k:]


def generalized_gaussian(rng: np.random.Generator, size: int, n: int, c: float, mu2: float) -> np.ndarray:
    """Points of C^n with density proportional to exp(-c ||z||^mu2)."""
    g = rng.standard_normal((size, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radius = (rng.gamma(2.0 * n / mu2, size=size) / c) ** (1.0 / mu2)
    g *= radius[:, None]
    return g[:, :n] + 1j * g[:, n:]


class DomainSampler:
    """Draws points of a Reinhardt domain with known density q.

    Angles are uniform and independent of the moduli for every sampler here.
    """

    def __init__(self, weight: RadialWeight, shadow: ShadowRegion):
        self.weight = weight
        self.shadow = shadow

    def sample(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        """Return points (size, d) and log q at each point."""
        raise NotImplementedError

    def log_ratio(self, points: np.ndarray, log_q: np.ndarray) -> np.ndarray:
        """log(phi / q), -inf outside the shadow."""
        moduli = np.abs(points)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_phi = self.weight.log_evaluate(moduli)
        inside = self.shadow.contains(moduli)
        return np.where(inside, log_phi - log_q, -np.inf)


class ExpPowerSampler(DomainSampler):
    """Samples proportionally to the weight itself, so phi / q is the constant I(0)."""

    def sample(self, rng, size):
        w = self.weight
        points = generalized_gaussian(rng, size, w.n, w.mu1, w.mu2)
        log_norm = float(log_moments_cn(np.zeros((1, w.n)), w.n, w.mu1, w.mu2, w.scale)[0])
        return points, w.log_evaluate(np.abs(points)) - log_norm


class BallSampler(DomainSampler):
    def sample(self, rng, size):
        n, radius = self.shadow.n, self.shadow.radius
        points = uniform_ball(rng, size, n, radius)
        return points, np.full(size, -log_ball_volume(n, radius))


class HartogsSampler(DomainSampler):
    """Uniform on D_{n,m}: z from exp(-mu1 m ||z||^mu2), then w uniform in its fiber ball."""

    def sample(self, rng, size):
        s = self.shadow
        c = s.mu1 * s.m
        z = generalized_gaussian(rng, size, s.n, c, s.mu2)
        fiber = np.exp(-0.5 * s.mu1 * np.linalg.norm(z, axis=1) ** s.mu2)
        w = uniform_ball(rng, size, s.m, fiber)
        log_zc = float(log_moments_cn(np.zeros((1, s.n)), s.n, c, s.mu2)[0])
        log_volume = log_ball_volume(s.m) + log_zc
        return np.hstack([z, w]), np.full(size, -log_volume)


class VEtaSampler(DomainSampler):
    """Uniform on V_eta: w complex Gaussian of rate |eta|, then (z, z') in the fiber ellipsoid."""

    def sample(self, rng, size):
        s = self.shadow
        eta = np.asarray(s.eta)
        total = eta.sum()
        w = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0 * total)
        zz = uniform_ball(rng, size, s.n + s.m)
        zz[:, :s.n] *= np.exp(-0.5 * eta[None, :] * np.abs(w)[:, None] ** 2)
        log_volume = (s.n + s.m + 1) * math.log(math.pi) - float(gammaln(s.n + s.m + 1.0)) - math.log(total)
        return np.hstack([zz, w[:, None]]), np.full(size, -log_volume)


class PolydiscSampler(DomainSampler):
    """Uniform on the bounding polydisc of a custom shadow; membership is applied in log_ratio."""

    def __init__(self, weight, shadow):
        super().__init__(weight, shadow)
        if any(b is None for b in shadow.upper_bounds()):
            raise ArgumentError("Monte-Carlo on a custom shadow needs a finite bound on every axis")
        self.bounds = np.asarray(shadow.upper_bounds(), dtype=float)

    def sample(self, rng, size):
        d = self.bounds.size
        moduli = self.bounds[None, :] * np.sqrt(rng.random((size, d)))
        angles = 2.0 * math.pi * rng.random((size, d))
        log_volume = float(np.sum(np.log(math.pi * self.bounds ** 2)))
        return moduli * np.exp(1j * angles), np.full(size, -log_volume)


def sampler_for(weight: RadialWeight, shadow: ShadowRegion) -> DomainSampler:
    if isinstance(shadow, CustomShadow) or weight.natural_shadow() != shadow:
        return PolydiscSampler(weight, shadow)
    if isinstance(weight, ExpPower):
        return ExpPowerSampler(weight, shadow)
    if isinstance(weight, HartogsPower):
        return HartogsSampler(weight, shadow)
    if isinstance(weight, VEtaPower):
        return VEtaSampler(weight, shadow)
    if isinstance(weight, BallPower):
        return BallSampler(weight, shadow)
    return PolydiscSampler(weight, shadow)


def interior_points(
    params: Union[CnParams, DnmParams, VEtaParams, BallParams],
    count: int,
    rng: np.random.Generator,
    slack: float = 0.3,
) -> np.ndarray:
    """Random points whose defining inequality holds with margin ``slack``.

    C^n points are drawn from the closed unit ball.
    """
    if not 0 <= slack < 1:
        raise ArgumentError(f"slack must lie in [0, 1), got {slack}")
    if isinstance(params, CnParams):
        return uniform_ball(rng, count, params.n)
    if isinstance(params, BallParams):
        return uniform_ball(rng, count, params.n, params.radius * math.sqrt(1.0 - slack))
    if isinstance(params, DnmParams):
        # keep (1 - slack) / 2 of fiber room at the edge of the z-ball
        z_radius = (math.log(1.0 / (slack + 0.5 * (1.0 - slack))) / params.mu1) ** (1.0 / params.mu2)
        z = uniform_ball(rng, count, params.n, z_radius)
        room = np.exp(-params.mu1 * np.linalg.norm(z, axis=1) ** params.mu2) - slack
        w = uniform_ball(rng, count, params.m, np.sqrt(np.maximum(room, 0.0)))
        return np.hstack([z, w])
    eta = np.asarray(params.eta)
    w = uniform_ball(rng, count, 1, 0.5)
    zz = uniform_ball(rng, count, params.n + params.m, math.sqrt(1.0 - slack))
    zz[:, :params.n] *= np.exp(-0.5 * eta[None, :] * np.abs(w) ** 2)
    return np.hstack([zz, w])


def sphere_points(rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    """Uniform points on the unit sphere of R^n."""
    g = rng.standard_normal((size, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
