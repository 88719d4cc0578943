"""Samplers for the two ensembles of random linear maps and for uniform
points on spheres and caps.

The Gaussian ensemble has i.i.d. standard normal entries.  The finite-N
ensemble is sqrt(N) times the upper-left block of a Haar rotation, realized
by orthonormalizing a Gaussian matrix with the positive-diagonal
normalization (Cholesky of the Gram matrix), which gives the uniform
distribution on orthonormal frames; only the first d rows are kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaincinv, gammainc, ndtr

from .rng import RngStream


@dataclass(frozen=True, eq=False)
class LinearMapSample:
    """A d x (n+1) linear map drawn from one of the two ensembles; origin_n
    is None for the Gaussian ensemble and the block dimension otherwise."""

    entries: np.ndarray
    origin_n: int | None = None


def pi_infinity_batch(n: int, d: int, size: int, gen: np.random.Generator) -> np.ndarray:
    return gen.standard_normal((size, d, n + 1))


def sample_pi_infinity(n: int, d: int, rng: RngStream) -> LinearMapSample:
    if n < 1 or d < 1:
        raise ValueError("dimensions must be positive")
    return LinearMapSample(pi_infinity_batch(n, d, 1, rng.generator())[0])


def pi_n_batch(
    n: int, d: int, N: int, size: int, gen: np.random.Generator
) -> np.ndarray:
    """sqrt(N) times the top d rows of uniform orthonormal (n+1)-frames in
    (N+1)-space."""
    if N < max(n, d):
        raise ValueError("block does not fit in the rotation group")
    g = gen.standard_normal((size, N + 1, n + 1))
    gram = np.einsum("bij,bik->bjk", g, g)
    chol = np.linalg.cholesky(gram)  # lower, positive diagonal
    inv = np.linalg.inv(chol)
    # frame = g @ inv(L)^T; keep only the first d rows
    top = g[:, :d, :]
    return math.sqrt(N) * np.einsum("bij,bkj->bik", top, inv)


def sample_pi_n(n: int, d: int, N: int, rng: RngStream) -> LinearMapSample:
    if n < 1 or d < 1:
        raise ValueError("dimensions must be positive")
    return LinearMapSample(pi_n_batch(n, d, N, 1, rng.generator())[0], origin_n=N)


# -- uniform points -----------------------------------------------------------


def uniform_sphere_batch(n: int, size: int, gen: np.random.Generator) -> np.ndarray:
    x = gen.standard_normal((size, n + 1))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def uniform_cap_batch(
    n: int, theta: float, size: int, gen: np.random.Generator
) -> np.ndarray:
    """Uniform points on the cap of angular radius theta about the first
    coordinate axis, via the exact colatitude law (truncated beta in
    sin^2 of the colatitude) and a uniform direction."""
    s_max = math.sin(theta) ** 2
    total = betainc(n / 2.0, 0.5, s_max)
    u = gen.random(size)
    s = betaincinv(n / 2.0, 0.5, u * total)
    phi = np.arcsin(np.sqrt(s))
    direction = uniform_sphere_batch(n - 1, size, gen)
    out = np.empty((size, n + 1))
    out[:, 0] = np.cos(phi)
    out[:, 1:] = np.sin(phi)[:, None] * direction
    return out


# -- the projection limit ------------------------------------------------------


def projected_coordinate_cdf(x: float, N: int) -> float:
    """Exact CDF of one coordinate of a uniform point on the sphere of
    radius sqrt(N): the squared normalized coordinate is Beta(1/2, N/2)."""
    t2 = min(x * x / N, 1.0)
    tail = 0.5 * betainc(0.5, N / 2.0, t2)
    return 0.5 + math.copysign(tail, x)


def _ks_statistic(samples: np.ndarray, cdf) -> float:
    """Two-sided KS distance between the empirical law and a vectorized CDF."""
    xs = np.sort(samples)
    n = len(xs)
    F = np.asarray(cdf(xs), dtype=float)
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - F), np.max(F - (grid - 1 / n))))


@dataclass(frozen=True)
class PoincareReport:
    N: int
    d: int
    n_samples: int
    ks_statistic: float
    second_moment: float
    seed: int
    stream_id: int


def poincare_test(N: int, d: int, n_samples: int, rng: RngStream) -> PoincareReport:
    """Project uniform points on the radius-sqrt(N) sphere to the first d
    coordinates and compare against the standard Gaussian: the marginal CDF
    for d = 1, the radial chi CDF for d > 1.

    The projected block is sampled exactly through the split g / |g| with
    the tail norm drawn as a chi-square, which is the same law without
    materializing N+1 coordinates.
    """
    if N <= d:
        raise ValueError("projection requires N > d")
    gen = rng.generator()
    g = gen.standard_normal((n_samples, d))
    tail = gen.chisquare(N + 1 - d, n_samples)
    norms_sq = np.einsum("ij,ij->i", g, g) + tail
    x = math.sqrt(N) * g / np.sqrt(norms_sq)[:, None]
    if d == 1:
        samples = x[:, 0]
        ks = _ks_statistic(samples, ndtr)
        second_moment = float(np.mean(samples**2))
    else:
        samples = np.linalg.norm(x, axis=1)
        ks = _ks_statistic(samples, lambda t: gammainc(d / 2.0, t * t / 2.0))
        second_moment = float(np.mean(samples**2)) / d
    return PoincareReport(
        N=N,
        d=d,
        n_samples=n_samples,
        ks_statistic=ks,
        second_moment=second_moment,
        seed=rng.seed,
        stream_id=rng.stream_id,
    )
