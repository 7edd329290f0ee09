"""Seeded Gaussian streams and the correlated pairs used by the estimators.

Each :class:`SeededStream` wraps a Philox counter-based generator keyed by
``(seed, stream_id)`` through :class:`numpy.random.SeedSequence`, so shard
``i`` of a Monte Carlo run always draws the same numbers regardless of which
worker executes it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

SHARD_SIZE = 1 << 16


@dataclass(frozen=True)
class CorrelationSpec:
    """Noise rate ``eps`` in (0, 1] with its angle and correlation.

    ``theta = arcsin(sqrt(2 eps - eps^2))`` so that ``cos(theta) = 1 - eps``.
    """

    eps: float

    def __post_init__(self):
        eps = float(self.eps)
        if not (0.0 < eps <= 1.0) or math.isnan(eps):
            raise ValueError(f"noise rate must lie in (0, 1], got {self.eps!r}")
        object.__setattr__(self, "eps", eps)

    @property
    def theta(self) -> float:
        return noise_angle(self.eps)

    @property
    def rho(self) -> float:
        return 1.0 - self.eps

    @property
    def noise_scale(self) -> float:
        """``sqrt(2 eps - eps^2)``, computed without cancellation."""
        return noise_scale(self.eps)


def noise_scale(eps: float) -> float:
    return math.sqrt(2.0 * eps) * math.sqrt(1.0 - eps / 2.0)


def noise_angle(eps: float) -> float:
    return math.asin(min(1.0, noise_scale(eps)))


@dataclass
class SeededStream:
    """Reproducible source of standard normals for one shard."""

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.seed) < 0 or int(self.stream_id) < 0:
            raise ValueError("seed and stream_id must be non-negative")
        self.seed = int(self.seed)
        self.stream_id = int(self.stream_id)

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
            self._gen = np.random.Generator(np.random.Philox(ss))
        return self._gen

    def normal(self, shape) -> np.ndarray:
        return self.generator.standard_normal(shape)


def sample_gaussian(n: int, stream: SeededStream, size: int | None = None) -> np.ndarray:
    """Standard Gaussian vector in R^n, or a ``(size, n)`` batch of them."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return stream.normal(n if size is None else (size, n))


def _same_shape(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise DimensionError(f"shape mismatch: {X.shape} vs {Y.shape}")
    return X, Y


def correlated_pair(X, Y, spec: CorrelationSpec):
    """``(X, (1 - eps) X + sqrt(2 eps - eps^2) Y)``."""
    X, Y = _same_shape(X, Y)
    return X, spec.rho * X + spec.noise_scale * Y


def rotate(X, Y, phi: float):
    """``cos(phi) X + sin(phi) Y``."""
    X, Y = _same_shape(X, Y)
    return math.cos(phi) * X + math.sin(phi) * Y


def rotated_pair(X, Y, phi: float, spec: CorrelationSpec):
    """``(X_phi, X_{phi + theta})`` on the great circle through X and Y."""
    return rotate(X, Y, phi), rotate(X, Y, phi + spec.theta)


def radial_pair(X, eps: float):
    """``(X, (1 + eps) X)``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    X = np.asarray(X, dtype=float)
    return X, (1.0 + eps) * X


def wiggle_pair(X, Y, eps: float):
    """``(X, X + eps Y)``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    X, Y = _same_shape(X, Y)
    return X, X + eps * Y


def shard_plan(samples: int, shard_size: int = SHARD_SIZE) -> list[int]:
    """Sizes of the shards covering ``samples``; shard ``i`` uses stream ``i``."""
    full, rest = divmod(int(samples), shard_size)
    return [shard_size] * full + ([rest] if rest else [])
