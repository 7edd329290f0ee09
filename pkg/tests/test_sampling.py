import math

import numpy as np
import pytest

from ptfsense.errors import DimensionError
from ptfsense.sampling import (
    CorrelationSpec,
    SeededStream,
    correlated_pair,
    radial_pair,
    rotate,
    rotated_pair,
    sample_gaussian,
    shard_plan,
    wiggle_pair,
)

N = 10**6


def test_replay_is_identical():
    a = sample_gaussian(7, SeededStream(42, 3))
    b = sample_gaussian(7, SeededStream(42, 3))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_gaussian(7, SeededStream(42, 4)))


def test_zero_dimension_rejected():
    with pytest.raises(ValueError):
        sample_gaussian(0, SeededStream(1))


def test_one_dimensional_moments():
    x = sample_gaussian(1, SeededStream(9), size=N)[:, 0]
    assert abs(x.mean()) <= 4 / math.sqrt(N)
    assert abs(x.var() - 1) <= 0.01


def test_components_uncorrelated():
    x = sample_gaussian(2, SeededStream(10), size=N)
    assert abs(np.corrcoef(x.T)[0, 1]) <= 4 / math.sqrt(N)


def test_spec_angle_and_validation():
    for eps in (1e-12, 1e-6, 0.01, 0.5, 1.0):
        s = CorrelationSpec(eps)
        assert math.cos(s.theta) == pytest.approx(1 - eps, abs=1e-12)
        assert 0 < s.theta <= math.pi / 2
    for bad in (0.0, -0.1, 1.5, float("nan")):
        with pytest.raises(ValueError):
            CorrelationSpec(bad)


def test_theta_monotone_and_asymptotic():
    eps = np.linspace(1e-6, 1.0, 2000)
    th = [CorrelationSpec(e).theta for e in eps]
    assert all(b > a for a, b in zip(th, th[1:]))
    e = 1e-8
    assert CorrelationSpec(e).theta / math.sqrt(2 * e) == pytest.approx(1.0, rel=1e-3)


def test_correlated_pair_edges():
    X, Y = sample_gaussian(4, SeededStream(1)), sample_gaussian(4, SeededStream(2))
    _, Z = correlated_pair(X, Y, CorrelationSpec(1.0))
    assert np.allclose(Z, Y)
    # eps -> 0 limit: Z -> X
    _, Z = correlated_pair(X, Y, CorrelationSpec(1e-300))
    assert np.allclose(Z, X)
    with pytest.raises(DimensionError):
        correlated_pair(X, Y[:3], CorrelationSpec(0.1))


def test_correlated_pair_moments():
    eps = 0.3
    s = SeededStream(5)
    X, Y = s.normal((N, 2)), s.normal((N, 2))
    _, Z = correlated_pair(X, Y, CorrelationSpec(eps))
    for i in range(2):
        r = np.corrcoef(X[:, i], Z[:, i])[0, 1]
        # standard error of a sample correlation is (1 - rho^2) / sqrt(N)
        assert abs(r - (1 - eps)) <= 4 * (1 - (1 - eps) ** 2) / math.sqrt(N)
        assert abs(Z[:, i].mean()) <= 4 / math.sqrt(N)
        assert abs(Z[:, i].var() - 1) <= 0.01


def test_rotated_pair_identities():
    spec = CorrelationSpec(0.2)
    X, Y = sample_gaussian(5, SeededStream(3)), sample_gaussian(5, SeededStream(4))
    A, B = rotated_pair(X, Y, 0.0, spec)
    assert np.array_equal(A, X)
    assert np.allclose(B, correlated_pair(X, Y, spec)[1], atol=1e-12)
    A, _ = rotated_pair(X, Y, math.pi / 2, spec)
    assert np.allclose(A, Y, atol=1e-15)


def test_rotation_family_consistency():
    spec = CorrelationSpec(0.07)
    X, Y = sample_gaussian(6, SeededStream(3)), sample_gaussian(6, SeededStream(4))
    for phi in (0.0, 0.4, 2.0, 5.5):
        lhs = rotate(X, Y, phi + spec.theta)
        rhs = math.cos(spec.theta) * rotate(X, Y, phi) + math.sin(spec.theta) * rotate(X, Y, phi + math.pi / 2)
        assert np.allclose(lhs, rhs, atol=1e-12, rtol=0)


def test_rotated_moments():
    s = SeededStream(8)
    X, Y = s.normal((N, 2)), s.normal((N, 2))
    A, _ = rotated_pair(X, Y, 1.0, CorrelationSpec(0.1))
    assert np.all(np.abs(A.mean(axis=0)) <= 4 / math.sqrt(N))
    assert np.all(np.abs(A.var(axis=0) - 1) <= 0.01)


def test_radial_pair():
    with pytest.raises(ValueError):
        radial_pair(np.ones(3), 0.0)
    a, b = radial_pair(np.zeros(3), 0.1)
    assert not a.any() and not b.any()
    X = np.array([1.0, -2.0, 3.5])
    _, b = radial_pair(X, 0.25)
    assert np.array_equal(b, 1.25 * X)


def test_wiggle_pair():
    X, Y = sample_gaussian(3, SeededStream(1)), sample_gaussian(3, SeededStream(2))
    eps = 1e-3
    _, W = wiggle_pair(X, Y, eps)
    assert np.linalg.norm(W - X) == pytest.approx(eps * np.linalg.norm(Y), rel=1e-9)
    _, W = wiggle_pair(X, np.zeros(3), eps)
    assert np.array_equal(W, X)
    eps = 0.4
    _, W = wiggle_pair(X, Y, eps)
    t = math.atan(eps)
    assert np.allclose(W, math.sqrt(1 + eps**2) * (math.cos(t) * X + math.sin(t) * Y), atol=1e-12)


def test_shard_plan():
    assert shard_plan(10) == [10]
    assert shard_plan(2**16 * 2 + 5) == [2**16, 2**16, 5]
    assert sum(shard_plan(1_000_001)) == 1_000_001
