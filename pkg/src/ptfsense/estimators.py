"""Monte Carlo estimators for noise sensitivity, sign changes and surface area.

Every estimator splits its sample budget into fixed-size shards (see
:func:`ptfsense.sampling.shard_plan`); shard ``i`` draws from stream
``(seed, i)``.  Shards return raw counts which are summed in shard order, so a
result depends only on ``(samples, seed)`` and never on ``workers``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .bounds import BoundReport, gns_bound, radial_bound, surface_bound, wiggle_bound
from .circle import sign_changes_batch
from .errors import BudgetError, DegenerateSampleError, InsufficientResolutionError
from .poly import PTF, evaluate, gradient
from .sampling import CorrelationSpec, SeededStream, correlated_pair, rotated_pair, shard_plan

CONFIDENCE = 0.99
WILSON_BELOW = 50
MIN_CROSSINGS = 10
MAX_DEGENERATE_FRACTION = 1e-3
DEFAULT_EPS_GRID = (0.02, 0.01, 0.005, 0.0025)
MAX_SAMPLES = 10**10

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    samples: int
    seed: int
    successes: int | None = None
    skipped: int = 0

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "std_error": self.std_error,
            "ci": [self.ci_low, self.ci_high],
            "samples": self.samples,
            "seed": self.seed,
        }


def _z(confidence: float) -> float:
    return float(stats.norm.ppf(0.5 + confidence / 2.0))


def proportion_result(successes: int, total: int, seed: int, confidence: float = CONFIDENCE, scale: float = 1.0):
    """Binomial proportion with a normal interval, or Wilson's near the edges.

    ``scale`` multiplies the estimate, standard error and interval.
    """
    successes, total = int(successes), int(total)
    p = successes / total
    se = math.sqrt(p * (1.0 - p) / total)
    z = _z(confidence)
    if min(successes, total - successes) < WILSON_BELOW:
        z2n = z * z / total
        centre = (p + z2n / 2.0) / (1.0 + z2n)
        half = z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / total + z2n / (4.0 * total))
        lo, hi = centre - half, centre + half
    else:
        lo, hi = p - z * se, p + z * se
    lo, hi = max(0.0, min(lo, p)), min(1.0, max(hi, p))
    return EstimateResult(p * scale, se * scale, lo * scale, hi * scale, total, seed, successes)


def mean_result(total: float, total_sq: float, count: int, seed: int, confidence: float = CONFIDENCE, skipped: int = 0):
    """Sample mean with a normal interval from running sums."""
    mean = total / count
    var = max(0.0, (total_sq - count * mean * mean) / (count - 1)) if count > 1 else 0.0
    se = math.sqrt(var / count)
    z = _z(confidence)
    return EstimateResult(mean, se, mean - z * se, mean + z * se, count, seed, None, skipped)


# -- shard kernels ---------------------------------------------------------


def _k_gns(f, X, Y, eps):
    _, Z = correlated_pair(X, Y, CorrelationSpec(eps))
    return np.array([np.count_nonzero(f(X) != f(Z))])


def _k_rotation(f, X, Y, eps, phi):
    A, B = rotated_pair(X, Y, phi, CorrelationSpec(eps))
    return np.array([np.count_nonzero(f(A) != f(B))])


def _k_radial(f, X, Y, eps):
    return np.array([np.count_nonzero(f(X) != f((1.0 + eps) * X))])


def _k_wiggle(f, X, Y, eps):
    return np.array([np.count_nonzero(f(X) != f(X + eps * Y))])


def _k_crossing(f, X, Y, grid, weights):
    fx = f(X)
    below = fx < 0
    one, two = [], []
    v = np.zeros(X.shape[0])
    for eps, w in zip(grid, weights):
        fw = f(X + eps * Y)
        cross = below & (fw > 0)
        one.append(np.count_nonzero(cross))
        two.append(np.count_nonzero(fx != fw))
        v += (w * SQRT_2PI / eps) * cross
    return np.array(one + two + [v.sum(), (v * v).sum()], dtype=float)


def _k_collar(f, X, Y, delta):
    vals = evaluate(f.poly, X)
    gnorm = np.linalg.norm(gradient(f.poly, X), axis=1)
    flat = gnorm == 0
    skipped = np.count_nonzero(flat & (vals == 0))
    hits = np.count_nonzero(~flat & (np.abs(vals) <= delta * gnorm))
    return np.array([hits, skipped])


def _k_sign_changes(f, X, Y):
    counts, degenerate = sign_changes_batch(f.poly, X, Y)
    c = counts[~degenerate]
    return np.array([c.sum(), (c * c).sum(), np.count_nonzero(degenerate), c.max(initial=0)], dtype=np.int64)


_KERNELS = {
    "gns": (_k_gns, True),
    "rotation": (_k_rotation, True),
    "radial": (_k_radial, False),
    "wiggle": (_k_wiggle, True),
    "crossing": (_k_crossing, True),
    "collar": (_k_collar, False),
    "sign_changes": (_k_sign_changes, True),
}


def _shard(task):
    name, f, size, seed, stream_id, kw = task
    kernel, needs_y = _KERNELS[name]
    stream = SeededStream(seed, stream_id)
    X = stream.normal((size, f.n))
    Y = stream.normal((size, f.n)) if needs_y else None
    return kernel(f, X, Y, **kw)


def run_shards(name: str, f: PTF, samples: int, seed: int, workers: int = 1, **kw) -> np.ndarray:
    """Sum of kernel statistics over the shard plan for ``samples``."""
    tasks = [(name, f, size, int(seed), i, kw) for i, size in enumerate(shard_plan(samples))]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_shard, tasks))
    else:
        parts = [_shard(t) for t in tasks]
    total = parts[0].copy()
    for part in parts[1:]:
        total += part
    return total


def _need(samples: int, minimum: int):
    if samples < minimum:
        raise BudgetError(f"need at least {minimum} samples, got {samples}")
    if samples > MAX_SAMPLES:
        raise BudgetError(f"sample budget {samples} exceeds the cap {MAX_SAMPLES}")


# -- estimators ------------------------------------------------------------


def estimate_gns(f: PTF, spec: CorrelationSpec, samples: int, seed: int, workers: int = 1) -> EstimateResult:
    """``Pr(f(X) != f(Z))`` with ``Z = (1 - eps) X + sqrt(2 eps - eps^2) Y``."""
    _need(samples, 1000)
    (k,) = run_shards("gns", f, samples, seed, workers, eps=spec.eps)
    return proportion_result(k, samples, seed)


def estimate_rotation_disagreement(
    f: PTF, spec: CorrelationSpec, phi: float, samples: int, seed: int, workers: int = 1
) -> EstimateResult:
    """``Pr(f(X_phi) != f(X_{phi + theta}))``; equal in law to the noise sensitivity."""
    _need(samples, 1000)
    (k,) = run_shards("rotation", f, samples, seed, workers, eps=spec.eps, phi=float(phi))
    return proportion_result(k, samples, seed)


def estimate_radial(f: PTF, eps: float, samples: int, seed: int, workers: int = 1) -> EstimateResult:
    """``Pr(f(X) != f((1 + eps) X))``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    _need(samples, 1000)
    (k,) = run_shards("radial", f, samples, seed, workers, eps=float(eps))
    return proportion_result(k, samples, seed)


def estimate_wiggle(f: PTF, eps: float, samples: int, seed: int, workers: int = 1) -> EstimateResult:
    """``Pr(f(X) != f(X + eps Y))``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    _need(samples, 1000)
    (k,) = run_shards("wiggle", f, samples, seed, workers, eps=float(eps))
    return proportion_result(k, samples, seed)


def estimate_expected_sign_changes(f: PTF, samples: int, seed: int, workers: int = 1) -> EstimateResult:
    """Mean number of sign changes of ``f`` along random great circles.

    Degenerate circles are excluded from the mean and reported in ``skipped``.
    """
    _need(samples, 100)
    total, total_sq, degenerate, _ = run_shards("sign_changes", f, samples, seed, workers)
    if degenerate > MAX_DEGENERATE_FRACTION * samples:
        raise DegenerateSampleError(f"{degenerate} of {samples} circles are degenerate")
    good = samples - int(degenerate)
    return mean_result(float(total), float(total_sq), good, seed, skipped=int(degenerate))


def estimate_surface_collar(f: PTF, delta: float, samples: int, seed: int, workers: int = 1) -> EstimateResult:
    """Approximate Gaussian surface area from the first-order collar ``|p| / |grad p| <= delta``.

    This is a biased proxy: ``|p| / |grad p|`` only approximates the distance
    to the zero set to first order.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    _need(samples, 10_000)
    hits, skipped = run_shards("collar", f, samples, seed, workers, delta=float(delta))
    if skipped > MAX_DEGENERATE_FRACTION * samples:
        raise DegenerateSampleError(f"{skipped} of {samples} points have vanishing gradient on the boundary")
    res = proportion_result(hits, samples - int(skipped), seed, scale=1.0 / (2.0 * delta))
    return EstimateResult(res.estimate, res.std_error, res.ci_low, res.ci_high, samples, seed, res.successes, int(skipped))


@dataclass(frozen=True)
class SurfaceEstimate:
    """Crossing ratios on an ``eps`` grid and their linear extrapolation to ``eps = 0``."""

    eps_grid: tuple[float, ...]
    ratios: tuple[float, ...]
    extrapolated: float
    fit_slope: float
    std_error: float
    samples: int
    seed: int
    crossings: tuple[int, ...]
    flips: tuple[int, ...]

    @property
    def two_sided_ratios(self) -> tuple[float, ...]:
        """``sqrt(2 pi) Pr(f(X) != f(X + eps Y)) / (2 eps)`` per grid point."""
        return tuple(SQRT_2PI * k / (2.0 * self.samples * e) for k, e in zip(self.flips, self.eps_grid))

    def as_estimate(self, confidence: float = CONFIDENCE) -> EstimateResult:
        z = _z(confidence)
        return EstimateResult(
            self.extrapolated,
            self.std_error,
            self.extrapolated - z * self.std_error,
            self.extrapolated + z * self.std_error,
            self.samples,
            self.seed,
        )

    def to_dict(self) -> dict:
        return {
            "eps": list(self.eps_grid),
            "ratios": list(self.ratios),
            "extrapolated": self.extrapolated,
            "slope": self.fit_slope,
        }


def _fit_weights(grid: np.ndarray):
    """Linear maps from ratios to the least-squares intercept and slope."""
    k = grid.size
    if k == 1:
        return np.ones(1), np.zeros(1)
    centred = grid - grid.mean()
    sxx = float(centred @ centred)
    slope_w = centred / sxx
    return np.full(k, 1.0 / k) - grid.mean() * slope_w, slope_w


def estimate_surface_crossing(f: PTF, eps_grid=DEFAULT_EPS_GRID, samples: int = 10**6, seed: int = 0, workers: int = 1):
    """Surface area from one-sided crossings ``Pr(f(X) = -1, f(X + eps Y) = +1)``.

    For each ``eps`` the ratio ``sqrt(2 pi) p_eps / eps`` tends to the Gaussian
    surface area; the returned value is the intercept of a least-squares line
    through the ratios.  The same ``(X, Y)`` draws serve every grid point, so
    the intercept is a plain sample mean and its standard error is exact.
    """
    grid = np.asarray(eps_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("eps grid must be a non-empty list")
    if np.any(np.diff(grid) >= 0):
        raise ValueError("eps grid must be strictly decreasing")
    if grid[-1] < 1e-4:
        raise ValueError("smallest eps must be at least 1e-4")
    _need(samples, 1000)
    inter_w, slope_w = _fit_weights(grid)
    k = grid.size
    out = run_shards("crossing", f, samples, seed, workers, grid=tuple(grid.tolist()), weights=tuple(inter_w.tolist()))
    crossings = out[:k].astype(np.int64)
    flips = out[k : 2 * k].astype(np.int64)
    if crossings.sum() == 0:
        zeros = (0.0,) * k
        return SurfaceEstimate(tuple(grid.tolist()), zeros, 0.0, 0.0, 0.0, samples, seed, tuple(crossings.tolist()), tuple(flips.tolist()))
    if crossings.min() < MIN_CROSSINGS:
        raise InsufficientResolutionError(
            f"insufficient resolution: only {int(crossings.min())} crossings at some grid point; increase samples"
        )
    ratios = SQRT_2PI * crossings / (samples * grid)
    intercept = float(inter_w @ ratios)
    slope = float(slope_w @ ratios)
    sum_v, sum_v2 = out[2 * k], out[2 * k + 1]
    mean_v = sum_v / samples
    var_v = max(0.0, (sum_v2 - samples * mean_v * mean_v) / (samples - 1))
    return SurfaceEstimate(
        tuple(grid.tolist()),
        tuple(ratios.tolist()),
        intercept,
        slope,
        math.sqrt(var_v / samples),
        samples,
        seed,
        tuple(crossings.tolist()),
        tuple(flips.tolist()),
    )


# -- budgets and bound checks ----------------------------------------------


def plan_samples(p: float, rel_error: float) -> int:
    """``N ~ (4 / r)^2 (1 - p) / p`` for relative error ``r`` on a probability ``p``."""
    if not 0.0 < p < 1.0:
        raise BudgetError(f"cannot size a budget from pilot probability {p}")
    if not rel_error > 0:
        raise ValueError("relative error must be positive")
    n = math.ceil((4.0 / rel_error) ** 2 * (1.0 - p) / p)
    if n > MAX_SAMPLES:
        raise BudgetError(f"required budget {n} exceeds the cap {MAX_SAMPLES}")
    return max(n, 1000)


def auto_samples(estimator, f: PTF, rel_error: float, seed: int, pilot: int = 10_000, **kw) -> int:
    """Sample size for ``estimator`` from a pilot run of ``pilot`` samples."""
    res = estimator(f, samples=pilot, seed=seed, **kw)
    return plan_samples(res.estimate, rel_error)


def verify_bounds(
    f: PTF, eps: float, samples: int, seed: int, workers: int = 1, eps_grid=DEFAULT_EPS_GRID, surface: bool = True
) -> list[BoundReport]:
    """Estimate every bounded quantity for ``f`` and compare with its bound."""
    d, n = max(f.degree, 1), f.n
    reports = [
        BoundReport.compare("gns", d, n, eps, gns_bound(d, eps), estimate_gns(f, CorrelationSpec(eps), samples, seed, workers)),
        BoundReport.compare("radial", d, n, eps, radial_bound(d, eps, n), estimate_radial(f, eps, samples, seed + 1, workers)),
        BoundReport.compare("wiggle", d, n, eps, wiggle_bound(d, eps, n), estimate_wiggle(f, eps, samples, seed + 2, workers)),
    ]
    if surface:
        est = estimate_surface_crossing(f, eps_grid, samples, seed + 3, workers)
        reports.append(BoundReport.compare("surface", d, n, None, surface_bound(d), est.as_estimate()))
    return reports


def sign_change_bound(eps: float, expected_changes: float) -> float:
    """``theta * E[changes] / (2 pi)``, the noise-sensitivity bound from circle sign changes."""
    return CorrelationSpec(eps).theta * expected_changes / (2.0 * math.pi)

