"""Closed-form upper bounds for degree-d polynomial threshold functions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from scipy import optimize

from .sampling import noise_angle

if TYPE_CHECKING:
    from .estimators import EstimateResult

_LOG_FLOAT_MAX = math.log(1.7976931348623157e308)


def _check_degree(d):
    if d < 1:
        raise ValueError(f"degree must be at least 1, got {d!r}")


def gns_bound(d: int, eps: float) -> float:
    """``d * arcsin(sqrt(2 eps - eps^2)) / pi``."""
    _check_degree(d)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"noise rate must lie in [0, 1], got {eps!r}")
    if eps == 0.0:
        return 0.0
    return d * noise_angle(eps) / math.pi


def gns_bound_asymptotic(d: int, eps: float) -> float:
    """Leading small-noise behaviour ``d sqrt(2 eps) / pi``."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"noise rate must lie in (0, 1], got {eps!r}")
    return d * math.sqrt(2.0 * eps) / math.pi


def surface_bound(d: int) -> float:
    """Gaussian surface area bound ``d / sqrt(2 pi)``."""
    _check_degree(d)
    return d / math.sqrt(2.0 * math.pi)


def radial_bound(d: int, eps: float, n: int) -> float:
    """Bound on ``Pr(f(X) != f((1 + eps) X))``: ``d eps sqrt(n / (4 pi))``."""
    _check_degree(d)
    if eps < 0 or n < 1:
        raise ValueError("need eps >= 0 and n >= 1")
    return d * eps * math.sqrt(n / (4.0 * math.pi))


def wiggle_bound(d: int, eps: float, n: int) -> float:
    """Bound on ``Pr(f(X) != f(X + eps Y))``: ``d eps / pi + (d eps^2 / 4) sqrt(n / pi)``."""
    _check_degree(d)
    if eps < 0 or n < 1:
        raise ValueError("need eps >= 0 and n >= 1")
    return d * eps / math.pi + d * eps * eps / 4.0 * math.sqrt(n / math.pi)


def chi2_log_log_density(y: float, n: int) -> float:
    """Natural log of :func:`chi2_log_density`; ``-inf`` where the density underflows."""
    if n < 1:
        raise ValueError("degrees of freedom must be at least 1")
    if y > _LOG_FLOAT_MAX:
        return -math.inf
    half = 0.5 * n
    return half * y - 0.5 * math.exp(y) - half * math.log(2.0) - math.lgamma(half)


def chi2_log_density(y: float, n: int) -> float:
    """Density of ``log |X|^2`` for ``X`` standard Gaussian in R^n, at ``y``.

    ``exp(n y / 2 - e^y / 2) / (2^{n/2} Gamma(n/2))``, evaluated in log space.
    """
    if y == -math.inf:
        return 0.0
    return math.exp(chi2_log_log_density(y, n))


def chi2_log_density_max(n: int, tol: float = 1e-12) -> tuple[float, float]:
    """Numerical ``(argmax, max)`` of :func:`chi2_log_density` by golden-section search."""
    centre = math.log(n)
    res = optimize.minimize_scalar(
        lambda y: -chi2_log_log_density(y, n),
        bracket=(centre - 5.0, centre, centre + 5.0),
        method="golden",
        tol=tol,
    )
    return float(res.x), chi2_log_density(float(res.x), n)


BOUND_NAMES = ("gns", "surface", "radial", "wiggle")


@dataclass(frozen=True)
class BoundReport:
    """Comparison of one Monte Carlo estimate against one closed-form bound."""

    bound_name: str
    d: int
    n: int
    eps: float | None
    bound_value: float
    estimate: "EstimateResult"
    satisfied: bool
    slack: float

    @classmethod
    def compare(cls, bound_name, d, n, eps, bound_value, estimate, k: float = 4.0):
        if bound_name not in BOUND_NAMES:
            raise ValueError(f"unknown bound {bound_name!r}")
        satisfied = estimate.estimate <= bound_value + k * estimate.std_error
        return cls(bound_name, d, n, eps, bound_value, estimate, bool(satisfied), bound_value - estimate.estimate)

    def to_dict(self) -> dict:
        return {
            "bound_name": self.bound_name,
            "d": self.d,
            "n": self.n,
            "eps": self.eps,
            "bound_value": self.bound_value,
            "estimate": self.estimate.to_dict(),
            "satisfied": self.satisfied,
            "slack": self.slack,
        }
