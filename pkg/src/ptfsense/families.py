"""Witness families of threshold functions and their closed-form oracles."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import NotDistinctError
from .poly import PTF, Polynomial, product_expand

DISTINCT_TOL = 1e-9


def make_halfspace(a) -> PTF:
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0 or not np.any(a):
        raise ValueError("halfspace direction must be a nonzero vector")
    return PTF(Polynomial.linear(a))


def make_product_linear_forms(dirs) -> PTF:
    """Threshold of ``prod_k <a_k, x>`` for pairwise independent directions."""
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    if dirs.shape[0] < 1 or dirs.shape[1] < 1:
        raise ValueError("need at least one direction")
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(norms == 0):
        raise ValueError("directions must be nonzero")
    unit = dirs / norms[:, None]
    for i, j in itertools.combinations(range(len(unit)), 2):
        if abs(float(unit[i] @ unit[j])) >= 1.0 - DISTINCT_TOL:
            raise NotDistinctError(f"directions {i} and {j} are linearly dependent (not distinct)")
    return PTF(product_expand([Polynomial.linear(a) for a in dirs]))


def _squared_norm(n: int) -> Polynomial:
    return Polynomial(n, [(1.0, [2 if k == j else 0 for k in range(n)]) for j in range(n)])


def make_ball(r: float, n: int) -> PTF:
    """``r^2 - |x|^2``: +1 inside the ball of radius ``r``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    return PTF(r * r - _squared_norm(n))


def make_radial_product(radii, n: int) -> PTF:
    """``prod_k (|x|^2 - radii[k])``; the entries are thresholds on ``|x|^2``."""
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    sq = _squared_norm(n)
    return PTF(product_expand([sq - r for r in radii]))


def monomial_exponents(n: int, d: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree ``<= d`` in graded-lex order."""
    out = []
    for deg in range(d + 1):
        for combo in itertools.combinations_with_replacement(range(n), deg):
            e = [0] * n
            for j in combo:
                e[j] += 1
            out.append(tuple(e))
    return out


def make_random_ptf(n: int, d: int, seed: int) -> PTF:
    """Independent standard normal coefficient on every monomial of degree ``<= d``."""
    if n < 1 or not 1 <= d <= 20:
        raise ValueError("need n >= 1 and 1 <= d <= 20")
    exps = monomial_exponents(n, d)
    coeffs = np.random.default_rng(seed).standard_normal(len(exps))
    return PTF(Polynomial(n, zip(coeffs.tolist(), exps)))


# -- closed-form oracles ---------------------------------------------------


def ball_surface_closed_form(r: float, n: int) -> float:
    """Gaussian surface area of the radius-``r`` sphere in R^n."""
    if not r > 0 or n < 1:
        raise ValueError("need r > 0 and n >= 1")
    log_val = (1.0 - n / 2.0) * math.log(2.0) + (n - 1) * math.log(r) - r * r / 2.0 - math.lgamma(n / 2.0)
    return math.exp(log_val)


def sheppard_disagreement(eps: float) -> float:
    """``Pr(sgn <a,X> != sgn <a,Z>)`` for correlation ``1 - eps``: ``arccos(1 - eps) / pi``."""
    return math.acos(1.0 - eps) / math.pi


def halfspace_wiggle_disagreement(eps: float) -> float:
    """``Pr(sgn <a,X> != sgn <a,X + eps Y>) = arctan(eps) / pi``."""
    return math.atan(eps) / math.pi


def radial_flip_probability(level: float, n: int, eps: float) -> float:
    """``Pr(|X|^2 < level <= (1+eps)^2 |X|^2)`` from the chi-squared CDF."""
    return float(stats.chi2.cdf(level, n) - stats.chi2.cdf(level / (1.0 + eps) ** 2, n))


def radial_product_flip_probability(radii, n: int, eps: float) -> float:
    """Radial flip probability of :func:`make_radial_product` when the bands are disjoint."""
    return sum(radial_flip_probability(r, n, eps) for r in radii)


# -- CLI family strings ----------------------------------------------------

_ALIASES = {
    "halfspace": "halfspace",
    "prodlin": "product_linear",
    "product_linear": "product_linear",
    "ball": "ball",
    "radial": "radial_product",
    "radial_product": "radial_product",
    "random": "random_ptf",
    "random_ptf": "random_ptf",
}


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


@dataclass(frozen=True)
class FamilySpec:
    """Parsed ``kind:key=value,...`` family description.

    List-valued parameters (``radii``) separate entries with ``/``.
    """

    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        kind, _, rest = text.strip().partition(":")
        if kind not in _ALIASES:
            raise ValueError(f"unknown family {kind!r}; expected one of {sorted(set(_ALIASES))}")
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"malformed family parameter {item!r}")
            if "/" in value:
                params[key] = [_number(v) for v in value.split("/")]
            else:
                params[key] = _number(value)
        return cls(_ALIASES[kind], params)

    def _get(self, key, default=None):
        if key in self.params:
            return self.params[key]
        if default is None:
            raise ValueError(f"family {self.kind} needs parameter {key!r}")
        return default

    def build(self) -> PTF:
        k = self.kind
        if k == "halfspace":
            n = int(self._get("n"))
            rng = np.random.default_rng(int(self._get("seed", 0)))
            return make_halfspace(rng.standard_normal(n))
        if k == "product_linear":
            n = int(self._get("n"))
            d = int(self._get("d", n))
            if int(self._get("orth", 0)):
                if d > n:
                    raise ValueError("orthonormal product needs d <= n")
                return make_product_linear_forms(np.eye(n)[:d])
            rng = np.random.default_rng(int(self._get("seed", 0)))
            return make_product_linear_forms(rng.standard_normal((d, n)))
        if k == "ball":
            return make_ball(float(self._get("r", 1.0)), int(self._get("n")))
        if k == "radial_product":
            radii = self._get("radii")
            radii = radii if isinstance(radii, list) else [radii]
            return make_radial_product(radii, int(self._get("n")))
        if k == "random_ptf":
            return make_random_ptf(int(self._get("n")), int(self._get("d")), int(self._get("seed", 0)))
        raise ValueError(f"unknown family kind {k!r}")
