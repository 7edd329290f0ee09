"""Restriction of a polynomial to a great circle and exact sign-change counting.

Along the circle ``X_phi = cos(phi) X + sin(phi) Y`` every coordinate is
``x_j = a_j z + b_j / z`` with ``z = e^{i phi}``, ``a_j = (X_j - i Y_j)/2`` and
``b_j = (X_j + i Y_j)/2``.  Multiplying ``g(X_phi)`` by ``z^d`` therefore gives
an ordinary complex polynomial ``h`` of degree ``2d`` whose unit-circle roots are
exactly the zeros of ``g`` on the circle.  Roots come from companion-matrix
eigenvalues; whether ``sgn g`` really flips at a root is decided by evaluating
``g`` at midpoints between consecutive candidate angles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRestrictionError, DimensionError
from .poly import Polynomial, evaluate

UNIT_BAND = 1e-7
ANGLE_DEDUP = 1e-8
TRIM_RELATIVE = 1e-12
DEGENERATE_RELATIVE = 1e-12

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CirclePolynomial:
    """``h(z) = sum_k coeffs[k] z^k`` with ``h(e^{i phi}) = e^{i d phi} g(X_phi)``."""

    d: int
    coeffs: np.ndarray
    scale: float

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def along_circle(self, phi):
        """``e^{-i d phi} h(e^{i phi})``; real up to rounding."""
        phi = np.asarray(phi, dtype=float)
        return self(np.exp(1j * phi)) * np.exp(-1j * self.d * phi)

    def symmetry_defect(self) -> float:
        """``max_k |conj(c_k) - c_{2d-k}|`` relative to ``scale``."""
        if self.scale == 0:
            return 0.0
        return float(np.max(np.abs(np.conj(self.coeffs) - self.coeffs[::-1])) / self.scale)


@dataclass(frozen=True)
class SignChangeReport:
    angles: tuple[float, ...]
    count: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {"angles": list(self.angles), "count": self.count, "degenerate": self.degenerate}


def _check(p: Polynomial, X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape or X.shape[-1] != p.n:
        raise DimensionError(f"circle vectors must have dimension {p.n}, got {X.shape} and {Y.shape}")
    return X, Y


def eval_along_circle(p: Polynomial, X, Y, phi):
    """``p(cos(phi) X + sin(phi) Y)`` for a scalar or array of angles."""
    X, Y = _check(p, X, Y)
    phi_arr = np.asarray(phi, dtype=float)
    pts = np.cos(phi_arr)[..., None] * X + np.sin(phi_arr)[..., None] * Y
    v = evaluate(p, pts.reshape(-1, p.n)).reshape(phi_arr.shape)
    return float(v) if phi_arr.ndim == 0 else v


def _circle_coeffs(p: Polynomial, X: np.ndarray, Y: np.ndarray):
    """Batched circle coefficients, shape ``(M, 2d+1)``, plus the input scale per circle."""
    d = p.degree
    m = X.shape[0]
    a = 0.5 * (X - 1j * Y)
    b = 0.5 * (X + 1j * Y)
    radius = np.hypot(X, Y)
    h = np.zeros((m, 2 * d + 1), dtype=complex)
    input_scale = np.zeros(m)

    steps, k, term_index = p._plan
    # mons[i] holds prod_j (b_j + a_j w)^{e_j} as coefficients in w = z^2
    mons: list[np.ndarray | None] = [None] * k
    mons[0] = np.ones((m, 1), dtype=complex)
    for child, parent, var in steps:
        par = mons[parent]
        new = np.zeros((m, par.shape[1] + 1), dtype=complex)
        new[:, :-1] = par * b[:, var, None]
        new[:, 1:] += par * a[:, var, None]
        mons[child] = new
    for (c, e), idx in zip(p.terms, term_index):
        mon = mons[idx]
        deg = mon.shape[1] - 1
        h[:, d - deg : d + deg + 1 : 2] += c * mon
        input_scale += abs(c) * np.prod(radius ** np.asarray(e), axis=1)
    return h, input_scale


def circle_polynomial(p: Polynomial, X, Y) -> CirclePolynomial:
    """Degree-2d circle polynomial of ``p`` along the circle spanned by X and Y."""
    if p.is_zero:
        raise DegenerateRestrictionError("zero polynomial has no circle polynomial")
    X, Y = _check(p, X, Y)
    if X.ndim != 1:
        raise DimensionError("circle_polynomial takes single vectors; use circle_coefficients for batches")
    h, input_scale = _circle_coeffs(p, X[None, :], Y[None, :])
    coeffs = h[0]
    scale = float(np.abs(coeffs).max())
    if scale <= DEGENERATE_RELATIVE * input_scale[0]:
        raise DegenerateRestrictionError("polynomial vanishes identically on this circle")
    return CirclePolynomial(p.degree, coeffs, scale)


def circle_coefficients(p: Polynomial, X, Y) -> np.ndarray:
    """Circle polynomial coefficients for a batch of circles, shape ``(M, 2d+1)``."""
    X, Y = _check(p, X, Y)
    return _circle_coeffs(p, np.atleast_2d(X), np.atleast_2d(Y))[0]


def _companion_roots(c: np.ndarray) -> np.ndarray:
    """Roots of ``sum c[..., k] z^k`` (monic normalisation); batched on leading axes."""
    deg = c.shape[-1] - 1
    if deg < 1:
        return np.zeros(c.shape[:-1] + (0,), dtype=complex)
    comp = np.zeros(c.shape[:-1] + (deg, deg), dtype=complex)
    comp[..., 0, :] = -c[..., -2::-1] / c[..., -1:]
    idx = np.arange(deg - 1)
    comp[..., idx + 1, idx] = 1.0
    return np.linalg.eigvals(comp)


def _candidate_angles(roots: np.ndarray, band: float, dedup: float) -> np.ndarray:
    on = roots[np.abs(np.abs(roots) - 1.0) <= band]
    if on.size == 0:
        return np.zeros(0)
    ang = np.sort(np.mod(np.angle(on), TWO_PI))
    keep = np.concatenate(([True], np.diff(ang) > dedup))
    ang = ang[keep]
    if ang.size > 1 and ang[0] + TWO_PI - ang[-1] <= dedup:
        ang = ang[:-1]
    return ang


def sign_changes_batch(
    p: Polynomial,
    X,
    Y,
    *,
    band: float = UNIT_BAND,
    dedup: float = ANGLE_DEDUP,
    trim: float = TRIM_RELATIVE,
    degenerate_tol: float = DEGENERATE_RELATIVE,
    return_angles: bool = False,
):
    """Sign-change counts of ``sgn p`` along M circles.

    Returns ``(counts, degenerate)`` (and a list of angle arrays when
    ``return_angles``); degenerate circles get count 0.
    """
    X, Y = _check(p, X, Y)
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    m = X.shape[0]
    h, input_scale = _circle_coeffs(p, X, Y)
    mag = np.abs(h)
    scale = mag.max(axis=1)
    degenerate = scale <= degenerate_tol * input_scale

    significant = mag > trim * scale[:, None]
    generic = significant[:, 0] & significant[:, -1] & ~degenerate
    roots: list[np.ndarray] = [np.zeros(0, dtype=complex)] * m
    if h.shape[1] > 1 and generic.any():
        batch = _companion_roots(h[generic])
        for i, r in zip(np.flatnonzero(generic), batch):
            roots[i] = r
    for i in np.flatnonzero(~generic & ~degenerate):
        nz = np.flatnonzero(significant[i])
        roots[i] = _companion_roots(h[i, nz[0] : nz[-1] + 1])

    candidates = [_candidate_angles(r, band, dedup) for r in roots]

    # Midpoint j of circle i sits between candidate j and candidate j+1 (cyclically).
    mids, owner = [], []
    for i, ang in enumerate(candidates):
        if ang.size >= 2:
            nxt = np.append(ang[1:], ang[0] + TWO_PI)
            mids.append(0.5 * (ang + nxt))
            owner.append(np.full(ang.size, i))
    counts = np.zeros(m, dtype=np.int64)
    flips_at: list[np.ndarray] = [np.zeros(0)] * m
    if mids:
        mid = np.concatenate(mids)
        own = np.concatenate(owner)
        pts = np.cos(mid)[:, None] * X[own] + np.sin(mid)[:, None] * Y[own]
        signs = evaluate(p, pts) >= 0
        pos = 0
        for i, ang in enumerate(candidates):
            if ang.size < 2:
                continue
            s = signs[pos : pos + ang.size]
            pos += ang.size
            flip = s != np.roll(s, 1)
            counts[i] = int(flip.sum())
            if return_angles:
                flips_at[i] = ang[flip]
    if return_angles:
        return counts, degenerate, flips_at
    return counts, degenerate


def count_sign_changes(p: Polynomial, X, Y, **tolerances) -> SignChangeReport:
    """Number of sign flips of ``phi -> sgn p(X_phi)`` on ``[0, 2 pi)``."""
    X, Y = _check(p, X, Y)
    if X.ndim != 1:
        raise DimensionError("count_sign_changes takes single vectors; use sign_changes_batch")
    counts, degenerate, angles = sign_changes_batch(p, X[None], Y[None], return_angles=True, **tolerances)
    if degenerate[0]:
        return SignChangeReport((), 0, True)
    return SignChangeReport(tuple(float(a) for a in angles[0]), int(counts[0]), False)
