"""Sparse multivariate real polynomials and polynomial threshold functions.

A :class:`Polynomial` is an immutable list of :class:`Monomial` terms kept in
canonical form: like terms merged, zero coefficients dropped, and terms sorted
graded-lexicographically (total degree ascending, then ``x1 > x2 > ...``).
Evaluation is vectorised over batches of points by computing every monomial
the polynomial needs exactly once, each as a parent monomial times a single
variable.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegreeCapError, DimensionError, PolynomialFormatError

DEGREE_CAP = 20
DROP_RELATIVE = 1e-14

# Upper bound on (monomials x points) held in memory during batch evaluation.
_EVAL_CELLS = 1 << 20


class Monomial(NamedTuple):
    coeff: float
    exps: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.exps)


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), tuple(-e for e in exps))


class Polynomial:
    """Real polynomial in ``n`` variables.

    Parameters
    ----------
    n : int
        Ambient dimension.
    terms : iterable of Monomial or (coeff, exps) pairs
        Repeated exponent vectors are summed; exact zeros are dropped.
    """

    def __init__(self, n: int, terms: Iterable = ()):
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise DimensionError(f"dimension must be a positive integer, got {n!r}")
        n = int(n)
        merged: dict[tuple[int, ...], float] = {}
        for coeff, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise DimensionError(f"exponent vector {exps} has length {len(exps)}, expected {n}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            merged[exps] = merged.get(exps, 0.0) + float(coeff)
        self._n = n
        self._terms = tuple(
            Monomial(c, e) for e, c in sorted(merged.items(), key=lambda kv: _grlex_key(kv[0])) if c != 0.0
        )

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, c: float, n: int) -> "Polynomial":
        return cls(n, [(c, (0,) * n)])

    @classmethod
    def variable(cls, j: int, n: int) -> "Polynomial":
        """The coordinate function ``x_{j+1}`` (``j`` is zero based)."""
        exps = [0] * n
        exps[j] = 1
        return cls(n, [(1.0, exps)])

    @classmethod
    def linear(cls, a: Sequence[float], c: float = 0.0) -> "Polynomial":
        """``<a, x> + c``."""
        a = np.asarray(a, dtype=float).ravel()
        n = a.size
        terms = [(c, (0,) * n)]
        for j, aj in enumerate(a):
            e = [0] * n
            e[j] = 1
            terms.append((aj, e))
        return cls(n, terms)

    @classmethod
    def from_arrays(cls, coeffs, exps) -> "Polynomial":
        exps = np.asarray(exps, dtype=np.int64)
        if exps.ndim != 2:
            raise DimensionError("exponent array must be 2-D")
        return cls(exps.shape[1], zip(np.asarray(coeffs, dtype=float).tolist(), exps.tolist()))

    # -- basic properties -------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> tuple[Monomial, ...]:
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((t.degree for t in self._terms), default=0)

    @cached_property
    def coeffs(self) -> np.ndarray:
        return np.array([t.coeff for t in self._terms], dtype=float)

    @cached_property
    def exps(self) -> np.ndarray:
        return np.array([t.exps for t in self._terms], dtype=np.int64).reshape(len(self._terms), self._n)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._n, self._terms))

    def __repr__(self) -> str:
        return f"Polynomial(n={self._n}, {to_string(self)!r})"

    def __getstate__(self):
        return (self._n, self._terms)

    def __setstate__(self, state):
        self._n, self._terms = state

    # -- arithmetic -------------------------------------------------------

    def _check_same(self, other: "Polynomial"):
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            other = Polynomial.constant(float(other), self.n)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_same(other)
        return Polynomial(self.n, self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, [(-c, e) for c, e in self._terms])

    def __sub__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self + (-float(other))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial(self.n, [(float(other) * c, e) for c, e in self._terms])
        if not isinstance(other, Polynomial):
            return NotImplemented
        return product_expand([self, other])

    __rmul__ = __mul__

    def __call__(self, x):
        return evaluate(self, x)

    # -- evaluation machinery --------------------------------------------

    @cached_property
    def _plan(self):
        """Monomial DAG: (steps, term_index) with steps (child, parent, var)."""
        index = {(0,) * self._n: 0}
        steps: list[tuple[int, int, int]] = []

        def need(exps: tuple[int, ...]) -> int:
            if exps in index:
                return index[exps]
            var = max(j for j, e in enumerate(exps) if e)
            parent = list(exps)
            parent[var] -= 1
            p = need(tuple(parent))
            index[exps] = len(index)
            steps.append((index[exps], p, var))
            return index[exps]

        term_index = np.array([need(t.exps) for t in self._terms], dtype=np.int64)
        return steps, len(index), term_index

    @cached_property
    def _partials(self) -> tuple["Polynomial", ...]:
        out = []
        for j in range(self._n):
            terms = []
            for c, e in self._terms:
                if e[j]:
                    d = list(e)
                    d[j] -= 1
                    terms.append((c * e[j], d))
            out.append(Polynomial(self._n, terms))
        return tuple(out)


def _as_points(p: Polynomial, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x2 = x.reshape(1, -1) if single else x
    if x2.ndim != 2 or x2.shape[1] != p.n:
        raise DimensionError(f"expected points of dimension {p.n}, got shape {x.shape}")
    return x2, single


def _evaluate_batch(p: Polynomial, x: np.ndarray) -> np.ndarray:
    m = x.shape[0]
    if p.is_zero:
        return np.zeros(m)
    if p.degree <= 1:
        out = np.zeros(m)
        for c, e in p.terms:
            if sum(e) == 0:
                out += c
        lin = np.zeros(p.n)
        for c, e in p.terms:
            if sum(e) == 1:
                lin[e.index(1)] = c
        return out + x @ lin
    steps, k, term_index = p._plan
    coeffs = np.zeros(k)
    coeffs[term_index] = p.coeffs
    block = max(1, _EVAL_CELLS // k)
    out = np.empty(m)
    xt = np.ascontiguousarray(x.T)
    for start in range(0, m, block):
        stop = min(m, start + block)
        mons = np.empty((k, stop - start))
        mons[0] = 1.0
        for child, parent, var in steps:
            np.multiply(mons[parent], xt[var, start:stop], out=mons[child])
        out[start:stop] = coeffs @ mons
    return out


def evaluate(p: Polynomial, x):
    """Value of ``p`` at one point (1-D ``x``) or at each row of a 2-D batch."""
    x2, single = _as_points(p, x)
    v = _evaluate_batch(p, x2)
    return float(v[0]) if single else v


def gradient(p: Polynomial, x):
    """Exact gradient of ``p``; shape ``(n,)`` for one point, ``(m, n)`` for a batch."""
    x2, single = _as_points(p, x)
    g = np.stack([_evaluate_batch(q, x2) for q in p._partials], axis=1)
    return g[0] if single else g


def product_expand(factors: Sequence[Polynomial], degree_cap: int = DEGREE_CAP) -> Polynomial:
    """Fully expanded product of ``factors`` with like terms merged.

    Coefficients smaller than ``1e-14`` times the largest one are dropped.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("product_expand needs at least one factor")
    n = factors[0].n
    for f in factors[1:]:
        if f.n != n:
            raise DimensionError(f"factor dimensions differ: {n} vs {f.n}")
    total = sum(f.degree for f in factors)
    if total > degree_cap:
        raise DegreeCapError(f"product degree {total} exceeds cap {degree_cap}")
    if any(f.is_zero for f in factors):
        return Polynomial(n)

    coeffs = factors[0].coeffs
    exps = factors[0].exps
    for f in factors[1:]:
        c = np.multiply.outer(coeffs, f.coeffs).ravel()
        e = (exps[:, None, :] + f.exps[None, :, :]).reshape(-1, n)
        exps, inverse = np.unique(e, axis=0, return_inverse=True)
        coeffs = np.bincount(inverse.ravel(), weights=c, minlength=len(exps))
    if coeffs.size:
        keep = np.abs(coeffs) >= DROP_RELATIVE * np.abs(coeffs).max()
        coeffs, exps = coeffs[keep], exps[keep]
    return Polynomial.from_arrays(coeffs, exps) if coeffs.size else Polynomial(n)


# -- threshold functions ---------------------------------------------------


@dataclass(frozen=True)
class PTF:
    """The boolean function ``x -> sgn(poly(x))`` with ``sgn(0) = +1``."""

    poly: Polynomial
    sign_at_zero: int = 1

    def __post_init__(self):
        if self.poly.is_zero:
            raise ValueError("a threshold function needs a nonzero polynomial")
        if self.sign_at_zero != 1:
            raise ValueError("only the sgn(0) = +1 convention is supported")

    @property
    def n(self) -> int:
        return self.poly.n

    @property
    def degree(self) -> int:
        return self.poly.degree

    def __call__(self, x):
        return ptf_eval(self, x)


def sign(values):
    """``+1`` where ``values >= 0``, else ``-1`` (int8 array)."""
    return np.where(np.asarray(values) >= 0, 1, -1).astype(np.int8)


def ptf_eval(f: PTF, x):
    v = evaluate(f.poly, x)
    if isinstance(v, float):
        return 1 if v >= 0 else -1
    return sign(v)


# -- serialisation ---------------------------------------------------------


def to_dict(p: Polynomial) -> dict:
    return {"n": p.n, "terms": [{"coeff": c, "exps": list(e)} for c, e in p.terms]}


def from_dict(doc) -> Polynomial:
    if not isinstance(doc, dict) or "n" not in doc or "terms" not in doc:
        raise PolynomialFormatError("polynomial document needs keys 'n' and 'terms'")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise PolynomialFormatError(f"'n' must be a positive integer, got {n!r}")
    if not isinstance(doc["terms"], list):
        raise PolynomialFormatError("'terms' must be a list")
    terms = []
    for i, t in enumerate(doc["terms"]):
        if not isinstance(t, dict) or "coeff" not in t or "exps" not in t:
            raise PolynomialFormatError(f"term {i} needs keys 'coeff' and 'exps'")
        c, e = t["coeff"], t["exps"]
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise PolynomialFormatError(f"term {i}: coefficient must be a finite number")
        if (
            not isinstance(e, list)
            or len(e) != n
            or any(isinstance(k, bool) or not isinstance(k, int) or k < 0 for k in e)
        ):
            raise PolynomialFormatError(f"term {i}: 'exps' must be {n} non-negative integers")
        terms.append((float(c), e))
    return Polynomial(n, terms)


def dumps(p: Polynomial) -> str:
    return json.dumps(to_dict(p))


def loads(text: str) -> Polynomial:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolynomialFormatError(f"invalid JSON: {exc}") from exc
    return from_dict(doc)


def load(path) -> Polynomial:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise PolynomialFormatError(f"cannot read polynomial file {path}: {exc}") from exc
    return loads(text)


def save(p: Polynomial, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(p))


def to_string(p: Polynomial) -> str:
    if p.is_zero:
        return "0"
    parts = []
    for c, e in p.terms:
        factors = [f"x{j + 1}" + (f"^{k}" if k > 1 else "") for j, k in enumerate(e) if k]
        parts.append("*".join([repr(c)] + factors) if factors else repr(c))
    return " + ".join(parts)
