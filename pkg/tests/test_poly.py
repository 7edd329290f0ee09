import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptfsense.errors import DegreeCapError, DimensionError, PolynomialFormatError
from ptfsense.families import make_ball, make_random_ptf
from ptfsense.poly import PTF, Polynomial, dumps, evaluate, gradient, load, loads, product_expand, ptf_eval, save

x1 = Polynomial.variable(0, 2)
x2 = Polynomial.variable(1, 2)


def random_poly(n, d, seed, sparsity=1.0):
    rng = np.random.default_rng(seed)
    p = make_random_ptf(n, d, seed).poly
    keep = [t for t in p.terms if rng.random() < sparsity]
    return Polynomial(n, keep or p.terms[:1])


def test_zero_polynomial():
    z = Polynomial(3)
    assert z.is_zero and z.degree == 0
    assert evaluate(z, [1.0, 2.0, 3.0]) == 0.0


def test_evaluate_examples():
    assert evaluate(x1 * x1 + x2 * x2, [3, 4]) == 25
    assert evaluate(product_expand([x1, x1 + x2]), [1, 2]) == 3


def test_evaluate_batch_matches_pointwise():
    p = random_poly(4, 4, 1)
    pts = np.random.default_rng(2).standard_normal((50, 4))
    batch = evaluate(p, pts)
    for x, v in zip(pts, batch):
        assert v == pytest.approx(evaluate(p, x), rel=1e-12, abs=1e-12)


def test_evaluate_naive_oracle():
    p = random_poly(3, 5, 4, sparsity=0.5)
    x = np.array([0.3, -1.2, 0.7])
    naive = sum(c * np.prod(x ** np.array(e)) for c, e in p.terms)
    assert evaluate(p, x) == pytest.approx(naive, rel=1e-12)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        evaluate(x1, [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        gradient(x1, [1.0])
    with pytest.raises(DimensionError):
        ptf_eval(PTF(x1), np.zeros((3, 5)))


def test_gradient_examples():
    assert np.array_equal(gradient(Polynomial.constant(3.0, 2), [1.0, 1.0]), [0.0, 0.0])
    assert np.array_equal(gradient(x1 * x2, [2.0, 5.0]), [5.0, 2.0])


def _fd_gradient(p, x, h=1e-5):
    out = np.empty(p.n)
    for j in range(p.n):
        e = np.zeros(p.n)
        e[j] = h
        out[j] = (evaluate(p, x + e) - evaluate(p, x - e)) / (2 * h)
    return out


@pytest.mark.parametrize("n,d,seed", [(2, 4, 0), (5, 4, 1), (10, 3, 2), (3, 6, 3), (6, 6, 4)])
def test_gradient_matches_finite_differences(n, d, seed):
    p = random_poly(n, d, seed, sparsity=0.6)
    x = np.random.default_rng(seed + 100).uniform(-1, 1, n)
    g = gradient(p, x)
    fd = _fd_gradient(p, x)
    assert np.linalg.norm(g - fd) <= 1e-6 * max(1.0, np.linalg.norm(g))


def test_ptf_eval_examples():
    assert ptf_eval(PTF(Polynomial.variable(0, 1)), [-2.0]) == -1
    assert ptf_eval(PTF(x1), [0.0, 1.0]) == 1
    assert ptf_eval(make_ball(1.0, 2), [0.0, 0.0]) == 1
    assert list(ptf_eval(PTF(x1), [[1.0, 0.0], [-1.0, 0.0], [0.0, 0.0]])) == [1, -1, 1]


def test_ptf_rejects_zero():
    with pytest.raises(ValueError):
        PTF(Polynomial(2))


def test_product_expand_examples():
    assert product_expand([x1, x2]) == Polynomial(2, [(1.0, (1, 1))])
    assert product_expand([x1 + x2, x1 - x2]) == x1 * x1 - x2 * x2


def test_product_expand_evaluation_oracle():
    rng = np.random.default_rng(7)
    factors = [random_poly(3, k, 10 + k, sparsity=0.8) for k in (1, 2, 3)]
    prod = product_expand(factors)
    assert prod.degree == sum(f.degree for f in factors)
    pts = rng.standard_normal((100, 3))
    expected = np.prod([evaluate(f, pts) for f in factors], axis=0)
    got = evaluate(prod, pts)
    assert np.all(np.abs(got - expected) <= 1e-9 * np.maximum(np.abs(expected), 1e-3))


def test_product_expand_errors():
    with pytest.raises(DegreeCapError):
        product_expand([x1 * x1 * x1] * 7)
    with pytest.raises(DimensionError):
        product_expand([x1, Polynomial.variable(0, 3)])


def test_canonical_graded_lex_order():
    p = Polynomial(2, [(1.0, (0, 2)), (2.0, (1, 0)), (3.0, (2, 0)), (4.0, (0, 0)), (5.0, (1, 1))])
    assert [t.exps for t in p.terms] == [(0, 0), (1, 0), (2, 0), (1, 1), (0, 2)]


def test_like_terms_merge_and_cancel():
    p = Polynomial(2, [(1.0, (1, 0)), (2.0, (1, 0)), (1.0, (0, 1)), (-1.0, (0, 1))])
    assert p.terms == ((3.0, (1, 0)),)
    assert (x1 - x1).is_zero


def test_json_roundtrip(tmp_path):
    p = make_random_ptf(3, 3, 5).poly
    path = tmp_path / "p.json"
    save(p, path)
    q = load(path)
    assert q == p
    assert dumps(q) == dumps(p)
    doc = json.loads(dumps(p))
    assert set(doc) == {"n", "terms"} and all(len(t["exps"]) == 3 for t in doc["terms"])


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"terms": []}',
        '{"n": 0, "terms": []}',
        '{"n": 2, "terms": [{"coeff": 1.0, "exps": [1]}]}',
        '{"n": 2, "terms": [{"coeff": "x", "exps": [1, 0]}]}',
        '{"n": 2, "terms": [{"coeff": 1.0, "exps": [-1, 0]}]}',
        '{"n": 2, "terms": [{"exps": [1, 0]}]}',
    ],
)
def test_malformed_json(text):
    with pytest.raises(PolynomialFormatError):
        loads(text)


coeff = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(a=coeff, b=coeff, seed=st.integers(0, 1000))
def test_evaluate_linear_in_coefficients(a, b, seed):
    p = random_poly(3, 3, seed)
    q = random_poly(3, 2, seed + 1)
    x = np.random.default_rng(seed).standard_normal(3)
    lhs = evaluate(a * p + b * q, x)
    rhs = a * evaluate(p, x) + b * evaluate(q, x)
    scale = abs(a) * sum(abs(c) for c, _ in p.terms) + abs(b) * sum(abs(c) for c, _ in q.terms)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, scale) * max(1.0, np.abs(x).max()) ** 3


@settings(max_examples=30, deadline=None)
@given(degrees=st.lists(st.integers(0, 4), min_size=1, max_size=4), seed=st.integers(0, 1000))
def test_degree_additivity(degrees, seed):
    factors = [random_poly(2, d, seed + i) if d else Polynomial.constant(2.0, 2) for i, d in enumerate(degrees)]
    assert product_expand(factors).degree == sum(f.degree for f in factors)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 4), d=st.integers(0, 4))
def test_serialisation_roundtrip_property(seed, n, d):
    p = random_poly(n, max(d, 1), seed, sparsity=0.7)
    assert loads(dumps(p)) == p
