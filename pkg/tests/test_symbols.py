import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focklab.symbols import (ExpPoly, FockParams, Poly, compose, kernel, monomial,
                             parse_exponent, poly_from_any, polynomial)

coef = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)
coeffs = st.lists(coef, min_size=1, max_size=5)
points = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def _horner(c, z):
    return sum(ck * z**k for k, ck in enumerate(c))


@given(coeffs, coeffs, points)
def test_poly_arithmetic_matches_pointwise(a, b, z):
    pa, pb = Poly(a), Poly(b)
    va, vb = _horner(a, z), _horner(b, z)
    scale = 1 + abs(va) * abs(vb) + abs(va) + abs(vb)
    assert abs((pa + pb)(z) - (va + vb)) <= 1e-12 * scale
    assert abs((pa * pb)(z) - va * vb) <= 1e-12 * scale


@given(coeffs, coeffs, points)
def test_compose_matches_nested_evaluation(a, b, z):
    pa, pb = Poly(a), Poly(b[:3])
    want = pa(pb(z))
    assert abs(pa.compose(pb)(z) - want) <= 1e-9 * (1 + abs(want))


@given(coeffs, coeffs, points)
@settings(max_examples=50)
def test_exppoly_json_round_trip(p, q, z):
    f = ExpPoly(Poly(p), Poly(q[:3]))
    g = ExpPoly.from_json(json.loads(json.dumps(f.to_json())))
    assert g.allclose(f)


@given(coeffs, st.lists(coef, min_size=1, max_size=3), points)
@settings(max_examples=50)
def test_derivative_matches_central_difference(p, q, z):
    f = ExpPoly(Poly(p), Poly(q))
    h = 1e-5
    fd = (f(z + h) - f(z - h)) / (2 * h)
    d = f.derivative()(z)
    assert abs(d - fd) <= 1e-5 * (1 + abs(d))


@given(coeffs, points)
def test_log_modulus_is_log_abs(p, z):
    f = ExpPoly(Poly(p), Poly([0, 0.5, 0.25j]))
    v = abs(f(z))
    if v > 1e-200:
        assert f.log_modulus(z) == pytest.approx(math.log(v), abs=1e-10)


def test_json_encoding_is_ascending_pairs():
    f = ExpPoly.from_json({"p": [[1, 0], [0, 2]], "q": []})
    assert f.is_polynomial()
    assert f(1.0) == pytest.approx(1 + 2j)
    assert f.to_json()["p"][1] == [0.0, 2.0]


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("w", [0j, 1.0, 1 - 2j])
def test_kernel_values(alpha, w):
    z = 0.3 + 0.7j
    k = kernel(w, alpha)
    assert k(z) == pytest.approx(np.exp(alpha * z * np.conj(w)))
    kn = kernel(w, alpha, normalized=True)
    assert kn(z) == pytest.approx(np.exp(alpha * z * np.conj(w) - alpha * abs(w) ** 2 / 2))


def test_module_level_helpers_agree_with_methods():
    f = polynomial([1, 2, 3])
    r = Poly([0, 2])
    assert compose(f, r).allclose(f.compose(r))
    assert monomial(3)(2.0) == pytest.approx(8.0)


@pytest.mark.parametrize("text,value", [("inf", math.inf), ("Infinity", math.inf),
                                        ("2", 2.0), (1.5, 1.5)])
def test_parse_exponent(text, value):
    assert parse_exponent(text) == value


@pytest.mark.parametrize("alpha,p", [(0.0, 2.0), (-1.0, 2.0), (1.0, 0.0), (1.0, -2.0)])
def test_fock_params_reject_bad_values(alpha, p):
    with pytest.raises(ValueError):
        FockParams(alpha, p)


def test_poly_from_any_rejects_exponential_symbol():
    with pytest.raises(ValueError):
        poly_from_any({"p": [[1, 0]], "q": [[0, 0], [1, 0]]})
    assert poly_from_any([[0, 0], [0.5, 0]])(2.0) == pytest.approx(1.0)
