import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focklab.fock import (derivative_equivalence_ratio, derivative_norm, fock_norm,
                          inner_product, pointwise_bound_check)
from focklab.quadrature import QuadSpec
from focklab.symbols import ExpPoly, FockParams, Poly, kernel, monomial, polynomial

P_VALUES = [0.5, 1.0, 2.0, 3.0, math.inf]


@pytest.mark.parametrize("p", P_VALUES)
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_constant_has_unit_norm(p, alpha):
    assert fock_norm(ExpPoly.constant(1.0), FockParams(alpha, p)).value == pytest.approx(
        1.0, rel=1e-10)


@pytest.mark.parametrize("k", range(5))
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_monomial_hilbert_norm(k, alpha):
    # ||z^k||_2^2 = k! / alpha^k
    v = fock_norm(monomial(k), FockParams(alpha, 2.0)).value
    assert v**2 == pytest.approx(math.factorial(k) / alpha**k, rel=1e-9)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_monomial_sup_norm(alpha):
    # sup |z| e^{-alpha |z|^2 / 2} = (alpha e)^{-1/2}
    v = fock_norm(monomial(1), FockParams(alpha, math.inf)).value
    assert v == pytest.approx(1 / math.sqrt(alpha * math.e), rel=1e-8)


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0, math.inf])
@pytest.mark.parametrize("w", [0.5, 2j, -3 + 1j])
def test_normalized_kernel_has_unit_norm(p, w):
    v = fock_norm(kernel(w, 1.0, normalized=True), FockParams(1.0, p)).value
    assert v == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
@pytest.mark.parametrize("c", [3.0, 0.5j, -2 + 2j])
def test_norm_homogeneity(p, c):
    f = polynomial([1, -1j, 0.5])
    spec = QuadSpec(rel_tol=1e-12, abs_tol=1e-15)
    a = fock_norm(f, FockParams(1.0, p), spec).value
    b = fock_norm(f * ExpPoly.constant(c), FockParams(1.0, p), spec).value
    assert b == pytest.approx(abs(c) * a, rel=1e-10)


def test_norm_of_non_member_is_infinite():
    # exp(z^2) is outside F^p_1 for every p
    f = ExpPoly(Poly([1]), Poly([0, 0, 1]))
    assert math.isinf(fock_norm(f, FockParams(1.0, 2.0)).value)
    assert math.isinf(fock_norm(f, FockParams(1.0, math.inf)).value)


@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=4),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
@settings(max_examples=15, deadline=None)
def test_reproducing_property(coeffs, w):
    f = polynomial(coeffs)
    want = complex(f(w))
    got = inner_product(f, kernel(w, 1.0), 1.0)
    assert abs(got - want) <= 1e-6 * max(abs(want), 1e-3 * f.as_poly().abs_coeff_sum())


def test_inner_product_orthogonality_of_monomials():
    assert abs(inner_product(monomial(2), monomial(3), 1.0)) < 1e-10
    assert inner_product(monomial(2), monomial(2), 1.0) == pytest.approx(2.0, rel=1e-10)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_pointwise_bound_is_sharp_for_kernels(p):
    # the normalized kernel at w attains the bound at z = w
    f = kernel(1 + 1j, 1.0, normalized=True)
    rep = pointwise_bound_check(f, FockParams(1.0, p), [1 + 1j, 0, 2])
    assert rep.violations == 0
    assert rep.worst_ratio == pytest.approx(1.0, rel=1e-8)


def test_derivative_ratio_examples():
    assert derivative_equivalence_ratio(ExpPoly.constant(1.0),
                                        FockParams(1.0, 2.0)) == pytest.approx(1.0)
    r = derivative_equivalence_ratio(monomial(1), FockParams(1.0, math.inf))
    assert r == pytest.approx(math.exp(-0.5), rel=1e-8)


def test_derivative_norm_of_constant_derivative():
    # f' = 1, f(0) = 0, p = inf: sup 1/((1+r) e^{r^2/2}) = 1 at r = 0
    v, _ = derivative_norm(0.0, ExpPoly.constant(1.0), FockParams(1.0, math.inf))
    assert v == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 4.0, math.inf])
def test_derivative_ratio_finite_positive(p):
    for f in (monomial(3), kernel(2.0, 1.0, normalized=True), polynomial([1, 1])):
        r = derivative_equivalence_ratio(f, FockParams(1.0, p))
        assert np.isfinite(r) and r > 0


def test_tighter_spec_changes_little():
    f = polynomial([1, 2, 3])
    a = fock_norm(f, FockParams(1.0, 3.0)).value
    b = fock_norm(f, FockParams(1.0, 3.0), QuadSpec(rel_tol=1e-12, abs_tol=1e-15)).value
    assert a == pytest.approx(b, rel=1e-8)
