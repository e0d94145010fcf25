import math

import numpy as np
import pytest

from focklab.operators import (KINDS, OperatorSpec, apply, default_corpus,
                               empirical_operator_norm, target_norm)
from focklab.quadrature import integrate_segment
from focklab.symbols import ExpPoly, FockParams, Poly, kernel, monomial, polynomial
from focklab.transforms import binf_pointwise

RNG = np.random.default_rng(11)
POINTS = (RNG.uniform(-1.5, 1.5, 20) + 1j * RNG.uniform(-1.5, 1.5, 20)).tolist()

OPS = [
    OperatorSpec("Vg", g=polynomial([0, 1, 0.5j])),
    OperatorSpec("VgPsi", g=polynomial([1, 0, 1]), psi=Poly([0.5, 0.5])),
    OperatorSpec("CpsiG", g=polynomial([0, 2, 1]), psi=Poly([0, -0.5j])),
    OperatorSpec("Cpsi", psi=Poly([1, 0.3])),
    OperatorSpec("uCpsi", u=polynomial([1, 1]), psi=Poly([0, 0.5])),
]
F = ExpPoly(Poly([1, -1, 0.25]), Poly([0, 0.3j]))


@pytest.mark.parametrize("op", OPS, ids=lambda o: o.kind)
def test_derivative_matches_central_difference(op):
    res = apply(op, F)
    h = 1e-5
    for z in POINTS:
        fd = (res(z + h) - res(z - h)) / (2 * h)
        d = complex(res.derivative_symbol(z))
        assert abs(fd - d) <= 1e-6 * max(1.0, abs(d))


@pytest.mark.parametrize("op", OPS, ids=lambda o: o.kind)
def test_value_is_integral_of_derivative(op):
    res = apply(op, F)
    for z in POINTS[:5]:
        seg = integrate_segment(lambda w: res.derivative_symbol(w), 0, z)
        want = complex(res(z))
        assert abs(complex(res.value_at_zero) + seg - want) <= 1e-8 * max(1.0, abs(want))


def test_volterra_of_one_is_g_minus_g0():
    g = monomial(3)
    res = apply(OperatorSpec("Vg", g=g), ExpPoly.constant(1.0))
    assert res(1 + 1j) == pytest.approx((1 + 1j) ** 3)


@pytest.mark.parametrize("kind", ["VgPsi", "CpsiG"])
def test_identity_symbol_reduces_to_volterra(kind):
    g = polynomial([0, 1, 2])
    a = apply(OperatorSpec("Vg", g=g), F)
    b = apply(OperatorSpec(kind, g=g, psi=Poly.identity()), F)
    for z in POINTS[:5]:
        assert b(z) == pytest.approx(a(z), rel=1e-10, abs=1e-12)


def test_composition_kinds_are_exact():
    res = apply(OperatorSpec("uCpsi", u=polynomial([0, 1]), psi=Poly([0, 2])), monomial(2))
    assert res.exact is not None
    assert res.exact.allclose(polynomial([0, 0, 0, 4]))


@pytest.mark.parametrize("kind,missing", [("Vg", {}), ("Cpsi", {}), ("uCpsi", {"psi": Poly()})])
def test_missing_symbols_rejected(kind, missing):
    with pytest.raises(ValueError):
        OperatorSpec(kind, **missing)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        OperatorSpec("Hankel", g=monomial(1))


@pytest.mark.parametrize("op", OPS, ids=lambda o: o.kind)
def test_json_round_trip(op):
    back = OperatorSpec.from_json(op.to_json())
    assert back.kind == op.kind
    assert apply(back, F)(0.7) == pytest.approx(apply(op, F)(0.7))


def test_corpus_contents():
    corpus = default_corpus(1.0)
    assert len(corpus) == 21
    assert corpus[0].allclose(ExpPoly.constant(1.0))


def test_constant_composition_ratios_at_most_one():
    op = OperatorSpec("Cpsi", psi=Poly([0]))
    emp = empirical_operator_norm(op, FockParams(1.0, 2.0), FockParams(1.0, 2.0))
    assert max(emp.ratios) <= 1 + 1e-10


def test_cubic_volterra_witness_grows_with_kernel_center():
    # kernels are the witnesses of unboundedness into F^inf for g = z^3
    op = OperatorSpec("Vg", g=monomial(3))
    src, tgt = FockParams(1.0, 2.0), FockParams(1.0, math.inf)
    corpus = [kernel(r, 1.0, normalized=True) for r in (1.0, 2.0, 4.0, 6.0, 10.0)]
    emp = empirical_operator_norm(op, src, tgt, corpus=corpus)
    assert all(b > a for a, b in zip(emp.ratios, emp.ratios[1:]))
    assert emp.witness_index == len(corpus) - 1
    # the ratio at |w| = r tracks the pointwise criterion there
    for r, ratio in zip((4.0, 6.0, 10.0), emp.ratios[2:]):
        crit = float(binf_pointwise(monomial(3), Poly.identity(), 1.0, r))
        assert 0.3 * crit <= ratio <= 3 * crit


def test_target_norm_uses_exact_symbol():
    res = apply(OperatorSpec("Cpsi", psi=Poly([0, 1])), monomial(1))
    assert target_norm(res, FockParams(1.0, 2.0)) == pytest.approx(1.0, rel=1e-9)


def test_kinds_listed():
    assert set(KINDS) == {"Vg", "VgPsi", "CpsiG", "Cpsi", "uCpsi"}
