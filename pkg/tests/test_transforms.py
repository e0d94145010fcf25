import math

import numpy as np
import pytest
from scipy import integrate

from focklab.quadrature import QuadSpec
from focklab.symbols import ExpPoly, FockParams, Poly, monomial, polynomial
from focklab.transforms import (CriterionProfile, Weight, berezin_B, berezin_M,
                                binf_pointwise, criterion_sup, minf_pointwise,
                                radial_profile_of, total_mass, total_mass_nested,
                                u_transform, uinf_pointwise)

RNG = np.random.default_rng(3)


def test_binf_examples():
    assert binf_pointwise(monomial(2), Poly.identity(), 1.0, 1.0) == pytest.approx(1.0)
    assert binf_pointwise(monomial(1), Poly([0, 0.5]), 1.0, 0.0) == pytest.approx(1.0)
    assert binf_pointwise(ExpPoly.constant(3.0), Poly([0, 2]), 1.0, 1 + 1j) == 0.0


def test_minf_examples():
    assert minf_pointwise(monomial(1), Poly([0, 2]), 1.0, 1.0) == pytest.approx(math.exp(1.5))
    assert minf_pointwise(monomial(2), Poly([3]), 1.0, 0.5) == 0.0


@pytest.mark.parametrize("k", range(10))
def test_minf_equals_binf_for_identity(k):
    g = polynomial(RNG.normal(size=3) + 1j * RNG.normal(size=3))
    z = complex(RNG.normal(), RNG.normal())
    assert minf_pointwise(g, Poly.identity(), 1.0, z) == pytest.approx(
        binf_pointwise(g, Poly.identity(), 1.0, z), rel=1e-12)


def test_uinf_identity_sup_is_one():
    res = u_transform(ExpPoly.constant(1.0), Poly.identity(), FockParams(1.0, math.inf),
                      mode="sup")
    assert res.sup == pytest.approx(1.0)
    assert uinf_pointwise(ExpPoly.constant(1.0), Poly.identity(), 1.0, 3.0) == pytest.approx(1)


def test_berezin_B_radial_oracle():
    # psi = id, g = z, p = 2, alpha = 1, w = 0: 2 pi int r e^{-r^2} (1+r)^{-2} dr
    want = 2 * math.pi * integrate.quad(lambda r: r * math.exp(-r * r) / (1 + r) ** 2,
                                        0, math.inf, epsabs=1e-14, epsrel=1e-13)[0]
    v, err = berezin_B(monomial(1), Poly.identity(), FockParams(1.0, 2.0), 0.0)
    assert v == pytest.approx(want, rel=1e-9)
    assert err < 1e-7 * v


def test_berezin_M_midpoint_oracle():
    # psi = z/2, g = z, p = 2, alpha = 1, w = 0 against a crude midpoint rule
    v, _ = berezin_M(monomial(1), Poly([0, 0.5]), FockParams(1.0, 2.0), 0.0)
    h = 0.02
    x = np.arange(-8, 8, h) + h / 2
    z = x[:, None] + 1j * x[None, :]
    a2 = np.abs(z) ** 2
    psi2 = np.abs(z / 2) ** 2
    # exp((p a/2)(|psi|^2 - |z|^2 - |w - psi|^2)) |g'(psi) psi'|^p / (1+|z|)^p
    vals = np.exp(psi2 - a2 - psi2) * 0.25 / (1 + np.abs(z)) ** 2
    assert v == pytest.approx(vals.sum() * h * h, rel=1e-4)


@pytest.mark.parametrize("k", range(5))
def test_berezin_M_equals_B_for_identity(k):
    g = polynomial(RNG.normal(size=3) + 1j * RNG.normal(size=3))
    w = complex(RNG.normal(), RNG.normal())
    params = FockParams(1.0, 2.0)
    b = berezin_B(g, Poly.identity(), params, w)[0]
    m = berezin_M(g, Poly.identity(), params, w)[0]
    assert m == pytest.approx(b, rel=1e-10)


@pytest.mark.parametrize("k", range(10))
def test_kernel_form_equals_squared_form(k):
    g = polynomial(RNG.normal(size=3) + 1j * RNG.normal(size=3))
    a = 0.9 * RNG.uniform() * np.exp(2j * np.pi * RNG.uniform())
    psi = Poly([complex(RNG.normal(), RNG.normal()), a])
    params = FockParams(1.0, float(RNG.choice([1.0, 2.0, 3.0])))
    w = complex(RNG.uniform(-3, 3), RNG.uniform(-3, 3))
    sq = berezin_B(g, psi, params, w, form="squared")[0]
    ke = berezin_B(g, psi, params, w, form="kernel")[0]
    assert ke == pytest.approx(sq, rel=1e-8)


def test_zero_weights_give_zero():
    params = FockParams(1.0, 2.0)
    assert berezin_B(ExpPoly.constant(2.0), Poly.identity(), params, 1.0) == (0.0, 0.0)
    assert berezin_M(monomial(1), Poly([2.0]), params, 1.0) == (0.0, 0.0)
    assert u_transform(ExpPoly.constant(0.0), Poly([0, 0.5]), params, 1.0) == (0.0, 0.0)


def test_unit_weight_contractive_symbol_is_finite():
    v, _ = u_transform(ExpPoly.constant(1.0), Poly([0, 0.5]), FockParams(1.0, 2.0), 1.0)
    assert 0 < v < math.inf


@pytest.mark.parametrize("p,want", [(3.0, 2 * math.pi**2 / 3), (4.0, math.pi**2 / 6)])
def test_total_mass_volterra_closed_form(p, want):
    # (2 pi / p) int (1+|z|)^{-p} dm = (2 pi/p) 2 pi / ((p-1)(p-2))
    res = total_mass(Weight.build("B", Poly.identity(), g=monomial(1)), FockParams(1.0, p))
    assert res.convergent
    assert res.value == pytest.approx(want, rel=1e-6)


@pytest.mark.parametrize("p,kind", [(2.0, "logarithmic"), (1.5, "power")])
def test_total_mass_volterra_divergent(p, kind):
    res = total_mass(Weight.build("B", Poly.identity(), g=monomial(1)), FockParams(1.0, p))
    assert res.status == "divergent"
    assert res.growth_kind == kind


def test_total_mass_unit_circle_symbol_diverges_quadratically():
    w = Weight.build("U", Poly([0, 1.0]), u=ExpPoly.constant(1.0))
    res = total_mass(w, FockParams(1.0, 2.0))
    assert res.status == "divergent"
    assert res.growth_exponent == pytest.approx(2.0, abs=0.1)


def test_total_mass_zero_weight():
    res = total_mass(Weight.build("B", Poly.identity(), g=ExpPoly.constant(1.0)),
                     FockParams(1.0, 2.0))
    assert res.convergent and res.value == 0.0


@pytest.mark.parametrize("kind,g,psi,p", [
    ("B", [0, 0, 1], [0, 0.5], 2.0), ("M", [0, 1], [0, 0.5], 2.0),
    ("B", [0, 1, 1], [1, 0.5], 3.0), ("M", [0, 0, 1], [0, 0.3j], 1.0)])
def test_fubini_reduction_matches_nested(kind, g, psi, p):
    w = Weight.build(kind, Poly(psi), g=polynomial(g))
    params = FockParams(1.0, p)
    red = total_mass(w, params)
    nested, diff = total_mass_nested(w, params)
    assert red.value == pytest.approx(nested, rel=1e-4)


def test_unit_weight_total_mass_nested():
    w = Weight.build("U", Poly([0, 0.5]), u=ExpPoly.constant(1.0))
    red = total_mass(w, FockParams(1.0, 2.0))
    nested, _ = total_mass_nested(w, FockParams(1.0, 2.0))
    assert red.value == pytest.approx(nested, rel=1e-4)


@pytest.mark.parametrize("a", [0.2, 0.5, 0.8])
def test_unit_weight_total_mass_monotone_in_a(a):
    lo = total_mass(Weight.build("U", Poly([0, a]), u=ExpPoly.constant(1.0)),
                    FockParams(1.0, 2.0)).value
    hi = total_mass(Weight.build("U", Poly([0, a + 0.1]), u=ExpPoly.constant(1.0)),
                    FockParams(1.0, 2.0)).value
    assert hi >= lo


@pytest.mark.parametrize("psi", [[0, 0, 1], [1, 0, 0.5], [0, 1, 0, 0.1]])
def test_binf_profile_grows_for_nonlinear_symbols(psi):
    prof = radial_profile_of(Weight.build("B", Poly(psi), g=monomial(1)), 1.0,
                             np.arange(1, 21))
    vals = [v for _, v in prof]
    assert vals[-1] > 1e6 * vals[0]


def test_criterion_sup_linear_volterra():
    res = criterion_sup(Weight.build("B", Poly.identity(), g=monomial(1)), 1.0, QuadSpec())
    assert res.sup == pytest.approx(1.0, rel=1e-10)


def test_criterion_profile_validation():
    CriterionProfile("Binf", {"alpha": 1.0}, [(1.0, 0.5), (2.0, 0.0)])
    with pytest.raises(ValueError):
        CriterionProfile("Binf", {"alpha": 1.0}, [(2.0, 0.5), (1.0, 0.5)])
    with pytest.raises(ValueError):
        CriterionProfile("Binf", {"alpha": 1.0}, [(1.0, -0.5)])


def test_berezin_needs_finite_exponent():
    with pytest.raises(ValueError):
        berezin_B(monomial(1), Poly.identity(), FockParams(1.0, math.inf), 0.0)
