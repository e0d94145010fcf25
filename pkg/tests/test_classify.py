import math

import numpy as np
import pytest

from focklab.classify import (OutOfScope, SpacePair, Verdict, classify, classify_numeric,
                              classify_symbolic, cross_validate, growth_status, limit_status)
from focklab.operators import OperatorSpec, empirical_operator_norm
from focklab.symbols import ExpPoly, FockParams, Poly, polynomial

INTO_INF = [([1], "yes", "yes"), ([0, 1], "yes", "yes"), ([0, 0, 1], "yes", "no"),
            ([0, 0, 0, 1], "no", "no"), ([0, 0, 0, 0, 1], "no", "no"),
            ([0, 1j, 2], "yes", "no"), ([5, 1], "yes", "yes")]


@pytest.mark.parametrize("g,bounded,compact", INTO_INF)
def test_volterra_into_inf_symbolic_and_numeric(g, bounded, compact):
    op = OperatorSpec("Vg", g=polynomial(g))
    pair = SpacePair.of(1.0, 2, "inf")
    res = cross_validate(op, pair)
    assert res["symbolic"]["bounded"] == bounded
    assert res["symbolic"]["compact"] == compact
    assert res["agreement"]


@pytest.mark.parametrize("g,p,bounded", [
    ([0, 1], 1.5, "no"), ([0, 1], 2, "no"), ([0, 1], 2.5, "yes"), ([0, 1], 3, "yes"),
    ([0, 0, 1], 3, "no"), ([4], 1.0, "yes")])
def test_volterra_from_inf(g, p, bounded):
    op = OperatorSpec("Vg", g=polynomial(g))
    pair = SpacePair.of(1.0, "inf", p)
    v = classify(op, pair)
    assert v.bounded == bounded
    assert v.agreement


@pytest.mark.parametrize("a,bounded", [(0.3, "yes"), (0.9, "yes"), (1.0, "no"),
                                       (1.1, "no"), (0.7j, "yes")])
def test_composition_from_inf(a, bounded):
    op = OperatorSpec("Cpsi", psi=Poly([0.5, a]))
    v = classify(op, SpacePair.of(1.0, "inf", 2))
    assert v.bounded == bounded
    assert v.compact == bounded
    assert v.agreement


@pytest.mark.parametrize("psi,bounded,compact", [
    ([0, 0.5], "yes", "yes"), ([0, 1], "yes", "yes"), ([1, 1], "no", "no"),
    ([0, 2], "no", "no"), ([0, 0, 1], "no", "no"), ([2], "yes", "yes")])
def test_generalized_volterra_into_inf(psi, bounded, compact):
    op = OperatorSpec("VgPsi", g=polynomial([0, 1]), psi=Poly(psi))
    v = classify_numeric(op, SpacePair.of(1.0, 2, "inf"))
    assert (v.bounded, v.compact) == (bounded, compact)


def test_unit_circle_rotation_is_bounded_not_compact():
    op = OperatorSpec("uCpsi", u=ExpPoly.constant(1.0), psi=Poly([0, 1j]))
    v = classify_numeric(op, SpacePair.of(1.0, 2, "inf"))
    assert (v.bounded, v.compact) == ("yes", "no")


@pytest.mark.parametrize("psi,g,expect", [
    ([0, 0.5], [0, 1], "yes"), ([0, 1], [0, 1], "yes"), ([0, 2], [0, 1], "no")])
def test_composition_volterra_between_finite_exponents(psi, g, expect):
    op = OperatorSpec("CpsiG", g=polynomial(g), psi=Poly(psi))
    v = classify_numeric(op, SpacePair.of(1.0, 2, 3))
    assert v.bounded == expect


@pytest.mark.parametrize("psi,source,target,expect", [
    ([0, 0.5], 4, 2, "yes"), ([1, 0.5], 4, 1, "yes"), ([0, 2], 4, 2, "no"),
    # psi = z: the transform decays like (1+|w|)^-p, raised to q/(q-p)
    ([0, 1], 4, 2, "yes"), ([0, 1], 4, 1, "no"), ([0, 1], 3, 1.2, "no")])
def test_composition_volterra_downward(psi, source, target, expect):
    op = OperatorSpec("CpsiG", g=polynomial([0, 1]), psi=Poly(psi))
    v = classify_numeric(op, SpacePair.of(1.0, source, target))
    assert (v.bounded, v.compact) == (expect, expect)


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict("no", "yes", "rule")
    with pytest.raises(ValueError):
        Verdict("maybe", "no", "rule")
    assert Verdict("indeterminate", "indeterminate", "rule").indeterminate


def test_space_pair_requires_equal_alpha():
    with pytest.raises(ValueError):
        SpacePair(FockParams(1.0, 2.0), FockParams(2.0, 2.0))


def test_symbolic_out_of_scope():
    op = OperatorSpec("Vg", g=ExpPoly(Poly([0, 1]), Poly([0, 1])))
    with pytest.raises(OutOfScope):
        classify_symbolic(op, SpacePair.of(1.0, 2, "inf"))
    with pytest.raises(OutOfScope):
        classify_symbolic(OperatorSpec("Vg", g=polynomial([0, 1])), SpacePair.of(1.0, 2, 3))


def test_combined_mode_falls_back_to_numeric():
    op = OperatorSpec("Vg", g=ExpPoly(Poly([0, 1]), Poly([0, 1])))
    v = classify(op, SpacePair.of(1.0, 2, "inf"))
    assert v.symbolic is None and v.agreement is None
    assert v.bounded == "no"


def test_exponential_symbol_volterra_is_unbounded_into_inf():
    # g = e^z with psi = id leaves the criterion e^{Re z}/(1+|z|), which is unbounded
    op = OperatorSpec("Vg", g=ExpPoly(Poly([1]), Poly([0, 1])))
    assert classify_numeric(op, SpacePair.of(1.0, 2, "inf")).bounded == "no"


@pytest.mark.parametrize("g,psi", [([0, 1], [0, 1]), ([0, 0, 1], [0, 1]),
                                   ([0, 0, 1], [1, 0.5])])
def test_empirical_lower_bound_below_criterion(g, psi):
    op = OperatorSpec("VgPsi", g=polynomial(g), psi=Poly(psi))
    pair = SpacePair.of(1.0, 2, "inf")
    v = classify_numeric(op, pair)
    emp = empirical_operator_norm(op, pair.source, pair.target).lower_bound
    assert emp <= v.criterion_value * (1 + 1e-6)


def test_growth_status_cases():
    r = np.geomspace(1, 160, 33)
    assert growth_status(r, np.log(r))[0] == "unbounded"
    assert growth_status(r, np.log(2 - 1 / r))[0] == "bounded"
    assert growth_status(r, -r)[0] == "bounded"
    assert growth_status(r, 0.3 * np.log(r))[0] == "indeterminate"


def test_limit_status_cases():
    levels = 5 * 2.0 ** np.arange(5)
    assert limit_status(levels, np.log(1 / levels), 0.0) == "yes"
    assert limit_status(levels, np.zeros(5), 0.0) == "no"


def test_symbolic_only_mode():
    op = OperatorSpec("Vg", g=polynomial([0, 0, 0, 1]))
    v = classify(op, SpacePair.of(1.0, 2, "inf"), mode="symbolic")
    assert v.bounded == "no" and v.numeric is None
    with pytest.raises(ValueError):
        classify(op, SpacePair.of(1.0, 2, "inf"), mode="fast")


def test_norm_estimate_from_total_mass():
    op = OperatorSpec("Vg", g=polynomial([0, 1]))
    v = classify_numeric(op, SpacePair.of(1.0, "inf", 3))
    assert v.norm_estimate["norm_p_power"] == pytest.approx(2 * math.pi**2 / 3, rel=1e-6)
    assert v.norm_estimate["norm"] == pytest.approx((2 * math.pi**2 / 3) ** (1 / 3), rel=1e-6)


CORPUS = ([("Vg", g, None, 2, "inf") for g, _, _ in INTO_INF]
          + [("Vg", g, None, "inf", p) for g in ([1], [0, 1], [1, 2], [0, 0, 1], [0, 0, 0, 1])
             for p in (1.5, 2, 3)]
          + [("Cpsi", None, [0, a], "inf", p) for a in (0.3, 0.9, 1.0, 1.1) for p in (1, 2)])


@pytest.mark.parametrize("kind,g,psi,source,target", CORPUS)
def test_polynomial_corpus_agreement(kind, g, psi, source, target):
    op = OperatorSpec(kind, g=polynomial(g) if g else None, psi=Poly(psi) if psi else None)
    assert cross_validate(op, SpacePair.of(1.0, source, target))["agreement"]


def test_corpus_size():
    assert len(CORPUS) == 30


@pytest.mark.parametrize("kind,g,psi,source,target,bounded,compact", [
    ("Vg", [1, 5], None, 2, "inf", "yes", "yes"),
    ("Cpsi", None, [1, 0.5], "inf", 1, "yes", "yes"),
    ("VgPsi", [0, 0, 1], [0, 1], 2, "inf", "yes", "no"),
    ("VgPsi", [0, 1], [0, 0, 1], 1, "inf", "no", "no"),
    ("uCpsi", None, [0, 0.5], "inf", 2, "yes", "yes"),
])
def test_documented_examples(kind, g, psi, source, target, bounded, compact):
    op = OperatorSpec(kind, g=polynomial(g) if g else None, psi=Poly(psi) if psi else None,
                      u=ExpPoly.constant(1.0) if kind == "uCpsi" else None)
    v = classify(op, SpacePair.of(1.0, source, target))
    assert (v.bounded, v.compact) == (bounded, compact)
