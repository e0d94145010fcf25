import math

import numpy as np
import pytest

from focklab.quadrature import (Envelope, EnvelopedIntegrand, IndeterminateError, QuadSpec,
                                classify_partial_sums, divergence_probe, integrate_disc,
                                integrate_plane, integrate_segment, probe_radii, sup_plane)


def _abs2(z):
    return np.abs(z) ** 2


def gaussian(beta=1.0, center=0j):
    return EnvelopedIntegrand(lambda z: -beta * _abs2(z - center), Envelope(0.0, beta),
                              center=center)


@pytest.mark.parametrize("beta", [0.25, 1.0, 4.0])
def test_gaussian_integral(beta):
    v, err = integrate_plane(gaussian(beta))
    assert v == pytest.approx(math.pi / beta, rel=1e-10)
    assert err < 1e-8 * v


def test_off_center_rule_matches_centered():
    c = 7 - 3j
    v, _ = integrate_plane(gaussian(2.0, c))
    assert v == pytest.approx(math.pi / 2, rel=1e-10)


def test_disc_integral_closed_form():
    # int_{|z|<R} exp(-|z|^2) = pi (1 - exp(-R^2))
    v, _ = integrate_disc(gaussian(), 1.5, QuadSpec())
    assert v == pytest.approx(math.pi * (1 - math.exp(-2.25)), rel=1e-10)


@pytest.mark.parametrize("s", [2.5, 3.0, 4.0])
def test_algebraic_tail_integral(s):
    # int (1+|z|)^-s dm = 2 pi / ((s-1)(s-2))
    F = EnvelopedIntegrand(lambda z: -s * np.log1p(np.abs(z)), Envelope(0.0, 0.0, 0.0, s))
    v, err = integrate_plane(F, QuadSpec(rel_tol=1e-7))
    exact = 2 * math.pi / ((s - 1) * (s - 2))
    # slow tails are truncated and the reported bound must cover the loss
    assert abs(v - exact) <= err * (1 + 1e-6)
    if s >= 3:
        assert v == pytest.approx(exact, rel=1e-6)


@pytest.mark.parametrize("env,certified", [
    (Envelope(0.0, 1.0), True), (Envelope(0.0, 0.0, -1.0), True),
    (Envelope(0.0, 0.0, 0.0, 3.0), True), (Envelope(0.0, 0.0, 0.0, 2.0), False),
    (Envelope(0.0, -0.5), False), (Envelope.zero(), True), (Envelope.none(), False)])
def test_envelope_certification(env, certified):
    assert env.certified is certified


def test_envelope_tail_bounds_true_tail():
    env = Envelope(0.0, 1.0)
    for R in (1.0, 2.0, 4.0):
        assert env.tail(R) >= math.pi * math.exp(-R * R) * (1 - 1e-12)


@pytest.mark.parametrize("s,kind", [(2.0, "logarithmic"), (1.0, "power"), (0.0, "power")])
def test_divergence_probe_flags_growth(s, kind):
    F = EnvelopedIntegrand(lambda z: -s * np.log1p(np.abs(z)), Envelope(0.0, 0.0, 0.0, s))
    spec = QuadSpec(rel_tol=1e-7)
    res = divergence_probe(F, probe_radii(spec), spec)
    assert res.status == "divergent"
    assert res.growth_kind == kind
    assert res.growth_exponent == pytest.approx(2 - s, abs=0.3)


def test_divergence_probe_accepts_convergent():
    spec = QuadSpec()
    res = divergence_probe(gaussian(), probe_radii(spec), spec)
    assert res.convergent
    assert res.value == pytest.approx(math.pi, rel=1e-9)


def test_partial_sums_without_trend_are_indeterminate():
    radii = [1.0, 2.0, 4.0, 8.0]
    logs = [0.0, 0.5, 0.4, 0.6]
    with pytest.raises(IndeterminateError):
        classify_partial_sums(radii, logs, Envelope.none(), QuadSpec())


def test_max_radius_env_override(monkeypatch):
    monkeypatch.setenv("FOCKLAB_MAX_RADIUS", "25")
    assert QuadSpec.from_env().max_radius == 25.0
    assert QuadSpec.from_env(max_radius=12).max_radius == 12.0
    monkeypatch.delenv("FOCKLAB_MAX_RADIUS")
    assert QuadSpec.from_env().max_radius == QuadSpec().max_radius


@pytest.mark.parametrize("kw", [{"rel_tol": 0}, {"abs_tol": -1}, {"max_radius": 0.5},
                                {"base_rings": 4}])
def test_quadspec_validation(kw):
    with pytest.raises(ValueError):
        QuadSpec(**kw)


def test_sup_plane_finds_interior_max():
    # |z| exp(-|z|^2/2) peaks at |z| = 1 with value exp(-1/2)
    F = EnvelopedIntegrand(lambda z: np.log(np.abs(z) + 1e-300) - _abs2(z) / 2,
                           Envelope(0.0, 0.5, 0.0, -1.0))
    res = sup_plane(F)
    assert res.sup == pytest.approx(math.exp(-0.5), rel=1e-8)
    assert abs(res.argmax) == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("b", [1.0, 2 + 1j, -3j])
def test_segment_integral_of_exponential(b):
    v = integrate_segment(lambda w: np.exp(w), 0, b)
    assert v == pytest.approx(np.exp(b) - 1, rel=1e-12)
