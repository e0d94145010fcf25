"""Criterion functions for the operator kinds.

Three weights cover every kind:

``B``  weight ``|g'(z)| / (1 + |z|)``                 (``V_(g,psi)``, ``V_g``)
``M``  weight ``|g'(psi(z)) psi'(z)| / (1 + |z|)``    (``C_(psi,g)``)
``U``  weight ``|u(z)|``                              (``u C_psi``, ``C_psi``)

From a weight we build the pointwise function
``weight(z) exp(alpha/2 (|psi(z)|^2 - |z|^2))``, the Berezin-type transform
``int |k_w(psi(z))|^p weight(z)^p exp(-p alpha |z|^2 / 2) dm(z)`` and its total
mass over ``w``. The Berezin integrand is evaluated in its completed-square
form ``exp(p alpha/2 (|psi|^2 - |z|^2 - |w - psi|^2)) weight^p`` by default;
the kernel form is kept for cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .quadrature import (AccuracyError, Envelope, EnvelopedIntegrand, ProbeResult,
                         QuadSpec, SupResult, UnboundedError, divergence_probe,
                         exppoly_envelope, integrate_plane, probe_radii, sup_plane)
from .symbols import ExpPoly, FockParams, Poly, as_complex, kernel

KIND_WEIGHT = {"binf": "B", "minf": "M", "uinf": "U", "bp": "B", "mp": "M", "up": "U"}


def _abs2(z):
    return np.real(z) ** 2 + np.imag(z) ** 2


def psi_square_envelope(psi: Poly, c: float) -> Envelope:
    """Envelope of ``exp(c |psi(z)|^2)`` for ``c > 0``."""
    if psi.degree() <= 0:
        return Envelope(c * abs(psi.coeff(0)) ** 2, 0.0)
    if psi.degree() == 1:
        a, b = abs(psi.coeff(1)), abs(psi.coeff(0))
        return Envelope(c * b * b, -c * a * a, 2 * c * a * b)
    return Envelope.none()


@dataclass(frozen=True)
class Weight:
    """``|symbol(z)| (1 + |z|)^(-decay)`` together with the map ``psi``."""

    kind: str
    symbol: ExpPoly
    decay: float
    psi: Poly

    @classmethod
    def build(cls, kind: str, psi: Poly, g: ExpPoly | None = None,
              u: ExpPoly | None = None) -> Weight:
        if kind == "B":
            return cls("B", g.derivative(), 1.0, psi)
        if kind == "M":
            return cls("M", g.derivative().compose(psi) * ExpPoly(psi.derivative()), 1.0, psi)
        if kind == "U":
            return cls("U", u, 0.0, psi)
        raise ValueError(f"unknown weight kind {kind!r}")

    @property
    def vanishes(self) -> bool:
        return self.symbol.is_zero()

    def log_weight(self, z):
        out = self.symbol.log_modulus(z)
        if self.decay:
            out = out - self.decay * np.log1p(np.abs(z))
        return out

    def log_pointwise(self, z, alpha):
        z = np.asarray(z, dtype=complex)
        return self.log_weight(z) + alpha / 2 * (_abs2(self.psi(z)) - _abs2(z))

    def pointwise_envelope(self, alpha) -> Envelope:
        return (exppoly_envelope(self.symbol, 1.0, -alpha / 2, self.decay)
                * psi_square_envelope(self.psi, alpha / 2))

    def log_berezin(self, z, w, p, alpha, form="squared"):
        z = np.asarray(z, dtype=complex)
        if form == "kernel":
            kw = kernel(w, alpha, normalized=True).compose(self.psi)
            return p * (kw.log_modulus(z) + self.log_weight(z)) - p * alpha / 2 * _abs2(z)
        ps = self.psi(z)
        return (p * self.log_weight(z)
                + p * alpha / 2 * (_abs2(ps) - _abs2(z) - _abs2(w - ps)))

    def berezin_envelope(self, w, p, alpha) -> Envelope:
        kw = kernel(w, alpha, normalized=True).compose(self.psi)
        return exppoly_envelope(kw * self.symbol, p, -p * alpha / 2, p * self.decay)

    def log_mass(self, z, p, alpha):
        z = np.asarray(z, dtype=complex)
        return p * self.log_weight(z) + p * alpha / 2 * (_abs2(self.psi(z)) - _abs2(z))

    def mass_envelope(self, p, alpha) -> Envelope:
        return (exppoly_envelope(self.symbol, p, -p * alpha / 2, p * self.decay)
                * psi_square_envelope(self.psi, p * alpha / 2))


@dataclass
class CriterionProfile:
    kind: str
    params: dict
    radial_profile: list = field(default_factory=list)
    verdict_inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        radii = [r for r, _ in self.radial_profile]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radial profile radii must be strictly increasing")
        if any(v < 0 for _, v in self.radial_profile):
            raise ValueError("profile values must be nonnegative")

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params,
                "radial_profile": [[r, v] for r, v in self.radial_profile],
                "verdict_inputs": self.verdict_inputs}


# ---------------------------------------------------------------------------
# pointwise criteria


def _pointwise(weight: Weight, alpha: float, z):
    lv = weight.log_pointwise(z, alpha)
    out = np.exp(lv)
    return out if np.ndim(out) else float(out)


def binf_pointwise(g: ExpPoly, psi: Poly, alpha: float, z):
    """``|g'(z)| / (1+|z|) exp(alpha/2 (|psi(z)|^2 - |z|^2))``."""
    return _pointwise(Weight.build("B", psi, g=g), alpha, z)


def minf_pointwise(g: ExpPoly, psi: Poly, alpha: float, z):
    """``|g'(psi(z)) psi'(z)| / (1+|z|) exp(alpha/2 (|psi(z)|^2 - |z|^2))``."""
    return _pointwise(Weight.build("M", psi, g=g), alpha, z)


def uinf_pointwise(u: ExpPoly, psi: Poly, alpha: float, z):
    """``|u(z)| exp(alpha/2 (|psi(z)|^2 - |z|^2))``."""
    return _pointwise(Weight.build("U", psi, u=u), alpha, z)


def log_criterion(weight: Weight, alpha: float):
    return lambda z: weight.log_pointwise(z, alpha)


def criterion_sup(weight: Weight, alpha: float, spec: QuadSpec | None = None,
                  scan_radius: float | None = None) -> SupResult:
    """Supremum of the pointwise criterion, with its radial profile.

    Raises :class:`UnboundedError` when the scan exceeds ``1e300``.
    """
    spec = spec or QuadSpec.from_env()
    if weight.vanishes:
        return SupResult(0.0, 0j, True, [])
    F = EnvelopedIntegrand(log_criterion(weight, alpha), weight.pointwise_envelope(alpha),
                           description=f"{weight.kind}-criterion")
    return sup_plane(F, spec, scan_radius=scan_radius)


# ---------------------------------------------------------------------------
# Berezin-type transforms


def _need_finite(params: FockParams):
    if params.is_infinite:
        raise ValueError("Berezin-type transforms need a finite exponent p")


def _peak(log_eval, radius: float, n: int = 96) -> complex:
    r = np.linspace(0.0, radius, n)
    th = 2 * np.pi * np.arange(n) / n
    z = np.outer(r, np.exp(1j * th)).ravel()
    lv = np.asarray(log_eval(z), dtype=float)
    lv = np.where(np.isnan(lv), -np.inf, lv)
    k = int(np.argmax(lv))
    return complex(z[k]) if np.isfinite(lv[k]) else 0j


def berezin_transform(weight: Weight, params: FockParams, w, spec: QuadSpec | None = None,
                      form: str = "squared"):
    """Value of the Berezin-type transform at ``w`` and its error bound.

    Returns a :class:`ProbeResult` instead when the integrand's envelope
    does not certify a finite integral.
    """
    spec = spec or QuadSpec.from_env()
    _need_finite(params)
    if form not in ("squared", "kernel"):
        raise ValueError("form must be 'squared' or 'kernel'")
    w = as_complex(w)
    p, alpha = params.p, params.alpha
    if weight.vanishes:
        return 0.0, 0.0
    env = weight.berezin_envelope(w, p, alpha)

    def log_eval(z):
        return weight.log_berezin(z, w, p, alpha, form)

    F = EnvelopedIntegrand(log_eval, env, description=f"{weight.kind}-transform at {w}")
    if not env.certified:
        return divergence_probe(F, probe_radii(spec), spec)
    if env.beta > 0:
        # integrate about the bulk of the integrand, which sits near psi^-1(w)
        c = _peak(log_eval, env.radius_for_tail(spec.abs_tol, 4 * spec.max_radius))
        if abs(c) < 3 / math.sqrt(env.beta):
            # bulk overlaps the origin, where |z| has its kink: keep the rule there
            c = None
        else:
            # the truncation radius must reach past the bulk
            spec = replace(spec, max_radius=spec.max_radius + 2 * abs(c))
    else:
        c = None
    try:
        return integrate_plane(F, spec, rule_center=c)
    except AccuracyError as exc:
        return exc.estimate, exc.error_bound


def berezin_B(g: ExpPoly, psi: Poly, params: FockParams, w, spec: QuadSpec | None = None,
              form: str = "squared"):
    return berezin_transform(Weight.build("B", psi, g=g), params, w, spec, form)


def berezin_M(g: ExpPoly, psi: Poly, params: FockParams, w, spec: QuadSpec | None = None,
              form: str = "squared"):
    return berezin_transform(Weight.build("M", psi, g=g), params, w, spec, form)


def u_transform(u: ExpPoly, psi: Poly, params: FockParams, w=None, mode: str = "point",
                spec: QuadSpec | None = None, form: str = "squared"):
    """Weighted-composition analogue: ``|u(z)|`` replaces ``|g'(z)|/(1+|z|)``.

    ``mode='point'`` evaluates the transform at ``w`` (finite ``p``),
    ``mode='sup'`` returns the supremum of the pointwise function.
    """
    weight = Weight.build("U", psi, u=u)
    if mode == "sup":
        return criterion_sup(weight, params.alpha, spec)
    if mode != "point":
        raise ValueError("mode must be 'point' or 'sup'")
    return berezin_transform(weight, params, 0j if w is None else w, spec, form)


def total_mass(weight: Weight, params: FockParams, spec: QuadSpec | None = None) -> ProbeResult:
    """``int transform(w) dm(w)`` reduced to one plane integral.

    Integrating the completed-square Gaussian in ``w`` first leaves
    ``(2 pi / (p alpha)) int exp(p alpha/2 (|psi|^2 - |z|^2)) weight^p dm``.
    Gaussian-decaying integrands are integrated directly; anything else goes
    through the divergence probe.
    """
    spec = spec or QuadSpec.from_env()
    _need_finite(params)
    p, alpha = params.p, params.alpha
    factor = 2 * math.pi / (p * alpha)
    if weight.vanishes:
        return ProbeResult("convergent", 0.0, 0.0)
    env = weight.mass_envelope(p, alpha)
    F = EnvelopedIntegrand(lambda z: weight.log_mass(z, p, alpha), env,
                           description=f"{weight.kind}-mass")
    if env.certified:
        try:
            v, e = integrate_plane(F, spec)
        except AccuracyError as exc:
            v, e = exc.estimate, exc.error_bound
        return ProbeResult("convergent", factor * v, factor * e)
    res = divergence_probe(F, probe_radii(spec), spec)
    if res.convergent:
        res.value *= factor
        res.error_bound *= factor
    res.partial_sums = [(r, factor * s) for r, s in res.partial_sums]
    return res


def _tensor_rule(radius: float, n_r: int, n_t: int):
    x, wx = np.polynomial.legendre.leggauss(n_r)
    r = radius * (x + 1) / 2
    th = 2 * np.pi * np.arange(n_t) / n_t
    z = np.outer(r, np.exp(1j * th)).ravel()
    w = np.repeat(radius / 2 * wx * r * (2 * np.pi / n_t), n_t)
    return z, w


def total_mass_nested(weight: Weight, params: FockParams, spec: QuadSpec | None = None,
                      sizes=((40, 48), (56, 72))) -> tuple[float, float]:
    """``int transform(w) dm(w)`` by genuinely nested quadrature.

    Only for integrands with a Gaussian-decaying mass envelope; used to
    cross-check :func:`total_mass`. Two tensor Gauss-Legendre/trapezoid
    rule sizes are compared for the error estimate; the inner rule is
    shared by all outer nodes.
    """
    spec = spec or QuadSpec.from_env()
    _need_finite(params)
    p, alpha = params.p, params.alpha
    env = weight.mass_envelope(p, alpha)
    if not env.beta > 0:
        raise ValueError("nested total mass needs a Gaussian-decaying envelope")
    r_in = env.radius_for_tail(1e-3 * spec.abs_tol, spec.max_radius)
    a = abs(weight.psi.coeff(1)) if weight.psi.degree() >= 1 else 0.0
    b = abs(weight.psi.coeff(0))
    r_out = a * r_in + b + math.sqrt(2 * 40 / (p * alpha))
    values = []
    for n_r, n_t in sizes:
        zi, wi = _tensor_rule(r_in, n_r, n_t)
        base = weight.log_mass(zi, p, alpha)
        keep = np.isfinite(base)
        zi, wi, base = zi[keep], wi[keep], base[keep]
        psi_i = weight.psi(zi)
        shift = base.max()
        inner_w = wi * np.exp(base - shift)
        zo, wo = _tensor_rule(r_out, n_r, n_t)
        total = 0.0
        for lo in range(0, len(zo), 512):
            d2 = _abs2(zo[lo:lo + 512, None] - psi_i[None, :])
            total += math.fsum(wo[lo:lo + 512] * (np.exp(-p * alpha / 2 * d2) @ inner_w))
        values.append(total * math.exp(shift))
    return values[-1], abs(values[-1] - values[0])


def radial_profile_of(weight: Weight, alpha: float, radii, n_angles: int = 256) -> list:
    """Max of the pointwise criterion on each circle ``|z| = r``."""
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    ring = np.exp(1j * th)
    out = []
    for r in radii:
        lv = weight.log_pointwise(r * ring, alpha)
        m = float(np.max(lv))
        out.append((float(r), math.exp(m) if m < 709 else math.inf))
    return out


__all__ = [
    "Weight", "CriterionProfile", "binf_pointwise", "minf_pointwise", "uinf_pointwise",
    "berezin_B", "berezin_M", "berezin_transform", "u_transform", "total_mass",
    "total_mass_nested", "criterion_sup", "radial_profile_of", "psi_square_envelope",
    "UnboundedError",
]
