"""Norms, inner products and derivative descriptions of Fock spaces."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quadrature import (AccuracyError, EnvelopedIntegrand, QuadSpec, UnboundedError,
                         exppoly_envelope, integrate_plane, integrate_plane_vector,
                         sup_plane)
from .symbols import ExpPoly, FockParams, Poly, as_complex


@dataclass
class NormReport:
    value: float
    error_bound: float
    params: FockParams
    converged: bool = True

    def __post_init__(self):
        if self.value < 0 or self.error_bound < 0:
            raise ValueError("norm and error bound must be nonnegative")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def to_json(self) -> dict:
        return {"value": self.value, "error_bound": self.error_bound,
                "params": self.params.to_json(), "converged": self.converged,
                "finite": self.finite}


def _abs2(z):
    return np.real(z) ** 2 + np.imag(z) ** 2


def weighted_integral(f: ExpPoly, p: float, alpha: float, spec: QuadSpec,
                      decay: float = 0.0) -> tuple[float, float, bool]:
    """``int |f|^p (1+|z|)^(-decay) exp(-p alpha |z|^2 / 2) dm`` with error.

    Returns ``(value, error_bound, converged)``; ``value`` is ``inf`` when
    no envelope certifies integrability.
    """
    env = exppoly_envelope(f, p, -p * alpha / 2, decay)
    if env.is_zero:
        return 0.0, 0.0, True
    if not env.certified:
        return math.inf, math.inf, True

    def log_eval(z):
        out = p * f.log_modulus(z) - (p * alpha / 2) * _abs2(z)
        if decay:
            out = out - decay * np.log1p(np.abs(z))
        return out

    F = EnvelopedIntegrand(log_eval, env, description="weighted Fock integral")
    try:
        v, e = integrate_plane(F, spec)
        return v, e, True
    except AccuracyError as exc:
        return exc.estimate, exc.error_bound, False


def weighted_sup(f: ExpPoly, alpha: float, spec: QuadSpec, decay: float = 0.0) -> float:
    """``sup |f(z)| (1+|z|)^(-decay) exp(-alpha |z|^2 / 2)``; ``inf`` if unbounded."""
    env = exppoly_envelope(f, 1.0, -alpha / 2, decay)
    if env.is_zero:
        return 0.0
    if not env.bounded:
        return math.inf

    def log_eval(z):
        out = f.log_modulus(z) - (alpha / 2) * _abs2(z)
        if decay:
            out = out - decay * np.log1p(np.abs(z))
        return out

    try:
        return sup_plane(EnvelopedIntegrand(log_eval, env), spec).sup
    except UnboundedError:
        return math.inf


def _unit_scale(f: ExpPoly) -> tuple[float, ExpPoly]:
    """``(c, f / c)`` with ``c`` the largest prefactor coefficient modulus."""
    if f.is_zero():
        return 0.0, f
    c = float(np.max(np.abs(f.p.coeffs)))
    return c, ExpPoly(f.p * Poly([1 / c]), f.q)


def fock_norm(f: ExpPoly, params: FockParams, spec: QuadSpec | None = None) -> NormReport:
    """``||f||_(p, alpha)`` with the normalization that makes ``||1|| = 1``."""
    spec = spec or QuadSpec.from_env()
    # normalize the prefactor so that the quadrature layout, and hence the
    # result, is exactly homogeneous in scalar multiples of f
    c, unit = _unit_scale(f)
    if c not in (0.0, 1.0):
        rep = fock_norm(unit, params, spec)
        return NormReport(c * rep.value, c * rep.error_bound, params, rep.converged)
    alpha, p = params.alpha, params.p
    if params.is_infinite:
        s = weighted_sup(f, alpha, spec)
        return NormReport(s, 0.0 if math.isinf(s) else 1e-12 * s, params)
    integral, err, ok = weighted_integral(f, p, alpha, spec)
    if math.isinf(integral):
        return NormReport(math.inf, math.inf, params, ok)
    scale = alpha * p / (2 * math.pi)
    value = (scale * integral) ** (1 / p)
    if integral > 0:
        hi = (scale * (integral + err)) ** (1 / p)
        lo = (scale * max(integral - err, 0.0)) ** (1 / p)
        err_n = max(hi - value, value - lo)
    else:
        err_n = (scale * err) ** (1 / p)
    return NormReport(value, err_n, params, ok)


def inner_product(f: ExpPoly, g: ExpPoly, alpha: float,
                  spec: QuadSpec | None = None) -> complex:
    """``(alpha/pi) int f conj(g) exp(-alpha |z|^2) dm``."""
    spec = spec or QuadSpec.from_env()
    # same normalization as fock_norm: abs_tol then acts on a unit scale
    cf, f = _unit_scale(f)
    cg, g = _unit_scale(g)
    if cf == 0 or cg == 0:
        return 0j
    env = exppoly_envelope(f * g, 1.0, -alpha)

    def log_mod(z):
        return f.log_modulus(z) + g.log_modulus(z) - alpha * _abs2(z)

    def phase(z):
        return f.argument(z) - g.argument(z)

    value, _ = integrate_plane_vector(log_mod, phase, env, spec)
    return cf * cg * alpha / math.pi * value


@dataclass
class PointwiseReport:
    worst_ratio: float
    worst_point: complex
    violations: int
    norm: NormReport

    def to_json(self) -> dict:
        return {"worst_ratio": self.worst_ratio,
                "worst_point": [self.worst_point.real, self.worst_point.imag],
                "violations": self.violations, "norm": self.norm.to_json()}


def pointwise_bound_check(f: ExpPoly, params: FockParams, sample: Sequence,
                          spec: QuadSpec | None = None, tol: float = 1e-8,
                          norm: NormReport | None = None) -> PointwiseReport:
    """Compare ``|f(z)| exp(-alpha |z|^2 / 2)`` with ``||f||_(p, alpha)`` on a sample."""
    spec = spec or QuadSpec.from_env(rel_tol=1e-11, abs_tol=1e-14)
    norm = norm or fock_norm(f, params, spec)
    if not norm.finite:
        raise ValueError("pointwise bound needs a finite norm")
    z = np.array([as_complex(s) for s in sample])
    lv = f.log_modulus(z) - params.alpha / 2 * _abs2(z)
    if norm.value == 0:
        ratios = np.where(np.isfinite(lv), np.inf, 0.0)
    else:
        ratios = np.exp(lv - math.log(norm.value))
    k = int(np.argmax(ratios))
    return PointwiseReport(float(ratios[k]), complex(z[k]),
                           int(np.sum(ratios > 1 + tol)), norm)


def derivative_norm(value_at_zero: complex, df: ExpPoly, params: FockParams,
                    spec: QuadSpec | None = None) -> tuple[float, float]:
    """Norm of a function described through its value at 0 and derivative.

    Finite ``p``: ``(|f(0)|^p + (alpha p / 2 pi) int |f'|^p (1+|z|)^-p
    exp(-p alpha |z|^2/2) dm)^(1/p)``; ``p = inf``: ``|f(0)| + sup |f'|
    (1+|z|)^-1 exp(-alpha |z|^2/2)``. Comparable to the Fock norm with
    constants depending only on ``p`` and ``alpha``.
    """
    spec = spec or QuadSpec.from_env()
    alpha, p = params.alpha, params.p
    f0 = abs(complex(value_at_zero))
    if params.is_infinite:
        s = weighted_sup(df, alpha, spec, decay=1.0)
        return f0 + s, 1e-12 * (f0 + s)
    integral, err, _ = weighted_integral(df, p, alpha, spec, decay=p)
    if math.isinf(integral):
        return math.inf, math.inf
    scale = alpha * p / (2 * math.pi)
    total = f0**p + scale * integral
    value = total ** (1 / p)
    err_n = abs((total + scale * err) ** (1 / p) - value) if total > 0 else 0.0
    return value, err_n


def derivative_equivalence_ratio(f: ExpPoly, params: FockParams,
                                 spec: QuadSpec | None = None) -> float:
    """Norm side over derivative side (``p``-th powers for finite ``p``)."""
    spec = spec or QuadSpec.from_env()
    lhs = fock_norm(f, params, spec).value
    rhs, _ = derivative_norm(complex(f(0.0)), f.derivative(), params, spec)
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        raise ValueError("function is not in the space")
    if params.is_infinite:
        return lhs / rhs
    return (lhs / rhs) ** params.p
