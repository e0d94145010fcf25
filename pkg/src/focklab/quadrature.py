"""Certified integration and supremum search over the complex plane.

Integrands are nonnegative and supplied in the log domain together with an
envelope ``exp(log_c - beta r^2 + gamma r) (1 + r)^(-kappa)`` valid for
``r = |z - center| >= r0``. The envelope fixes the truncation radius and
gives a closed-form bound on the discarded tail; the interior is integrated
with Gauss-Legendre panels in radius and the trapezoid rule in angle, both
refined together until two successive levels agree.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.special import erfcx

from .symbols import ExpPoly

LOG_HUGE = math.log(1e300)
GL_ORDER = 8
UNIFORM_RADIUS = 16.0
BASE_PANELS = 8
MAX_LEVEL = 5
ALGEBRAIC_REACH = 1e8

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


class QuadratureError(ArithmeticError):
    """Base class for numerical failures in this package."""


class EnvelopeError(QuadratureError):
    """The integrand has no envelope certifying a finite integral."""


class AccuracyError(QuadratureError):
    """Refinement stopped before reaching the requested tolerance."""

    def __init__(self, message, estimate=math.nan, error_bound=math.inf):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class UnboundedError(QuadratureError):
    """Values exceeded 1e300 while scanning for a supremum."""

    def __init__(self, message, profile=()):
        super().__init__(message)
        self.profile = list(profile)


class IndeterminateError(QuadratureError):
    """A divergence probe met neither the convergence nor the divergence test."""

    def __init__(self, message, partial_sums=()):
        super().__init__(message)
        self.partial_sums = list(partial_sums)


@dataclass(frozen=True)
class QuadSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_radius: float = 40.0
    base_rings: int = 64

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.max_radius >= 1:
            raise ValueError("max_radius must be at least 1")
        if self.base_rings < 8:
            raise ValueError("base_rings must be at least 8")

    @classmethod
    def from_env(cls, **overrides) -> QuadSpec:
        env = os.environ.get("FOCKLAB_MAX_RADIUS")
        if env and "max_radius" not in overrides:
            overrides["max_radius"] = float(env)
        return cls(**overrides)

    def loosened(self, rel_tol: float) -> QuadSpec:
        return replace(self, rel_tol=max(self.rel_tol, rel_tol))


@dataclass(frozen=True)
class Envelope:
    """Bound ``F(z) <= exp(log_c - beta r^2 + gamma r) * (1 + r)^(-kappa)``.

    ``r`` is measured from the integrand's center and the bound holds for
    ``r >= r0``. ``beta = -inf`` marks "no usable bound".
    """

    log_c: float
    beta: float
    gamma: float = 0.0
    kappa: float = 0.0
    r0: float = 0.0

    @classmethod
    def none(cls) -> Envelope:
        return cls(math.inf, -math.inf)

    @classmethod
    def zero(cls) -> Envelope:
        return cls(-math.inf, 1.0)

    @property
    def is_zero(self) -> bool:
        return self.log_c == -math.inf

    @property
    def certified(self) -> bool:
        """Whether the tail integral of the bound is finite."""
        if self.is_zero:
            return True
        if self.beta > 0:
            return True
        if self.beta == 0:
            return self.gamma < 0 or (self.gamma == 0 and self.kappa > 2)
        return False

    @property
    def bounded(self) -> bool:
        """Whether the bound itself stays finite as ``r -> inf``."""
        if self.is_zero:
            return True
        if self.beta > 0:
            return True
        if self.beta == 0:
            return self.gamma < 0 or (self.gamma == 0 and self.kappa >= 0)
        return False

    def __mul__(self, other: Envelope) -> Envelope:
        if self.is_zero or other.is_zero:
            return Envelope.zero()
        return Envelope(
            self.log_c + other.log_c,
            self.beta + other.beta,
            self.gamma + other.gamma,
            self.kappa + other.kappa,
            max(self.r0, other.r0),
        )

    def scaled(self, log_factor: float) -> Envelope:
        return replace(self, log_c=self.log_c + log_factor)

    def log_bound(self, r):
        r = np.asarray(r, dtype=float)
        if self.is_zero:
            return np.full(r.shape, -np.inf)
        with np.errstate(over="ignore", invalid="ignore"):
            return self.log_c - self.beta * r**2 + self.gamma * r - self.kappa * np.log1p(r)

    def tail(self, R: float) -> float:
        """Closed-form bound on the integral of the envelope over ``|z| > R``."""
        if self.is_zero:
            return 0.0
        R = max(R, self.r0)
        if not self.certified:
            return math.inf
        log_c, gamma = self.log_c, self.gamma
        if self.kappa >= 0:
            log_c -= self.kappa * math.log1p(R)
        else:
            # (1+r)^m <= (1+R)^m exp(m (r - R) / (1 + R)) for r >= R, m > 0
            m = -self.kappa
            log_c += m * math.log1p(R) - m * R / (1 + R)
            gamma += m / (1 + R)
        if self.beta > 0:
            b = self.beta
            mid = gamma / (2 * b)
            x = math.sqrt(b) * (R - mid)
            if x > 0:
                core = 1 / (2 * b) + mid * math.sqrt(math.pi / b) / 2 * erfcx(x)
                log_t = log_c + b * mid**2 - x * x
            else:
                core = (math.exp(-x * x) / (2 * b)
                        + mid * math.sqrt(math.pi / b) / 2 * math.erfc(x))
                log_t = log_c + b * mid**2
            if core <= 0:
                return 0.0
            return _safe_exp(math.log(2 * math.pi * core) + log_t)
        if gamma < 0:
            g = -gamma
            return _safe_exp(math.log(2 * math.pi) + log_c - g * R
                             + math.log(R / g + 1 / g**2))
        # beta == gamma == 0, kappa > 2: int_R^inf r (1+r)^-k dr <= (1+R)^(2-k)/(k-2)
        k = self.kappa
        return _safe_exp(math.log(2 * math.pi) + self.log_c
                         + (2 - k) * math.log1p(R) - math.log(k - 2))

    def radius_for_tail(self, target: float, r_max: float) -> float:
        """Smallest radius (capped at ``r_max``) whose tail bound is below ``target``."""
        lo = max(self.r0, 0.0)
        if self.is_zero or self.tail(lo) <= target:
            return lo
        if not self.certified or self.tail(r_max) > target:
            return r_max
        hi = r_max
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.tail(mid) <= target:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-6 * max(1.0, hi):
                break
        return hi

    def to_json(self) -> dict:
        return {"log_c": self.log_c, "beta": self.beta, "gamma": self.gamma,
                "kappa": self.kappa, "r0": self.r0}


def _safe_exp(x: float) -> float:
    if x > 709:
        return math.inf
    return math.exp(x)


def exppoly_envelope(f: ExpPoly, power: float = 1.0, gauss: float = 0.0,
                     decay: float = 0.0) -> Envelope:
    """Envelope of ``|f(z)|^power * exp(gauss |z|^2) * (1 + |z|)^(-decay)``.

    Uses ``log|p| <= log(sum|p_k|) + deg(p) log(1 + r)`` and bounds
    ``Re q(z)`` term by term; any exponent term of degree three or more
    makes the integrand super-Gaussian in some sector, so no envelope exists.
    """
    if f.is_zero():
        return Envelope.zero()
    s = power
    q = f.q
    if q.degree() >= 3:
        return Envelope.none()
    log_c = s * (math.log(f.p.abs_coeff_sum()) + q.coeff(0).real)
    beta = -gauss - s * abs(q.coeff(2))
    gamma = s * abs(q.coeff(1))
    kappa = decay - s * max(f.p.degree(), 0)
    return Envelope(log_c, beta, gamma, kappa)


@dataclass(frozen=True)
class EnvelopedIntegrand:
    """Nonnegative integrand ``exp(log_eval(z))`` with a certified envelope."""

    log_eval: Callable[[np.ndarray], np.ndarray]
    envelope: Envelope
    center: complex = 0j
    description: str = ""

    def __call__(self, z):
        return np.exp(self.log_eval(np.asarray(z, dtype=complex)))

    def spot_check(self, n: int = 64, seed: int = 0) -> float:
        """Largest violation (log ratio) of the envelope on ``r0 <= r <= 4 r0``."""
        if self.envelope.is_zero or not math.isfinite(self.envelope.log_c):
            return 0.0
        rng = np.random.default_rng(seed)
        r_lo = max(self.envelope.r0, 1.0)
        r = rng.uniform(r_lo, 4 * r_lo, n)
        th = rng.uniform(0, 2 * np.pi, n)
        z = self.center + r * np.exp(1j * th)
        vals = self.log_eval(z) - self.envelope.log_bound(r)
        vals = vals[np.isfinite(vals)]
        return float(vals.max()) if vals.size else -math.inf


# ---------------------------------------------------------------------------
# polar rules


def _breakpoints(radius: float, level: int, extra: Sequence[float] = ()) -> np.ndarray:
    n = BASE_PANELS * 2**level
    r_u = min(radius, UNIFORM_RADIUS)
    pts = list(np.linspace(0.0, r_u, n + 1))
    if radius > r_u:
        ratio = 1.25 ** (1.0 / 2**level)
        r = r_u
        while r * ratio < radius:
            r *= ratio
            pts.append(r)
        pts.append(radius)
    pts.extend(e for e in extra if 0 < e < radius)
    return np.unique(np.asarray(pts))


def polar_panels(center: complex, radius: float, level: int, extra: Sequence[float] = ()):
    """Yield ``(nodes, weights)`` for each radial panel of the disc rule."""
    bps = _breakpoints(radius, level, extra)
    for a, b in zip(bps[:-1], bps[1:]):
        width = b - a
        if width <= 0:
            continue
        r = 0.5 * (a + b) + 0.5 * width * _GL_X
        wr = 0.5 * width * _GL_W * r
        m = int(min(2**15, max(16, 4 * math.ceil(25.0 * b / width / 4))))
        th = 2 * np.pi * np.arange(m) / m
        z = center + np.outer(r, np.exp(1j * th))
        w = np.repeat(wr * (2 * np.pi / m), m).reshape(len(r), m)
        yield z.ravel(), w.ravel()


def _log_disc_integral(log_eval, center, radius, level, extra=()):
    """``log`` of the polar-rule integral over the disc; ``-inf`` for zero."""
    logs = []
    for z, w in polar_panels(center, radius, level, extra):
        lv = np.asarray(log_eval(z), dtype=float)
        lv = np.where(np.isnan(lv), -np.inf, lv)
        mx = lv.max()
        if mx == -np.inf:
            continue
        if mx == np.inf:
            return math.inf
        s = math.fsum(w * np.exp(lv - mx))
        if s > 0:
            logs.append(mx + math.log(s))
    return _logsumexp(logs)


def _logsumexp(logs) -> float:
    logs = [x for x in logs if x != -math.inf]
    if not logs:
        return -math.inf
    mx = max(logs)
    if mx == math.inf:
        return math.inf
    return mx + math.log(math.fsum(math.exp(x - mx) for x in logs))


def _converge(fn, spec: QuadSpec, what: str):
    """Run ``fn(level)`` (returning a log value) until two levels agree."""
    prev = fn(0)
    for level in range(1, MAX_LEVEL + 1):
        cur = fn(level)
        if cur == -math.inf and prev == -math.inf:
            return 0.0, 0.0
        if not math.isfinite(cur):
            return cur, math.inf
        v_cur = _safe_exp(cur)
        v_prev = _safe_exp(prev) if math.isfinite(prev) else 0.0
        diff = abs(v_cur - v_prev)
        if math.isinf(v_cur):
            # compare in the log domain for huge values
            if abs(cur - prev) <= spec.rel_tol:
                return math.inf, math.inf
        elif diff <= spec.rel_tol * abs(v_cur) + spec.abs_tol:
            return v_cur, diff
        prev = cur
    raise AccuracyError(f"{what}: no convergence after {MAX_LEVEL} refinements",
                        estimate=_safe_exp(cur), error_bound=diff)


def polar_rule(center: complex, radius: float, level: int, extra: Sequence[float] = ()):
    """All nodes and weights of the disc rule at one refinement level."""
    zs, ws = zip(*polar_panels(center, radius, level, extra))
    return np.concatenate(zs), np.concatenate(ws)


def integrate_disc(F: EnvelopedIntegrand, radius: float, spec: QuadSpec,
                   extra_breaks: Sequence[float] = ()) -> tuple[float, float]:
    """Integral over ``|z - center| <= radius`` with its refinement error."""
    return _converge(
        lambda lv: _log_disc_integral(F.log_eval, F.center, radius, lv, extra_breaks),
        spec, F.description or "disc integral")


def integrate_plane(F: EnvelopedIntegrand, spec: QuadSpec | None = None,
                    extra_breaks: Sequence[float] = (),
                    rule_center: complex | None = None) -> tuple[float, float]:
    """Integral of ``F`` over the plane and a bound on its total error.

    The truncation radius is the smallest one whose envelope tail is below
    a tenth of ``abs_tol``, capped at ``max_radius`` (or ``ALGEBRAIC_REACH``
    times that for envelopes without Gaussian decay); the returned error
    bound adds that tail to the last refinement difference. ``rule_center``
    moves the polar rule (enlarging its disc) when the integrand's bulk lies
    far from the envelope's center.
    """
    spec = spec or QuadSpec.from_env()
    env = F.envelope
    if env.is_zero:
        return 0.0, 0.0
    if not env.certified:
        raise EnvelopeError(
            f"{F.description or 'integrand'}: envelope does not certify integrability "
            f"(beta={env.beta}, gamma={env.gamma}, kappa={env.kappa})")
    # geometric outer panels make very large radii cheap for algebraic tails
    cap = spec.max_radius if env.beta > 0 else spec.max_radius * ALGEBRAIC_REACH
    radius = env.radius_for_tail(0.1 * spec.abs_tol, cap)
    radius = max(radius, 1e-300)
    tail = env.tail(radius)
    if rule_center is not None and rule_center != F.center:
        # a disc about rule_center containing the truncation disc
        radius += abs(rule_center - F.center)
        F = replace(F, center=complex(rule_center))
    try:
        value, err = integrate_disc(F, radius, spec, extra_breaks)
    except AccuracyError as exc:
        exc.error_bound += tail
        raise
    return value, err + tail


def integrate_plane_vector(log_mod, phase, envelope: Envelope, spec: QuadSpec,
                           center: complex = 0j) -> tuple[complex, float]:
    """Integral of ``exp(log_mod) * exp(i phase)`` over the plane.

    The complex integrand is split at every node into the positive and
    negative parts of its real and imaginary components (four nonnegative
    accumulators sharing one pass); convergence is judged on the recombined
    complex value.
    """
    if envelope.is_zero:
        return 0j, 0.0
    if not envelope.certified:
        raise EnvelopeError("complex integrand: envelope does not certify integrability")
    radius = envelope.radius_for_tail(0.1 * spec.abs_tol, spec.max_radius)
    tail = envelope.tail(radius)

    def run(level):
        acc = np.zeros(4)
        parts = [[], [], [], []]
        for z, w in polar_panels(center, radius, level):
            lm = np.asarray(log_mod(z), dtype=float)
            ph = np.asarray(phase(z), dtype=float)
            mag = w * np.exp(np.where(np.isfinite(lm), lm, -np.inf))
            c, s = np.cos(ph), np.sin(ph)
            parts[0].append(math.fsum(mag * np.maximum(c, 0)))
            parts[1].append(math.fsum(mag * np.maximum(-c, 0)))
            parts[2].append(math.fsum(mag * np.maximum(s, 0)))
            parts[3].append(math.fsum(mag * np.maximum(-s, 0)))
        for i in range(4):
            acc[i] = math.fsum(parts[i])
        return complex(acc[0] - acc[1], acc[2] - acc[3]), float(acc.sum())

    prev, _ = run(0)
    for level in range(1, MAX_LEVEL + 1):
        cur, total = run(level)
        diff = abs(cur - prev)
        if diff <= spec.rel_tol * max(abs(cur), 1e-300) + spec.abs_tol:
            return cur, diff + tail
        prev = cur
    raise AccuracyError("complex plane integral: no convergence", estimate=cur,
                        error_bound=diff + tail)


# ---------------------------------------------------------------------------
# suprema


@dataclass
class SupResult:
    sup: float
    argmax: complex
    attained_inside: bool
    profile: list = field(default_factory=list)
    limit_estimate: float | None = None

    @property
    def log_sup(self) -> float:
        return math.log(self.sup) if self.sup > 0 else -math.inf


def _golden(fn, a, b, tol=1e-10, max_iter=200):
    """Maximize a unimodal ``fn`` on ``[a, b]``."""
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def _refine_max(log_eval, z0: complex, h: float, rounds: int = 6):
    """Coordinate-wise golden-section ascent in x and y around ``z0``."""
    best = complex(z0)
    f_best = float(log_eval(np.array([best]))[0])
    for _ in range(rounds):
        start = f_best
        x, fx = _golden(lambda x: float(log_eval(np.array([complex(x, best.imag)]))[0]),
                        best.real - h, best.real + h)
        if fx >= f_best:
            best, f_best = complex(x, best.imag), fx
        y, fy = _golden(lambda y: float(log_eval(np.array([complex(best.real, y)]))[0]),
                        best.imag - h, best.imag + h)
        if fy >= f_best:
            best, f_best = complex(best.real, y), fy
        h *= 0.5
        if f_best - start < 1e-14:
            break
    return best, f_best


def _profile_radii(r_max: float, scale: float = 1.0) -> np.ndarray:
    r_u = min(r_max, UNIFORM_RADIUS * scale)
    radii = list(np.linspace(0.0, r_u, 129))
    r = r_u
    while r < r_max:
        r = min(r * 1.03, r_max)
        radii.append(r)
    return np.asarray(radii)


def sup_plane(F: EnvelopedIntegrand, spec: QuadSpec | None = None,
              limit: float | None = None, n_angles: int = 256,
              scan_radius: float | None = None) -> SupResult:
    """Supremum of ``F`` over the plane.

    With a decaying envelope the scan stops where the envelope drops below
    the current maximum. Otherwise the scan runs to ``scan_radius`` (default
    ``max_radius``); ``limit`` is the caller's value of ``F`` at infinity.
    """
    spec = spec or QuadSpec.from_env()
    env = F.envelope
    if env.is_zero:
        return SupResult(0.0, F.center, True, [])
    r_max = scan_radius or spec.max_radius
    decaying = env.beta > 0 or (env.beta == 0 and (env.gamma < 0 or env.kappa > 0))
    if decaying:
        peak = max(env.r0, env.gamma / (2 * env.beta) if env.beta > 0 else 0.0) + 1.0
        r_max = min(r_max, max(2 * peak, 4.0))
    radii = _profile_radii(r_max)
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    profile, best_log, best_z = _scan(F, radii, th)
    if decaying:
        # extend until the envelope certifies everything outside is smaller
        while True:
            r_star = _envelope_crossing(env, best_log, radii[-1])
            if r_star <= radii[-1] or radii[-1] >= 64 * spec.max_radius:
                break
            more = np.linspace(radii[-1], min(r_star, 64 * spec.max_radius), 65)[1:]
            p2, b2, z2 = _scan(F, more, th)
            profile.extend(p2)
            radii = np.concatenate([radii, more])
            if b2 > best_log:
                best_log, best_z = b2, z2
    if best_log > LOG_HUGE:
        raise UnboundedError("values exceed 1e300", profile)
    if best_log > -math.inf:
        h = max(radii[1] - radii[0], 2 * np.pi * max(abs(best_z - F.center), 1e-3) / n_angles)
        best_z, best_log = _refine_max(F.log_eval, best_z, h)
    vals = [v for _, v in profile]
    tail = vals[-min(len(vals), 8):]
    at_edge = abs(abs(best_z - F.center) - radii[-1]) <= 2 * (radii[-1] - radii[-2])
    monotone = all(b >= a for a, b in zip(tail, tail[1:]))
    attained = not (at_edge and monotone)
    lim_est = None
    if not attained and len(vals) > 2:
        # M(R) ~ L - c/R: extrapolate from the last two radii
        r1, r2 = profile[-2][0], profile[-1][0]
        v1, v2 = vals[-2], vals[-1]
        lim_est = (r2 * v2 - r1 * v1) / (r2 - r1) if r2 > r1 else v2
    sup = _safe_exp(best_log) if best_log > -math.inf else 0.0
    if limit is not None:
        attained = sup >= limit * (1 - 1e-12)
        sup = max(sup, limit)
    return SupResult(sup, best_z, attained, profile, lim_est)


def _scan(F, radii, th):
    best_log, best_z = -math.inf, F.center
    profile = []
    ring = np.exp(1j * th)
    for r in radii:
        z = F.center + r * ring
        lv = np.asarray(F.log_eval(z), dtype=float)
        lv = np.where(np.isnan(lv), -np.inf, lv)
        k = int(np.argmax(lv))
        profile.append((float(r), _safe_exp(float(lv[k]))))
        if lv[k] > best_log:
            best_log, best_z = float(lv[k]), complex(z[k])
        if r == 0:
            continue
    return profile, best_log, best_z


def _envelope_crossing(env: Envelope, log_level: float, r_start: float) -> float:
    """Radius beyond which the envelope stays below ``exp(log_level)``."""
    if log_level == -math.inf:
        return math.inf
    r = max(r_start, env.r0)
    rs = np.linspace(r, r + 1e4, 200001)
    lb = env.log_bound(rs)
    above = np.nonzero(lb >= log_level)[0]
    if above.size == 0:
        return r
    return float(rs[min(above[-1] + 1, len(rs) - 1)])


# ---------------------------------------------------------------------------
# divergence probe


@dataclass
class ProbeResult:
    status: str  # "convergent" or "divergent"
    value: float
    error_bound: float = 0.0
    growth_exponent: float | None = None
    growth_kind: str | None = None
    partial_sums: list = field(default_factory=list)

    @property
    def convergent(self) -> bool:
        return self.status == "convergent"

    def to_json(self) -> dict:
        return {"status": self.status, "value": self.value, "error_bound": self.error_bound,
                "growth_exponent": self.growth_exponent, "growth_kind": self.growth_kind,
                "partial_sums": [[r, v] for r, v in self.partial_sums]}


def classify_partial_sums(radii: Sequence[float], log_sums: Sequence[float],
                          envelope: Envelope, spec: QuadSpec,
                          quad_errors: Sequence[float] | None = None,
                          tails: Sequence[float] | None = None) -> ProbeResult:
    """Decide convergence from partial integrals ``I(R_k)`` given as logs.

    ``tails[k]`` bounds ``I(inf) - I(R_k)``; by default it is the envelope
    tail outside ``R_k``.
    """
    radii = list(radii)
    log_sums = list(log_sums)
    sums = [_safe_exp(x) for x in log_sums]
    partial = list(zip(radii, sums))
    quad_errors = list(quad_errors or [0.0] * len(radii))
    tails = list(tails) if tails is not None else [envelope.tail(r) for r in radii]
    if all(x == -math.inf for x in log_sums):
        return ProbeResult("convergent", 0.0, 0.0, partial_sums=partial)
    last = sums[-1]
    tail = tails[-1]
    if all(math.isfinite(t) for t in tails):
        incr = [b - a for a, b in zip(sums, sums[1:])]
        slack = [t * (1 + 1e-6) + e1 + e2 + spec.abs_tol + spec.rel_tol * abs(b)
                 for t, e1, e2, b in zip(tails, quad_errors, quad_errors[1:], sums[1:])]
        if all(d <= s for d, s in zip(incr, slack)):
            return ProbeResult("convergent", last, tail + quad_errors[-1], partial_sums=partial)
    rel_incr = [abs(b - a) / max(abs(b), 1e-300) for a, b in zip(sums, sums[1:])]
    if rel_incr and rel_incr[-1] <= spec.rel_tol and tail <= max(spec.abs_tol, spec.rel_tol * last):
        return ProbeResult("convergent", last, tail + quad_errors[-1], partial_sums=partial)
    thresh = math.log1p(10 * spec.rel_tol)
    grow = [b == math.inf or (a != math.inf and b - a > thresh)
            for a, b in zip(log_sums, log_sums[1:])]
    if any(a and b for a, b in zip(grow, grow[1:])):
        expo, kind = _growth(radii, sums, log_sums)
        return ProbeResult("divergent", math.inf, math.inf, expo, kind, partial)
    raise IndeterminateError("partial integrals neither settle nor grow", partial)


def _growth(radii, sums, log_sums):
    r1, r2 = radii[-2], radii[-1]
    l1, l2 = log_sums[-2], log_sums[-1]
    if not (math.isfinite(l1) and math.isfinite(l2)):
        return math.inf, "super-polynomial"
    expo = (l2 - l1) / math.log(r2 / r1)
    kind = "power"
    if len(sums) >= 3 and all(math.isfinite(s) for s in sums[-3:]):
        d1 = (sums[-2] - sums[-3]) / math.log(radii[-2] / radii[-3])
        d2 = (sums[-1] - sums[-2]) / math.log(radii[-1] / radii[-2])
        if expo < 0.5 and d1 > 0 and 0.5 <= d2 / d1 <= 2.0:
            kind = "logarithmic"
    if expo > 20:
        kind = "super-polynomial"
    return expo, kind


def probe_radii(spec: QuadSpec) -> list[float]:
    """Default probe radii: doublings up to ``max_radius``, then decades."""
    m = spec.max_radius
    return [m / 8, m / 4, m / 2, m, 2.5 * m, 25 * m, 250 * m]


def divergence_probe(F: EnvelopedIntegrand, radii: Sequence[float],
                     spec: QuadSpec | None = None) -> ProbeResult:
    """Partial integrals over discs ``|z - center| <= R_k`` and a verdict.

    Convergent when the envelope certifies a finite tail consistent with
    the increments (or increments fall below ``rel_tol`` with a negligible
    tail); divergent when two consecutive ratios ``I(R_{k+1}) / I(R_k)``
    exceed ``1 + 10 rel_tol``; otherwise :class:`IndeterminateError`.
    """
    spec = spec or QuadSpec.from_env()
    radii = [float(r) for r in radii]
    if len(radii) < 3 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing with at least 3 entries")
    logs, errs = [], []
    for R in radii:
        try:
            v, e = integrate_disc(F, R, spec)
        except AccuracyError as exc:
            v, e = exc.estimate, exc.error_bound
        logs.append(math.log(v) if v > 0 else (-math.inf if v == 0 else math.inf))
        errs.append(e)
    return classify_partial_sums(radii, logs, F.envelope, spec, errs)


# ---------------------------------------------------------------------------
# segments


def integrate_segment(f: Callable, a: complex, b: complex, tol: float = 1e-12,
                      max_doublings: int = 14) -> complex:
    """``int_a^b f(w) dw`` along the straight segment.

    Composite 16-point Gauss-Legendre with the number of panels doubled
    until successive estimates agree to ``tol`` (relative, floored at 1).
    """
    a, b = complex(a), complex(b)
    if a == b:
        return 0j
    x, wt = np.polynomial.legendre.leggauss(16)
    d = b - a

    def estimate(n_panels):
        edges = np.linspace(0.0, 1.0, n_panels + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 / n_panels
        t = (mids[:, None] + half * x[None, :]).ravel()
        vals = np.asarray(f(a + t * d), dtype=complex)
        return d * half * complex(np.sum(np.tile(wt, n_panels) * vals))

    prev = estimate(1)
    for k in range(1, max_doublings + 1):
        cur = estimate(2**k)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise AccuracyError("segment integral did not converge", estimate=cur,
                        error_bound=abs(cur - prev))
