"""Fock-Carleson measures for the embedding of ``F^inf`` into ``L^p``.

A measure ``mu`` is a (inf, p) Fock-Carleson measure when
``int |f|^p exp(-p alpha |z|^2 / 2) dmu <= C ||f||_inf^p``. For such
embeddings four quantities are finite together or not at all:

* the total mass ``mu(C)``;
* ``int mu~_(t, alpha) dm`` where ``mu~_(t, alpha)(w) = int exp(-(alpha t/2)|z - w|^2) dmu(z)``;
* ``int mu(D(w, r)) dm(w)``;
* ``sum_k mu(D(z_k, r))`` over a covering lattice.

Each quantity is computed from partial integrals over growing discs
``D(0, R)``, using a different inner formula for each so that the four
computations are genuinely independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import chndtr

from .quadrature import (AccuracyError, Envelope, EnvelopedIntegrand, IndeterminateError,
                         ProbeResult, QuadSpec, classify_partial_sums, exppoly_envelope,
                         integrate_disc, integrate_plane, polar_rule)
from .symbols import ExpPoly, Poly, as_complex


def _abs2(z):
    return np.real(z) ** 2 + np.imag(z) ** 2


@dataclass(frozen=True)
class DensityMeasure:
    """``dmu = density dm`` with ``log_density`` evaluable on arrays."""

    log_density: Callable[[np.ndarray], np.ndarray]
    envelope: Envelope
    center: complex = 0j
    description: str = ""

    def density(self, z):
        return np.exp(self.log_density(np.asarray(z, dtype=complex)))

    def integrand(self, extra_log=None, extra_env: Envelope | None = None,
                  description: str = "") -> EnvelopedIntegrand:
        env = self.envelope if extra_env is None else self.envelope * extra_env
        if extra_log is None:
            fn = self.log_density
        else:
            def fn(z):
                return self.log_density(z) + extra_log(z)
        return EnvelopedIntegrand(fn, env, self.center, description or self.description)

    def scaled(self, c: float) -> DensityMeasure:
        if c < 0:
            raise ValueError("measures must stay nonnegative")
        if c == 0:
            return zero_measure()
        lc = math.log(c)
        return DensityMeasure(lambda z: self.log_density(z) + lc, self.envelope.scaled(lc),
                              self.center, f"{c} * {self.description}")

    @property
    def is_zero(self) -> bool:
        return self.envelope.is_zero


def zero_measure() -> DensityMeasure:
    return DensityMeasure(lambda z: np.full(np.shape(z), -np.inf), Envelope.zero(),
                          description="zero")


def exppoly_power(base: ExpPoly, power: float = 1.0, gauss: float = 0.0,
                  decay: float = 0.0) -> DensityMeasure:
    """Density ``|base(z)|^power exp(gauss |z|^2) (1 + |z|)^(-decay)``."""
    if base.is_zero():
        return zero_measure()

    def log_density(z):
        out = power * base.log_modulus(z) + gauss * _abs2(z)
        if decay:
            out = out - decay * np.log1p(np.abs(z))
        return out

    return DensityMeasure(log_density, exppoly_envelope(base, power, gauss, decay),
                          description=f"|{base!r}|^{power} exp({gauss}|z|^2) (1+|z|)^-{decay}")


def lebesgue() -> DensityMeasure:
    return DensityMeasure(lambda z: np.zeros(np.shape(z)), Envelope(0.0, 0.0),
                          description="lebesgue")


def algebraic(s: float) -> DensityMeasure:
    """Density ``(1 + |z|)^(-s)``."""
    return DensityMeasure(lambda z: -s * np.log1p(np.abs(z)), Envelope(0.0, 0.0, 0.0, s),
                          description=f"(1+|z|)^-{s}")


def gaussian(center=0j, width: float = 1.0, mass: float = 1.0) -> DensityMeasure:
    """``mass / (pi width^2) exp(-|z - center|^2 / width^2)``: total mass ``mass``.

    Narrow widths approximate a point mass at ``center``.
    """
    if not (width > 0 and mass > 0):
        raise ValueError("gaussian measure needs positive width and mass")
    c = as_complex(center)
    lc = math.log(mass / (math.pi * width**2))
    b = 1 / width**2
    return DensityMeasure(lambda z: lc - b * _abs2(z - c), Envelope(lc, b), c,
                          f"gaussian(center={c}, width={width}, mass={mass})")


def pullback(g: ExpPoly, a, b, p: float, alpha: float) -> DensityMeasure:
    """Pullback density for ``psi(w) = a w + b`` with ``a != 0``.

    ``density(z) = |g'(w)|^p (1+|w|)^-p exp(p alpha/2 (|z|^2 - |w|^2)) / |a|^2``
    at ``w = psi^-1(z)``, so that ``int h dmu = int h(psi(w)) |g'(w)|^p
    (1+|w|)^-p exp(p alpha/2 (|psi(w)|^2 - |w|^2)) dm(w)``.
    """
    a, b = as_complex(a), as_complex(b)
    if a == 0:
        raise ValueError("pullback needs an invertible linear map (a != 0)")
    dg = g.derivative()
    if dg.is_zero():
        return zero_measure()
    inv = Poly([-b / a, 1 / a])
    h = dg.compose(inv)
    la, lb = abs(a), abs(b)
    log_a2 = 2 * math.log(la)

    def log_density(z):
        z = np.asarray(z, dtype=complex)
        w = inv(z)
        return (p * h.log_modulus(z) - p * np.log1p(np.abs(w))
                + p * alpha / 2 * (_abs2(z) - _abs2(w)) - log_a2)

    # -|w|^2 <= -(|z|^2 - 2|b||z|)/|a|^2; for |z| >= 2|b|: 1+|w| >= min(1, 1/(2|a|)) (1+|z|)
    c = p * alpha / 2
    env = exppoly_envelope(h, p) * Envelope(
        -log_a2 - p * math.log(min(1.0, 1 / (2 * la))),
        -c * (1 - 1 / la**2), 2 * c * lb / la**2, float(p), 2 * lb)
    return DensityMeasure(log_density, env,
                          description=f"pullback(g={g!r}, psi={a}w+{b}, p={p}, alpha={alpha})")


def measure_from_json(data: dict) -> DensityMeasure:
    """Build a measure from its JSON description.

    Kinds: ``exppoly_power`` (``base``, ``power``, ``gauss``, ``decay``),
    ``pullback`` (``g``, ``psi_linear`` = [a, b], ``p``, ``alpha``),
    ``gaussian`` (``center``, ``width``, ``mass``), ``lebesgue``,
    ``algebraic`` (``s``). An optional ``scale`` multiplies any of them.
    """
    kind = data.get("kind")
    if kind == "exppoly_power":
        mu = exppoly_power(ExpPoly.from_json(data["base"]), float(data.get("power", 1.0)),
                           float(data.get("gauss", 0.0)), float(data.get("decay", 0.0)))
    elif kind == "pullback":
        a, b = (_complex_json(x) for x in data["psi_linear"])
        mu = pullback(ExpPoly.from_json(data["g"]), a, b, float(data["p"]),
                      float(data["alpha"]))
    elif kind == "gaussian":
        mu = gaussian(_complex_json(data.get("center", 0)), float(data.get("width", 1.0)),
                      float(data.get("mass", 1.0)))
    elif kind == "lebesgue":
        mu = lebesgue()
    elif kind == "algebraic":
        mu = algebraic(float(data["s"]))
    else:
        raise ValueError(f"unknown measure kind {kind!r}")
    if "scale" in data:
        mu = mu.scaled(float(data["scale"]))
    return mu


def _complex_json(x) -> complex:
    if isinstance(x, (list, tuple)):
        return as_complex(complex(float(x[0]), float(x[1])))
    return as_complex(x)


# ---------------------------------------------------------------------------
# lattice


SPACING_RATIO = 0.6


@dataclass
class LatticeCovering:
    spacing: float
    cover_radius: float
    points: np.ndarray
    N_max: int
    truncation_radius: float

    def check_cover(self, n: int = 4000, seed: int = 0) -> float:
        """Largest distance from a sample point of the region to the lattice."""
        rng = np.random.default_rng(seed)
        rad = self.truncation_radius * np.sqrt(rng.uniform(0, 1, n))
        z = rad * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        tree = cKDTree(np.column_stack([self.points.real, self.points.imag]))
        d, _ = tree.query(np.column_stack([z.real, z.imag]))
        return float(d.max())

    def min_separation(self) -> float:
        tree = cKDTree(np.column_stack([self.points.real, self.points.imag]))
        d, _ = tree.query(np.column_stack([self.points.real, self.points.imag]), k=2)
        return float(d[:, 1].min())


def _overlap_count(d: float, r: float, n: int = 41) -> int:
    """Max number of lattice points within distance ``< r`` of a point of one cell."""
    k = int(math.ceil(r / d)) + 1
    i, j = np.meshgrid(np.arange(-k, k + 2), np.arange(-k, k + 2))
    lat = d * (i.ravel() + 1j * j.ravel())
    s = np.linspace(0, d, n)
    x, y = np.meshgrid(s, s)
    pts = (x + 1j * y).ravel()
    dist = np.abs(pts[:, None] - lat[None, :])
    return int((dist < r).sum(axis=1).max())


def build_lattice(r: float, truncation_radius: float) -> LatticeCovering:
    """Square lattice of spacing ``0.6 r`` with points in ``|z| <= T + r``.

    Cover by ``D(z_k, r/2)`` needs spacing ``<= r / sqrt(2)``, disjointness of
    ``D(z_k, r/4)`` needs spacing ``> r/2``; ``0.6 r`` meets both.
    """
    if not r > 0:
        raise ValueError(f"cover radius must be positive, got {r}")
    if not truncation_radius > 0:
        raise ValueError("truncation radius must be positive")
    d = SPACING_RATIO * r
    reach = truncation_radius + r
    k = int(math.ceil(reach / d))
    i, j = np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1), indexing="ij")
    pts = d * (i.ravel() + 1j * j.ravel())
    pts = pts[np.abs(pts) <= reach]
    # deterministic order: by modulus, then argument
    order = np.lexsort((np.angle(pts), np.round(np.abs(pts), 12)))
    return LatticeCovering(d, r, pts[order], _overlap_count(d, r), truncation_radius)


def _disc_rule(n_r: int, n_t: int):
    x, wx = np.polynomial.legendre.leggauss(n_r)
    rr = (x + 1) / 2
    th = 2 * np.pi * (np.arange(n_t) + 0.5) / n_t
    nodes = np.outer(rr, np.exp(1j * th)).ravel()
    weights = np.repeat(wx / 2 * rr * (2 * np.pi / n_t), n_t)
    return nodes, weights


def disc_masses(mu: DensityMeasure, centers, radius: float,
                sizes=((12, 24), (20, 40))) -> tuple[np.ndarray, np.ndarray]:
    """``mu(D(c, radius))`` for each center and a per-disc error estimate.

    Two tensor rules on the disc are compared; densities here are smooth on
    the scale of the disc.
    """
    centers = np.asarray(centers, dtype=complex)
    out = []
    for n_r, n_t in sizes:
        nodes, weights = _disc_rule(n_r, n_t)
        nodes = nodes * radius
        weights = weights * radius**2
        vals = np.empty(len(centers))
        for lo in range(0, len(centers), 2048):
            blk = centers[lo:lo + 2048]
            with np.errstate(over="ignore"):
                dens = np.exp(mu.log_density((blk[:, None] + nodes[None, :]).ravel()))
            vals[lo:lo + 2048] = dens.reshape(len(blk), -1) @ weights
        out.append(vals)
    with np.errstate(invalid="ignore"):
        errs = np.abs(out[-1] - out[0])
    return out[-1], np.where(np.isfinite(out[-1]), errs, np.inf)


# ---------------------------------------------------------------------------
# t-Berezin transform


def _t_gauss_envelope(a: float, w: complex) -> Envelope:
    # -a|z - w|^2 <= -a|z|^2 + 2a|w||z| - a|w|^2
    return Envelope(-a * abs(w) ** 2, a, 2 * a * abs(w))


def t_berezin(mu: DensityMeasure, t: float, alpha: float, w,
              spec: QuadSpec | None = None) -> tuple[float, float]:
    """``mu~_(t, alpha)(w) = int exp(-(alpha t / 2)|z - w|^2) dmu(z)`` with error."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    spec = spec or QuadSpec.from_env()
    w = as_complex(w)
    if mu.is_zero:
        return 0.0, 0.0
    a = alpha * t / 2
    F = mu.integrand(lambda z: -a * _abs2(z - w), _t_gauss_envelope(a, w - mu.center),
                     "t-Berezin transform")
    try:
        return integrate_plane(F, spec)
    except AccuracyError as exc:
        return exc.estimate, exc.error_bound


def t_berezin_many(mu: DensityMeasure, t: float, alpha: float, ws,
                   spec: QuadSpec | None = None, level: int = 1) -> np.ndarray:
    """``mu~_(t, alpha)`` at many points with one shared rule for ``mu``."""
    spec = spec or QuadSpec.from_env()
    ws = np.asarray(ws, dtype=complex)
    if mu.is_zero:
        return np.zeros(len(ws))
    if not mu.envelope.certified:
        raise ValueError("shared-rule t-Berezin transform needs a finite measure")
    a = alpha * t / 2
    cap = spec.max_radius if mu.envelope.beta > 0 else 1e3 * spec.max_radius
    R = mu.envelope.radius_for_tail(1e-3 * spec.abs_tol, cap)
    z, wt = polar_rule(mu.center, R, level)
    ld = mu.log_density(z)
    keep = np.isfinite(ld)
    z, wt = z[keep], wt[keep] * np.exp(ld[keep])
    out = np.empty(len(ws))
    for lo in range(0, len(ws), 64):
        blk = ws[lo:lo + 64]
        out[lo:lo + 64] = np.exp(-a * _abs2(blk[:, None] - z[None, :])) @ wt
    return out


# ---------------------------------------------------------------------------
# partial integrals of the four quantities


def lens_area(R: float, r: float, d):
    """Area of ``D(0, R) ∩ D(x, r)`` for ``|x| = d`` (vectorized in ``d``)."""
    d = np.asarray(d, dtype=float)
    out = np.zeros_like(d)
    inside = d <= abs(R - r)
    out[inside] = math.pi * min(R, r) ** 2
    mid = (~inside) & (d < R + r)
    dm = d[mid]
    c1 = np.clip((dm**2 + R**2 - r**2) / (2 * dm * R), -1, 1)
    c2 = np.clip((dm**2 + r**2 - R**2) / (2 * dm * r), -1, 1)
    k = (-dm + R + r) * (dm + R - r) * (dm - R + r) * (dm + R + r)
    out[mid] = R**2 * np.arccos(c1) + r**2 * np.arccos(c2) - 0.5 * np.sqrt(np.maximum(k, 0))
    return out


def _log_or_inf(v):
    return math.log(v) if v > 0 else -math.inf


def _tail(env: Envelope, R: float) -> float:
    return env.tail(max(R, 0.0)) if env.certified else math.inf


@dataclass
class QuantityRun:
    name: str
    result: ProbeResult | None
    indeterminate: bool = False

    @property
    def status(self) -> str:
        return "indeterminate" if self.indeterminate else self.result.status

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.result is not None:
            out.update(self.result.to_json())
            out["status"] = self.status
        return out


def _run(name, radii, partial, tails, env, spec) -> QuantityRun:
    logs, errs = [], []
    for R in radii:
        v, e = partial(R)
        logs.append(_log_or_inf(v))
        errs.append(e)
    try:
        return QuantityRun(name, classify_partial_sums(radii, logs, env, spec, errs, tails))
    except IndeterminateError as exc:
        res = ProbeResult("indeterminate", math.nan, math.inf,
                          partial_sums=list(exc.partial_sums))
        return QuantityRun(name, res, indeterminate=True)


def _disc(F, R, spec, extra=()):
    try:
        return integrate_disc(F, R, spec, extra)
    except AccuracyError as exc:
        return exc.estimate, exc.error_bound


def total_mass_run(mu, radii, spec) -> QuantityRun:
    c = abs(mu.center)
    F = mu.integrand(description="total mass")
    # disc about the measure's center of radius R - |c| lies inside D(0, R)
    return _run("mass", radii, lambda R: _disc(F, max(R - c, 1e-12), spec),
                [_tail(mu.envelope, R - c) for R in radii], mu.envelope, spec)


def berezin_mass_run(mu, t, alpha, radii, spec, mass_bound) -> QuantityRun:
    """Partial integrals ``int_(D(0,R)) mu~_(t, alpha) dm``.

    The inner integral over ``D(0, R)`` of the Gaussian is a noncentral
    chi-square probability, so each partial integral is one plane integral.
    """
    a = alpha * t / 2
    c = abs(mu.center)
    scale = math.pi / a

    def partial(R):
        def extra(z):
            with np.errstate(divide="ignore"):
                return math.log(scale) + np.log(chndtr(2 * a * R * R, 2, 2 * a * _abs2(z)))
        # P(|W| <= R) <= exp(-a (|z| - R)^2) for |z| >= R, in coordinates about the center
        Rc = R + c
        genv = Envelope(math.log(scale) - a * Rc * Rc, a, 2 * a * Rc, 0.0, Rc)
        F = mu.integrand(extra, genv, "t-Berezin mass")
        h = 1 / math.sqrt(a)
        breaks = [R + k * h for k in (-4, -2, 0, 2, 4)]
        try:
            if F.envelope.certified:
                return integrate_plane(F, spec, breaks)
            return integrate_disc(F, Rc + 12 * h, spec, breaks)
        except AccuracyError as exc:
            return exc.estimate, exc.error_bound

    def tail(R):
        half = _tail(mu.envelope, R / 2 - c)
        return scale * (half + mass_bound * math.exp(-a * R * R / 4))

    return _run(f"t_berezin_mass(t={t})", radii, partial, [tail(R) for R in radii],
                mu.envelope, spec)


def disc_average_run(mu, r, radii, spec) -> QuantityRun:
    """Partial integrals ``int_(D(0,R)) mu(D(w, r)) dm(w) = int |D(0,R) ∩ D(z,r)| dmu``."""
    c = abs(mu.center)

    def partial(R):
        def extra(z):
            with np.errstate(divide="ignore"):
                return np.log(lens_area(R, r, np.abs(z)))
        F = mu.integrand(extra, description="disc-average mass")
        return _disc(F, R + r + c, spec, [R - r - c, R + r - c, R - c])

    tails = [math.pi * r * r * _tail(mu.envelope, R - r - c) for R in radii]
    return _run(f"disc_average(r={r})", radii, partial, tails, mu.envelope, spec)


def lattice_run(mu, lat: LatticeCovering, radii, spec) -> QuantityRun:
    masses, errs = disc_masses(mu, lat.points, lat.cover_radius)
    mods = np.abs(lat.points)

    def partial(R):
        sel = mods <= R
        return math.fsum(masses[sel]), math.fsum(errs[sel])

    c = abs(mu.center)
    tails = [lat.N_max * _tail(mu.envelope, R - lat.cover_radius - c) for R in radii]
    return _run(f"lattice_sum(r={lat.cover_radius})", radii, partial, tails,
                mu.envelope, spec)


def carleson_radii(spec: QuadSpec) -> list[float]:
    m = spec.max_radius
    return [m / 8, m / 4, m / 2, m]


@dataclass
class CarlesonVerdict:
    verdict: str  # "carleson", "not_carleson", "mixed" or "inconclusive"
    quantities: dict
    ratios: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    criterion: str = ("(inf,p) Fock-Carleson: total mass, integrated t-Berezin transform, "
                      "integrated disc averages and lattice disc sums finite together")

    @property
    def is_carleson(self) -> bool | None:
        return {"carleson": True, "not_carleson": False}.get(self.verdict)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "criterion": self.criterion, "params": self.params,
                "quantities": {k: v.to_json() for k, v in self.quantities.items()},
                "ratios": self.ratios}


def carleson_verdict(mu: DensityMeasure, p: float, alpha: float, t: float = 1.0,
                     r: float = 1.0, spec: QuadSpec | None = None) -> CarlesonVerdict:
    """Compute the four quantities and the (inf, p) Fock-Carleson verdict.

    The verdict does not depend on ``p``: every quantity is ``p``-free, which
    is the content of the equivalence for embeddings from ``F^inf``.
    """
    if not (p > 0 and t > 0 and r > 0 and alpha > 0):
        raise ValueError("p, alpha, t and r must be positive")
    spec = spec or QuadSpec.from_env(rel_tol=1e-7)
    radii = carleson_radii(spec)
    q = {}
    q["mass"] = total_mass_run(mu, radii, spec)
    m = q["mass"].result
    mass_bound = m.value + m.error_bound if m.convergent else math.inf
    q["t_berezin"] = berezin_mass_run(mu, t, alpha, radii, spec, mass_bound)
    q["disc_average"] = disc_average_run(mu, r, radii, spec)
    q["lattice"] = lattice_run(mu, build_lattice(r, radii[-1]), radii, spec)
    statuses = {v.status for v in q.values()}
    if "indeterminate" in statuses:
        verdict = "inconclusive"
    elif statuses == {"convergent"}:
        verdict = "carleson"
    elif statuses == {"divergent"}:
        verdict = "not_carleson"
    else:
        verdict = "mixed"
    ratios = {}
    if verdict == "carleson":
        vals = {k: v.result.value for k, v in q.items()}
        for a, b in combinations(sorted(vals), 2):
            ratios[f"{a}/{b}"] = vals[a] / vals[b] if vals[b] > 0 else (
                1.0 if vals[a] == 0 else math.inf)
    params = {"p": p, "alpha": alpha, "t": t, "r": r, "radii": radii,
              "measure": mu.description}
    return CarlesonVerdict(verdict, q, ratios, params)


def embedding_norm_bounds(mu: DensityMeasure, p: float, alpha: float,
                          lat: LatticeCovering, spec: QuadSpec | None = None
                          ) -> tuple[float, float]:
    """Two-sided estimate of ``||I_mu||^p`` for ``I_mu: F^inf -> L^p(mu)``.

    Lower: the largest ``int |k_w|^p exp(-p alpha |z|^2/2) dmu = mu~_(p, alpha)(w)``
    over lattice points ``w`` (normalized kernels have unit ``F^inf`` norm).
    Upper: ``sum_k mu(D(z_k, r))``, which dominates ``mu(C)`` because the
    discs cover the plane; ``|f|^p exp(-p alpha |z|^2/2) <= ||f||_inf^p``
    makes ``mu(C)`` an upper bound.
    """
    spec = spec or QuadSpec.from_env()
    if mu.is_zero:
        return 0.0, 0.0
    if not mu.envelope.certified:
        raise ValueError("embedding bounds need a Carleson (finite) measure")
    lower = float(np.max(t_berezin_many(mu, p, alpha, lat.points, spec)))
    masses, errs = disc_masses(mu, lat.points, lat.cover_radius)
    upper = math.fsum(masses) + math.fsum(errs)
    upper += lat.N_max * _tail(mu.envelope, lat.truncation_radius - abs(mu.center))
    return lower, upper


__all__ = [
    "DensityMeasure", "LatticeCovering", "CarlesonVerdict", "QuantityRun",
    "exppoly_power", "lebesgue", "algebraic", "gaussian", "pullback", "zero_measure",
    "measure_from_json", "build_lattice", "disc_masses", "t_berezin", "t_berezin_many",
    "lens_area", "carleson_verdict", "embedding_norm_bounds", "carleson_radii",
]
