"""Boundedness and compactness verdicts for the five operator kinds.

Two independent routes:

* symbolic: closed-form rules for polynomial symbols (``V_g`` and ``C_psi``);
* numeric: the pointwise criterion and its limit for targets ``F^inf``, the
  total mass of the Berezin-type transform for sources ``F^inf``, and the
  ``M``-transform for ``C_(psi,g)`` between finite exponents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import OperatorSpec
from .quadrature import IndeterminateError, ProbeResult, QuadSpec, UnboundedError, \
    classify_partial_sums
from .symbols import ExpPoly, FockParams, Poly, parse_exponent
from .transforms import Weight, berezin_transform, criterion_sup, total_mass

YES, NO, UNKNOWN = "yes", "no", "indeterminate"
LOG_HUGE = math.log(1e300)


class OutOfScope(ValueError):
    """The (kind, pair) combination is not covered by the requested route."""


@dataclass(frozen=True)
class SpacePair:
    source: FockParams
    target: FockParams

    def __post_init__(self):
        if self.source.alpha != self.target.alpha:
            raise ValueError("source and target must share the weight alpha")

    @classmethod
    def of(cls, alpha: float, source, target) -> SpacePair:
        return cls(FockParams(alpha, parse_exponent(source)),
                   FockParams(alpha, parse_exponent(target)))

    @property
    def alpha(self) -> float:
        return self.source.alpha

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json()}


@dataclass
class Verdict:
    bounded: str
    compact: str
    rule: str
    numeric_evidence: dict = field(default_factory=dict)
    criterion_value: float | None = None
    norm_estimate: dict | None = None
    symbolic: dict | None = None
    numeric: dict | None = None
    agreement: bool | None = None

    def __post_init__(self):
        for v in (self.bounded, self.compact):
            if v not in (YES, NO, UNKNOWN):
                raise ValueError(f"verdict values are yes/no/indeterminate, got {v!r}")
        if self.compact == YES and self.bounded != YES:
            raise ValueError("a compact operator must be bounded")

    @property
    def indeterminate(self) -> bool:
        return UNKNOWN in (self.bounded, self.compact)

    def summary(self) -> dict:
        return {"bounded": self.bounded, "compact": self.compact, "rule": self.rule}

    def to_json(self) -> dict:
        return {"bounded": self.bounded, "compact": self.compact, "rule": self.rule,
                "numeric_evidence": self.numeric_evidence,
                "criterion_value": self.criterion_value,
                "norm_estimate": self.norm_estimate, "symbolic": self.symbolic,
                "numeric": self.numeric, "agreement": self.agreement}


def _yn(flag: bool) -> str:
    return YES if flag else NO


# ---------------------------------------------------------------------------
# symbolic route


def _poly_degree(f: ExpPoly, name: str) -> int:
    if not f.is_polynomial():
        raise OutOfScope(f"symbolic rules need a polynomial {name}")
    d = f.as_poly().degree()
    return -1 if d == -math.inf else int(d)


def classify_symbolic(op: OperatorSpec, pair: SpacePair) -> Verdict:
    """Closed-form verdicts for polynomial symbols.

    ``V_g``, ``F^p -> F^inf``: bounded iff ``deg g <= 2``, compact iff ``deg g <= 1``.
    ``V_g``, ``F^inf -> F^p``: bounded iff compact iff ``g = az + b`` and ``p > 2``
    (``a = 0`` gives the zero operator, bounded for every ``p``).
    ``C_psi``, ``F^inf -> F^p``: bounded iff compact iff ``psi = az + b`` with ``|a| < 1``.
    """
    src, tgt = pair.source, pair.target
    if op.kind == "Vg":
        d = _poly_degree(op.g, "g")
        if tgt.is_infinite:
            return Verdict(_yn(d <= 2), _yn(d <= 1),
                           "polynomial g into F^inf: bounded iff deg g <= 2, "
                           "compact iff deg g <= 1")
        if src.is_infinite:
            ok = d <= 0 or (d == 1 and tgt.p > 2)
            return Verdict(_yn(ok), _yn(ok),
                           "polynomial g from F^inf to F^p: bounded iff compact iff "
                           "g = az + b and p > 2")
    if op.kind == "Cpsi" and src.is_infinite and not tgt.is_infinite:
        psi = op.psi
        ok = psi.degree() <= 0 or (psi.degree() == 1 and abs(psi.coeff(1)) < 1)
        return Verdict(_yn(ok), _yn(ok),
                       "composition from F^inf to F^p: bounded iff compact iff "
                       "psi = az + b with |a| < 1")
    raise OutOfScope(f"no symbolic rule for {op.kind} with this space pair")


# ---------------------------------------------------------------------------
# numeric route


def weight_for(op: OperatorSpec) -> Weight:
    """The criterion weight of an operator."""
    if op.kind == "Vg":
        return Weight.build("B", Poly.identity(), g=op.g)
    if op.kind == "VgPsi":
        return Weight.build("B", op.psi, g=op.g)
    if op.kind == "CpsiG":
        return Weight.build("M", op.psi, g=op.g)
    if op.kind == "Cpsi":
        return Weight.build("U", op.psi, u=ExpPoly.constant(1.0))
    return Weight.build("U", op.psi, u=op.u)


def ring_log_max(log_fn, radii, n_angles: int = 256) -> np.ndarray:
    ring = np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
    out = np.empty(len(radii))
    for k, r in enumerate(radii):
        lv = np.asarray(log_fn(r * ring), dtype=float)
        out[k] = np.max(np.where(np.isnan(lv), -np.inf, lv))
    return out


def growth_status(radii, logs, window: int = 8) -> tuple[str, float]:
    """Classify a radial log-profile as bounded, unbounded or indeterminate.

    Decided by the log-log slope over the last ``window`` radii (about two
    doublings for the default grids): above 0.5 the profile grows like a
    power, below 0.1 it has levelled off or decays.
    """
    logs = np.asarray(logs, dtype=float)
    if np.nanmax(logs) > LOG_HUGE:
        return "unbounded", math.inf
    if np.all(logs == -np.inf):
        return "bounded", -math.inf
    a, b = logs[-window], logs[-1]
    if b == -np.inf:
        return "bounded", -math.inf
    if a == -np.inf:
        return "unbounded", math.inf
    slope = float((b - a) / math.log(radii[-1] / radii[-window]))
    if slope > 0.5:
        return "unbounded", slope
    if slope < 0.1:
        return "bounded", slope
    # a profile creeping up to a finite limit has increments shrinking at
    # least like 1/r; logarithmic growth shrinks them far more slowly
    d = np.diff(logs[-4:])
    step = radii[-1] / radii[-2]
    if len(d) == 3 and np.all(d > 0) and np.all(d[1:] <= d[:-1] / math.sqrt(step)):
        return "bounded", slope
    return "indeterminate", slope


def profile_radii(spec: QuadSpec) -> np.ndarray:
    return np.geomspace(1.0, 4 * spec.max_radius, 33)


def _level_radius(psi: Poly, level: float) -> float:
    """A radius beyond which ``|psi(z)| > level``."""
    n = int(psi.degree())
    lead = abs(psi.coeff(n))
    rest = [abs(psi.coeff(k)) for k in range(n)]
    r = 1.0
    while lead * r**n - sum(c * r**k for k, c in enumerate(rest)) <= level:
        r *= 1.25
    return r


def level_set_maxima(weight: Weight, alpha: float, levels, n_r: int = 160,
                     n_t: int = 256) -> np.ndarray:
    """Log of the max of the criterion on ``{level <= |psi(z)| <= 2 level}``."""
    psi = weight.psi
    th = np.exp(2j * np.pi * np.arange(n_t) / n_t)
    out = []
    for lev in levels:
        if psi.degree() == 1:
            a, b = psi.coeff(1), psi.coeff(0)
            rho = np.linspace(lev / abs(a), 2 * lev / abs(a), n_r)
            z = (-b / a + np.outer(rho, th)).ravel()
        else:
            r_hi = _level_radius(psi, 2 * lev)
            z = np.outer(np.linspace(0, r_hi, 4 * n_r), th).ravel()
            m = np.abs(psi(z))
            z = z[(m >= lev) & (m <= 2 * lev)]
        lv = weight.log_pointwise(z, alpha) if len(z) else np.array([-np.inf])
        lv = np.where(np.isnan(lv), -np.inf, lv)
        out.append(float(np.max(lv)))
    return np.asarray(out)


def limit_status(levels, logs, log_sup: float) -> str:
    """Whether a sequence of level-set maxima tends to zero.

    ``yes``: non-increasing, down by at least 10x overall, and either
    decaying with log-log slope <= -0.5 or already below ``1e-6 sup``.
    ``no``: the last value is at least half the first.
    """
    logs = np.asarray(logs, dtype=float)
    if np.all(logs == -np.inf) or logs[-1] == -np.inf:
        return YES
    if logs[-1] >= logs[0] - math.log(2):
        return NO
    mono = bool(np.all(np.diff(logs) <= 1e-9 * np.maximum(1.0, np.abs(logs[:-1]))))
    drop = logs[0] - logs[-1] >= math.log(10)
    slope = (logs[-1] - logs[-2]) / math.log(levels[-1] / levels[-2])
    small = logs[-1] < log_sup + math.log(1e-6)
    if mono and drop and (slope <= -0.5 or small):
        return YES
    return UNKNOWN


def _into_inf(op: OperatorSpec, pair: SpacePair, spec: QuadSpec) -> Verdict:
    alpha = pair.alpha
    w = weight_for(op)
    rule = ("into F^inf: bounded iff the pointwise criterion is bounded; compact iff it "
            "tends to 0 as |psi(z)| -> inf")
    if w.vanishes:
        return Verdict(YES, YES, rule + " (zero weight)", {"weight": "zero"}, 0.0,
                       {"criterion": 0.0})
    radii = profile_radii(spec)
    # the image of the constant 1 must lie in the target
    pre = Weight(w.kind, w.symbol, w.decay, Poly())
    pre_status, pre_slope = growth_status(radii, ring_log_max(
        lambda z: pre.log_pointwise(z, alpha), radii))
    evidence = {"precheck": {"status": pre_status, "slope": pre_slope}}
    if pre_status == "unbounded":
        return Verdict(NO, NO, rule + " (pre-check: image of 1 not in the target)", evidence)
    logs = ring_log_max(lambda z: w.log_pointwise(z, alpha), radii)
    status, slope = growth_status(radii, logs)
    evidence["profile"] = [[float(r), float(v)] for r, v in zip(radii, logs)]
    evidence["profile_scale"] = "log"
    evidence["tail_slope"] = slope
    if status == "unbounded":
        return Verdict(NO, NO, rule, evidence)
    if status == "indeterminate" or pre_status == "indeterminate":
        return Verdict(UNKNOWN, UNKNOWN, rule, evidence)
    try:
        res = criterion_sup(w, alpha, spec)
    except UnboundedError:
        return Verdict(NO, NO, rule, evidence)
    sup = max(res.sup, res.limit_estimate or 0.0)
    evidence["sup"] = {"value": res.sup, "argmax": [res.argmax.real, res.argmax.imag],
                       "attained_inside": res.attained_inside,
                       "limit_estimate": res.limit_estimate}
    if w.psi.degree() <= 0:
        compact = YES
        evidence["limit"] = "bounded range of psi"
    else:
        levels = spec.max_radius / 8 * 2.0 ** np.arange(5)
        lm = level_set_maxima(w, alpha, levels)
        evidence["level_maxima"] = [[float(a), float(b)] for a, b in zip(levels, lm)]
        compact = limit_status(levels, lm, math.log(sup) if sup > 0 else -math.inf)
    return Verdict(YES, compact, rule, evidence, sup, {"criterion": sup})


def _from_inf(op: OperatorSpec, pair: SpacePair, spec: QuadSpec) -> Verdict:
    p = pair.target.p
    w = weight_for(op)
    rule = ("from F^inf to F^p: bounded iff compact iff the Berezin-type transform "
            "is integrable over the plane")
    try:
        res = total_mass(w, FockParams(pair.alpha, p), spec)
    except IndeterminateError as exc:
        ev = {"total_mass": {"status": "indeterminate",
                             "partial_sums": [list(x) for x in exc.partial_sums]}}
        return Verdict(UNKNOWN, UNKNOWN, rule, ev)
    ev = {"total_mass": res.to_json()}
    if res.convergent:
        return Verdict(YES, YES, rule, ev, res.value,
                       {"norm_p_power": res.value, "norm": res.value ** (1 / p)})
    return Verdict(NO, NO, rule, ev, math.inf)


def transform_profile(w: Weight, params: FockParams, radii, spec: QuadSpec,
                      n_angles: int = 8) -> np.ndarray:
    """Max of the Berezin-type transform over ``n_angles`` points per radius."""
    out = []
    for r in radii:
        best = 0.0
        pts = [0j] if r == 0 else r * np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
        for wpt in pts:
            v = berezin_transform(w, params, wpt, spec)
            val = v.value if isinstance(v, ProbeResult) else v[0]
            best = max(best, val)
            if math.isinf(best):
                break
        out.append(best)
    return np.asarray(out)


def _finite_pair(op: OperatorSpec, pair: SpacePair, spec: QuadSpec) -> Verdict:
    if op.kind != "CpsiG":
        raise OutOfScope(f"{op.kind} between finite exponents is not covered")
    s, t = pair.source.p, pair.target.p
    w = weight_for(op)
    if w.vanishes:
        return Verdict(YES, YES, "zero weight", {"weight": "zero"}, 0.0)
    if s <= t:
        return _finite_up(w, pair, spec)
    return _finite_down(w, pair, spec)


def _finite_up(w: Weight, pair: SpacePair, spec: QuadSpec) -> Verdict:
    q = pair.target.p
    rule = ("C_(psi,g) from F^p to F^q, p <= q: bounded iff M(|g|^q) is bounded, "
            "compact iff it tends to 0")
    params = FockParams(pair.alpha, q)
    radii = np.concatenate([[0.0], spec.max_radius / 16 * 2.0 ** np.arange(5)])
    try:
        vals = transform_profile(w, params, radii, spec)
    except IndeterminateError as exc:
        return Verdict(UNKNOWN, UNKNOWN, rule, {"partial_sums": list(exc.partial_sums)})
    ev = {"transform_profile": [[float(r), float(v)] for r, v in zip(radii, vals)]}
    if not np.all(np.isfinite(vals)):
        return Verdict(NO, NO, rule, ev, math.inf)
    with np.errstate(divide="ignore"):
        logs = np.log(vals[1:])
    status, slope = growth_status(radii[1:], logs, window=3)
    ev["tail_slope"] = slope
    if status != "bounded":
        return Verdict(NO if status == "unbounded" else UNKNOWN,
                       NO if status == "unbounded" else UNKNOWN, rule, ev)
    sup = float(vals.max())
    compact = limit_status(radii[1:], logs, math.log(sup) if sup > 0 else -math.inf)
    return Verdict(YES, compact, rule, ev, sup,
                   {"norm_q_power": sup, "norm": sup ** (1 / q)})


def _tensor(radius, n_r, n_t, inner_radius=0.0):
    """Gauss-Legendre x trapezoid rule on the annulus ``inner_radius <= |z| <= radius``."""
    x, wx = np.polynomial.legendre.leggauss(n_r)
    h = (radius - inner_radius) / 2
    r = inner_radius + h * (x + 1)
    z = np.outer(r, np.exp(2j * np.pi * np.arange(n_t) / n_t)).ravel()
    return z, np.repeat(h * wx * r * (2 * np.pi / n_t), n_t)


def _finite_down(w: Weight, pair: SpacePair, spec: QuadSpec) -> Verdict:
    """``C_(psi,g): F^q -> F^p`` with ``q > p``: ``M(|g|^p)`` in ``L^(q/(q-p))``.

    The transform is evaluated at the nodes of an outer rule with one shared
    inner rule (linear ``psi`` only); tails are extrapolated from the
    increments rather than certified.
    """
    q, p = pair.source.p, pair.target.p
    expo = q / (q - p)
    rule = ("C_(psi,g) from F^q to F^p, q > p: bounded iff compact iff M(|g|^p) "
            "lies in L^(q/(q-p))")
    if w.psi.degree() != 1:
        v0 = berezin_transform(w, FockParams(pair.alpha, p), 0j, spec)
        if isinstance(v0, ProbeResult) and not v0.convergent:
            return Verdict(NO, NO, rule, {"transform_at_0": v0.to_json()}, math.inf)
        return Verdict(UNKNOWN, UNKNOWN, rule + " (non-linear psi not implemented)")
    alpha = pair.alpha
    a, b = abs(w.psi.coeff(1)), abs(w.psi.coeff(0))
    if a > 1:
        return Verdict(NO, NO, rule + " (|a| > 1: transform diverges)", {}, math.inf)
    reach = 8 / math.sqrt(p * alpha)
    radii = [spec.max_radius / 8 * 2**k for k in range(4)]
    logs, errs = [], []
    # partial sums accumulate annuli, so they are nondecreasing by construction
    acc, r_prev = 0.0, 0.0
    env = w.mass_envelope(p, alpha)
    r_env = env.radius_for_tail(1e-3 * spec.abs_tol, 4 * spec.max_radius) \
        if env.beta > 0 else math.inf
    for R in radii:
        rho = min((R + b + reach) / a, r_env)
        n_r = max(32, int(3 * rho * a * math.sqrt(p * alpha)))
        zi, wi = _tensor(rho, n_r, 2 * n_r)
        base = w.log_mass(zi, p, alpha)
        keep = np.isfinite(base)
        zi, wi, base = zi[keep], wi[keep], base[keep]
        psi_i = w.psi(zi)
        shift = float(base.max())
        inner = wi * np.exp(base - shift)
        zo, wo = _tensor(R, 40, 64, r_prev)
        vals = np.empty(len(zo))
        for lo in range(0, len(zo), 256):
            d2 = np.abs(zo[lo:lo + 256, None] - psi_i[None, :]) ** 2
            vals[lo:lo + 256] = np.exp(-p * alpha / 2 * d2) @ inner
        with np.errstate(divide="ignore"):
            lv = expo * (np.log(vals) + shift)
        if lv.max() > 700:
            acc = math.inf
        else:
            acc += math.fsum(wo * np.exp(lv))
        logs.append(math.log(acc) if 0 < acc < math.inf else (math.inf if acc else -math.inf))
        errs.append(0.0)
        r_prev = R
    sums = [math.exp(x) if x < 700 else math.inf for x in logs]
    incr = [y - x for x, y in zip(sums, sums[1:])]
    tails = [math.inf] * len(radii)
    # extrapolated, not certified: trusted only for settled or clearly shrinking increments
    rest = None
    if math.isfinite(sums[-1]) and abs(incr[-1]) <= 1e-6 * sums[-1]:
        rest = abs(incr[-1])
    elif incr[-2] > 0 and 0 <= incr[-1] <= 0.9 * incr[-2]:
        ratio = incr[-1] / incr[-2]
        rest = incr[-1] * ratio / (1 - ratio)
    if rest is not None:
        tails = [abs(sums[-1] - x) + rest for x in sums]
    spec_loose = spec.loosened(1e-6)
    ev = {"partial_sums": [[r, s] for r, s in zip(radii, sums)], "exponent": expo}
    try:
        res = classify_partial_sums(radii, logs, None, spec_loose, errs, tails)
    except IndeterminateError:
        return Verdict(UNKNOWN, UNKNOWN, rule, ev)
    ev["result"] = res.to_json()
    if res.convergent:
        return Verdict(YES, YES, rule, ev, res.value,
                       {"norm_power": res.value, "norm": res.value ** (1 / expo)})
    return Verdict(NO, NO, rule, ev, math.inf)


def classify_numeric(op: OperatorSpec, pair: SpacePair,
                     spec: QuadSpec | None = None) -> Verdict:
    """Numeric verdict from the transform criteria.

    For targets ``F^inf`` the verdict does not depend on the source exponent.
    """
    spec = spec or QuadSpec.from_env()
    if pair.target.is_infinite:
        return _into_inf(op, pair, spec)
    if pair.source.is_infinite:
        return _from_inf(op, pair, spec)
    return _finite_pair(op, pair, spec)


def cross_validate(op: OperatorSpec, pair: SpacePair,
                   spec: QuadSpec | None = None) -> dict:
    sym = classify_symbolic(op, pair)
    num = classify_numeric(op, pair, spec)
    agree = sym.bounded == num.bounded and sym.compact == num.compact
    return {"symbolic": sym.summary(), "numeric": num.summary(), "agreement": agree,
            "numeric_verdict": num}


def classify(op: OperatorSpec, pair: SpacePair, spec: QuadSpec | None = None,
             mode: str = "both") -> Verdict:
    """Combined verdict.

    ``mode`` is ``both``, ``numeric`` or ``symbolic``. With both routes
    available the symbolic verdict is reported and the numeric one is kept
    as a sub-verdict with an agreement flag.
    """
    if mode not in ("both", "numeric", "symbolic"):
        raise ValueError("mode must be 'both', 'numeric' or 'symbolic'")
    sym = None
    if mode in ("both", "symbolic"):
        try:
            sym = classify_symbolic(op, pair)
        except OutOfScope:
            if mode == "symbolic":
                raise
    if mode == "symbolic":
        sym.symbolic = sym.summary()
        return sym
    num = classify_numeric(op, pair, spec)
    num.numeric = num.summary()
    if sym is None:
        return num
    sym.numeric_evidence = num.numeric_evidence
    sym.criterion_value = num.criterion_value
    sym.norm_estimate = num.norm_estimate
    sym.symbolic = sym.summary()
    sym.numeric = num.summary()
    sym.agreement = sym.bounded == num.bounded and sym.compact == num.compact
    return sym


__all__ = ["SpacePair", "Verdict", "OutOfScope", "classify_symbolic", "classify_numeric",
           "cross_validate", "classify", "weight_for", "growth_status", "limit_status",
           "level_set_maxima", "transform_profile", "profile_radii", "ring_log_max"]
