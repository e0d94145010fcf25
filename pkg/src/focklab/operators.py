"""The five operator kinds applied to symbols.

``Vg``      f -> int_0^z f g'
``Cpsi``    f -> f o psi
``VgPsi``   f -> int_0^z f(psi(w)) g'(w) dw
``CpsiG``   f -> int_0^psi(z) f g'
``uCpsi``   f -> u * (f o psi)

Every kind has a derivative that is again an :class:`ExpPoly`, which is how
target norms are measured without nesting segment quadrature inside plane
quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fock import derivative_norm, fock_norm
from .quadrature import QuadSpec, integrate_segment
from .symbols import ExpPoly, FockParams, Poly, kernel, monomial, poly_from_any

KINDS = ("Vg", "Cpsi", "VgPsi", "CpsiG", "uCpsi")
_REQUIRED = {"Vg": ("g",), "Cpsi": ("psi",), "VgPsi": ("g", "psi"),
             "CpsiG": ("g", "psi"), "uCpsi": ("u", "psi")}
VOLTERRA_KINDS = ("Vg", "VgPsi", "CpsiG")


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    g: ExpPoly | None = None
    psi: Poly | None = None
    u: ExpPoly | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}; expected one of {KINDS}")
        for name in _REQUIRED[self.kind]:
            if getattr(self, name) is None:
                raise ValueError(f"{self.kind} needs symbol {name!r}")

    @property
    def symbol_psi(self) -> Poly:
        return self.psi if self.psi is not None else Poly.identity()

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.g is not None:
            out["g"] = self.g.to_json()
        if self.psi is not None:
            out["psi"] = self.psi.to_json()
        if self.u is not None:
            out["u"] = self.u.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> OperatorSpec:
        g = ExpPoly.from_json(data["g"]) if data.get("g") is not None else None
        u = ExpPoly.from_json(data["u"]) if data.get("u") is not None else None
        psi = poly_from_any(data["psi"]) if data.get("psi") is not None else None
        return cls(data["kind"], g=g, psi=psi, u=u)


@dataclass(frozen=True)
class AppliedFunction:
    evaluator: Callable[[complex], complex]
    derivative_evaluator: Callable
    derivative_symbol: ExpPoly
    value_at_zero: complex
    op: OperatorSpec
    source: ExpPoly
    exact: ExpPoly | None = None

    def __call__(self, z):
        return self.evaluator(z)


def _segment(integrand: ExpPoly, b: complex, tol: float) -> complex:
    return integrate_segment(integrand, 0.0, complex(b), tol=tol)


def apply(op: OperatorSpec, f: ExpPoly, tol: float = 1e-13) -> AppliedFunction:
    """Apply ``op`` to ``f``.

    Integral kinds evaluate by segment quadrature from 0; composition kinds
    are exact. Derivatives use the closed forms
    ``(V_(g,psi) f)' = f(psi) g'`` and ``(C_(psi,g) f)' = g'(psi) psi' f(psi)``.
    """
    kind = op.kind
    if kind in ("Vg", "VgPsi"):
        psi = op.symbol_psi if kind == "VgPsi" else Poly.identity()
        d = f.compose(psi) * op.g.derivative()
        ev = _vectorize(lambda z: _segment(d, z, tol))
        return AppliedFunction(ev, d, d, 0j, op, f)
    if kind == "CpsiG":
        inner = f * op.g.derivative()
        psi = op.psi
        d = op.g.derivative().compose(psi) * ExpPoly(psi.derivative()) * f.compose(psi)
        ev = _vectorize(lambda z: _segment(inner, psi(complex(z)), tol))
        return AppliedFunction(ev, d, d, ev(0.0), op, f)
    if kind == "Cpsi":
        h = f.compose(op.psi)
    else:
        h = op.u * f.compose(op.psi)
    d = h.derivative()
    return AppliedFunction(h, d, d, complex(h(0.0)), op, f, exact=h)


def _vectorize(fn):
    def wrapped(z):
        if np.ndim(z):
            return np.array([fn(complex(x)) for x in np.ravel(z)]).reshape(np.shape(z))
        return fn(complex(z))
    return wrapped


def target_norm(applied: AppliedFunction, target: FockParams,
                spec: QuadSpec | None = None) -> float:
    """Target-space norm of an applied function.

    Composition kinds have an exact symbol and use the Fock norm directly;
    integral kinds go through the derivative description of the norm.
    """
    spec = spec or QuadSpec.from_env()
    if applied.exact is not None:
        return fock_norm(applied.exact, target, spec).value
    value, _ = derivative_norm(applied.value_at_zero, applied.derivative_symbol, target, spec)
    return value


def default_corpus(alpha: float) -> list[ExpPoly]:
    """Constants, monomials up to degree 4 and normalized kernels.

    Kernels sit at ``|w|`` in ``{1, 2, 4, 6}`` in four directions.
    """
    corpus = [ExpPoly.constant(1.0)] + [monomial(k) for k in range(1, 5)]
    for r in (1.0, 2.0, 4.0, 6.0):
        for ang in (0.0, 0.5, 1.0, 1.5):
            corpus.append(kernel(r * complex(math.cos(ang * math.pi), math.sin(ang * math.pi)),
                                 alpha, normalized=True))
    return corpus


@dataclass
class EmpiricalNorm:
    lower_bound: float
    witness: ExpPoly
    witness_index: int
    ratios: list

    def to_json(self) -> dict:
        return {"lower_bound": self.lower_bound, "witness": self.witness.to_json(),
                "witness_index": self.witness_index, "ratios": self.ratios}


def empirical_operator_norm(op: OperatorSpec, source: FockParams, target: FockParams,
                            corpus: Sequence[ExpPoly] | None = None,
                            spec: QuadSpec | None = None) -> EmpiricalNorm:
    """Largest ``||T f||_target / ||f||_source`` over a corpus.

    A divergent target norm yields ``inf`` with that corpus member as the
    unboundedness witness. Ties keep the lowest corpus index.
    """
    spec = spec or QuadSpec.from_env()
    corpus = list(corpus) if corpus is not None else default_corpus(source.alpha)
    ratios = []
    best, best_k = -1.0, 0
    for k, f in enumerate(corpus):
        src = fock_norm(f, source, spec).value
        if not (math.isfinite(src) and src > 0):
            raise ValueError(f"corpus member {k} has no finite nonzero source norm")
        tgt = target_norm(apply(op, f), target, spec)
        ratio = tgt / src
        ratios.append(ratio)
        if ratio > best:
            best, best_k = ratio, k
    return EmpiricalNorm(best, corpus[best_k], best_k, ratios)
