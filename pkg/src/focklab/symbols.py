"""Exact algebra for symbols of the form p(z) * exp(q(z)).

Polynomials and exponentials of polynomials are closed under products,
differentiation and right-composition with a polynomial, which is all the
operator formulas in this package need. Moduli are always handled in the
log domain so that factors such as ``exp(alpha/2 |z|^2)`` never overflow.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

TRIM_RATIO = 1e-14


def as_complex(z) -> complex:
    """Coerce to a finite Python complex, rejecting NaN and Inf."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"complex scalar must be finite, got {z!r}")
    return z


def _trim(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.size == 0:
        return coeffs
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return coeffs[:0]
    keep = np.nonzero(np.abs(coeffs) >= TRIM_RATIO * scale)[0]
    return coeffs[: keep[-1] + 1]


class Poly:
    """Polynomial with complex coefficients stored in ascending order.

    The representation is canonical: the leading coefficient is nonzero,
    the zero polynomial has no coefficients and degree ``-inf``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable = ()):
        c = _trim(np.array([as_complex(a) for a in coeffs], dtype=complex))
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, c) -> Poly:
        return cls([c])

    @classmethod
    def identity(cls) -> Poly:
        return cls([0, 1])

    @classmethod
    def linear(cls, a, b=0) -> Poly:
        """The map ``z -> a z + b``."""
        return cls([b, a])

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def degree(self):
        return len(self._c) - 1 if len(self._c) else -math.inf

    def is_zero(self) -> bool:
        return len(self._c) == 0

    def coeff(self, k: int) -> complex:
        return complex(self._c[k]) if k < len(self._c) else 0j

    def __call__(self, z):
        if self.is_zero():
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        out = npoly.polyval(np.asarray(z, dtype=complex), self._c)
        return out if np.ndim(out) else complex(out)

    def log_abs(self, z):
        """``log|p(z)|`` without overflow for large ``|z|``."""
        z = np.asarray(z, dtype=complex)
        if self.is_zero():
            return np.full(z.shape, -np.inf)
        n = len(self._c) - 1
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            inner = np.abs(z) <= 1.0
            small = np.abs(npoly.polyval(np.where(inner, z, 0), self._c))
            # |z| > 1: p(z) = z^n * sum_k c_k z^(k-n), evaluated in 1/z
            zi = np.where(inner, 1.0, 1.0 / np.where(inner, 1.0, z))
            big = np.abs(npoly.polyval(zi, self._c[::-1]))
            out = np.where(
                inner,
                np.log(small),
                n * np.log(np.abs(np.where(inner, 1.0, z))) + np.log(big),
            )
        return out

    def __add__(self, other) -> Poly:
        other = _to_poly(other)
        return Poly(npoly.polyadd(self._c, other._c) if len(self._c) and len(other._c)
                    else (self._c if len(self._c) else other._c))

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(-self._c)

    def __sub__(self, other) -> Poly:
        return self + (-_to_poly(other))

    def __mul__(self, other) -> Poly:
        other = _to_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        return Poly(npoly.polymul(self._c, other._c))

    __rmul__ = __mul__

    def derivative(self) -> Poly:
        if len(self._c) <= 1:
            return Poly()
        return Poly(npoly.polyder(self._c))

    def compose(self, r: Poly) -> Poly:
        """Return ``p(r(z))`` by Horner's scheme on polynomials."""
        out = Poly()
        for c in self._c[::-1]:
            out = out * r + Poly([c])
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return len(self._c) == len(other._c) and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(tuple(self._c))

    def allclose(self, other: Poly, rtol: float = 1e-12, atol: float = 1e-14) -> bool:
        n = max(len(self._c), len(other._c))
        a = np.zeros(n, complex)
        b = np.zeros(n, complex)
        a[: len(self._c)] = self._c
        b[: len(other._c)] = other._c
        return bool(np.allclose(a, b, rtol=rtol, atol=atol))

    def abs_coeff_sum(self) -> float:
        return float(np.sum(np.abs(self._c)))

    def to_json(self) -> list:
        return [[float(c.real), float(c.imag)] for c in self._c]

    @classmethod
    def from_json(cls, data) -> Poly:
        return cls(_parse_complex(c) for c in data)

    def __repr__(self):
        return f"Poly({[complex(c) for c in self._c]})"


def _parse_complex(c) -> complex:
    if isinstance(c, (list, tuple)):
        if len(c) != 2:
            raise ValueError(f"complex coefficient must be [re, im], got {c!r}")
        return as_complex(complex(float(c[0]), float(c[1])))
    return as_complex(c)


def _to_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly([x])


@dataclass(frozen=True, eq=False)
class ExpPoly:
    """The entire function ``z -> p(z) * exp(q(z))``.

    Zero is canonical: a zero prefactor forces a zero exponent.
    """

    p: Poly
    q: Poly = Poly()

    def __post_init__(self):
        p = _to_poly(self.p)
        q = _to_poly(self.q)
        if p.is_zero():
            q = Poly()
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def constant(cls, c) -> ExpPoly:
        return cls(Poly([c]))

    @classmethod
    def from_poly(cls, p) -> ExpPoly:
        return cls(_to_poly(p) if not isinstance(p, (list, tuple)) else Poly(p))

    @classmethod
    def exp_of(cls, q) -> ExpPoly:
        """``exp(q(z))``."""
        return cls(Poly([1]), q if isinstance(q, Poly) else Poly(q))

    def is_zero(self) -> bool:
        return self.p.is_zero()

    def is_polynomial(self) -> bool:
        """True when the exponent is constant, i.e. the symbol is c * p(z)."""
        return self.q.degree() <= 0

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            raise ValueError("symbol has a non-constant exponent")
        return self.p * cmath.exp(self.q.coeff(0))

    def __call__(self, z):
        if self.is_zero():
            return self.p(z)
        return self.p(z) * np.exp(self.q(z))

    def log_modulus(self, z):
        """``log|p(z)| + Re q(z)``; ``-inf`` at zeros of ``p``."""
        z_arr = np.asarray(z, dtype=complex)
        if self.is_zero():
            out = np.full(z_arr.shape, -np.inf)
        else:
            out = self.p.log_abs(z_arr) + np.real(self.q(z_arr)) if not self.q.is_zero() \
                else self.p.log_abs(z_arr)
        return out if np.ndim(out) else float(out)

    def argument(self, z):
        """Phase ``arg p(z) + Im q(z)`` (not reduced modulo 2 pi)."""
        z_arr = np.asarray(z, dtype=complex)
        out = np.angle(self.p(z_arr))
        if not self.q.is_zero():
            out = out + np.imag(self.q(z_arr))
        return out

    def __mul__(self, other) -> ExpPoly:
        if not isinstance(other, ExpPoly):
            other = ExpPoly(_to_poly(other))
        return ExpPoly(self.p * other.p, self.q + other.q)

    __rmul__ = __mul__

    def derivative(self) -> ExpPoly:
        return ExpPoly(self.p.derivative() + self.p * self.q.derivative(), self.q)

    def compose(self, r: Poly) -> ExpPoly:
        return ExpPoly(self.p.compose(r), self.q.compose(r))

    def allclose(self, other: ExpPoly, rtol: float = 1e-12) -> bool:
        return self.p.allclose(other.p, rtol=rtol) and self.q.allclose(other.q, rtol=rtol)

    def to_json(self) -> dict:
        return {"p": self.p.to_json(), "q": self.q.to_json()}

    @classmethod
    def from_json(cls, data) -> ExpPoly:
        if isinstance(data, list):
            return cls(Poly.from_json(data))
        if "p" not in data:
            raise ValueError("symbol JSON needs a 'p' coefficient list")
        return cls(Poly.from_json(data["p"]), Poly.from_json(data.get("q", [])))

    def __repr__(self):
        if self.q.is_zero():
            return f"ExpPoly({self.p!r})"
        return f"ExpPoly({self.p!r}, exp {self.q!r})"


def multiply(a: ExpPoly, b: ExpPoly) -> ExpPoly:
    return a * b


def differentiate(f: ExpPoly) -> ExpPoly:
    return f.derivative()


def compose(f: ExpPoly, r: Poly) -> ExpPoly:
    return f.compose(r)


def log_modulus(f: ExpPoly, z):
    return f.log_modulus(z)


def kernel(w, alpha: float, normalized: bool = False) -> ExpPoly:
    """Reproducing kernel ``exp(alpha z conj(w))`` of the Gaussian Fock space.

    The normalized kernel carries the extra factor ``exp(-alpha |w|^2 / 2)``,
    kept as the constant term of the exponent so it never underflows.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    w = as_complex(w)
    c0 = -alpha * abs(w) ** 2 / 2 if normalized else 0.0
    return ExpPoly(Poly([1]), Poly([c0, alpha * w.conjugate()]))


@dataclass(frozen=True)
class FockParams:
    """Weight ``alpha > 0`` and exponent ``0 < p <= inf``."""

    alpha: float
    p: float = 2.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        if not self.p > 0:
            raise ValueError(f"p must be positive, got {self.p}")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.p)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "p": "inf" if self.is_infinite else self.p}


def parse_exponent(text) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    if str(text).strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    return float(text)


def poly_from_any(data) -> Poly:
    """Read a polynomial from a coefficient list or a symbol dict with empty q."""
    if isinstance(data, Poly):
        return data
    if isinstance(data, dict):
        f = ExpPoly.from_json(data)
        if not f.is_polynomial():
            raise ValueError("expected a polynomial symbol (empty 'q')")
        return f.as_poly()
    return Poly.from_json(data)


def monomial(k: int, c=1.0) -> ExpPoly:
    return ExpPoly(Poly([0] * k + [c]))


def polynomial(coeffs: Sequence) -> ExpPoly:
    return ExpPoly(Poly(coeffs))
