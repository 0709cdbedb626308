"""Closed term language for holomorphic data, plus Wirtinger finite differences.

An :class:`AnalyticExpr` is a finite sum of Laurent monomials
``coeff * (z - center)**power`` and exponentials ``coeff * exp(rate * z)``.
That is enough to write down every ``h``, ``H``, ``G`` and ``k`` used by the
Weierstrass constructions in this package without a general CAS.

Evaluation accepts Python complex scalars or numpy arrays.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import LogarithmRequired, PoleEvaluation, WrongZeroOrder

POLE_TOL = 1e-12
ZERO_TOL = 1e-12
FD_STEP = 1e-5

Number = Union[complex, float, int]


@dataclass(frozen=True)
class Monomial:
    coeff: complex
    power: int
    center: complex = 0j


@dataclass(frozen=True)
class ExpTerm:
    coeff: complex
    rate: complex


Term = Union[Monomial, ExpTerm]


def _binom(m: int, j: int) -> float:
    # generalized binomial coefficient, valid for negative m
    out = 1.0
    for i in range(j):
        out *= (m - i) / (i + 1)
    return out


def _normalize(term: Term) -> Term:
    if isinstance(term, ExpTerm):
        if term.rate == 0:
            return Monomial(complex(term.coeff), 0, 0j)
        return ExpTerm(complex(term.coeff), complex(term.rate))
    if term.power == 0:
        return Monomial(complex(term.coeff), 0, 0j)
    return Monomial(complex(term.coeff), int(term.power), complex(term.center))


def _key(term: Term):
    if isinstance(term, ExpTerm):
        return ("exp", term.rate)
    return ("mono", term.power, term.center)


class AnalyticExpr:
    """Immutable sum of :class:`Monomial` and :class:`ExpTerm` terms.

    Like terms are merged on construction and zero coefficients are dropped,
    so two expressions compare equal iff their term lists agree.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Term] = ()):
        merged: dict = {}
        for t in terms:
            t = _normalize(t)
            k = _key(t)
            if k in merged:
                old = merged[k]
                merged[k] = type(old)(**{**old.__dict__, "coeff": old.coeff + t.coeff})
            else:
                merged[k] = t
        object.__setattr__(
            self, "terms", tuple(t for t in merged.values() if t.coeff != 0)
        )

    def __setattr__(self, name, value):
        raise AttributeError("AnalyticExpr is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: Number) -> "AnalyticExpr":
        return cls([Monomial(complex(c), 0)])

    @classmethod
    def identity(cls) -> "AnalyticExpr":
        return cls([Monomial(1 + 0j, 1)])

    @classmethod
    def monomial(cls, coeff: Number, power: int, center: Number = 0) -> "AnalyticExpr":
        return cls([Monomial(complex(coeff), int(power), complex(center))])

    @classmethod
    def exp(cls, coeff: Number, rate: Number) -> "AnalyticExpr":
        return cls([ExpTerm(complex(coeff), complex(rate))])

    @classmethod
    def polynomial(cls, coeffs: Sequence[Number], center: Number = 0) -> "AnalyticExpr":
        """``sum(coeffs[j] * (z - center)**j)``."""
        return cls(Monomial(complex(c), j, complex(center)) for j, c in enumerate(coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[tuple[Number, int]], scale: Number = 1) -> "AnalyticExpr":
        """Polynomial ``scale * prod((z - p)**m)`` expanded around 0."""
        poly = np.array([complex(scale)])
        for p, m in roots:
            for _ in range(int(m)):
                poly = np.convolve(poly, np.array([-complex(p), 1.0]))
        return cls.polynomial(list(poly))

    # -- structure --------------------------------------------------------
    @property
    def pole_centers(self) -> list[complex]:
        out: list[complex] = []
        for t in self.terms:
            if isinstance(t, Monomial) and t.power < 0 and t.center not in out:
                out.append(t.center)
        return out

    @property
    def is_entire(self) -> bool:
        return not self.pole_centers

    @property
    def is_polynomial(self) -> bool:
        return all(isinstance(t, Monomial) and t.power >= 0 for t in self.terms)

    def polynomial_coeffs(self) -> np.ndarray:
        """Ascending coefficients around 0; only for polynomial expressions."""
        if not self.is_polynomial:
            raise ValueError("expression is not a polynomial")
        deg = max((t.power for t in self.terms), default=0)
        out = np.zeros(deg + 1, dtype=complex)
        for t in self.terms:
            for j in range(t.power + 1):
                out[j] += t.coeff * _binom(t.power, j) * (-t.center) ** (t.power - j)
        return out

    # -- evaluation -------------------------------------------------------
    def __call__(self, z):
        return evaluate(self, z)

    # -- algebra ----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return AnalyticExpr(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return AnalyticExpr(type(t)(**{**t.__dict__, "coeff": -t.coeff}) for t in self.terms)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return AnalyticExpr(
                type(t)(**{**t.__dict__, "coeff": t.coeff * other}) for t in self.terms
            )
        other = _coerce(other)
        if other is NotImplemented:
            return other
        out = []
        for a in self.terms:
            for b in other.terms:
                out.extend(_mul_terms(a, b))
        return AnalyticExpr(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, AnalyticExpr):
            return NotImplemented
        return set(self.terms) == set(other.terms) and len(self.terms) == len(other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms))

    def isclose(self, other: "AnalyticExpr", rtol: float = 1e-14) -> bool:
        """Term-wise comparison allowing rounding in the coefficients."""
        mine = {_key(t): t.coeff for t in self.terms}
        theirs = {_key(t): t.coeff for t in other.terms}
        if mine.keys() != theirs.keys():
            return False
        return all(abs(mine[k] - theirs[k]) <= rtol * max(abs(mine[k]), abs(theirs[k])) for k in mine)

    def __repr__(self):
        return f"AnalyticExpr({str(self)})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for t in self.terms:
            c = _fmt(t.coeff)
            if isinstance(t, ExpTerm):
                parts.append(f"{c}*exp({_fmt(t.rate)}*z)")
            elif t.power == 0:
                parts.append(c)
            else:
                base = "z" if t.center == 0 else f"(z - {_fmt(t.center)})"
                parts.append(f"{c}*{base}^{t.power}" if t.power != 1 else f"{c}*{base}")
        return " + ".join(parts)


def _fmt(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return f"({c.real!r}{c.imag:+.17g}j)"


def _coerce(other):
    if isinstance(other, AnalyticExpr):
        return other
    if isinstance(other, (int, float, complex)):
        return AnalyticExpr.constant(other)
    return NotImplemented


def _recentre(t: Monomial) -> list[Monomial]:
    if t.power < 0 or t.center == 0:
        return [t]
    return [
        Monomial(t.coeff * _binom(t.power, j) * (-t.center) ** (t.power - j), j)
        for j in range(t.power + 1)
    ]


def _mul_terms(a: Term, b: Term) -> list[Term]:
    if isinstance(a, ExpTerm) and isinstance(b, ExpTerm):
        return [ExpTerm(a.coeff * b.coeff, a.rate + b.rate)]
    if isinstance(a, ExpTerm) or isinstance(b, ExpTerm):
        e, m = (a, b) if isinstance(a, ExpTerm) else (b, a)
        if m.power == 0:
            return [ExpTerm(e.coeff * m.coeff, e.rate)]
        raise ValueError("product z^m * exp(r z) is outside the term language")
    if a.power == 0 or b.power == 0:
        c = a if a.power == 0 else b
        o = b if c is a else a
        return [Monomial(o.coeff * c.coeff, o.power, o.center)]
    if a.center == b.center:
        return [Monomial(a.coeff * b.coeff, a.power + b.power, a.center)]
    if a.power > 0 and b.power > 0:
        return [
            Monomial(x.coeff * y.coeff, x.power + y.power)
            for x in _recentre(a)
            for y in _recentre(b)
        ]
    raise ValueError("product of Laurent terms with different centers is outside the term language")


def evaluate(expr: AnalyticExpr, z):
    """Sum of all terms at ``z`` (scalar or array).

    Raises :class:`PoleEvaluation` when ``z`` lies within ``POLE_TOL`` of the
    center of a negative-power monomial.
    """
    scalar = np.isscalar(z)
    za = np.asarray(z, dtype=complex)
    out = np.zeros(za.shape, dtype=complex)
    for t in expr.terms:
        if isinstance(t, ExpTerm):
            out += t.coeff * np.exp(t.rate * za)
            continue
        d = za - t.center
        if t.power < 0:
            if za.size and np.min(np.abs(d)) < POLE_TOL:
                raise PoleEvaluation(f"evaluation at pole {t.center}")
            out += t.coeff / d ** (-t.power)
        else:
            out += t.coeff * d**t.power
    return complex(out) if scalar else out


def derivative(expr: AnalyticExpr) -> AnalyticExpr:
    out: list[Term] = []
    for t in expr.terms:
        if isinstance(t, ExpTerm):
            out.append(ExpTerm(t.coeff * t.rate, t.rate))
        elif t.power != 0:
            out.append(Monomial(t.coeff * t.power, t.power - 1, t.center))
    return AnalyticExpr(out)


def antiderivative(expr: AnalyticExpr) -> AnalyticExpr:
    """Term-wise antiderivative with integration constant 0."""
    out: list[Term] = []
    for t in expr.terms:
        if isinstance(t, ExpTerm):
            out.append(ExpTerm(t.coeff / t.rate, t.rate))
        elif t.power == -1:
            raise LogarithmRequired(f"1/(z - {t.center}) has no antiderivative in the term language")
        else:
            out.append(Monomial(t.coeff / (t.power + 1), t.power + 1, t.center))
    return AnalyticExpr(out)


def taylor(expr: AnalyticExpr, p: Number, n: int) -> np.ndarray:
    """First ``n`` Taylor coefficients of ``expr`` at ``p`` (exact per term)."""
    p = complex(p)
    out = np.zeros(n, dtype=complex)
    for t in expr.terms:
        if isinstance(t, ExpTerm):
            base = t.coeff * cmath.exp(t.rate * p)
            for j in range(n):
                out[j] += base * t.rate**j / math.factorial(j)
            continue
        d = p - t.center
        if t.power < 0 and abs(d) < POLE_TOL:
            raise PoleEvaluation(f"Taylor expansion at pole {t.center}")
        for j in range(n):
            if t.power >= 0 and j > t.power:
                break
            out[j] += t.coeff * _binom(t.power, j) * d ** (t.power - j)
    return out


def laurent_of_reciprocal_conj(numer: Number, h: AnalyticExpr, p: Number, order: int, upto: int = -1) -> np.ndarray:
    """Coefficients c_m, m = -order..upto, of ``numer / conj(h(z))`` in powers of conj(z - p)."""
    if order < 1:
        raise WrongZeroOrder(f"zero order must be positive, got {order}")
    n_extra = upto + order + 1
    a = taylor(h, p, order + max(n_extra, 1))
    if np.any(np.abs(a[:order]) > ZERO_TOL):
        raise WrongZeroOrder(f"h does not vanish to order {order} at {p}")
    lead = a[order]
    if abs(lead) <= ZERO_TOL:
        raise WrongZeroOrder(f"h vanishes to order > {order} at {p}")
    # 1 / (1 + sum d_j w^j) by the power-series reciprocal recursion
    d = np.conj(a[order:] / lead)
    b = np.zeros(n_extra, dtype=complex)
    b[0] = 1.0
    for k in range(1, n_extra):
        b[k] = -np.dot(d[1 : k + 1], b[k - 1 :: -1][:k])
    return complex(numer) / np.conj(lead) * b


def principal_part(numer: Number, h: AnalyticExpr, p: Number, order: int) -> list[complex]:
    """Principal part of ``numer / conj(h(z))`` at a zero ``p`` of ``h``.

    Returns ``[c_{-order}, ..., c_{-1}]`` where the expansion is in powers of
    ``conj(z) - conj(p)``.
    """
    return [complex(c) for c in laurent_of_reciprocal_conj(numer, h, p, order, upto=-1)]


def wirtinger_fd(fn: Callable, z, step: float = FD_STEP):
    """Central-difference estimates of ``(f_z, f_zbar)`` for a pointwise map."""
    if step <= 0:
        raise ValueError("step must be positive")
    fx = (fn(z + step) - fn(z - step)) / (2 * step)
    fy = (fn(z + 1j * step) - fn(z - 1j * step)) / (2 * step)
    return (fx - 1j * fy) / 2, (fx + 1j * fy) / 2
