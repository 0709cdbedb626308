"""Free-boundary equilibria: the periodic strip and the standard annulus.

Both families come from Weierstrass data with power/exponential ``h`` and a
single-term ``k``; their free parameters are fixed by requiring the stress
1-form to vanish on the boundary, checked by :func:`traction_residual`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import BranchPoint, DegenerateRadii, DomainViolationWarning, NoRealRoots
from .weierstrass import BRANCH_TOL, ElasticMapAnalytic

DEGENERATE_RTOL = 1e-12


def _half_integer(n) -> Fraction:
    if isinstance(n, float):
        if not math.isfinite(n) or abs(2 * n - round(2 * n)) > 1e-12:
            raise ValueError(f"n must satisfy 2n in N, got {n}")
        n = Fraction(round(2 * n), 2)
    n = Fraction(n)
    if (2 * n).denominator != 1 or n < 0:
        raise ValueError(f"n must satisfy 2n in N, got {n}")
    return n


@dataclass(frozen=True)
class AnnulusFamily:
    n: Fraction
    r1: float
    r2: float
    c: float
    alpha: float
    lam: float

    @property
    def winding(self) -> int:
        return int(2 * self.n + 1)

    def profile(self, r):
        """Signed radius of the image circle of ``|z| = r``."""
        n, lam = float(self.n), self.lam
        r = np.asarray(r, dtype=float)
        return (
            self.c**2 / (4 * n + 2) * r ** (2 * n + 1)
            + lam * r / ((1 + lam) * (n + 1))
            + self.alpha * r ** (-2 * n - 1)
        )


def annulus_residual(fam: AnnulusFamily, r) -> np.ndarray:
    """Boundary-balance polynomial; vanishes at both radii of a solved family."""
    n, lam, c = float(fam.n), fam.lam, fam.c
    r = np.asarray(r, dtype=float)
    return (
        r ** (4 * n + 2)
        - (4 * n + 2) / ((1 + lam) * (n + 1) * c**2) * r ** (2 * n + 2)
        - fam.alpha * (4 * n + 2) / (c**2 * lam)
    )


def solve_annulus_params(r1: float, r2: float, n, lam: float) -> AnnulusFamily:
    """Closed-form ``c`` and ``alpha`` making both boundary circles traction free."""
    n = _half_integer(n)
    if not (r1 > 0 and r2 > 0):
        raise ValueError("radii must be positive")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if abs(r2 - r1) < DEGENERATE_RTOL * max(r1, r2):
        raise DegenerateRadii(f"r1 = r2 = {r1}: the parameter system is singular")
    if r1 > r2:
        raise ValueError("require r1 < r2")
    nf = float(n)
    a2, b2 = r1 ** (2 * nf + 2), r2 ** (2 * nf + 2)
    a4, b4 = r1 ** (4 * nf + 2), r2 ** (4 * nf + 2)
    c = math.sqrt((4 * nf + 2) * (b2 - a2) / ((1 + nf) * (1 + lam) * (b4 - a4)))
    alpha = lam * b2 * a2 * (r2 ** (2 * nf) - r1 ** (2 * nf)) / ((1 + nf) * (1 + lam) * (a4 - b4))
    return AnnulusFamily(n, float(r1), float(r2), c, alpha, float(lam))


def annulus_map(fam: AnnulusFamily, warn: bool = True) -> ElasticMapAnalytic:
    """Evaluators for the wound-up annulus; ``h = c z**n``, ``k = alpha z**(-2n-1)``.

    Half-integer ``n`` is handled through polar form, so every expression is
    single valued.  Points off ``[r1, r2]`` trigger a
    :class:`DomainViolationWarning` when ``warn`` is set.
    """
    n, lam, c, alpha = float(fam.n), fam.lam, fam.c, fam.alpha
    mu = lam / (1 + lam)
    tol = 1e-12 * fam.r2

    def polar(z):
        scalar = np.isscalar(z)
        za = np.asarray(z, dtype=complex)
        r = np.abs(za)
        if za.size and np.min(r) < BRANCH_TOL:
            raise BranchPoint("annulus map undefined at the origin")
        if warn and za.size and (np.min(r) < fam.r1 - tol or np.max(r) > fam.r2 + tol):
            warnings.warn("annulus map evaluated outside [r1, r2]", DomainViolationWarning, stacklevel=3)
        return scalar, r, np.angle(za)

    def ret(scalar, out):
        return complex(out) if scalar else out

    def f(z):
        scalar, r, t = polar(z)
        return ret(scalar, np.exp(1j * (2 * n + 1) * t) * fam.profile(r))

    def fz(z):
        scalar, r, t = polar(z)
        return ret(scalar, np.exp(2j * n * t) * (0.5 * c**2 * r ** (2 * n) + mu))

    def fzbar(z):
        scalar, r, t = polar(z)
        # conj(k') - mu H conj(h') / conj(h)^2
        out = -(2 * n + 1) * alpha * r ** (-2 * n - 2) * np.exp(1j * (2 * n + 2) * t)
        out = out - mu * n / (n + 1) * np.exp(2j * (n + 1) * t)
        return ret(scalar, out)

    def h(z):
        scalar, r, t = polar(z)
        return ret(scalar, c * r**n * np.exp(1j * n * t))

    return ElasticMapAnalytic(f, fz, fzbar, lam, "Weierstrass", h=h)


@dataclass(frozen=True)
class StripFamily:
    n: int
    c: float
    alpha: float
    lam: float
    b: float
    x1: float
    x2: float

    @classmethod
    def from_coefficients(cls, n: int, c: float, alpha: float, lam: float) -> "StripFamily":
        if n < 1 or int(n) != n:
            raise ValueError("winding n must be a positive integer")
        if not (c > 0 and lam > 0):
            raise ValueError("c and lambda must be positive")
        s = 2 / ((1 + lam) * c**2)
        b2 = s**2 + 2 * alpha * n / (lam * c**2)
        if b2 <= 0:
            raise NoRealRoots(f"b^2 = {b2} <= 0: no two distinct real roots")
        b = math.sqrt(b2)
        if s - b <= 0:
            raise NoRealRoots("lower root e^(n x1) is not positive")
        return cls(int(n), float(c), float(alpha), float(lam), b,
                   math.log(s - b) / n, math.log(s + b) / n)

    @classmethod
    def from_domain(cls, n: int, x1: float, x2: float, lam: float) -> "StripFamily":
        """Invert the boundary quadratic: its roots are ``exp(n x1)``, ``exp(n x2)``."""
        if not x1 < x2:
            raise ValueError("require x1 < x2")
        u1, u2 = math.exp(n * x1), math.exp(n * x2)
        c2 = 4 / ((1 + lam) * (u1 + u2))
        alpha = -u1 * u2 * lam * c2 / (2 * n)
        return cls(int(n), math.sqrt(c2), alpha, float(lam), (u2 - u1) / 2, float(x1), float(x2))

    def quadratic(self, u):
        lam, c, n = self.lam, self.c, self.n
        return u * u - 4 / ((1 + lam) * c**2) * u - 2 * self.alpha * n / (lam * c**2)

    def radius(self, x):
        """Signed image radius of the boundary line ``Re z = x``."""
        lam, n = self.lam, self.n
        return 2 * lam / ((1 + lam) * n) + self.c**2 / (2 * n) * np.exp(n * x) + self.alpha * np.exp(-n * x)


def strip_map(fam: StripFamily) -> ElasticMapAnalytic:
    """Map of ``[x1, x2] x R/2piZ`` (as ``z = x + iy``) onto an n-fold annulus."""
    n, lam, c, alpha = fam.n, fam.lam, fam.c, fam.alpha
    mu = lam / (1 + lam)

    def f(z):
        za = np.asarray(z, dtype=complex)
        out = fam.radius(za.real) * np.exp(1j * n * za.imag)
        return complex(out) if np.isscalar(z) else out

    def fz(z):
        za = np.asarray(z, dtype=complex)
        out = 0.5 * c**2 * np.exp(n * za) + mu * np.exp(1j * n * za.imag)
        return complex(out) if np.isscalar(z) else out

    def fzbar(z):
        za = np.asarray(z, dtype=complex)
        out = -n * alpha * np.exp(-n * np.conj(za)) - mu * np.exp(1j * n * za.imag)
        return complex(out) if np.isscalar(z) else out

    def h(z):
        za = np.asarray(z, dtype=complex)
        out = c * np.exp(n * za / 2)
        return complex(out) if np.isscalar(z) else out

    return ElasticMapAnalytic(f, fz, fzbar, lam, "Weierstrass", h=h)


@dataclass(frozen=True)
class Curve:
    """Parametrized boundary piece ``t -> point(t)`` on ``[t0, t1)``."""

    point: Callable
    tangent: Callable
    t0: float = 0.0
    t1: float = 2 * math.pi

    @classmethod
    def circle(cls, r: float, center: complex = 0j) -> "Curve":
        return cls(lambda t: center + r * np.exp(1j * t), lambda t: 1j * r * np.exp(1j * t))

    @classmethod
    def vertical(cls, x: float, y0: float = 0.0, y1: float = 2 * math.pi) -> "Curve":
        return cls(lambda t: x + 1j * t, lambda t: 1j * np.ones_like(t), y0, y1)


def traction_residual(fmap: ElasticMapAnalytic, boundary: Curve, lam: float, samples: int = 256) -> float:
    """Max of ``|lam (1 - 1/|f_z|) f_z g' - f_zbar conj(g')|`` along the curve."""
    t = np.linspace(boundary.t0, boundary.t1, samples, endpoint=False)
    z = boundary.point(t)
    gp = boundary.tangent(t)
    fz = np.asarray(fmap.fz(z))
    a = np.abs(fz)
    if np.any(a < BRANCH_TOL):
        raise BranchPoint("f_z vanishes on the boundary")
    res = lam * (1 - 1 / a) * fz * gp - np.asarray(fmap.fzbar(z)) * np.conj(gp)
    return float(np.max(np.abs(res)))
