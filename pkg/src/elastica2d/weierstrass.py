"""Elastic maps built in closed form from holomorphic Weierstrass data.

For a holomorphic ``h`` with antiderivatives ``H`` (of ``h``) and ``G`` (of
``h**2``) the map

    f = G/2 + mu * H / conj(h) + conj(k),     mu = lam / (1 + lam)

is a strict minimizer of the energy ``E_lam`` once the meromorphic ``k``
cancels the poles of ``H / conj(h)`` at the zeros of ``h``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .complex_analytic import (
    POLE_TOL,
    AnalyticExpr,
    Monomial,
    antiderivative,
    derivative,
    laurent_of_reciprocal_conj,
    principal_part,
    taylor,
)
from .errors import BranchPoint, DomainViolation, MissingZero, PoleEvaluation

BRANCH_TOL = 1e-12
ROOT_MATCH_TOL = 1e-4


def _mu(lam: float) -> float:
    return lam / (1.0 + lam)


def _as_array(z):
    scalar = np.isscalar(z)
    return scalar, np.asarray(z, dtype=complex)


def _ret(scalar, out):
    return complex(out) if scalar else out


@dataclass(frozen=True)
class WeierstrassDatum:
    h: AnalyticExpr
    lam: float
    zeros: tuple = ()

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        zs = tuple((complex(p), int(m)) for p, m in self.zeros)
        for i, (p, m) in enumerate(zs):
            if m < 1:
                raise ValueError(f"zero order must be positive, got {m}")
            if any(abs(p - q) < POLE_TOL for q, _ in zs[:i]):
                raise ValueError(f"duplicate zero {p}")
        object.__setattr__(self, "zeros", zs)

    @property
    def H(self) -> AnalyticExpr:
        return antiderivative(self.h)

    @property
    def G(self) -> AnalyticExpr:
        return antiderivative(self.h * self.h)


@dataclass(frozen=True)
class MeromorphicK:
    k: AnalyticExpr
    pole_centers: tuple = ()


@dataclass
class ElasticMapAnalytic:
    """Vectorized evaluators for a closed-form elastic map.

    ``fz`` returns the conventional value ``lam/(1+lam)`` at branch points
    (zeros of ``h``), where the phase of ``f_z`` has no limit; ``fzbar``
    returns NaN there.  Use :meth:`is_branch` to tell them apart.
    """

    f: Callable
    fz: Callable
    fzbar: Callable
    lam: float
    source: str
    h: Optional[Callable] = None
    branch_points: list = field(default_factory=list)

    def is_branch(self, z):
        za = np.asarray(z, dtype=complex)
        out = np.zeros(za.shape, dtype=bool)
        for p in self.branch_points:
            out |= np.abs(za - p) < BRANCH_TOL
        return bool(out) if np.isscalar(z) else out


def _check_missing_zeros(datum: WeierstrassDatum, sweep) -> None:
    listed = [p for p, _ in datum.zeros]

    def unlisted(r):
        return all(abs(r - p) > ROOT_MATCH_TOL * (1 + abs(r)) for p in listed)

    if datum.h.is_polynomial:
        coeffs = datum.h.polynomial_coeffs()
        nz = np.nonzero(np.abs(coeffs) > 0)[0]
        if nz.size and nz[-1] > 0:
            for r in np.roots(coeffs[: nz[-1] + 1][::-1]):
                if unlisted(r):
                    raise MissingZero(f"h vanishes at {r} which is not a declared zero")
    if sweep is not None:
        pts = np.asarray(sweep, dtype=complex).ravel()
        vals = np.abs(datum.h(pts))
        for z in pts[vals < BRANCH_TOL]:
            if unlisted(z):
                raise MissingZero(f"h vanishes at {z} which is not a declared zero")


def compensating_k(datum: WeierstrassDatum, sweep: Optional[Sequence[complex]] = None) -> MeromorphicK:
    """Pure principal-part ``k`` cancelling the poles of ``mu*H/conj(h)``.

    Zero orders are validated from the Taylor coefficients of ``h``; for
    polynomial ``h`` (and at any ``sweep`` points) unlisted zeros raise
    :class:`MissingZero`.
    """
    _check_missing_zeros(datum, sweep)
    mu = _mu(datum.lam)
    H = datum.H
    terms = []
    centers = []
    for p, order in datum.zeros:
        coeffs = principal_part(mu * H(p), datum.h, p, order)
        # conj(k) = -sum c_m conj(z - p)^m  =>  k = -sum conj(c_m) (z - p)^m
        for m, c in zip(range(-order, 0), coeffs):
            if c != 0:
                terms.append(Monomial(-np.conj(c), m, p))
                if p not in centers:
                    centers.append(p)
    return MeromorphicK(AnalyticExpr(terms), tuple(centers))


def _split_k(k: AnalyticExpr, p: complex):
    local = [t for t in k.terms if isinstance(t, Monomial) and t.power < 0 and t.center == p]
    rest = [t for t in k.terms if t not in local]
    return AnalyticExpr(local), AnalyticExpr(rest)


class _LocalChart:
    """Cancellation-free evaluation of a compensated map near one zero of ``h``.

    With ``w = z - p``, ``h = w**l q(w)`` and ``H - H(p) = w**(l+1) A(w)``;
    the antiholomorphic part ``mu H(p)/conj(h) + conj(k_p)`` equals
    ``-N(conj w)/conj(q(w))`` with polynomial ``N`` obtained by multiplying
    out the principal part.  Exact for polynomial ``h``.
    """

    def __init__(self, h: AnalyticExpr, H: AnalyticExpr, p: complex, order: int, mu: float, radius: float):
        self.p, self.l, self.mu, self.radius = p, order, mu, radius
        deg = max(t.power for t in h.terms)
        a = taylor(h, p, deg + 1)
        A = taylor(H, p, deg + 2)
        self.q = a[order:]
        self.qp = P.polyder(self.q) if len(self.q) > 1 else np.zeros(1, dtype=complex)
        self.A = A[order + 1 :]
        c = laurent_of_reciprocal_conj(mu * A[0], h, p, order, upto=-1)
        # coefficients of conj(h) * principal part, powers >= l
        e = np.zeros(deg + 1, dtype=complex)
        abar = np.conj(a)
        for j in range(order, deg + 1):
            for m, cm in zip(range(-order, 0), c):
                if j + m >= order:
                    e[j + m] += abar[j] * cm
        self.N = e[order:deg] if deg > order else np.zeros(1, dtype=complex)
        self.D = np.conj(self.q)
        self.Np = P.polyder(self.N) if len(self.N) > 1 else np.zeros(1, dtype=complex)
        self.Dp = P.polyder(self.D) if len(self.D) > 1 else np.zeros(1, dtype=complex)

    def inside(self, za):
        return np.abs(za - self.p) < self.radius

    def parts(self, w):
        wb = np.conj(w)
        q = P.polyval(w, self.q)
        rot = w / wb
        return wb, q, rot

    def f_minus_regular(self, w):
        # mu*H/conj(h) + conj(k_p) - mu*H(p)*0, i.e. everything except G/2 and conj(k_rest)
        wb, q, rot = self.parts(w)
        first = w * rot**self.l * P.polyval(w, self.A) / np.conj(q)
        bracket = -P.polyval(wb, self.N) / P.polyval(wb, self.D)
        return self.mu * first + bracket

    def h(self, w):
        return w**self.l * P.polyval(w, self.q)

    def fzbar_minus_regular(self, w):
        wb, q, rot = self.parts(w)
        qb = np.conj(q)
        qpb = np.conj(P.polyval(w, self.qp))
        first = -self.mu * rot ** (self.l + 1) * P.polyval(w, self.A) * (self.l * qb + wb * qpb) / qb**2
        N, D = P.polyval(wb, self.N), P.polyval(wb, self.D)
        Np, Dp = P.polyval(wb, self.Np), P.polyval(wb, self.Dp)
        return first - (Np * D - N * Dp) / D**2


def build_elastic_map(datum: WeierstrassDatum, k: Optional[MeromorphicK] = None) -> ElasticMapAnalytic:
    """Evaluators for ``f = G/2 + mu H/conj(h) + conj(k)`` and its Wirtinger derivatives.

    At compensated zeros ``f`` takes its continuous extension.  For
    polynomial ``h`` points near a declared zero are evaluated through a
    local chart, avoiding the cancellation between ``H/conj(h)`` and ``k``.
    """
    if k is None:
        k = MeromorphicK(AnalyticExpr())
    lam = datum.lam
    mu = _mu(lam)
    h = datum.h
    H, G = datum.H, datum.G
    hp = derivative(h)
    kk = k.k
    kp = derivative(kk)
    zeros = [p for p, _ in datum.zeros]

    branch_value = {}
    charts = {}
    rest_of = {}
    for p, order in datum.zeros:
        local, rest = _split_k(kk, p)
        c = laurent_of_reciprocal_conj(mu * H(p), h, p, order, upto=0)
        wanted = AnalyticExpr(
            Monomial(-np.conj(cm), m, p) for m, cm in zip(range(-order, 0), c[:-1]) if cm != 0
        )
        scale = max(1.0, max((abs(t.coeff) for t in wanted.terms), default=0.0))
        diff = local - wanted
        if all(abs(t.coeff) <= 1e-9 * scale for t in diff.terms):
            branch_value[p] = 0.5 * G(p) + c[-1] + np.conj(rest(p))
            if h.is_polynomial:
                others = [abs(p - q) for q in zeros if q != p] + [
                    abs(p - q) for q in kk.pole_centers if q != p
                ]
                radius = 0.5 * min(others) if others else 1.0
                charts[p] = _LocalChart(h, H, p, order, mu, radius)
                rest_of[p] = (rest, derivative(rest))

    def classify(za):
        # -1 regular, j >= 0 at zero j, -2-j inside chart j
        idx = np.full(za.shape, -1, dtype=int)
        for j, p in enumerate(zeros):
            if p in charts:
                idx[charts[p].inside(za)] = -2 - j
            idx[np.abs(za - p) < BRANCH_TOL] = j
        return idx

    def f(z):
        scalar, za = _as_array(z)
        idx = classify(za)
        out = np.empty(za.shape, dtype=complex)
        reg = idx == -1
        zr = za[reg]
        hr = h(zr)
        if np.any(hr == 0):
            raise PoleEvaluation("evaluation at an undeclared zero of h")
        out[reg] = 0.5 * G(zr) + mu * H(zr) / np.conj(hr) + np.conj(kk(zr))
        for j, p in enumerate(zeros):
            sel = idx == j
            if np.any(sel):
                if p not in branch_value:
                    raise PoleEvaluation(f"uncompensated pole at {p}")
                out[sel] = branch_value[p]
            sel = idx == -2 - j
            if np.any(sel):
                zc = za[sel]
                out[sel] = 0.5 * G(zc) + charts[p].f_minus_regular(zc - p) + np.conj(rest_of[p][0](zc))
        return _ret(scalar, out)

    def h_local(za, idx):
        out = np.empty(za.shape, dtype=complex)
        reg = idx < 0
        out[reg] = h(za[reg])
        for j, p in enumerate(zeros):
            sel = idx == -2 - j
            if np.any(sel):
                out[sel] = charts[p].h(za[sel] - p)
        return out

    def fz(z):
        scalar, za = _as_array(z)
        idx = classify(za)
        out = np.full(za.shape, mu, dtype=complex)
        reg = (idx == -1) | (idx <= -2)
        hr = h_local(za, idx)[reg]
        out[reg] = 0.5 * hr * hr + mu * hr / np.conj(hr)
        return _ret(scalar, out)

    def fzbar(z):
        scalar, za = _as_array(z)
        idx = classify(za)
        out = np.full(za.shape, np.nan + 0j)
        reg = idx == -1
        zr = za[reg]
        hr = h(zr)
        out[reg] = np.conj(kp(zr)) - mu * H(zr) * np.conj(hp(zr)) / np.conj(hr) ** 2
        for j, p in enumerate(zeros):
            sel = idx == -2 - j
            if np.any(sel):
                zc = za[sel]
                out[sel] = charts[p].fzbar_minus_regular(zc - p) + np.conj(rest_of[p][1](zc))
        return _ret(scalar, out)

    def h_eval(z):
        scalar, za = _as_array(z)
        return _ret(scalar, h_local(za, classify(za)))

    return ElasticMapAnalytic(f, fz, fzbar, lam, "Weierstrass", h=h_eval, branch_points=zeros)


def g_of(fmap: ElasticMapAnalytic, z):
    """``(1+lam) f_z - lam f_z/|f_z|``; raises :class:`BranchPoint` where ``f_z`` vanishes."""
    fz = np.asarray(fmap.fz(z), dtype=complex)
    a = np.abs(fz)
    if np.any(a < BRANCH_TOL):
        raise BranchPoint("f_z vanishes")
    out = (1 + fmap.lam) * fz - fmap.lam * fz / a
    return complex(out) if np.isscalar(z) else out


# -- special solutions -------------------------------------------------------

def _melting(lam: float, k: Optional[AnalyticExpr] = None) -> ElasticMapAnalytic:
    mu = _mu(lam)
    k = k if k is not None else AnalyticExpr()
    kp = derivative(k)

    def guard(za):
        if za.size and np.min(np.abs(za)) < BRANCH_TOL:
            raise DomainViolation("melting-point example is undefined at z = 0")

    def f(z):
        scalar, za = _as_array(z)
        guard(za)
        out = mu / (1j * np.conj(za)) * np.exp(1j * za * np.conj(za)) + np.conj(k(za))
        return _ret(scalar, out)

    def fz(z):
        scalar, za = _as_array(z)
        guard(za)
        return _ret(scalar, mu * np.exp(1j * za * np.conj(za)))

    def fzbar(z):
        scalar, za = _as_array(z)
        guard(za)
        zb = np.conj(za)
        e = np.exp(1j * za * zb)
        out = (mu / 1j) * e * (1j * za / zb - 1 / zb**2) + np.conj(kp(za))
        return _ret(scalar, out)

    return ElasticMapAnalytic(f, fz, fzbar, lam, "Melting")


def _borderline(lam: float, H: AnalyticExpr, k: Optional[AnalyticExpr] = None) -> ElasticMapAnalytic:
    mu = _mu(lam)
    k = k if k is not None else AnalyticExpr()
    h = derivative(H)
    hp = derivative(h)
    kp = derivative(k)

    def hr(za):
        v = h(za)
        if np.any(np.abs(v) < BRANCH_TOL):
            raise PoleEvaluation("borderline map evaluated at a zero of H'")
        return v

    def f(z):
        scalar, za = _as_array(z)
        return _ret(scalar, mu * H(za) / np.conj(hr(za)) + np.conj(k(za)))

    def fz(z):
        scalar, za = _as_array(z)
        v = hr(za)
        return _ret(scalar, mu * v / np.conj(v))

    def fzbar(z):
        scalar, za = _as_array(z)
        v = hr(za)
        return _ret(scalar, np.conj(kp(za)) - mu * H(za) * np.conj(hp(za)) / np.conj(v) ** 2)

    return ElasticMapAnalytic(f, fz, fzbar, lam, "Borderline", h=h)


def _odd_zero(radius: float = 0.9) -> ElasticMapAnalytic:
    # lam = 1, g = z^2 + 1 with h = sqrt(1 + z^2) on the principal branch
    def guard(za):
        if za.size and np.max(np.abs(za)) > radius:
            raise DomainViolation(f"odd-zero example restricted to |z| <= {radius}")

    def parts(za):
        h = np.sqrt(1 + za * za)
        A = np.arcsinh(za) + za * h
        return h, A

    def f(z):
        scalar, za = _as_array(z)
        guard(za)
        h, A = parts(za)
        return _ret(scalar, za**3 / 6 + za / 2 + A.real / (2 * np.conj(h)))

    def fz(z):
        scalar, za = _as_array(z)
        guard(za)
        h, _ = parts(za)
        return _ret(scalar, (za * za + 1) / 2 + 0.5 * h / np.conj(h))

    def fzbar(z):
        scalar, za = _as_array(z)
        guard(za)
        h, A = parts(za)
        hp = za / h
        return _ret(scalar, 0.5 - A.real * np.conj(hp) / (2 * np.conj(h) ** 2))

    def h_fn(z):
        return np.sqrt(1 + np.asarray(z, dtype=complex) ** 2)

    return ElasticMapAnalytic(f, fz, fzbar, 1.0, "OddZeroExample", h=h_fn, branch_points=[1j, -1j])


def special_map(kind: str, lam: float = 1.0, **params) -> ElasticMapAnalytic:
    """Closed-form melting, borderline, or odd-zero example maps.

    ``kind`` is one of ``"melting"`` (optional ``k``), ``"borderline"``
    (``H`` required, optional ``k``) or ``"odd_zero"`` (``lam`` must be 1,
    optional ``radius`` of the admissible disk, default 0.9).
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    kind = kind.lower()
    if kind == "melting":
        return _melting(lam, params.get("k"))
    if kind == "borderline":
        return _borderline(lam, params["H"], params.get("k"))
    if kind in ("odd_zero", "oddzero", "oddzeroexample"):
        if lam != 1:
            raise ValueError("the odd-zero example is defined for lambda = 1 only")
        return _odd_zero(params.get("radius", 0.9))
    raise ValueError(f"unknown special map kind {kind!r}")


@dataclass
class CertificateReport:
    min_value: float
    all_nonneg: bool
    values: np.ndarray


def strict_minimizer_certificate(datum: WeierstrassDatum, samples) -> CertificateReport:
    """Closed form of ``1 + V'(|f_z|^2)`` for a Weierstrass map at ``samples``."""
    lam = datum.lam
    a2 = np.abs(datum.h(np.asarray(samples, dtype=complex))) ** 2
    vals = a2 * (1 + lam) ** 2 / (2 * lam + a2 * (1 + lam))
    return CertificateReport(float(np.min(vals)), bool(np.all(vals >= 0)), vals)


def arg_laplacian(fmap: ElasticMapAnalytic, z, step: float = 1e-4):
    """Five-point Laplacian of ``arg f_z`` at ``z``.

    Phases are taken relative to the centre value, so branch cuts of ``arg``
    never enter.  Harmonic phase (borderline maps) gives ``O(step^2)``.
    """
    scalar, za = _as_array(z)
    c = np.asarray(fmap.fz(za), dtype=complex)
    total = np.zeros(za.shape)
    for d in (step, -step, 1j * step, -1j * step):
        total += np.angle(np.asarray(fmap.fz(za + d), dtype=complex) / c)
    out = total / step**2
    return float(out) if scalar else out


def melting_defect(fmap: ElasticMapAnalytic, z):
    """``|f_z| - lam/(1+lam)``; zero on melting-point solutions."""
    return np.abs(np.asarray(fmap.fz(z), dtype=complex)) - _mu(fmap.lam)
