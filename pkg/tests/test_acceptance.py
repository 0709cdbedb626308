"""Acceptance suite: twelve criteria at their stated tolerances.

Each check returns ``(passed, detail)``; the pytest wrappers print one
``PASS``/``FAIL`` line per criterion.  Run the file directly for the same
report without pytest.
"""
import math
import time

import numpy as np
import pytest

from elastica2d.annulus import (
    Curve,
    StripFamily,
    annulus_map,
    annulus_residual,
    solve_annulus_params,
    strip_map,
    traction_residual,
)
from elastica2d.complex_analytic import AnalyticExpr, wirtinger_fd
from elastica2d.elasticity import (
    MELTING,
    PotentialV,
    analytic_stability,
    energy,
    energy_and_gradient,
    energy_area_identity,
    image_area,
    rigid_fit,
    second_variation,
    stability_report,
    UNSTABLE,
)
from elastica2d.mesh import annulus_mesh, disk_mesh
from elastica2d.solver import Constraints, SolverConfig, linear_blend, minimize, smooth_perturbation
from elastica2d.weierstrass import (
    WeierstrassDatum,
    arg_laplacian,
    build_elastic_map,
    compensating_k,
    g_of,
    melting_defect,
    special_map,
)

SEED = 20240611
QUARTIC = AnalyticExpr.polynomial([-1, 0, 0, 0, 1])
QUARTIC_ZEROS = [(1, 1), (-1, 1), (1j, 1), (-1j, 1)]


def report(n, passed, detail):
    return f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}"


# -- individual criteria ------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    k = compensating_k(WeierstrassDatum(QUARTIC, 1.0, QUARTIC_ZEROS))
    elapsed = time.perf_counter() - t0
    terms = k.k.terms
    simple = len(terms) == 4 and all(t.power == -1 for t in terms)
    centers = {complex(t.center) for t in terms}
    err = max(abs(t.coeff - 0.1) for t in terms)
    ok = simple and centers == {1, -1, 1j, -1j} and err <= 1e-12 and elapsed < 1
    return ok, f"poles {sorted(centers, key=lambda c: (c.real, c.imag))}, coeff err {err:.1e}, {elapsed:.3f}s"


def _random_data(rng):
    out = []
    for lam in (0.5, 1.0, 2.0, 1.0, 0.5):
        roots = [(complex(*rng.uniform(-1, 1, 2)), int(rng.integers(1, 3))) for _ in range(rng.integers(1, 4))]
        d = WeierstrassDatum(AnalyticExpr.from_roots(roots, complex(*rng.uniform(0.5, 1.5, 2))), lam, roots)
        z = rng.uniform(-1.3, 1.3, 100) + 1j * rng.uniform(-1.3, 1.3, 100)
        out.append((d, build_elastic_map(d, compensating_k(d)), z))
    return out


def criterion_2():
    worst = 0.0
    for d, fm, z in _random_data(np.random.default_rng(SEED)):
        g = g_of(fm, z)
        worst = max(worst, float(np.max(np.abs(g - 0.5 * (1 + d.lam) * d.h(z) ** 2) / (1 + np.abs(g)))))
    return worst < 1e-9, f"max relative g residual {worst:.2e}"


def criterion_3():
    mod, fd = 0.0, 0.0
    for d, fm, z in _random_data(np.random.default_rng(SEED)):
        mu = d.lam / (1 + d.lam)
        mod = max(mod, float(np.max(np.abs(np.abs(fm.fz(z)) - 0.5 * (np.abs(d.h(z)) ** 2 + 2 * mu)))))
        fz, fzb = wirtinger_fd(fm.f, z, 1e-5)
        fd = max(fd, float(np.max(np.abs(fz - fm.fz(z)))), float(np.max(np.abs(fzb - fm.fzbar(z)))))
    return mod < 1e-10 and fd < 1e-6, f"modulus defect {mod:.2e}, finite-difference gap {fd:.2e}"


def criterion_4():
    t0 = time.perf_counter()
    fm = special_map("odd_zero", 1.0)
    x = np.linspace(-0.8, 0.8, 41)
    z = (x[None, :] + 1j * x[:, None]).ravel()
    z = z[np.abs(z) <= 0.8]
    fz, _ = wirtinger_fd(fm.f, z)
    g = (2 - 1 / np.abs(fz)) * fz
    err = float(np.max(np.abs(g - (z**2 + 1))))
    elapsed = time.perf_counter() - t0
    return err < 1e-7 and elapsed < 5, f"max |g - (z^2+1)| {err:.2e} over {len(z)} points, {elapsed:.3f}s"


def _lgs_oracle(r1, r2, n, lam):
    # boundary balance as a 2x2 linear system in u = 1/c^2, v = alpha/c^2
    A = (4 * n + 2) / ((1 + lam) * (n + 1))
    B = (4 * n + 2) / lam
    M = np.array([[A * r1 ** (2 * n + 2), B], [A * r2 ** (2 * n + 2), B]])
    u, v = np.linalg.solve(M, [r1 ** (4 * n + 2), r2 ** (4 * n + 2)])
    return 1 / u, v / u


def criterion_5():
    fam = solve_annulus_params(1, 2, 1, 1.0)
    c2, alpha = _lgs_oracle(1, 2, 1, 1.0)
    perr = max(abs(fam.c**2 - 5 / 14), abs(fam.alpha + 4 / 21), abs(c2 - 5 / 14), abs(alpha + 4 / 21))
    res = float(np.max(np.abs(annulus_residual(fam, [1.0, 2.0]))))
    fm = annulus_map(fam)
    tr = max(traction_residual(fm, Curve.circle(r), 1.0, 256) for r in (1.0, 2.0))
    ok = perr < 1e-12 and res < 1e-10 and tr < 1e-10
    return ok, f"param err {perr:.1e}, radial residual {res:.1e}, traction {tr:.1e}"


def criterion_6():
    fam = StripFamily.from_coefficients(1, 1.0, -15 / 32, 1.0)
    dom = max(abs(math.exp(fam.x1) - 0.75), abs(math.exp(fam.x2) - 1.25))
    back = StripFamily.from_domain(1, fam.x1, fam.x2, 1.0)
    aerr = abs(back.alpha + 15 / 32) + abs(back.c - 1)
    fm = strip_map(fam)
    tr = max(traction_residual(fm, Curve.vertical(x), 1.0, 256) for x in (fam.x1, fam.x2))
    ok = dom < 1e-12 and aerr < 1e-12 and tr < 1e-10
    return ok, f"domain err {dom:.1e}, alpha err {aerr:.1e}, traction {tr:.1e}"


def _random_state(mesh, rng, amp=0.2):
    a = complex(*rng.normal(1, 0.3, 2))
    n = mesh.n_vertices
    return a * mesh.vertices + amp * (rng.normal(size=n) + 1j * rng.normal(size=n))


def criterion_7():
    rng = np.random.default_rng(SEED)
    h = 1e-6
    worst = 0.0
    for _ in range(50):
        m = disk_mesh(float(rng.uniform(0.5, 2)), int(rng.integers(4, 9)))
        V = PotentialV.lambda_(float(rng.choice([0.5, 1.0, 2.0])))
        pos = _random_state(m, rng) * m.diameter
        _, g = energy_and_gradient(m, pos, V)
        floor = 1e-6 * float(np.max(np.abs(g)))
        for i in range(m.n_vertices):
            for d, part in ((1, np.real), (1j, np.imag)):
                p, q = pos.copy(), pos.copy()
                p[i] += h * d
                q[i] -= h * d
                fd = (energy(m, p, V) - energy(m, q, V)) / (2 * h)
                worst = max(worst, abs(fd - part(g[i])) / max(abs(part(g[i])), floor))
    return worst < 1e-5, f"max componentwise relative error {worst:.2e} over 50 pairs"


def criterion_8():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for k in range(20):
        m = disk_mesh(1.0, 8 + k % 5)
        V = PotentialV.lambda_((0.5, 1.0, 2.0)[k % 3])
        lhs, rhs = energy_area_identity(m, _random_state(m, rng), V)
        worst = max(worst, abs(lhs - rhs) / (1 + abs(rhs)))
    return worst < 1e-10, f"max |lhs - rhs|/(1+|rhs|) {worst:.2e}"


C9_LEVELS = (36, 72, 108)
C9_RADIUS = 1.2


def criterion_9():
    t0 = time.perf_counter()
    fm = build_elastic_map(WeierstrassDatum(QUARTIC, 1.0, QUARTIC_ZEROS),
                           compensating_k(WeierstrassDatum(QUARTIC, 1.0, QUARTIC_ZEROS)))
    V = PotentialV.lambda_(1.0)
    errs, sizes, ok_conv = [], [], True
    for n in C9_LEVELS:
        m = disk_mesh(C9_RADIUS, n)
        cons = Constraints.from_map(m, m.boundary, fm.f)
        state, rep = minimize(m, linear_blend(m, cons.pinned), cons, V, SolverConfig(grad_tol=1e-8))
        ok_conv &= rep.converged
        errs.append(float(np.max(np.abs(state.positions - fm.f(m.vertices))[m.interior])) / C9_RADIUS)
        sizes.append(m.n_triangles)
    elapsed = time.perf_counter() - t0
    mono = all(b < a for a, b in zip(errs, errs[1:]))
    ok = ok_conv and mono and errs[-1] < 5e-2 and elapsed < 60
    detail = ", ".join(f"{s} tri: {e:.4f}" for s, e in zip(sizes, errs))
    return ok, f"{detail}; {elapsed:.1f}s"


def criterion_10():
    rng = np.random.default_rng(SEED)
    m = disk_mesh(1.0, 24)
    V = PotentialV.lambda_(1.0)
    worst_e, worst_r, all_conv = 0.0, 0.0, True
    for _ in range(20):
        init = m.vertices + smooth_perturbation(m, 0.1, 4, rng)
        state, rep = minimize(m, init, Constraints(), V, SolverConfig(grad_tol=1e-10))
        all_conv &= rep.converged
        worst_e = max(worst_e, rep.final_energy / m.area)
        worst_r = max(worst_r, rigid_fit(m, state)[2])
    ring = annulus_mesh(1.0, 2.0, 48)
    fam = solve_annulus_params(1.0, 2.0, 1, 1.0)
    start = annulus_map(fam, warn=False).f(ring.vertices)
    state, rep = minimize(ring, start, Constraints(), V, SolverConfig(grad_tol=1e-8))
    ring_e = rep.final_energy / ring.area
    ok = all_conv and worst_e < 1e-10 and worst_r < 1e-6 and rep.converged and ring_e > 1e-3
    return ok, (f"disk: max E/area {worst_e:.1e}, max rigid residual {worst_r:.1e}; "
                f"annulus: E/area {ring_e:.4f} (converged {rep.converged})")


def criterion_11():
    lam = 1.0
    mu = lam / (1 + lam)
    fm = special_map("melting", lam)
    ring = annulus_mesh(0.3, 1.3, 32)
    stab = analytic_stability(ring, fm.fz, PotentialV.lambda_(lam))
    all_melting = stab.count(MELTING) == ring.n_triangles
    dev = float(np.max(np.abs(stab.fz_abs - mu)))
    cen = ring.vertices[ring.triangles].mean(axis=1)
    defect = float(np.max(np.abs(melting_defect(fm, cen))))
    lap = arg_laplacian(fm, cen)
    border = special_map("borderline", lam, H=AnalyticExpr.polynomial([0, 0, 0.5]))
    lap_b = arg_laplacian(border, cen)
    sep = float(np.max(np.abs(lap - 4))), float(np.max(np.abs(lap_b)))
    ok = all_melting and dev < 1e-10 and defect < 1e-10 and sep[0] < 1e-3 and sep[1] < 1e-3
    return ok, (f"{stab.count(MELTING)}/{ring.n_triangles} melting, ||fz|-mu| {dev:.1e}, "
                f"Laplacian: melting |L-4| {sep[0]:.1e}, borderline |L| {sep[1]:.1e}")


def _radial_bump(mesh, p, eps):
    w = mesh.vertices - p
    r = np.abs(w) / eps
    phi = np.where(r < 1, np.exp(-1 / np.maximum(1 - r**2, 1e-300)), 0.0)
    h = phi * w / eps
    h[mesh.boundary] = 0
    return h


def criterion_12():
    rng = np.random.default_rng(SEED)
    V = PotentialV.lambda_(1.0)
    m = disk_mesh(1.0, 24)
    n_int = len(m.interior)
    pos_min = np.inf
    for _ in range(20):
        h = np.zeros(m.n_vertices, complex)
        h[m.interior] = rng.normal(size=n_int) + 1j * rng.normal(size=n_int)
        pos_min = min(pos_min, second_variation(m, m.vertices, V, h))
    for p in (0j, 0.3 + 0.2j):
        pos_min = min(pos_min, second_variation(m, m.vertices, V, _radial_bump(m, p, 0.4)))
    # |f_z| = mu/2 everywhere, rotated so the bump direction is orthogonal to arg f_z
    unstable = 0.25j * m.vertices
    all_unstable = stability_report(m, unstable, V).count(UNSTABLE) == m.n_triangles
    neg = second_variation(m, unstable, V, _radial_bump(m, 0.1 + 0.05j, 0.4))
    pos = _random_state(m, rng, 0.02)
    fd_worst = 0.0
    for _ in range(5):
        h = np.zeros(m.n_vertices, complex)
        h[m.interior] = rng.normal(size=n_int) + 1j * rng.normal(size=n_int)
        t = 1e-4

        def F(s):
            x = pos + s * h
            return energy(m, x, V) + 0.5 * image_area(m, x)

        fd = (F(t) - 2 * F(0) + F(-t)) / t**2
        q = second_variation(m, pos, V, h)
        fd_worst = max(fd_worst, abs(fd - q) / abs(q))
    ok = pos_min > 0 and all_unstable and neg < 0 and fd_worst < 1e-4
    return ok, f"min at identity {pos_min:.3e}, bump on unstable state {neg:.3e}, FD rel err {fd_worst:.1e}"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 13)}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    passed, detail = CRITERIA[n]()
    with capsys.disabled():
        print("\n" + report(n, passed, detail))
    assert passed, detail


if __name__ == "__main__":
    results = []
    for n, fn in CRITERIA.items():
        passed, detail = fn()
        results.append(passed)
        print(report(n, passed, detail), flush=True)
    print(f"{sum(results)}/{len(results)} criteria passed")
