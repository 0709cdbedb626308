"""Numpy implementation of the per-triangle kernels (used when the extension is absent)."""
import numpy as np


def lambda_energy_grad(alpha, beta, area, tris, pos, lam, eps, need_grad):
    w = pos[tris]
    a = np.sum(alpha * w, axis=1)
    b = np.sum(beta * w, axis=1)
    s = np.sqrt(a.real**2 + a.imag**2 + eps * eps)
    dens = area * 0.5 * (lam * (s - 1.0) ** 2 + b.real**2 + b.imag**2)
    if not need_grad:
        return dens, None
    ga = lam * (1.0 - 1.0 / s) * a
    contrib = area[:, None] * (np.conj(alpha) * ga[:, None] + np.conj(beta) * b[:, None])
    return dens, scatter(tris, contrib, len(pos))


def scatter(tris, contrib, n):
    idx = tris.ravel()
    c = contrib.ravel()
    return np.bincount(idx, weights=c.real, minlength=n) + 1j * np.bincount(idx, weights=c.imag, minlength=n)
