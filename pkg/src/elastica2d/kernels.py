"""Kernel backend selection.

The compiled extension is used when importable; set
``ELASTICA2D_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _fallback

BACKENDS = {"numpy": _fallback.lambda_energy_grad}

try:
    from ._kernels import lambda_energy_grad as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None
else:
    BACKENDS["cython"] = _compiled

if _compiled is not None and not os.environ.get("ELASTICA2D_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "numpy"

lambda_energy_grad = BACKENDS[BACKEND]


def get(name=None):
    """Kernel function for ``name`` (default: the active backend)."""
    return BACKENDS[name or BACKEND]
