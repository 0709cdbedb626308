"""Planar elasticity: Weierstrass-type closed-form elastic maps and discrete energy minimization."""
from .complex_analytic import AnalyticExpr
from .kernels import BACKEND
from .mesh import DeformedState, TriangleMesh

__version__ = "0.1.0"
__all__ = ["AnalyticExpr", "BACKEND", "DeformedState", "TriangleMesh", "__version__"]
