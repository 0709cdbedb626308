"""Strict JSON run configuration for the command-line tool.

Every record rejects unknown keys.  Complex numbers may be given as a
number, a ``[re, im]`` pair or a string such as ``"1-2j"``.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from .complex_analytic import AnalyticExpr, ExpTerm, Monomial


class ConfigError(ValueError):
    """Malformed or physically invalid configuration (exit code 1)."""


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def record(obj: Any, where: str, required: Iterable[str] = (), optional: Iterable[str] = ()) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    required, optional = set(required), set(optional)
    unknown = sorted(set(obj) - required - optional)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")
    missing = sorted(required - set(obj))
    if missing:
        raise ConfigError(f"{where}: missing key(s) {', '.join(missing)}")
    return obj


def as_complex(v: Any, where: str) -> complex:
    if isinstance(v, bool):
        raise ConfigError(f"{where}: expected a complex number")
    if isinstance(v, (int, float)):
        out = complex(v)
    elif isinstance(v, str):
        try:
            out = complex(v.replace(" ", "").replace("i", "j"))
        except ValueError:
            raise ConfigError(f"{where}: cannot parse {v!r} as a complex number") from None
    elif isinstance(v, (list, tuple)) and len(v) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        out = complex(v[0], v[1])
    else:
        raise ConfigError(f"{where}: expected a number, [re, im] or a string")
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise ConfigError(f"{where}: must be finite")
    return out


def as_float(v: Any, where: str, positive: bool = False, nonneg: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}: expected a finite number")
    if positive and not v > 0:
        raise ConfigError(f"{where}: must be positive")
    if nonneg and v < 0:
        raise ConfigError(f"{where}: must be nonnegative")
    return float(v)


def as_int(v: Any, where: str, minimum: Optional[int] = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}: expected an integer")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}: must be at least {minimum}")
    return v


def as_half_integer(v: Any, where: str) -> Fraction:
    x = as_float(v, where, nonneg=True)
    if abs(2 * x - round(2 * x)) > 1e-12:
        raise ConfigError(f"{where}: 2n must be a nonnegative integer")
    return Fraction(round(2 * x), 2)


def lam_of(cfg: dict, override: Optional[float], default: float = 1.0) -> float:
    lam = override if override is not None else cfg.get("lambda", default)
    return as_float(lam, "lambda", positive=True)


# -- holomorphic data ---------------------------------------------------------

def parse_h(spec: Any, where: str = "h") -> tuple[AnalyticExpr, Optional[list]]:
    """Build ``h``; returns ``(expr, zeros or None)``.

    Forms: ``{"coeffs": [...], "center": c}`` (ascending powers),
    ``{"roots": [{"p": .., "order": ..}], "scale": s}`` or
    ``{"terms": [{"kind": "monomial", "coeff", "power", "center"} | {"kind": "exp", "coeff", "rate"}]}``.
    """
    rec = record(spec, where, optional=("coeffs", "center", "roots", "scale", "terms"))
    forms = [k for k in ("coeffs", "roots", "terms") if k in rec]
    if len(forms) != 1:
        raise ConfigError(f"{where}: give exactly one of coeffs, roots, terms")
    form = forms[0]
    if form != "coeffs" and "center" in rec:
        raise ConfigError(f"{where}: center only applies to coeffs")
    if form != "roots" and "scale" in rec:
        raise ConfigError(f"{where}: scale only applies to roots")
    if form == "coeffs":
        coeffs = rec["coeffs"]
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError(f"{where}.coeffs: expected a nonempty list")
        cs = [as_complex(c, f"{where}.coeffs[{i}]") for i, c in enumerate(coeffs)]
        center = as_complex(rec.get("center", 0), f"{where}.center")
        return AnalyticExpr.polynomial(cs, center), None
    if form == "roots":
        zeros = parse_zeros(rec["roots"], f"{where}.roots")
        scale = as_complex(rec.get("scale", 1), f"{where}.scale")
        if scale == 0:
            raise ConfigError(f"{where}.scale: must be nonzero")
        return AnalyticExpr.from_roots(zeros, scale), zeros
    terms = rec["terms"]
    if not isinstance(terms, list) or not terms:
        raise ConfigError(f"{where}.terms: expected a nonempty list")
    out = []
    for i, t in enumerate(terms):
        w = f"{where}.terms[{i}]"
        kind = t.get("kind") if isinstance(t, dict) else None
        if kind == "monomial":
            r = record(t, w, required=("kind", "coeff", "power"), optional=("center",))
            power = as_int(r["power"], f"{w}.power")
            if power < 0:
                raise ConfigError(f"{w}.power: h must be holomorphic (power >= 0)")
            out.append(Monomial(as_complex(r["coeff"], f"{w}.coeff"), power,
                                as_complex(r.get("center", 0), f"{w}.center")))
        elif kind == "exp":
            r = record(t, w, required=("kind", "coeff", "rate"))
            out.append(ExpTerm(as_complex(r["coeff"], f"{w}.coeff"), as_complex(r["rate"], f"{w}.rate")))
        else:
            raise ConfigError(f"{w}.kind: expected 'monomial' or 'exp'")
    return AnalyticExpr(out), None


def parse_zeros(spec: Any, where: str = "zeros") -> list:
    if not isinstance(spec, list):
        raise ConfigError(f"{where}: expected a list")
    out = []
    for i, z in enumerate(spec):
        r = record(z, f"{where}[{i}]", required=("p",), optional=("order",))
        out.append((as_complex(r["p"], f"{where}[{i}].p"), as_int(r.get("order", 1), f"{where}[{i}].order", 1)))
    return out


def parse_datum_fields(rec: dict, where: str) -> tuple[AnalyticExpr, list]:
    if "h" not in rec:
        raise ConfigError(f"{where}: missing key h")
    h, zeros = parse_h(rec["h"], f"{where}.h" if where else "h")
    if "zeros" in rec:
        zeros = parse_zeros(rec["zeros"], f"{where}.zeros" if where else "zeros")
    elif zeros is None:
        raise ConfigError(f"{where or 'config'}: zeros must be declared (use [] for none)")
    return h, zeros


# -- meshes ----------------------------------------------------------------

MESH_SHAPES = {
    "disk": (("radius", "resolution"), ("center",)),
    "rectangle": (("width", "height", "nx", "ny"), ("origin",)),
    "annulus": (("r1", "r2", "resolution"), ("layers",)),
}


def parse_mesh_shape(spec: Any, where: str, extra: Iterable[str] = ()) -> dict:
    """Validated generator arguments for a disk, rectangle or annulus mesh."""
    if not isinstance(spec, dict) or "shape" not in spec:
        raise ConfigError(f"{where}: expected an object with a shape")
    shape = spec["shape"]
    if shape not in MESH_SHAPES:
        raise ConfigError(f"{where}.shape: expected one of {', '.join(MESH_SHAPES)}")
    req, opt = MESH_SHAPES[shape]
    rec = record(spec, where, required=("shape",) + req, optional=opt + tuple(extra))
    out = {"shape": shape}
    if shape == "disk":
        out["radius"] = as_float(rec["radius"], f"{where}.radius", positive=True)
        out["resolution"] = as_int(rec["resolution"], f"{where}.resolution", 3)
        out["center"] = as_complex(rec.get("center", 0), f"{where}.center")
    elif shape == "rectangle":
        out["width"] = as_float(rec["width"], f"{where}.width", positive=True)
        out["height"] = as_float(rec["height"], f"{where}.height", positive=True)
        out["nx"] = as_int(rec["nx"], f"{where}.nx", 1)
        out["ny"] = as_int(rec["ny"], f"{where}.ny", 1)
        out["origin"] = as_complex(rec.get("origin", 0), f"{where}.origin")
    else:
        out["r1"] = as_float(rec["r1"], f"{where}.r1", positive=True)
        out["r2"] = as_float(rec["r2"], f"{where}.r2", positive=True)
        if not out["r1"] < out["r2"]:
            raise ConfigError(f"{where}: require r1 < r2")
        out["resolution"] = as_int(rec["resolution"], f"{where}.resolution", 3)
        out["layers"] = as_int(rec["layers"], f"{where}.layers", 1) if "layers" in rec else None
    return out


def json_dumps(obj: Any) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def _plain(obj: Any):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Fraction):
        return float(obj)
    return obj
