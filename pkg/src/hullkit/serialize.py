"""Versioned JSON persistence for fields, discs, clouds, and reports.

Every artifact is a JSON document with a "format" tag and a "kind"
discriminator.  Serialization is deterministic (sorted keys, fixed
indentation, no NaN or infinity) so identical inputs produce byte
identical files; floats use the shortest round-trip representation, so
reloads are bit exact.  Complex numbers are stored as [re, im] pairs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .discs import ConformalMinimalDisc, HolomorphicDisc, NullDisc
from .envelope import Grid3
from .polynomials import Poly3, Quadratic
from .psh import ScalarFunction

FORMAT_TAG = "hullkit/1"


class ValidationError(ValueError):
    """Raised when a document fails schema or finiteness checks."""


def to_jsonable(obj):
    """Recursively convert arrays, numpy scalars, and complexes."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    raise ValidationError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(doc):
    """Canonical JSON text: sorted keys, 1-space indent, finite only."""
    try:
        return json.dumps(to_jsonable(doc), sort_keys=True, indent=1, allow_nan=False)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def dump_json(doc, path):
    Path(path).write_text(dumps(doc) + "\n")


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc}") from exc


def _require_keys(doc, required, optional, kind):
    if not isinstance(doc, dict):
        raise ValidationError(f"{kind} document must be a JSON object")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ValidationError(f"{kind} document missing keys {missing}")
    unknown = sorted(set(doc) - set(required) - set(optional))
    if unknown:
        raise ValidationError(f"{kind} document has unknown keys {unknown}")


def _require_format(doc, kind):
    if doc.get("format") != FORMAT_TAG:
        raise ValidationError(
            f"expected format {FORMAT_TAG!r}, got {doc.get('format')!r}"
        )
    if doc.get("kind") != kind:
        raise ValidationError(f"expected kind {kind!r}, got {doc.get('kind')!r}")


def _finite_array(data, kind, dtype=float):
    arr = np.asarray(data, dtype=dtype)
    probe = np.abs(arr) if np.iscomplexobj(arr) else arr
    if arr.size and not np.isfinite(probe).all():
        raise ValidationError(f"{kind} document contains non-finite entries")
    return arr


def _complex_array(pairs, kind):
    arr = _finite_array(pairs, kind)
    if arr.shape[-1] != 2:
        raise ValidationError(f"{kind} complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _complex_pairs(arr):
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1)


def save_point_cloud(points, path, space="R3", name=None):
    points = np.asarray(points)
    doc = {"space": space, "points": to_jsonable(points)}
    if name is not None:
        doc["name"] = name
    validate_point_cloud(doc)
    dump_json(doc, path)


def validate_point_cloud(doc):
    """Schema check for {"space", "points", optional "name"}."""
    _require_keys(doc, ["space", "points"], ["name"], "point cloud")
    space = doc["space"]
    if space not in ("R3", "C3"):
        raise ValidationError(f"space must be 'R3' or 'C3', got {space!r}")
    pts = doc["points"]
    if not isinstance(pts, list) or len(pts) == 0:
        raise ValidationError("empty point set")
    arr = _finite_array(pts, "point cloud")
    width = 3 if space == "R3" else 6
    if arr.ndim != 2 or arr.shape[1] != width:
        raise ValidationError(
            f"points for space {space} must be rows of length {width}"
        )
    return arr


def load_point_cloud(path):
    """Returns (points array, space, name)."""
    doc = load_json(path)
    arr = validate_point_cloud(doc)
    return arr, doc["space"], doc.get("name")


def save_field(grid: Grid3, path, extra=None):
    doc = {
        "format": FORMAT_TAG,
        "kind": "field",
        "lo": to_jsonable(grid.lo),
        "hi": to_jsonable(grid.hi),
        "shape": list(grid.shape),
        "values": to_jsonable(grid.values.reshape(-1)),
        "mask": to_jsonable(grid.mask.reshape(-1).astype(int)),
    }
    if extra:
        doc["extra"] = to_jsonable(extra)
    dump_json(doc, path)


def load_field(path):
    doc = load_json(path)
    _require_format(doc, "field")
    _require_keys(
        doc,
        ["format", "kind", "lo", "hi", "shape", "values", "mask"],
        ["extra"],
        "field",
    )
    shape = tuple(int(s) for s in doc["shape"])
    values = _finite_array(doc["values"], "field").reshape(shape)
    mask = np.asarray(doc["mask"], dtype=int).reshape(shape).astype(bool)
    return Grid3(lo=doc["lo"], hi=doc["hi"], values=values, mask=mask)


def save_disc(disc, path, extra=None):
    """Persist a null disc, a plain holomorphic disc, or a minimal disc."""
    if isinstance(disc, ConformalMinimalDisc):
        doc = _disc_doc(disc.lift)
        doc["view"] = "real_part"
    else:
        doc = _disc_doc(disc)
        doc["view"] = "holomorphic"
    if extra:
        doc["extra"] = to_jsonable(extra)
    dump_json(doc, path)


def _disc_doc(disc: HolomorphicDisc):
    doc = {
        "format": FORMAT_TAG,
        "kind": "disc",
        "coeffs": to_jsonable(_complex_pairs(disc.coeffs)),
    }
    if isinstance(disc, NullDisc):
        doc["spinor_a"] = to_jsonable(_complex_pairs(disc.spinor_a))
        doc["spinor_b"] = to_jsonable(_complex_pairs(disc.spinor_b))
    return doc


def load_disc(path):
    doc = load_json(path)
    _require_format(doc, "disc")
    _require_keys(
        doc,
        ["format", "kind", "coeffs", "view"],
        ["spinor_a", "spinor_b", "extra"],
        "disc",
    )
    coeffs = _complex_array(doc["coeffs"], "disc")
    if "spinor_a" in doc:
        disc = NullDisc(
            coeffs,
            spinor_a=_complex_array(doc["spinor_a"], "disc"),
            spinor_b=_complex_array(doc["spinor_b"], "disc"),
        )
    else:
        disc = HolomorphicDisc(coeffs)
    if doc["view"] == "real_part":
        return ConformalMinimalDisc(disc)
    return disc


def parse_function(doc):
    """Build a ScalarFunction from a polynomial JSON document.

    Two kinds are accepted: "poly3" with sparse trivariate terms
    [[[i, j, k], coefficient], ...] on R^3, and "quadratic" with a
    symmetric matrix acting on the real coordinates (dimension 3 for
    space R3, 6 for C3).
    """
    _require_keys(
        doc, ["kind", "space"], ["format", "terms", "a", "b", "c", "name"], "function"
    )
    if "format" in doc and doc["format"] != FORMAT_TAG:
        raise ValidationError(f"unsupported format {doc['format']!r}")
    kind = doc["kind"]
    space = doc["space"]
    if space not in ("R3", "C3"):
        raise ValidationError(f"space must be 'R3' or 'C3', got {space!r}")
    name = doc.get("name", "")
    if kind == "poly3":
        if space != "R3":
            raise ValidationError("poly3 functions live on R3")
        if "terms" not in doc:
            raise ValidationError("poly3 document needs terms")
        try:
            poly = Poly3.from_dict(
                {tuple(int(e) for e in key): float(c) for key, c in doc["terms"]}
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed polynomial terms: {exc}") from exc
        return ScalarFunction.from_poly(poly, name=name or "poly3")
    if kind == "quadratic":
        width = 3 if space == "R3" else 6
        a = _finite_array(doc.get("a", np.zeros((width, width))), "function")
        b = _finite_array(doc.get("b", np.zeros(width)), "function")
        c = float(doc.get("c", 0.0))
        if a.shape != (width, width) or b.shape != (width,):
            raise ValidationError(
                f"quadratic for space {space} needs a {width}x{width} matrix"
            )
        try:
            quad = Quadratic(A=a, b=b, c=c)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        return ScalarFunction.from_quadratic(quad, space=space, name=name or "quadratic")
    raise ValidationError(f"unknown function kind {kind!r}")


def load_function(path):
    return parse_function(load_json(path))


def save_report(payload, path, kind="report"):
    doc = {"format": FORMAT_TAG, "kind": kind}
    doc.update(to_jsonable(payload))
    dump_json(doc, path)


def load_report(path, kind="report"):
    doc = load_json(path)
    _require_format(doc, kind)
    return doc


def write_csv(path, header, rows):
    """Plot-ready CSV with a fixed float format."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(repr(float(v)))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")
