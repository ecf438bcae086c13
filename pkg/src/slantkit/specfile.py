"""Manifold spec files: the JSON document format the CLI consumes.

Top-level keys:

    ambient_dim       int
    epsilon           -1 or 1
    kind              "hermitian-like" | "contact-like"
    metric            "euclidean" (default) or an n x n matrix of expressions
    phi_columns       n arrays of n expression strings; column i is the image
                      of the i-th coordinate frame field
    xi                n expression strings (required for contact-like)
    submanifold_mask  optional array of 1-based coordinate indices in TM
    distributions     { name: [ [n expression strings], ... ] }
    decomposition     { "invariant": name|null, "proper": [names] } or null
                      (null switches classification to discovery mode)
    sample_points     array of coordinate arrays, or
                      { "seed": int, "count": int, "box": [lo, hi] }
    tolerances        optional overrides, keys as in config.Tolerances

This module owns schema and reference checking; the semantic checks (axioms,
orthogonality, ranks) live with the structure and distribution modules.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import expr as fe
from .config import DEFAULT_TOLERANCES, Tolerances
from .distribution import Decomposition, DistributionFrame
from .errors import SpecError
from .sampling import box_points
from .structure import KINDS, StructureField


class ManifoldSpec:
    def __init__(self, raw: dict, structure: StructureField,
                 decomposition: Decomposition | None,
                 mask: tuple[int, ...] | None,
                 points: list[np.ndarray], tolerances: Tolerances):
        self.raw = raw
        self.structure = structure
        self.decomposition = decomposition
        self.mask = mask
        self.points = points
        self.tolerances = tolerances

    @property
    def discovery(self) -> bool:
        return self.decomposition is None

    def digest(self) -> str:
        return spec_digest(self.raw)


def canonical_dumps(obj) -> str:
    """Canonical JSON: sorted keys, compact separators, LF, shortest
    round-trip floats."""
    return json.dumps(_sanitize(obj), sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if v != v:
            return "nan"
        if v == float("inf"):
            return "inf"
        if v == float("-inf"):
            return "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def spec_digest(raw: dict) -> str:
    return hashlib.sha256(canonical_dumps(raw).encode("utf-8")).hexdigest()


def _need(raw: dict, key: str):
    if key not in raw:
        raise SpecError(f"spec is missing the required key {key!r}")
    return raw[key]


def load_manifold_spec(source, seed_for_points: int | None = None) -> ManifoldSpec:
    """Load and schema-check a spec from a path, JSON text, or dict."""
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        try:
            raw = json.loads(Path(source).read_text())
        except FileNotFoundError:
            raise SpecError(f"spec file not found: {source}") from None
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec file is not valid JSON: {exc}") from None
    elif isinstance(source, str):
        try:
            raw = json.loads(source)
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec text is not valid JSON: {exc}") from None
    elif isinstance(source, dict):
        raw = source
    else:
        raise SpecError(f"cannot load a spec from {type(source).__name__}")
    if not isinstance(raw, dict):
        raise SpecError("spec document must be a JSON object")

    n = _need(raw, "ambient_dim")
    if not isinstance(n, int) or n < 1:
        raise SpecError("ambient_dim must be a positive integer")
    epsilon = _need(raw, "epsilon")
    if epsilon not in (-1, 1):
        raise SpecError("epsilon must be -1 or 1")
    kind = _need(raw, "kind")
    if kind not in KINDS:
        raise SpecError(f"kind must be one of {KINDS}")

    metric_raw = raw.get("metric", "euclidean")
    metric = None
    if metric_raw != "euclidean":
        if (not isinstance(metric_raw, list) or len(metric_raw) != n
                or any(not isinstance(row, list) or len(row) != n for row in metric_raw)):
            raise SpecError('metric must be "euclidean" or an n x n matrix of expressions')
        metric = [[fe.parse(src, n) for src in row] for row in metric_raw]

    phi_raw = _need(raw, "phi_columns")
    if (not isinstance(phi_raw, list) or len(phi_raw) != n
            or any(not isinstance(col, list) or len(col) != n for col in phi_raw)):
        raise SpecError("phi_columns must be n arrays of n expression strings")
    phi = [[fe.parse(src, n) for src in col] for col in phi_raw]

    xi = None
    if kind == "contact-like":
        xi_raw = raw.get("xi")
        if xi_raw is None:
            raise SpecError("contact-like specs need xi")
        xi = fe.VectorFieldExpr.parse(xi_raw, n)
    elif raw.get("xi") is not None:
        raise SpecError("hermitian-like specs carry no xi")

    structure = StructureField(n, epsilon, kind, phi, metric=metric, xi=xi)

    mask = None
    if raw.get("submanifold_mask") is not None:
        mask_raw = raw["submanifold_mask"]
        if (not isinstance(mask_raw, list) or not mask_raw
                or any(not isinstance(i, int) for i in mask_raw)):
            raise SpecError("submanifold_mask must be a nonempty array of integers")
        if any(i < 1 or i > n for i in mask_raw):
            raise SpecError(f"submanifold_mask indices must lie in 1..{n}")
        mask = tuple(sorted(set(mask_raw)))

    dists_raw = raw.get("distributions", {})
    if not isinstance(dists_raw, dict):
        raise SpecError("distributions must be an object of name -> field arrays")
    frames: dict[str, DistributionFrame] = {}
    for name, fields_raw in dists_raw.items():
        if not isinstance(fields_raw, list) or not fields_raw:
            raise SpecError(f"distribution {name!r} must list at least one vector field")
        fields = [fe.VectorFieldExpr.parse(src, n) for src in fields_raw]
        frames[name] = DistributionFrame(name, fields, mask=mask)

    decomposition = None
    dec_raw = raw.get("decomposition")
    if dec_raw is not None:
        if not isinstance(dec_raw, dict):
            raise SpecError("decomposition must be an object or null")
        inv_name = dec_raw.get("invariant")
        proper_names = dec_raw.get("proper", [])
        if not isinstance(proper_names, list):
            raise SpecError("decomposition.proper must be an array of names")
        if inv_name is None and not proper_names:
            raise SpecError("decomposition names no components")
        for nm in ([inv_name] if inv_name else []) + list(proper_names):
            if nm not in frames:
                raise SpecError(f"decomposition references unknown distribution {nm!r}")
        decomposition = Decomposition(
            structure, [frames[nm] for nm in proper_names],
            invariant=frames[inv_name] if inv_name else None, mask=mask)

    points = _load_points(_need(raw, "sample_points"), n, mask, seed_for_points)
    tolerances = DEFAULT_TOLERANCES.override(raw.get("tolerances"))
    return ManifoldSpec(raw, structure, decomposition, mask, points, tolerances)


def _load_points(points_raw, n, mask, seed_for_points) -> list[np.ndarray]:
    if isinstance(points_raw, dict):
        for key in ("seed", "count"):
            if key not in points_raw:
                raise SpecError(f"sample_points generator needs {key!r}")
        box = points_raw.get("box", [-2.0, 2.0])
        if not isinstance(box, list) or len(box) != 2 or not box[0] < box[1]:
            raise SpecError("sample_points.box must be [lo, hi] with lo < hi")
        seed = int(points_raw["seed"]) if seed_for_points is None else seed_for_points
        count = int(points_raw["count"])
        if count < 1:
            raise SpecError("sample_points.count must be >= 1")
        return box_points(n, mask, count, box=(float(box[0]), float(box[1])), seed=seed)
    if not isinstance(points_raw, list) or not points_raw:
        raise SpecError("sample_points must be a nonempty array or a generator object")
    points = []
    for row in points_raw:
        arr = np.asarray(row, dtype=float)
        if arr.shape != (n,):
            raise SpecError(f"sample point {row!r} does not have {n} coordinates")
        if not np.all(np.isfinite(arr)):
            raise SpecError("sample points must be finite")
        if mask is not None:
            outside = [i for i in range(n) if (i + 1) not in mask]
            if outside and float(np.max(np.abs(arr[outside]), initial=0.0)) > 0:
                raise SpecError("sample point leaves the submanifold mask")
        points.append(arr)
    return points
