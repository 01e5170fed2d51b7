"""File formats: Matrix Market stiffness matrices, model / DOF-map /
reference JSON, assessment reports and sweep tables.

Readers are strict by default: unknown fields and malformed entries are
rejected with the offending location (JSON-pointer path or file:line).
With ``strict=False`` unknown fields only raise a warning.  All
floating-point output is written with 17 significant digits, which
round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .core import DIRECTIONS, Direction, DofEntry, DofMap, ReferenceKinematics, StiffnessMatrix
from .errors import InvalidArgumentError, SchemaValidationError
from .fem.meshers import (
    NotchHingeParams,
    ParallelGuideParams,
    mesh_notch_hinge,
    mesh_parallel_guide,
)
from .fem.model import Element, Material, Model, RigidLink
from .fem.sweep import SweepTable
from .metrics import AssessmentReport

SCHEMA_VERSION = 1

#: Relative asymmetry above which a general-storage matrix is rejected.
MATRIX_SYMMETRY_RTOL = 1e-8


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def file_digest(*paths) -> str:
    """Hex SHA-256 over the raw bytes of the given files, in order."""
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Matrix Market


def read_matrix_market(path) -> StiffnessMatrix:
    """Read a real symmetric dense/coordinate Matrix Market file.

    Symmetric storage is expanded; general storage is accepted only when
    the result is symmetric within ``MATRIX_SYMMETRY_RTOL`` (relative to
    the largest entry), otherwise the worst entry is named.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise SchemaValidationError("empty file", path=f"{path}:1")

    header = lines[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket" or header[1].lower() != "matrix":
        raise SchemaValidationError(
            "expected header '%%MatrixMarket matrix <format> <field> <symmetry>'",
            path=f"{path}:1",
        )
    layout, field, symmetry = (w.lower() for w in header[2:5])
    if layout not in ("coordinate", "array"):
        raise SchemaValidationError(f"unsupported format {layout!r}", path=f"{path}:1")
    if field != "real":
        raise SchemaValidationError(f"unsupported field {field!r}, need 'real'", path=f"{path}:1")
    if symmetry not in ("general", "symmetric"):
        raise SchemaValidationError(
            f"unsupported symmetry {symmetry!r}, need 'general' or 'symmetric'",
            path=f"{path}:1",
        )

    data = [
        (i + 1, ln.strip())
        for i, ln in enumerate(lines)
        if ln.strip() and not ln.lstrip().startswith("%")
    ][1:]  # drop the header itself (first non-comment line)
    if not data:
        raise SchemaValidationError("missing size line", path=f"{path}:2")

    lineno, size_line = data[0]
    sizes = size_line.split()
    if layout == "coordinate":
        if len(sizes) != 3:
            raise SchemaValidationError("size line must be 'rows cols nnz'", path=f"{path}:{lineno}")
        rows, cols, nnz = (int(s) for s in sizes)
    else:
        if len(sizes) != 2:
            raise SchemaValidationError("size line must be 'rows cols'", path=f"{path}:{lineno}")
        rows, cols = (int(s) for s in sizes)
        nnz = None
    if rows != cols:
        raise SchemaValidationError(f"matrix must be square, got {rows}x{cols}", path=f"{path}:{lineno}")

    k = np.zeros((rows, cols))
    body = data[1:]

    if layout == "coordinate":
        if nnz != len(body):
            raise SchemaValidationError(
                f"size line promises {nnz} entries but file has {len(body)}",
                path=f"{path}:{lineno}",
            )
        seen = set()
        for ln_no, text in body:
            parts = text.split()
            if len(parts) != 3:
                raise SchemaValidationError("entry must be 'i j value'", path=f"{path}:{ln_no}")
            try:
                i, j = int(parts[0]), int(parts[1])
                v = float(parts[2])
            except ValueError as exc:
                raise SchemaValidationError(f"cannot parse entry: {exc}", path=f"{path}:{ln_no}")
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise SchemaValidationError(
                    f"index ({i}, {j}) outside 1..{rows}", path=f"{path}:{ln_no}"
                )
            key = (min(i, j), max(i, j)) if symmetry == "symmetric" else (i, j)
            if key in seen:
                raise SchemaValidationError(f"duplicate entry ({i}, {j})", path=f"{path}:{ln_no}")
            seen.add(key)
            k[i - 1, j - 1] = v
            if symmetry == "symmetric":
                k[j - 1, i - 1] = v
    else:
        if symmetry == "symmetric":
            expected = rows * (rows + 1) // 2
            coords = [(i, j) for j in range(cols) for i in range(j, rows)]
        else:
            expected = rows * cols
            coords = [(i, j) for j in range(cols) for i in range(rows)]
        if len(body) != expected:
            raise SchemaValidationError(
                f"array block must have {expected} values, found {len(body)}",
                path=f"{path}:{lineno}",
            )
        for (ln_no, text), (i, j) in zip(body, coords):
            try:
                v = float(text.split()[0])
            except (ValueError, IndexError) as exc:
                raise SchemaValidationError(f"cannot parse value: {exc}", path=f"{path}:{ln_no}")
            k[i, j] = v
            if symmetry == "symmetric":
                k[j, i] = v

    amax = float(np.abs(k).max()) if k.size else 0.0
    if amax > 0.0:
        skew = np.abs(k - k.T)
        worst = float(skew.max())
        if worst > MATRIX_SYMMETRY_RTOL * amax:
            i, j = np.unravel_index(int(np.argmax(skew)), skew.shape)
            raise SchemaValidationError(
                f"matrix is asymmetric at entry ({i + 1}, {j + 1}): "
                f"|k_ij - k_ji| = {worst:g} exceeds {MATRIX_SYMMETRY_RTOL:g} of max entry",
                path=str(path),
            )
    return StiffnessMatrix(0.5 * (k + k.T))


def write_matrix_market(k: StiffnessMatrix, path) -> None:
    """Write the lower triangle in coordinate symmetric format."""
    values = k.values
    entries = [
        (i + 1, j + 1, values[i, j])
        for i in range(k.n)
        for j in range(i + 1)
        if values[i, j] != 0.0
    ]
    lines = ["%%MatrixMarket matrix coordinate real symmetric"]
    lines.append(f"{k.n} {k.n} {len(entries)}")
    lines.extend(f"{i} {j} {_fmt(v)}" for i, j, v in entries)
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# JSON helpers


def _load_json(path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaValidationError(f"invalid JSON: {exc}", path=str(path))


def _need(obj: dict, key: str, ptr: str) -> Any:
    if key not in obj:
        raise SchemaValidationError("missing required field", path=f"{ptr}/{key}")
    return obj[key]


def _check_keys(obj: dict, allowed: set[str], ptr: str, strict: bool) -> None:
    unknown = sorted(set(obj) - allowed)
    if not unknown:
        return
    msg = f"unknown field(s): {', '.join(unknown)}"
    if strict:
        raise SchemaValidationError(msg, path=f"{ptr}/{unknown[0]}")
    warnings.warn(f"{ptr}: {msg}", UserWarning, stacklevel=3)


def _number(value, ptr: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SchemaValidationError(f"expected a number, got {value!r}", path=ptr)
    return float(value)


def _integer(value, ptr: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaValidationError(f"expected an integer, got {value!r}", path=ptr)
    return value


def _check_schema_version(obj: dict, ptr: str) -> None:
    v = _need(obj, "schema_version", ptr)
    if v != SCHEMA_VERSION:
        raise SchemaValidationError(
            f"unsupported schema_version {v!r} (expected {SCHEMA_VERSION})",
            path=f"{ptr}/schema_version",
        )


# ---------------------------------------------------------------------------
# Model files


def _material_from_json(obj, ptr: str, strict: bool) -> Material:
    if not isinstance(obj, dict):
        raise SchemaValidationError("material must be an object", path=ptr)
    _check_keys(obj, {"E", "nu"}, ptr, strict)
    return Material(E=_number(_need(obj, "E", ptr), f"{ptr}/E"),
                    nu=_number(_need(obj, "nu", ptr), f"{ptr}/nu"))


_PARAMETRIC_KINDS = {
    "notch_hinge": (
        NotchHingeParams,
        mesh_notch_hinge,
        {"radius", "web_thickness", "width", "link_length", "n_notch"},
    ),
    "parallel_guide": (
        ParallelGuideParams,
        mesh_parallel_guide,
        {"leaf_length", "leaf_thickness", "width", "link_span", "n_per_leaf"},
    ),
}


def read_model(path, strict: bool = True) -> Model:
    """Read a model file: either an explicit mesh or a parametric descriptor.

    A parametric descriptor carries ``parametric: "notch_hinge" |
    "parallel_guide"`` plus a ``params`` object and is meshed on load.
    """
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise SchemaValidationError("top level must be an object", path="/")
    _check_schema_version(doc, "")
    if "parametric" in doc:
        return _read_parametric(doc, strict)
    return _read_mesh_model(doc, strict)


def read_params(path, strict: bool = True):
    """Read a parametric descriptor and return its params object."""
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise SchemaValidationError("top level must be an object", path="/")
    _check_schema_version(doc, "")
    if "parametric" not in doc:
        raise SchemaValidationError(
            "not a parametric model file (missing 'parametric')", path="/parametric"
        )
    return _parse_parametric(doc, strict)[0]


def _parse_parametric(doc: dict, strict: bool):
    _check_keys(doc, {"schema_version", "parametric", "params"}, "", strict)
    kind = _need(doc, "parametric", "")
    if kind not in _PARAMETRIC_KINDS:
        raise SchemaValidationError(
            f"unknown parametric model {kind!r} "
            f"(supported: {', '.join(sorted(_PARAMETRIC_KINDS))})",
            path="/parametric",
        )
    cls, mesher, numeric = _PARAMETRIC_KINDS[kind]
    raw = _need(doc, "params", "")
    if not isinstance(raw, dict):
        raise SchemaValidationError("params must be an object", path="/params")
    _check_keys(raw, numeric | {"material"}, "/params", strict)
    kwargs = {}
    for key in sorted(numeric & set(raw)):
        ptr = f"/params/{key}"
        kwargs[key] = (
            _integer(raw[key], ptr) if key in ("n_notch", "n_per_leaf") else _number(raw[key], ptr)
        )
    if "material" in raw:
        kwargs["material"] = _material_from_json(raw["material"], "/params/material", strict)
    try:
        params = cls(**kwargs)
    except InvalidArgumentError as exc:
        raise SchemaValidationError(str(exc), path="/params")
    return params, mesher


def _read_parametric(doc: dict, strict: bool) -> Model:
    params, mesher = _parse_parametric(doc, strict)
    return mesher(params)


_MODEL_KEYS = {
    "schema_version",
    "nodes",
    "elements",
    "material",
    "clamped_nodes",
    "rigid_links",
    "moving_nodes",
    "characteristic_length",
}


def _read_mesh_model(doc: dict, strict: bool) -> Model:
    _check_keys(doc, _MODEL_KEYS, "", strict)

    nodes_raw = _need(doc, "nodes", "")
    if not isinstance(nodes_raw, list) or not nodes_raw:
        raise SchemaValidationError("nodes must be a non-empty array", path="/nodes")
    nodes: dict[int, np.ndarray] = {}
    for i, nd in enumerate(nodes_raw):
        ptr = f"/nodes/{i}"
        if not isinstance(nd, dict):
            raise SchemaValidationError("node must be an object", path=ptr)
        _check_keys(nd, {"id", "x", "y", "z"}, ptr, strict)
        nid = _integer(_need(nd, "id", ptr), f"{ptr}/id")
        if nid in nodes:
            raise SchemaValidationError(f"duplicate node id {nid}", path=f"{ptr}/id")
        nodes[nid] = np.array(
            [_number(_need(nd, ax, ptr), f"{ptr}/{ax}") for ax in ("x", "y", "z")]
        )

    elements_raw = _need(doc, "elements", "")
    if not isinstance(elements_raw, list):
        raise SchemaValidationError("elements must be an array", path="/elements")
    elements = []
    for i, el in enumerate(elements_raw):
        ptr = f"/elements/{i}"
        if not isinstance(el, dict):
            raise SchemaValidationError("element must be an object", path=ptr)
        _check_keys(el, {"n1", "n2", "b", "h"}, ptr, strict)
        elements.append(
            Element(
                n1=_integer(_need(el, "n1", ptr), f"{ptr}/n1"),
                n2=_integer(_need(el, "n2", ptr), f"{ptr}/n2"),
                width=_number(_need(el, "b", ptr), f"{ptr}/b"),
                height=_number(_need(el, "h", ptr), f"{ptr}/h"),
            )
        )

    material = _material_from_json(_need(doc, "material", ""), "/material", strict)

    def _id_list(key: str) -> tuple[int, ...]:
        raw = _need(doc, key, "")
        if not isinstance(raw, list):
            raise SchemaValidationError(f"{key} must be an array", path=f"/{key}")
        return tuple(_integer(v, f"/{key}/{i}") for i, v in enumerate(raw))

    links_raw = _need(doc, "rigid_links", "")
    if not isinstance(links_raw, list):
        raise SchemaValidationError("rigid_links must be an array", path="/rigid_links")
    links = []
    for i, lk in enumerate(links_raw):
        ptr = f"/rigid_links/{i}"
        if not isinstance(lk, dict):
            raise SchemaValidationError("rigid link must be an object", path=ptr)
        _check_keys(lk, {"master", "slaves"}, ptr, strict)
        slaves_raw = _need(lk, "slaves", ptr)
        if not isinstance(slaves_raw, list) or not slaves_raw:
            raise SchemaValidationError("slaves must be a non-empty array", path=f"{ptr}/slaves")
        links.append(
            RigidLink(
                master=_integer(_need(lk, "master", ptr), f"{ptr}/master"),
                slaves=tuple(_integer(s, f"{ptr}/slaves/{j}") for j, s in enumerate(slaves_raw)),
            )
        )

    lc = _number(_need(doc, "characteristic_length", ""), "/characteristic_length")
    try:
        return Model(
            nodes=nodes,
            elements=tuple(elements),
            material=material,
            clamped_nodes=_id_list("clamped_nodes"),
            rigid_links=tuple(links),
            moving_nodes=_id_list("moving_nodes"),
            characteristic_length=lc,
        )
    except InvalidArgumentError as exc:
        raise SchemaValidationError(str(exc), path="/")


def write_model(model: Model, path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "nodes": [
            {"id": n, "x": xyz[0], "y": xyz[1], "z": xyz[2]}
            for n, xyz in sorted(model.nodes.items())
        ],
        "elements": [
            {"n1": e.n1, "n2": e.n2, "b": e.width, "h": e.height} for e in model.elements
        ],
        "material": {"E": model.material.E, "nu": model.material.nu},
        "clamped_nodes": list(model.clamped_nodes),
        "rigid_links": [
            {"master": lk.master, "slaves": list(lk.slaves)} for lk in model.rigid_links
        ],
        "moving_nodes": list(model.moving_nodes),
        "characteristic_length": model.characteristic_length,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# DOF maps


_DIR_NAMES = {d.name: d for d in DIRECTIONS}


def read_dofmap(path, strict: bool = True) -> DofMap:
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise SchemaValidationError("top level must be an object", path="/")
    _check_schema_version(doc, "")
    _check_keys(doc, {"schema_version", "dofs", "constrained"}, "", strict)
    dofs_raw = _need(doc, "dofs", "")
    if not isinstance(dofs_raw, list) or not dofs_raw:
        raise SchemaValidationError("dofs must be a non-empty array", path="/dofs")
    entries = []
    for i, d in enumerate(dofs_raw):
        ptr = f"/dofs/{i}"
        if not isinstance(d, dict):
            raise SchemaValidationError("dof must be an object", path=ptr)
        _check_keys(d, {"node", "dir", "kind"}, ptr, strict)
        name = _need(d, "dir", ptr)
        if name not in _DIR_NAMES:
            raise SchemaValidationError(
                f"dir must be one of {sorted(_DIR_NAMES)}, got {name!r}", path=f"{ptr}/dir"
            )
        direction = _DIR_NAMES[name]
        kind = _need(d, "kind", ptr)
        expected = "translation" if direction.is_translation else "rotation"
        if kind != expected:
            raise SchemaValidationError(
                f"kind {kind!r} contradicts dir {name} (expected {expected!r})",
                path=f"{ptr}/kind",
            )
        entries.append(DofEntry(node=_integer(_need(d, "node", ptr), f"{ptr}/node"),
                                direction=direction))
    constrained_raw = doc.get("constrained", [])
    if not isinstance(constrained_raw, list):
        raise SchemaValidationError("constrained must be an array", path="/constrained")
    constrained = frozenset(
        _integer(v, f"/constrained/{i}") for i, v in enumerate(constrained_raw)
    )
    try:
        return DofMap(entries=tuple(entries), constrained=constrained)
    except InvalidArgumentError as exc:
        raise SchemaValidationError(str(exc), path="/")


def write_dofmap(dof_map: DofMap, path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "dofs": [
            {
                "node": e.node,
                "dir": e.direction.name,
                "kind": "translation" if e.is_translation else "rotation",
            }
            for e in dof_map.entries
        ],
        "constrained": sorted(dof_map.constrained),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Reference kinematics files


def read_reference_vectors(path, strict: bool = True) -> tuple[np.ndarray, str]:
    """Read raw reference vectors (columns) and a description string.

    Normalization against a metric happens at the call site, where the
    metric is known.
    """
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise SchemaValidationError("top level must be an object", path="/")
    _check_schema_version(doc, "")
    _check_keys(doc, {"schema_version", "vectors", "description"}, "", strict)
    raw = _need(doc, "vectors", "")
    if not isinstance(raw, list) or not raw:
        raise SchemaValidationError("vectors must be a non-empty array of arrays", path="/vectors")
    cols = []
    width = None
    for i, v in enumerate(raw):
        ptr = f"/vectors/{i}"
        if not isinstance(v, list) or not v:
            raise SchemaValidationError("vector must be a non-empty array", path=ptr)
        if width is None:
            width = len(v)
        elif len(v) != width:
            raise SchemaValidationError(
                f"vector length {len(v)} differs from first vector ({width})", path=ptr
            )
        cols.append([_number(x, f"{ptr}/{j}") for j, x in enumerate(v)])
    description = doc.get("description", "")
    if not isinstance(description, str):
        raise SchemaValidationError("description must be a string", path="/description")
    return np.array(cols, dtype=float).T, description


def write_reference_vectors(vectors, path, description: str = "") -> None:
    """Write vectors (1-D, or 2-D with one column per vector) as JSON rows."""
    v = np.asarray(vectors, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2:
        raise InvalidArgumentError("vectors must be a 1-D or 2-D array")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "description": description,
        "vectors": [[float(x) for x in v[:, j]] for j in range(v.shape[1])],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Reports


def write_report(
    report,
    path,
    fmt: str = "json",
    tool_version: str | None = None,
    input_digest: str | None = None,
    seed: int | None = None,
) -> None:
    """Write an :class:`AssessmentReport` (json) or a sweep table (csv/json)."""
    if fmt not in ("json", "csv"):
        raise InvalidArgumentError(f"format must be 'json' or 'csv', got {fmt!r}")
    if isinstance(report, SweepTable):
        if fmt == "csv":
            _write_sweep_csv(report, path)
        else:
            _write_sweep_json(report, path, tool_version, input_digest)
        return
    if isinstance(report, AssessmentReport):
        if fmt != "json":
            raise InvalidArgumentError("assessment reports support only the json format")
        doc = report.to_dict()
        doc["tool_version"] = tool_version or _package_version()
        doc["input_digest"] = input_digest
        doc["seed"] = seed
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")
        return
    raise InvalidArgumentError(f"cannot serialize report of type {type(report).__name__}")


def _write_sweep_csv(table: SweepTable, path) -> None:
    lines = ["l_mm,lambda1,lambda2,selectivity"]
    for r in table.rows:
        lines.append(
            ",".join((_fmt(r.web_thickness), _fmt(r.lambda1), _fmt(r.lambda2), _fmt(r.selectivity)))
        )
    Path(path).write_text("\n".join(lines) + "\n")


def _write_sweep_json(table: SweepTable, path, tool_version, input_digest) -> None:
    doc = {
        "tool_version": tool_version or _package_version(),
        "input_digest": input_digest,
        "rows": [
            {
                "l_mm": r.web_thickness,
                "lambda1": r.lambda1,
                "lambda2": r.lambda2,
                "selectivity": r.selectivity,
                "error": r.error,
            }
            for r in table.rows
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def write_modes(
    path,
    eigenvalues: Sequence[float],
    nodal_modes: Sequence[dict[int, np.ndarray]],
    tool_version: str | None = None,
    input_digest: str | None = None,
) -> None:
    """Eigenvalues plus full nodal mode shapes, for external plotting."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": tool_version or _package_version(),
        "input_digest": input_digest,
        "eigenvalues": [float(x) for x in eigenvalues],
        "modes": [
            {
                "index": i + 1,
                "eigenvalue": float(eigenvalues[i]),
                "displacements": {str(n): [float(x) for x in v] for n, v in sorted(field.items())},
            }
            for i, field in enumerate(nodal_modes)
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def _package_version() -> str:
    from . import __version__

    return __version__
