"""The JSON complex document and plain-text grid file formats.

Document shape:

    {"field": 2,
     "poset": {"elements": [...], "covers": [[lower, upper], ...]},
     "cells": [{"id": ..., "dim": d, "grade": g,
                "boundary": [[face id, coefficient], ...]}, ...]}

The poset section is optional; without it all cells share a one-element
poset. A complex built from a grid additionally carries
{"cubes": {"shape": [...]}} so coordinate matchings keep working after a
round trip (its integer cell ids encode cube coordinates relative to the
shape). Canonical form sorts cells by (dim, id as text), boundaries by face
id as text, and always carries the poset and grades, so canonicalization is
idempotent.

Grid files:

    shape: n1 n2 ... [open: a1 a2 ...]
    v v v ...          (one value per top cell, row-major, C order)
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .cells import CellComplex
from .cubical import CubicalGrid
from .field import check_modulus
from .graded import GradedComplex
from .order import Poset


class ParseError(ValueError):
    """Malformed document or grid text (CLI exit code 2)."""


def _require(cond: bool, message: str):
    if not cond:
        raise ParseError(message)


def load_document(text: str) -> dict:
    """Parse and shape-check the JSON document; semantic checks come later."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    _require(isinstance(doc, dict), "document must be a JSON object")
    _require("field" in doc, "missing 'field'")
    _require(isinstance(doc["field"], int), "'field' must be an integer")
    _require("cells" in doc and isinstance(doc["cells"], list), "missing 'cells' list")
    if "poset" in doc and doc["poset"] is not None:
        po = doc["poset"]
        _require(isinstance(po, dict) and "elements" in po, "'poset' needs 'elements'")
        _require(isinstance(po["elements"], list), "'poset.elements' must be a list")
        covers = po.get("covers", [])
        _require(isinstance(covers, list), "'poset.covers' must be a list")
        for c in covers:
            _require(isinstance(c, list) and len(c) == 2, "each cover must be [lower, upper]")
    if "cubes" in doc and doc["cubes"] is not None:
        cu = doc["cubes"]
        _require(
            isinstance(cu, dict)
            and isinstance(cu.get("shape"), list)
            and all(isinstance(n, int) and n >= 1 for n in cu["shape"]),
            "'cubes.shape' must be a list of positive integers",
        )
    seen = set()
    for cell in doc["cells"]:
        _require(isinstance(cell, dict), "each cell must be an object")
        _require("id" in cell, "cell missing 'id'")
        _require(isinstance(cell["id"], (str, int)), "cell id must be a string or integer")
        _require(cell["id"] not in seen, f"duplicate cell id {cell['id']!r}")
        seen.add(cell["id"])
        _require(isinstance(cell.get("dim"), int) and cell["dim"] >= 0, f"cell {cell['id']!r} needs a nonnegative 'dim'")
        bnd = cell.get("boundary", [])
        _require(isinstance(bnd, list), f"cell {cell['id']!r}: 'boundary' must be a list")
        for ent in bnd:
            _require(
                isinstance(ent, list) and len(ent) == 2 and isinstance(ent[1], int),
                f"cell {cell['id']!r}: boundary entries must be [face id, integer]",
            )
    return doc


def document_to_graded(doc: dict, field_override: Optional[int] = None) -> GradedComplex:
    """Semantic interpretation: build the graded complex (may raise ValueError)."""
    p = check_modulus(field_override if field_override is not None else doc["field"])
    cells = [(c["id"], c["dim"]) for c in doc["cells"]]
    boundary = {c["id"]: [(f, v) for f, v in c.get("boundary", [])] for c in doc["cells"]}
    cubes = None
    if doc.get("cubes"):
        from .cubical import CubeGeometry

        cubes = CubeGeometry(doc["cubes"]["shape"])
    complex = CellComplex.build(cells, boundary, p=p, cubes=cubes)
    if "poset" in doc and doc["poset"] is not None:
        poset = Poset(
            [_hashable(e) for e in doc["poset"]["elements"]],
            [(_hashable(lo), _hashable(hi)) for lo, hi in doc["poset"].get("covers", [])],
        )
        nu = {}
        for c in doc["cells"]:
            if "grade" not in c:
                raise ValueError(f"cell {c['id']!r} has no grade but a poset is given")
            nu[c["id"]] = _hashable(c["grade"])
    else:
        grades = {_hashable(c["grade"]) for c in doc["cells"] if "grade" in c}
        if len(grades) > 1:
            raise ValueError("cells carry distinct grades but no poset is given")
        label = grades.pop() if grades else 0
        poset = Poset([label])
        nu = {c["id"]: label for c in doc["cells"]}
    return GradedComplex(complex, poset, nu)


def _hashable(x):
    if isinstance(x, list):
        return tuple(x)
    return x


def parse_document(text: str, field_override: Optional[int] = None) -> GradedComplex:
    return document_to_graded(load_document(text), field_override)


def emit_document(g: GradedComplex) -> str:
    """Canonical JSON text: cells by (dim, id text), boundaries by face id text."""
    X = g.complex
    order = sorted(range(X.n), key=lambda i: (int(X.dims[i]), str(X.id_of(i))))
    cells = []
    for i in order:
        cid = X.id_of(i)
        bnd = sorted(X.cell_boundary(cid).items(), key=lambda ent: str(ent[0]))
        cells.append(
            {
                "id": cid,
                "dim": int(X.dims[i]),
                "grade": g.poset.elements[g.grade[i]],
                "boundary": [[f, int(v)] for f, v in bnd],
            }
        )
    doc = {
        "field": X.p,
        "poset": {
            "elements": list(g.poset.elements),
            "covers": [[lo, hi] for lo, hi in g.poset.covers],
        },
        "cells": cells,
    }
    if X.cubes is not None:
        doc["cubes"] = {"shape": list(X.cubes.shape)}
    return json.dumps(doc, indent=1)


def parse_grid(text: str) -> CubicalGrid:
    """Parse a grid file: header `shape: ...` with optional `open: ...`, then values."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    _require(bool(lines), "empty grid file")
    header = lines[0].split()
    _require(header and header[0] == "shape:", "grid header must start with 'shape:'")
    shape = []
    open_axes = []
    seen_open = False
    for tok in header[1:]:
        if tok == "open:":
            seen_open = True
            continue
        try:
            val = int(tok)
        except ValueError:
            raise ParseError(f"bad header token {tok!r}") from None
        (open_axes if seen_open else shape).append(val)
    _require(bool(shape), "grid shape is empty")
    _require(all(n >= 1 for n in shape), "grid extents must be positive")
    tokens = " ".join(lines[1:]).split()
    expected = int(np.prod(shape))
    _require(
        len(tokens) == expected,
        f"expected {expected} values for shape {tuple(shape)}, got {len(tokens)}",
    )
    values = _parse_values(tokens)
    try:
        return CubicalGrid(tuple(shape), values, frozenset(open_axes))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _parse_values(tokens: list) -> list:
    for caster in (int, float):
        try:
            return [caster(t) for t in tokens]
        except ValueError:
            continue
    return list(tokens)
