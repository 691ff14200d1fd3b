"""Model files: one category instance (a scalar kind and x_dim) per file.

Format (JSON)::

    {
      "kind": "real" | "complex" | "quaternion",
      "x_dim": 1,
      "morphisms": {
        "M": {"dom": 1, "cod": 1, "f": [["2"]], "p": [["1"]], "x": [["3"]]}
      },
      "vectors": {"a": ["0.5"]},
      "report": {...}
    }

Matrices are lists of rows. Entries may be JSON numbers or scalar literals
such as ``"1-2i"`` or ``"0.5+j-k"``. ``dom``/``cod`` fix the shapes, so empty
matrices are written as ``[]``. ``vectors`` and ``report`` are optional; the
report is free-form and ignored on load. Written files always use strings
with 17 significant digits, so load -> dump round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .gauss import GaussMorphism
from .matrix import Matrix, NotPositiveError, ShapeError
from .scalar import ScalarKind, format_scalar

__all__ = ["ModelFile", "ModelError", "load_model", "loads_model", "dump_model", "dumps_model",
           "matrix_literal", "vector_literal"]


class ModelError(ValueError):
    """Malformed or invalid model file."""


def _no_duplicates(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise ModelError(f"duplicate key {key!r}")
        out[key] = value
    return out


@dataclass
class ModelFile:
    kind: ScalarKind
    x_dim: int
    morphisms: dict[str, GaussMorphism] = field(default_factory=dict)
    vectors: dict[str, Matrix] = field(default_factory=dict)
    report: dict[str, Any] | None = None

    def morphism(self, name: str) -> GaussMorphism:
        try:
            return self.morphisms[name]
        except KeyError:
            raise ModelError(f"unknown morphism {name!r}; have {sorted(self.morphisms)}") from None

    def vector(self, name: str) -> Matrix:
        try:
            return self.vectors[name]
        except KeyError:
            raise ModelError(f"unknown vector {name!r}; have {sorted(self.vectors)}") from None

    def add(self, name: str, F: GaussMorphism) -> None:
        if F.kind is not self.kind or F.x_dim != self.x_dim:
            raise ModelError(f"morphism {name!r} belongs to a different category")
        self.morphisms[name] = F


def _int(obj: dict, key: str, where: str) -> int:
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ModelError(f"{where}: {key!r} must be a nonnegative integer")
    return v


def _matrix(rows: Any, kind: ScalarKind, shape: tuple[int, int], where: str) -> Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ModelError(f"{where}: expected a list of rows")
    try:
        return Matrix.from_literal(rows, kind, shape=shape)
    except (ValueError, TypeError) as exc:
        raise ModelError(f"{where}: {exc}") from exc


def _morphism(name: str, obj: Any, kind: ScalarKind, x_dim: int) -> GaussMorphism:
    where = f"morphism {name!r}"
    if not isinstance(obj, dict):
        raise ModelError(f"{where}: expected an object")
    unknown = set(obj) - {"dom", "cod", "f", "p", "x"}
    if unknown:
        raise ModelError(f"{where}: unknown fields {sorted(unknown)}")
    dom, cod = _int(obj, "dom", where), _int(obj, "cod", where)
    f = _matrix(obj.get("f"), kind, (cod, dom), f"{where}.f")
    p = _matrix(obj.get("p"), kind, (cod, cod), f"{where}.p")
    x = _matrix(obj.get("x"), kind, (cod, x_dim), f"{where}.x")
    try:
        return GaussMorphism(f, p, x)
    except (ShapeError, NotPositiveError) as exc:
        raise ModelError(f"{where}: {exc}") from exc


def loads_model(text: str) -> ModelFile:
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ModelError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelError("top level must be an object")
    unknown = set(doc) - {"kind", "x_dim", "morphisms", "vectors", "report"}
    if unknown:
        raise ModelError(f"unknown top-level fields {sorted(unknown)}")
    try:
        kind = ScalarKind.parse(str(doc.get("kind")))
    except ValueError as exc:
        raise ModelError(str(exc)) from exc
    x_dim = _int(doc, "x_dim", "model")
    morphs = doc.get("morphisms", {})
    vecs = doc.get("vectors", {})
    if not isinstance(morphs, dict) or not isinstance(vecs, dict):
        raise ModelError("'morphisms' and 'vectors' must be objects")
    model = ModelFile(kind, x_dim, report=doc.get("report"))
    for name, obj in morphs.items():
        model.morphisms[name] = _morphism(name, obj, kind, x_dim)
    for name, entries in vecs.items():
        if not isinstance(entries, list):
            raise ModelError(f"vector {name!r}: expected a list")
        model.vectors[name] = _matrix([[v] for v in entries], kind, (len(entries), 1),
                                      f"vector {name!r}")
    return model


def load_model(path: str | Path) -> ModelFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc}") from exc
    return loads_model(text)


# writing: hand-formatted so matrices stay one row per line

def matrix_literal(m: Matrix) -> list[list[str]]:
    return [[format_scalar(s) for s in row] for row in m.to_scalars()]


def vector_literal(v: Matrix) -> list[str]:
    return [row[0] for row in matrix_literal(v)]


def _rows(m: Matrix, indent: str) -> str:
    rows = matrix_literal(m)
    if not rows:
        return "[]"
    inner = [indent + "  " + json.dumps(r) for r in rows]
    return "[\n" + ",\n".join(inner) + "\n" + indent + "]"


def _morphism_text(name: str, F: GaussMorphism) -> str:
    ind = "      "
    parts = [
        f'{ind}"dom": {F.dom}',
        f'{ind}"cod": {F.cod}',
        f'{ind}"f": {_rows(F.f, ind)}',
        f'{ind}"p": {_rows(F.p, ind)}',
        f'{ind}"x": {_rows(F.x, ind)}',
    ]
    return f"    {json.dumps(name)}: {{\n" + ",\n".join(parts) + "\n    }"


def dumps_model(model: ModelFile) -> str:
    fields = [f'  "kind": {json.dumps(model.kind.value)}', f'  "x_dim": {model.x_dim}']
    body = ",\n".join(_morphism_text(n, F) for n, F in model.morphisms.items())
    fields.append('  "morphisms": {' + ("\n" + body + "\n  }" if body else "}"))
    if model.vectors:
        vecs = ",\n".join(f"    {json.dumps(n)}: {json.dumps(vector_literal(v))}"
                          for n, v in model.vectors.items())
        fields.append('  "vectors": {\n' + vecs + "\n  }")
    if model.report is not None:
        rep = json.dumps(model.report, indent=2).replace("\n", "\n  ")
        fields.append(f'  "report": {rep}')
    return "{\n" + ",\n".join(fields) + "\n}\n"


def dump_model(model: ModelFile, path: str | Path) -> None:
    Path(path).write_text(dumps_model(model))
