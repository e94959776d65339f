"""JSON documents for modular data, branching tables and solver problems.

Floats are written with ``%.17g`` so that reading a document back and writing
it again reproduces the same bytes.  Readers accept any precision.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .branching import BranchingTable
from .mtc_core import ModularData


class DocumentError(ValueError):
    """Malformed or inconsistent JSON document."""


# ---------------------------------------------------------------------------
# Serializer
# ---------------------------------------------------------------------------


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise DocumentError(f"cannot serialize non-finite number {x}")
    if x == 0:
        x = 0.0  # drop the sign of -0.0 so re-serialization is stable
    return "%.17g" % x


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (list, tuple, dict)) for v in obj) or _is_pair_list(obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise DocumentError(f"cannot serialize {type(obj).__name__}")


def _is_pair_list(obj) -> bool:
    """A row of ``[re, im]`` pairs is kept on one line."""
    return all(isinstance(v, (list, tuple)) and len(v) == 2 and not isinstance(v[0], (list, tuple)) for v in obj)


def dumps(doc: Any) -> str:
    return _encode(doc, 2, 0) + "\n"


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _complex(v, what: str) -> complex:
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)):
        raise DocumentError(f"{what}: expected [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def _require(doc: dict, keys: list[str], what: str) -> None:
    if not isinstance(doc, dict):
        raise DocumentError(f"{what}: expected a JSON object")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise DocumentError(f"{what}: missing keys {missing}")


# ---------------------------------------------------------------------------
# Modular data
# ---------------------------------------------------------------------------


def modular_to_doc(md: ModularData) -> dict:
    return {
        "name": md.name,
        "labels": list(md.labels),
        "vacuum": int(md.vacuum),
        "S": [[_pair(z) for z in row] for row in md.S],
        "twists": [_pair(z) for z in md.twists],
        "phaseC": _pair(md.phaseC),
    }


def modular_from_doc(doc: dict) -> ModularData:
    _require(doc, ["name", "labels", "vacuum", "S", "twists", "phaseC"], "modular data")
    labels = doc["labels"]
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise DocumentError("labels must be a list of strings")
    if not isinstance(doc["vacuum"], int) or isinstance(doc["vacuum"], bool):
        raise DocumentError("vacuum must be an integer")
    S = doc["S"]
    if not isinstance(S, list) or not all(isinstance(r, list) for r in S):
        raise DocumentError("S must be a list of rows")
    try:
        mat = np.array([[_complex(z, "S entry") for z in row] for row in S], dtype=complex)
        tw = np.array([_complex(z, "twist") for z in doc["twists"]], dtype=complex)
        return ModularData(
            str(doc["name"]), tuple(labels), doc["vacuum"], mat.reshape(len(S), -1) if S else mat.reshape(0, 0), tw,
            _complex(doc["phaseC"], "phaseC"),
        )
    except DocumentError:
        raise
    except (ValueError, TypeError) as exc:
        raise DocumentError(f"inconsistent modular data: {exc}") from exc


def dumps_modular(md: ModularData) -> str:
    return dumps(modular_to_doc(md))


def loads_modular(text: str) -> ModularData:
    return modular_from_doc(_loads(text))


# ---------------------------------------------------------------------------
# Branching tables
# ---------------------------------------------------------------------------


def branching_to_doc(b: BranchingTable) -> dict:
    doc = {"parent": b.parent, "child": b.child, "group_order": b.group_order, "b": b.b.tolist()}
    if b.parent_labels:
        doc["parent_labels"] = list(b.parent_labels)
    if b.child_labels:
        doc["child_labels"] = list(b.child_labels)
    return doc


def branching_from_doc(doc: dict) -> BranchingTable:
    _require(doc, ["parent", "child", "group_order", "b"], "branching table")
    b = doc["b"]
    if not isinstance(b, list) or not all(
        isinstance(r, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in r) for r in b
    ):
        raise DocumentError("b must be a matrix of integers")
    try:
        return BranchingTable(
            str(doc["parent"]),
            str(doc["child"]),
            int(doc["group_order"]),
            np.array(b, dtype=np.int64).reshape(len(b), -1),
            tuple(doc.get("parent_labels", ())),
            tuple(doc.get("child_labels", ())),
        )
    except ValueError as exc:
        raise DocumentError(f"invalid branching table: {exc}") from exc


# ---------------------------------------------------------------------------
# Solver problems and solutions
# ---------------------------------------------------------------------------


def problem_to_doc(problem) -> dict:
    doc = {
        "name": problem.name,
        "parent": modular_to_doc(problem.parent),
        "branching": branching_to_doc(problem.branching),
        "child_labels": list(problem.child_labels),
        "vacuum": int(problem.vacuum),
        "twisted": [{"label": s, "twist": _pair(problem.twisted_twists[s])} for s in problem.twisted_labels],
        "fusion_facts": [list(f) for f in problem.fusion_facts],
    }
    if problem.grid_order:
        doc["grid_order"] = int(problem.grid_order)
    return doc


def problem_from_doc(doc: dict):
    from .orbifold_solver import SolverError, SolverProblem

    _require(doc, ["name", "parent", "branching", "child_labels", "twisted", "fusion_facts"], "solver problem")
    try:
        tw = {}
        for item in doc["twisted"]:
            _require(item, ["label", "twist"], "twisted sector")
            tw[str(item["label"])] = _complex(item["twist"], f"twist of {item['label']}")
        facts = doc["fusion_facts"]
        if not all(isinstance(f, list) and len(f) == 3 and all(isinstance(s, str) for s in f) for f in facts):
            raise DocumentError("fusion_facts must be [J, x, Jx] name triples")
        return SolverProblem(
            str(doc["name"]),
            modular_from_doc(doc["parent"]),
            branching_from_doc(doc["branching"]),
            tuple(doc["child_labels"]),
            tw,
            tuple(tuple(f) for f in facts),
            int(doc.get("vacuum", 0)),
            doc.get("grid_order"),
        )
    except SolverError as exc:
        raise DocumentError(f"inconsistent solver problem: {exc}") from exc


def solutions_to_doc(problem_name: str, solutions) -> dict:
    return {
        "problem": problem_name,
        "solutions": [
            {"modular_data": modular_to_doc(s.md), "residuals": {k: float(v) for k, v in s.residuals.items()},
             "log": list(s.log)}
            for s in solutions
        ],
    }


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc


def read_json(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    return _loads(text)


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def read_modular(path: str | Path) -> ModularData:
    """Read modular data; a solver-output file yields its first (canonical) solution."""
    doc = read_json(path)
    if isinstance(doc, dict) and "solutions" in doc:
        sols = doc["solutions"]
        if not sols:
            raise DocumentError(f"{path}: solver output contains no solutions")
        return modular_from_doc(sols[0]["modular_data"])
    return modular_from_doc(doc)


def write_modular(path: str | Path, md: ModularData) -> None:
    write_text(path, dumps_modular(md))
