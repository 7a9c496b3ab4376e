"""JSON encoding and decoding of the library's values.

Dimension vectors are emitted as lists in vertex order; on input both a list
and a {vertex: count} mapping are accepted.  Field elements over Q are
written as integers or "a/b" strings.
"""

from __future__ import annotations

import json
from dataclasses import fields, is_dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from . import core
from .cyclic import EigenvalueTypes, MultiPartition
from .errors import UnsupportedInputError
from .flags import RelPosition
from .linalg import ExactField
from .reps import DoubledPoint, GradedFlag, Rep


def scalar_to_json(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def matrix_to_json(a: np.ndarray) -> list:
    return [[scalar_to_json(v) for v in row] for row in a.tolist()] if a.shape[0] else []


def field_to_json(F: ExactField) -> dict:
    return {"kind": "Fp", "p": F.p} if F.p else {"kind": "Q"}


def field_from_json(obj) -> ExactField:
    if isinstance(obj, str):
        s = obj.strip().upper()
        if s in ("Q", "QQ", "RATIONALS"):
            return ExactField.rationals()
        if s.startswith("F"):
            return ExactField.prime(int(s.lstrip("F_P=")))
        return ExactField.prime(int(s))
    if isinstance(obj, int):
        return ExactField.prime(obj) if obj else ExactField.rationals()
    kind = str(obj.get("kind", "Q")).lower()
    if kind in ("q", "rationals"):
        return ExactField.rationals()
    if kind in ("fp", "primefield", "prime"):
        return ExactField.prime(int(obj["p"]))
    raise UnsupportedInputError(f"unknown field {obj!r}")


def quiver_to_json(q: core.Quiver) -> dict:
    return {"vertices": [str(v) for v in q.vertices], "arrows": [[str(s), str(t)] for s, t in q.arrows]}


def quiver_from_json(obj) -> core.Quiver:
    verts = [str(v) for v in obj["vertices"]]
    arrows = [(str(a[0]), str(a[1])) for a in obj["arrows"]]
    return core.Quiver(tuple(verts), tuple(arrows))


def stringify_quiver(q: core.Quiver) -> core.Quiver:
    return core.Quiver(tuple(str(v) for v in q.vertices), tuple((str(s), str(t)) for s, t in q.arrows))


def dim_from_json(q: core.Quiver, obj) -> tuple:
    if isinstance(obj, dict):
        names = {str(v): v for v in q.vertices}
        return q.dim({names.get(str(k), k): v for k, v in obj.items()})
    return q.dim(obj)


def multipartition_to_json(m: MultiPartition) -> dict:
    return {"n": m.n, "parts": {str(i): list(p) for i, p in enumerate(m.parts)}}


def multipartition_from_json(obj) -> MultiPartition:
    return MultiPartition.from_mapping(int(obj["n"]), {int(k): list(v) for k, v in obj.get("parts", {}).items()})


def rep_to_json(r: Rep) -> dict:
    return {
        "quiver": quiver_to_json(r.quiver),
        "dim": list(r.dim),
        "field": field_to_json(r.field),
        "mats": {str(k): matrix_to_json(m) for k, m in enumerate(r.mats)},
    }


def _mats_from_json(q: core.Quiver, d, F: ExactField, obj) -> tuple:
    mats = []
    for k, (s, t) in enumerate(q.edges):
        data = obj.get(str(k), obj.get(k)) if isinstance(obj, dict) else obj[k]
        shape = (d[t], d[s])
        mats.append(F.array(data if data is not None else [], shape))
    return tuple(mats)


def rep_from_json(obj, q: core.Quiver | None = None) -> Rep:
    q = q or quiver_from_json(obj["quiver"])
    F = field_from_json(obj.get("field", "Q"))
    d = dim_from_json(q, obj["dim"])
    return Rep(q, d, F, _mats_from_json(q, d, F, obj["mats"]))


def point_to_json(p: DoubledPoint) -> dict:
    return {
        "quiver": quiver_to_json(p.quiver),
        "dim": list(p.dim),
        "field": field_to_json(p.field),
        "x": {str(k): matrix_to_json(m) for k, m in enumerate(p.x.mats)},
        "xstar": {str(k): matrix_to_json(m) for k, m in enumerate(p.xstar.mats)},
    }


def point_from_json(obj) -> DoubledPoint:
    q = quiver_from_json(obj["quiver"])
    F = field_from_json(obj.get("field", "Q"))
    d = dim_from_json(q, obj["dim"])
    qop = core.opposite(q)
    return DoubledPoint(Rep(q, d, F, _mats_from_json(q, d, F, obj["x"])),
                        Rep(qop, d, F, _mats_from_json(qop, d, F, obj["xstar"])))


def flag_to_json(flag: GradedFlag) -> dict:
    return {"flag_type": [list(s) for s in flag.flag_type()],
            "steps": [[matrix_to_json(b) for b in step] for step in flag.steps]}


def flag_type_from_json(q: core.Quiver | None, obj) -> tuple:
    if q is None:
        return tuple(tuple(int(x) for x in (s if isinstance(s, list) else [s])) for s in obj)
    return tuple(dim_from_json(q, s if isinstance(s, (list, dict)) else [s]) for s in obj)


def relposition_to_json(z: RelPosition) -> list:
    return [[list(v) for v in row] for row in z.z]


def mu_to_json(mu: EigenvalueTypes) -> dict:
    return {"weight": mu.weight, "types": [{"partition": list(lam), "count": c} for lam, c in mu.items]}


def to_jsonable(obj):
    """Generic conversion used for report dataclasses."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (Fraction,)):
        return scalar_to_json(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, MultiPartition):
        return multipartition_to_json(obj)
    if isinstance(obj, EigenvalueTypes):
        return mu_to_json(obj)
    if isinstance(obj, RelPosition):
        return relposition_to_json(obj)
    if isinstance(obj, GradedFlag):
        return flag_to_json(obj)
    if isinstance(obj, Rep):
        return rep_to_json(obj)
    if isinstance(obj, DoubledPoint):
        return point_to_json(obj)
    if isinstance(obj, core.Quiver):
        return quiver_to_json(obj)
    if isinstance(obj, ExactField):
        return field_to_json(obj)
    if isinstance(obj, np.ndarray):
        return matrix_to_json(obj) if obj.ndim == 2 else [to_jsonable(v) for v in obj.tolist()]
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
