"""Instance files and exact JSON encoding of results.

An instance file is one JSON object::

    {"sizes": ["1/2", "1/3"], "multiplicities": [2, 3], "name": "toy"}

Sizes must be fraction strings; floats are rejected.  ``bins`` (a bin
count) and ``provenance`` are optional.
"""
from __future__ import annotations

import json
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path

from .errors import InvalidInputError
from .knapsack import Instance
from .numeric import format_rational, parse_rational

_KNOWN = {"sizes", "multiplicities", "name", "bins", "provenance"}


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise InvalidInputError("instance must be a JSON object")
    unknown = set(data) - _KNOWN
    if unknown:
        raise InvalidInputError(f"unknown instance fields: {sorted(unknown)}")
    if "sizes" not in data:
        raise InvalidInputError("instance needs 'sizes'")
    sizes = data["sizes"]
    if not isinstance(sizes, list):
        raise InvalidInputError("'sizes' must be a list of fraction strings")
    for s in sizes:
        if not isinstance(s, str):
            raise InvalidInputError(f"size {s!r} must be a fraction string like '1/3'")
    mult = data.get("multiplicities")
    if mult is not None:
        if not isinstance(mult, list) or any(
                isinstance(x, bool) or not isinstance(x, int) for x in mult):
            raise InvalidInputError("'multiplicities' must be a list of integers")
    bins = data.get("bins")
    if bins is not None and (isinstance(bins, bool) or not isinstance(bins, int)):
        raise InvalidInputError("'bins' must be an integer")
    return Instance(tuple(parse_rational(s) for s in sizes),
                    None if mult is None else tuple(mult),
                    name=data.get("name"), bins=bins)


def instance_to_dict(instance: Instance, provenance: str | None = None) -> dict:
    out = {"sizes": [format_rational(s) for s in instance.sizes],
           "multiplicities": list(instance.multiplicities)}
    if instance.name is not None:
        out["name"] = instance.name
    if instance.bins is not None:
        out["bins"] = instance.bins
    if provenance is not None:
        out["provenance"] = provenance
    return out


def parse_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"instance is not valid JSON: {exc}") from exc
    return instance_from_dict(data)


def serialize_instance(instance: Instance, provenance: str | None = None) -> str:
    return json.dumps(instance_to_dict(instance, provenance)) + "\n"


def load_instance(path) -> Instance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    return parse_instance(text)


def to_jsonable(obj):
    """Exact JSON form: Fractions become strings, tuples become lists,
    mappings keyed by configurations become ``[[config], value]`` lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float):
        raise TypeError("floating point values are not allowed in reports")
    if isinstance(obj, dict) or hasattr(obj, "items"):
        items = list(obj.items())
        if all(isinstance(k, str) for k, _ in items):
            return {k: to_jsonable(v) for k, v in items}
        return [[to_jsonable(k), to_jsonable(v)] for k, v in items]
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(x) for x in seq]
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def weights_from_json(data) -> dict:
    """``[[config, weight], ...]`` into a dict."""
    if not isinstance(data, list):
        raise InvalidInputError("weights must be a list of [configuration, weight] pairs")
    out: dict = {}
    for item in data:
        if (not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], list)
                or isinstance(item[1], bool) or not isinstance(item[1], int)):
            raise InvalidInputError(f"bad weight entry {item!r}")
        p = tuple(item[0])
        if any(isinstance(x, bool) or not isinstance(x, int) for x in p):
            raise InvalidInputError(f"bad configuration {item[0]!r}")
        out[p] = out.get(p, 0) + item[1]
    return out
