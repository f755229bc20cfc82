"""JSON (de)serialisation of the artifacts exchanged by the CLI."""
from __future__ import annotations

import json
import os
import tempfile

from .algebra import Field, VectorSpace
from .construct import FunctionTable
from .groups import FiniteGroup, group_from_json

FORMAT_VERSION = 1


class FormatError(ValueError):
    pass


def structure_to_json(obj) -> dict:
    if isinstance(obj, Field):
        return {"tag": "field", **obj.to_json()}
    if isinstance(obj, (VectorSpace, FiniteGroup)):
        return obj.to_json()
    raise FormatError(f"cannot serialise {obj!r}")


def structure_from_json(data: dict):
    tag = data.get("tag")
    if tag == "field":
        return Field.from_json(data)
    if tag == "vector_space":
        return VectorSpace(Field.from_json(data["field"]), int(data["dim"]))
    return group_from_json(data)


def function_to_json(f: FunctionTable, manifest: dict | None = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "function_table",
        "domain": structure_to_json(f.domain),
        "codomain": structure_to_json(f.codomain),
        "values": [int(v) for v in f.values],
        "provenance": f.provenance,
    }
    if manifest is not None:
        doc["manifest"] = manifest
    return doc


def function_from_json(doc: dict) -> FunctionTable:
    check_version(doc)
    if doc.get("kind", "function_table") != "function_table":
        raise FormatError(f"expected a function_table, got {doc.get('kind')!r}")
    try:
        domain = structure_from_json(doc["domain"])
        codomain = structure_from_json(doc["codomain"])
        return FunctionTable(domain, codomain, doc["values"], doc.get("provenance", {}))
    except KeyError as exc:
        raise FormatError(f"missing key {exc}") from None


def check_version(doc: dict) -> None:
    if not isinstance(doc, dict):
        raise FormatError("top level must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {doc.get('format_version')!r}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
