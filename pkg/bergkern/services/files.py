from bergkern.exceptions import ArgumentError
from bergkern.models.complex_point import ComplexPoint
from bergkern.models.shadows import CustomShadow
from bergkern.models.weights import CustomWeight
from contextlib import contextmanager
from pydantic import BaseModel, ValidationError
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple
import csv
import importlib
import json
import logging
import math
import sys

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def parse_complex(token: str) -> complex:
    """Parse "re,im" (or a bare real) into a complex number."""
    parts = token.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ArgumentError(f"cannot parse complex number from {token!r}; expected re,im")


def parse_pair(text: str, arity: int) -> Tuple[ComplexPoint, ComplexPoint]:
    """One point pair: 2 * arity whitespace-separated coordinates, x first."""
    tokens = text.split()
    if len(tokens) != 2 * arity:
        raise ArgumentError(f"expected {2 * arity} coordinates for a pair of arity {arity}, got {len(tokens)}")
    values = [parse_complex(t) for t in tokens]
    return ComplexPoint(coords=values[:arity]), ComplexPoint(coords=values[arity:])


def read_points_file(path: str, arity: int) -> List[Tuple[ComplexPoint, ComplexPoint]]:
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                pairs.append(parse_pair(line, arity))
            except (ArgumentError, ValidationError) as exc:
                raise ArgumentError(f"{path}:{number}: {exc}") from exc
    logger.info("read %d point pairs from %s", len(pairs), path)
    return pairs


def resolve_callable(path: str) -> Callable:
    """Import ``package.module:function``."""
    module_name, sep, attribute = path.partition(":")
    if not sep or not module_name or not attribute:
        raise ArgumentError(f"expected 'module:function', got {path!r}")
    try:
        target = getattr(importlib.import_module(module_name), attribute)
    except (ImportError, AttributeError) as exc:
        raise ArgumentError(f"cannot import {path!r}: {exc}") from exc
    if not callable(target):
        raise ArgumentError(f"{path!r} is not callable")
    return target


def load_custom_weight(path: str) -> Tuple[CustomWeight, CustomShadow]:
    """Read a custom weight file.

    The file is JSON with keys ``weight`` (import path), ``arity``, ``bounds``
    (one positive number or null per axis), optional ``membership`` (import
    path) and ``label``.
    """
    with open(path, encoding="utf-8") as handle:
        try:
            data: Dict[str, Any] = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"{path}: invalid JSON: {exc}") from exc
    missing = [key for key in ("weight", "arity", "bounds") if key not in data]
    if missing:
        raise ArgumentError(f"{path}: missing keys {missing}")
    label = data.get("label", "custom")
    membership_path = data.get("membership")
    try:
        weight = CustomWeight(
            n=data["arity"], function=resolve_callable(data["weight"]), function_path=data["weight"], label=label
        )
        shadow = CustomShadow(
            n=data["arity"],
            bounds=tuple(data["bounds"]),
            membership=resolve_callable(membership_path) if membership_path else None,
            membership_path=membership_path,
            label=label,
        )
    except ValidationError as exc:
        raise ArgumentError(f"{path}: {exc}") from exc
    return weight, shadow


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return format(value, ".17g")
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, separators=(",", ":"), sort_keys=True)
    return str(value)


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """The named file, or stdout when no path is given."""
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        yield handle


def write_json_lines(records: Iterable[Any], handle: TextIO) -> None:
    for record in records:
        if isinstance(record, BaseModel):
            handle.write(record.model_dump_json())
        else:
            handle.write(json.dumps(record, sort_keys=True, allow_nan=True))
        handle.write("\n")


def write_csv(rows: Sequence[Dict[str, Any]], columns: Sequence[str], schema: str, handle: TextIO) -> None:
    """CSV with a leading '#schema=' line; floats keep 17 significant digits."""
    handle.write(f"#schema={schema}.v{SCHEMA_VERSION}\n")
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(column)) for column in columns])


def read_csv(handle: TextIO) -> Tuple[str, List[Dict[str, str]]]:
    """Inverse of write_csv: the schema tag and the rows as strings."""
    first = handle.readline().strip()
    if not first.startswith("#schema="):
        raise ArgumentError("missing '#schema=' header line")
    return first[len("#schema="):], list(csv.DictReader(handle))
