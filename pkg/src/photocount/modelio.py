"""Reading and writing model files.

A model file is a JSON object::

    {"d": 2, "p": 1,
     "sigma": [[[1, 0], [0.25, 0.1]], [[0.25, -0.1], [1, 0]]],
     "means": [[[0.5, 0], [0, 0]]],
     "count_model": {"kind": "poisson", "parameter": 2},
     "exact": true}

Complex entries are ``[re, im]`` pairs; a bare number is read as real.
Numerals may be JSON numbers or ``"p/q"`` strings.  Decimal literals are read
exactly, so a file without ``"exact": false`` yields an exact model.
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .errors import ModelError
from .photon import CountModel
from .wishart import WishartModel, _to_fraction


def _numeral(x, path: str, errors: list):
    if isinstance(x, bool):
        errors.append(f"{path}: expected a number, got {x!r}")
        return None
    if isinstance(x, (int, Decimal)):
        if isinstance(x, Decimal) and not x.is_finite():
            errors.append(f"{path}: non-finite numeral {x}")
            return None
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            errors.append(f"{path}: malformed numeral {x!r}")
            return None
    errors.append(f"{path}: expected a number, got {type(x).__name__}")
    return None


def _complex_entry(x, path: str, errors: list):
    if isinstance(x, list):
        if len(x) != 2:
            errors.append(f"{path}: complex entries must be [re, im] pairs")
            return None
        re = _numeral(x[0], path + "[0]", errors)
        im = _numeral(x[1], path + "[1]", errors)
        return None if re is None or im is None else (re, im)
    v = _numeral(x, path, errors)
    return None if v is None else (v, Fraction(0))


def _matrix(x, rows: int | None, cols: int | None, path: str, errors: list):
    if not isinstance(x, list) or not x:
        errors.append(f"{path}: expected a nonempty array")
        return None
    if rows is not None and len(x) != rows:
        errors.append(f"{path}: expected {rows} rows, got {len(x)}")
    out = []
    for i, row in enumerate(x):
        if not isinstance(row, list):
            errors.append(f"{path}[{i}]: expected an array")
            out.append(None)
            continue
        if cols is not None and len(row) != cols:
            errors.append(f"{path}[{i}]: expected {cols} entries, got {len(row)}")
        out.append([_complex_entry(e, f"{path}[{i}][{j}]", errors) for j, e in enumerate(row)])
    return out


def _count_model(doc, errors: list) -> CountModel | None:
    if doc is None:
        return None
    if not isinstance(doc, dict) or "kind" not in doc:
        errors.append("count_model: expected an object with a 'kind'")
        return None
    kind = doc["kind"]
    try:
        if kind == "deterministic":
            v = _numeral(doc.get("parameter"), "count_model.parameter", errors)
            return None if v is None else CountModel.deterministic(v)
        if kind == "poisson":
            v = _numeral(doc.get("parameter"), "count_model.parameter", errors)
            return None if v is None else CountModel.poisson(v)
        if kind == "custom":
            moms = [_numeral(m, f"count_model.moments[{i}]", errors) for i, m in enumerate(doc.get("moments", []))]
            return None if None in moms else CountModel.custom(moms)
        if kind == "pmf":
            probs = [_numeral(q, f"count_model.probs[{i}]", errors) for i, q in enumerate(doc.get("probs", []))]
            return None if None in probs else CountModel.from_pmf(doc.get("support", []), probs)
    except (ValueError, TypeError) as exc:
        errors.append(f"count_model: {exc}")
        return None
    errors.append(f"count_model.kind: unknown kind {kind!r}")
    return None


def model_from_document(doc: dict) -> tuple[WishartModel, CountModel | None]:
    """Validate a parsed document; every violation is listed in one :class:`ModelError`."""
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    d, p = doc.get("d"), doc.get("p")
    for key, v in (("d", d), ("p", p)):
        if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 1):
            errors.append(f"{key}: expected a positive integer, got {v!r}")
    if "sigma" not in doc:
        errors.append("sigma: missing")
        sigma = None
    else:
        size = d if isinstance(d, int) else None
        if size is None and isinstance(doc["sigma"], list):
            size = len(doc["sigma"])
        sigma = _matrix(doc["sigma"], size, size, "sigma", errors)
    means = None
    if doc.get("means") is not None:
        pp = p if isinstance(p, int) else None
        cols = d if isinstance(d, int) else (len(sigma) if sigma else None)
        means = _matrix(doc["means"], pp, cols, "means", errors)
    count = _count_model(doc.get("count_model"), errors)
    exact = doc.get("exact")
    if exact is not None and not isinstance(exact, bool):
        errors.append("exact: expected true or false")
    if errors:
        raise ModelError("invalid model file:\n  " + "\n  ".join(errors))
    try:
        model = WishartModel(sigma, means, p=p, exact=exact)
    except ModelError as exc:
        raise ModelError(f"invalid model file: {exc}") from None
    if model.d != (d if d is not None else model.d):
        raise ModelError(f"d: declared {d}, sigma is {model.d}x{model.d}")
    return model, count


def parse_model(source) -> tuple[WishartModel, CountModel | None]:
    """Load a model file (path) or a JSON string into a model and optional count model."""
    if isinstance(source, dict):
        return model_from_document(source)
    text = source
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text()
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc}") from None
    return model_from_document(doc)


def _fmt(x: Fraction):
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _entry(model: WishartModel, z):
    if model.exact:
        return [_fmt(_to_fraction(z.x)), _fmt(_to_fraction(z.y))]
    z = complex(z)
    return [z.real, z.imag]


def serialize_model(model: WishartModel, count: CountModel | None = None) -> dict:
    doc = {
        "d": model.d,
        "p": model.p,
        "exact": model.exact,
        "sigma": [[_entry(model, z) for z in row] for row in model.sigma],
        "means": [[_entry(model, z) for z in row] for row in model.means],
    }
    if count is not None:
        doc["count_model"] = count.as_dict()
    return doc


def dump_model(model: WishartModel, path, count: CountModel | None = None) -> None:
    Path(path).write_text(json.dumps(serialize_model(model, count), indent=2))
