"""Reading and writing graphs: native JSON and the UAI text format.

The native format is a single JSON object::

    {
      "semiring_hint": "prob",          # optional
      "variables": [{"id": 0, "name": "v0", "dim": 2}, ...],
      "factors":   [{"id": 0, "neighbors": [0, 1], "values": [...]}, ...],
      "mode": "spider"                  # or "bipartite"
    }

Factor values are flat row-major lists: numbers, booleans for the bool
algebra, or [a, b] pairs for dual numbers. In bipartite mode variables also
carry a "values" list for their own tensor. Unknown keys are rejected with
the path to the offending object. Serialization preserves this key order
and renders floats with up to 17 significant digits, so a round trip is
structurally identical.

The UAI format is the plain-text MARKOV network layout: a preamble token,
variable count, cardinalities, clique scopes, then one table per clique.
BAYES files are accepted as plain factor tables with a warning; other
preambles are rejected.
"""

from __future__ import annotations

import json
import re
import warnings

from .algebra import get_semiring
from .errors import (
    FormatWarning,
    ParseError,
    ShapeMismatchError,
    UnsupportedPreambleError,
    ValidationError,
)
from .graph import (
    FactorGraph,
    FactorNode,
    GraphMode,
    ObjectType,
    VariableNode,
    validate_graph,
)
from .tensor import DenseTensor

_TOP_KEYS = ("semiring_hint", "variables", "factors", "mode")


def resolve_semiring(requested, hint, payload_sample):
    """Pick the semiring: explicit request, then document hint, then payload."""
    if requested:
        return get_semiring(requested)
    if hint:
        return get_semiring(hint)
    if isinstance(payload_sample, bool):
        return get_semiring("bool")
    if isinstance(payload_sample, (list, tuple)):
        return get_semiring("dual")
    return get_semiring("prob")


def _require_keys(obj, allowed, required, where):
    for key in obj:
        if key not in allowed:
            raise ParseError(f"unknown key {key!r} at {where}")
    for key in required:
        if key not in obj:
            raise ParseError(f"missing key {key!r} at {where}")


def parse_native(text, semiring=None):
    """Parse a native JSON document into (FactorGraph, semiring).

    Raises ParseError for malformed documents (with the JSON position or
    object path) and ValidationError when the described graph is unsound
    (with the offending ids).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON at line {err.lineno} column {err.colno}: {err.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    _require_keys(doc, _TOP_KEYS, ("variables", "factors"), "top level")
    mode_name = doc.get("mode", "spider")
    try:
        mode = GraphMode(mode_name)
    except ValueError:
        raise ParseError(f'mode must be "spider" or "bipartite", got {mode_name!r} at top level') from None

    sample = None
    for fac in doc.get("factors", []):
        vals = fac.get("values") if isinstance(fac, dict) else None
        if vals:
            sample = vals[0]
            break
    try:
        sr = resolve_semiring(semiring, doc.get("semiring_hint"), sample)
    except ValueError as err:
        raise ParseError(f"{err} at top level") from None

    var_allowed = ("id", "name", "dim") + (("values",) if mode is GraphMode.BIPARTITE else ())
    variables = []
    raw_values = {}
    for i, item in enumerate(doc["variables"]):
        where = f"variables[{i}]"
        if not isinstance(item, dict):
            raise ParseError(f"expected an object at {where}")
        _require_keys(item, var_allowed, ("id", "dim"), where)
        vid = item["id"]
        if not isinstance(vid, int) or isinstance(vid, bool):
            raise ParseError(f"id must be an integer at {where}")
        name = item.get("name", f"v{vid}")
        try:
            obj = ObjectType(name, item["dim"])
        except ValueError as err:
            raise ValidationError(f"{err} at {where}") from None
        variables.append(VariableNode(vid, obj))
        if "values" in item:
            raw_values[vid] = item["values"]

    factors = []
    for i, item in enumerate(doc["factors"]):
        where = f"factors[{i}]"
        if not isinstance(item, dict):
            raise ParseError(f"expected an object at {where}")
        _require_keys(item, ("id", "neighbors", "values"), ("id", "neighbors", "values"), where)
        fid = item["id"]
        if not isinstance(fid, int) or isinstance(fid, bool):
            raise ParseError(f"id must be an integer at {where}")
        neighbors = item["neighbors"]
        if not isinstance(neighbors, list) or any(
            not isinstance(v, int) or isinstance(v, bool) for v in neighbors
        ):
            raise ParseError(f"neighbors must be a list of variable ids at {where}")
        factors.append((fid, tuple(neighbors), item["values"]))

    dims = {v.id: v.obj.dim for v in variables}
    nodes = []
    for fid, neighbors, values in factors:
        unknown = [v for v in neighbors if v not in dims]
        if unknown:
            raise ValidationError(f"factor {fid} references unknown variable {unknown[0]}")
        shape = tuple(dims[v] for v in neighbors)
        try:
            tensor = DenseTensor.from_values(shape, values, sr)
        except (ValueError, ShapeMismatchError) as err:
            raise ValidationError(f"factor {fid}: {err}") from None
        nodes.append(FactorNode(fid, tensor, neighbors))

    if mode is GraphMode.BIPARTITE:
        g0 = FactorGraph(tuple(variables), tuple(nodes), mode=GraphMode.SPIDER)
        fitted = []
        for v in variables:
            if v.id not in raw_values:
                raise ValidationError(f"variable {v.id} needs values in bipartite mode")
            deg = len(g0.incident.get(v.id, ()))
            shape = (v.obj.dim,) * deg
            try:
                tensor = DenseTensor.from_values(shape, raw_values[v.id], sr)
            except (ValueError, ShapeMismatchError) as err:
                raise ValidationError(f"variable {v.id}: {err}") from None
            fitted.append(VariableNode(v.id, v.obj, tensor))
        variables = fitted

    g = FactorGraph(tuple(variables), tuple(nodes), mode=mode)
    validate_graph(g).raise_if_invalid()
    return g, sr


def graph_to_document(g, semiring, hint=None):
    """Native-format dict for a graph, in canonical key order."""
    semiring = get_semiring(semiring)
    doc = {"semiring_hint": hint or semiring.name}
    doc["variables"] = []
    for v in g.variables:
        item = {"id": v.id, "name": v.obj.name, "dim": v.obj.dim}
        if g.mode is GraphMode.BIPARTITE and v.tensor is not None:
            item["values"] = [semiring.value_to_json(x) for x in v.tensor.data.tolist()]
        doc["variables"].append(item)
    doc["factors"] = [
        {
            "id": f.id,
            "neighbors": list(f.neighbors),
            "values": [semiring.value_to_json(x) for x in f.tensor.data.tolist()],
        }
        for f in g.factors
    ]
    doc["mode"] = g.mode.value
    return doc


def serialize_native(g, semiring, hint=None):
    return json.dumps(graph_to_document(g, semiring, hint)) + "\n"


_TOKEN = re.compile(rb"\S+")


def _tokenize(data):
    return [(m.start(), m.group().decode("ascii", "replace")) for m in _TOKEN.finditer(data)]


class _TokenStream:
    def __init__(self, text):
        data = text.encode("utf-8") if isinstance(text, str) else text
        self.tokens = _tokenize(data)
        self.pos = 0
        self.end = len(data)

    def next(self, what):
        if self.pos >= len(self.tokens):
            raise ParseError(f"truncated input: expected {what} at byte offset {self.end}")
        offset, tok = self.tokens[self.pos]
        self.pos += 1
        return offset, tok

    def next_int(self, what):
        offset, tok = self.next(what)
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"expected {what} at byte offset {offset}, got {tok!r}") from None

    def next_number(self, what):
        offset, tok = self.next(what)
        try:
            return float(tok)
        except ValueError:
            raise ParseError(f"expected {what} at byte offset {offset}, got {tok!r}") from None


def parse_uai(text, semiring="prob"):
    """Parse a UAI MARKOV file into (FactorGraph, semiring).

    Whitespace and newlines are interchangeable. Truncated files raise
    ParseError with the byte offset where input ran out.
    """
    sr = get_semiring(semiring)
    stream = _TokenStream(text)
    offset, preamble = stream.next("a network type preamble")
    kind = preamble.upper()
    if kind == "BAYES":
        warnings.warn(
            "BAYES network read as plain factor tables", FormatWarning, stacklevel=2
        )
    elif kind != "MARKOV":
        raise UnsupportedPreambleError(
            f"unsupported network type {preamble!r} at byte offset {offset}"
        )
    n_vars = stream.next_int("the variable count")
    dims = [stream.next_int(f"cardinality of variable {i}") for i in range(n_vars)]
    variables = tuple(
        VariableNode(i, ObjectType(f"v{i}", d)) for i, d in enumerate(dims)
    )
    n_factors = stream.next_int("the factor count")
    scopes = []
    for i in range(n_factors):
        k = stream.next_int(f"the scope size of factor {i}")
        scope = tuple(stream.next_int(f"a variable id in factor {i}") for _ in range(k))
        bad = [v for v in scope if not 0 <= v < n_vars]
        if bad:
            raise ParseError(f"factor {i} references unknown variable {bad[0]}")
        scopes.append(scope)
    factors = []
    for i, scope in enumerate(scopes):
        count = stream.next_int(f"the table size of factor {i}")
        values = [stream.next_number(f"entry {j} of factor {i}") for j in range(count)]
        shape = tuple(dims[v] for v in scope)
        try:
            tensor = DenseTensor.from_values(shape, values, sr)
        except (ValueError, ShapeMismatchError) as err:
            raise ValidationError(f"factor {i}: {err}") from None
        factors.append(FactorNode(i, tensor, scope))
    g = FactorGraph(variables, tuple(factors), mode=GraphMode.SPIDER)
    validate_graph(g).raise_if_invalid()
    return g, sr


def serialize_uai(g, semiring):
    """Write a spider-mode graph with numeric values as a UAI MARKOV file."""
    semiring = get_semiring(semiring)
    if g.mode is not GraphMode.SPIDER:
        raise ValidationError("only spider-mode graphs have a UAI form")
    if semiring.name == "dual":
        raise ValidationError("dual-valued graphs have no UAI form")
    lines = ["MARKOV", str(len(g.variables))]
    lines.append(" ".join(str(v.obj.dim) for v in g.variables))
    lines.append(str(len(g.factors)))
    for f in g.factors:
        lines.append(" ".join([str(f.rank)] + [str(v) for v in f.neighbors]))
    lines.append("")
    for f in g.factors:
        lines.append(str(f.tensor.size))
        lines.append(" ".join(_uai_number(semiring, x) for x in f.tensor.data.tolist()))
        lines.append("")
    return "\n".join(lines)


def _uai_number(semiring, x):
    v = semiring.value_to_json(x)
    if isinstance(v, bool):
        return "1" if v else "0"
    return repr(v)
