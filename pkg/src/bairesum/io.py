"""JSON reading and writing for trees, vectors, sequences and reports.

Coefficients travel as integer ``num``/``den`` pairs; anything else (floats,
decimal strings, booleans) is rejected rather than rounded.  Every parse
failure raises :class:`ParseError` naming the file and the field.
"""

import json
from fractions import Fraction
from pathlib import Path

from .errors import ParseError, TreeError
from .tree import build_tree
from .vector import TreeVector


def dumps(obj):
    """Deterministic JSON text (sorted keys, fixed indentation)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def read_json(path):
    source = str(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(source, "<file>", exc.strerror or str(exc)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(source, "<json>", f"line {exc.lineno}: {exc.msg}") from None


def _int_field(source, field, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(source, field, f"expected an integer, got {value!r}")
    return value


# -- trees --------------------------------------------------------------------


def tree_from_json(obj, source="<tree>"):
    if not isinstance(obj, dict) or not isinstance(obj.get("nodes"), list):
        raise ParseError(source, "nodes", "expected an object with a 'nodes' list")
    entries = obj["nodes"]
    n = len(entries)
    parents = [None] * n
    seen = [False] * n
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ParseError(source, f"nodes[{i}]", "expected an object")
        v = _int_field(source, f"nodes[{i}].id", entry.get("id"))
        if not 0 <= v < n:
            raise ParseError(source, f"nodes[{i}].id", f"id {v} outside 0..{n - 1}")
        if seen[v]:
            raise ParseError(source, f"nodes[{i}].id", f"duplicate id {v}")
        seen[v] = True
        if "parent" not in entry:
            raise ParseError(source, f"nodes[{i}].parent", "missing")
        p = entry["parent"]
        if p is not None:
            p = _int_field(source, f"nodes[{i}].parent", p)
            if not 0 <= p < n:
                raise ParseError(source, f"nodes[{i}].parent", f"parent {p} is not a node")
        parents[v] = p
    try:
        return build_tree(parents)
    except TreeError as exc:
        raise ParseError(source, "nodes", str(exc)) from None


def tree_to_json(tree):
    par = tree.parent_array().tolist()
    return {"nodes": [{"id": v, "parent": None if p < 0 else p} for v, p in enumerate(par)]}


def load_tree(path):
    return tree_from_json(read_json(path), str(path))


# -- vectors ------------------------------------------------------------------


def vector_from_json(obj, tree=None, source="<vector>"):
    if not isinstance(obj, dict) or not isinstance(obj.get("entries"), list):
        raise ParseError(source, "entries", "expected an object with an 'entries' list")
    coeffs = {}
    for i, entry in enumerate(obj["entries"]):
        if not isinstance(entry, dict):
            raise ParseError(source, f"entries[{i}]", "expected an object")
        node = _int_field(source, f"entries[{i}].node", entry.get("node"))
        num = _int_field(source, f"entries[{i}].num", entry.get("num"))
        den = _int_field(source, f"entries[{i}].den", entry.get("den", 1))
        if den == 0:
            raise ParseError(source, f"entries[{i}].den", "zero denominator")
        if node < 0 or (tree is not None and node >= tree.n_nodes):
            limit = f" of a {tree.n_nodes}-node tree" if tree is not None else ""
            raise ParseError(source, f"entries[{i}].node", f"node {node} is not a node{limit}")
        if node in coeffs:
            raise ParseError(source, f"entries[{i}].node", f"node {node} listed twice")
        coeffs[node] = Fraction(num, den)
    return TreeVector.from_mapping(coeffs)


def vector_to_json(z):
    return {
        "entries": [
            {"node": v, "num": c.numerator, "den": c.denominator} for v, c in z.items()
        ]
    }


def load_vector(path, tree=None):
    return vector_from_json(read_json(path), tree, str(path))


# -- sequences ----------------------------------------------------------------


def load_sequence(path, tree=None):
    """A JSON list whose items are vector file paths (relative to the list
    file) or inline vector objects."""
    source = str(path)
    obj = read_json(path)
    if isinstance(obj, dict) and isinstance(obj.get("vectors"), list):
        obj = obj["vectors"]
    if not isinstance(obj, list) or not obj:
        raise ParseError(source, "<root>", "expected a nonempty list of vectors")
    base = Path(path).parent
    out = []
    for i, item in enumerate(obj):
        if isinstance(item, str):
            out.append(load_vector(base / item, tree))
        elif isinstance(item, dict):
            out.append(vector_from_json(item, tree, f"{source}[{i}]"))
        else:
            raise ParseError(source, f"[{i}]", "expected a file name or a vector object")
    return out
