"""On-disk graph documents.

A graph is stored as UTF-8 JSON with three fields:

    {
      "domain": "R" | {"lo": 0, "hi": 1, "lo_open": false, "hi_open": true},
      "arguments": [{"id": "a_1", "weight": 0.8}, ...],
      "edges": [{"from": "a_1", "to": "a_2", "kind": "support"}, ...]
    }

"from" is the parent: an attack edge a -> b sets the matrix entry in b's
row, a's column to -1.  Ordered (from, to) pairs must be unique, which also
rules out an argument simultaneously attacking and supporting another.
Weights are checked against the domain at parse time.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import DocumentError
from .graph import ValueDomain, Wasa

_EDGE_KINDS = {"attack": -1, "support": 1}
_SIGN_KIND = {-1: "attack", 1: "support"}


def _domain_from_json(node) -> ValueDomain:
    if node == "R":
        return ValueDomain.reals()
    if not isinstance(node, dict):
        raise DocumentError('domain: expected the token "R" or an object')
    unknown = set(node) - {"lo", "hi", "lo_open", "hi_open"}
    if unknown:
        raise DocumentError(f"domain: unknown fields {sorted(unknown)}")
    lo, hi = node.get("lo"), node.get("hi")
    for name, value in (("lo", lo), ("hi", hi)):
        if value is not None and not isinstance(value, (int, float)):
            raise DocumentError(f"domain.{name}: expected a number or null")
    for name in ("lo_open", "hi_open"):
        if not isinstance(node.get(name, False), bool):
            raise DocumentError(f"domain.{name}: expected a boolean")
    try:
        return ValueDomain(
            None if lo is None else float(lo),
            None if hi is None else float(hi),
            bool(node.get("lo_open", False)),
            bool(node.get("hi_open", False)),
        )
    except Exception as exc:
        raise DocumentError(f"domain: {exc}") from exc


def _domain_to_json(dom: ValueDomain):
    if dom.lo is None and dom.hi is None:
        return "R"
    return {"lo": dom.lo, "hi": dom.hi,
            "lo_open": dom.lo_open, "hi_open": dom.hi_open}


def parse(text: str) -> Wasa:
    """Parse a graph document, reporting the first violated constraint."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("top level: expected an object")
    unknown = set(doc) - {"domain", "arguments", "edges"}
    if unknown:
        raise DocumentError(f"top level: unknown fields {sorted(unknown)}")
    for key in ("domain", "arguments", "edges"):
        if key not in doc:
            raise DocumentError(f"top level: missing field {key!r}")

    domain = _domain_from_json(doc["domain"])

    args = doc["arguments"]
    if not isinstance(args, list) or not args:
        raise DocumentError("arguments: expected a non-empty list")
    labels: list[str] = []
    weights: list[float] = []
    for idx, node in enumerate(args):
        where = f"arguments[{idx}]"
        if not isinstance(node, dict) or set(node) != {"id", "weight"}:
            raise DocumentError(f"{where}: expected an object with id and weight")
        if not isinstance(node["id"], str) or not node["id"]:
            raise DocumentError(f"{where}.id: expected a non-empty string")
        if isinstance(node["weight"], bool) or not isinstance(node["weight"], (int, float)):
            raise DocumentError(f"{where}.weight: expected a number")
        w = float(node["weight"])
        if not math.isfinite(w):
            raise DocumentError(f"{where}.weight: must be finite")
        if not domain.contains(w):
            raise DocumentError(f"{where}.weight: {w} outside the value domain")
        if node["id"] in labels:
            raise DocumentError(f"{where}.id: duplicate id {node['id']!r}")
        labels.append(node["id"])
        weights.append(w)
    index = {lab: i for i, lab in enumerate(labels)}

    edges = doc["edges"]
    if not isinstance(edges, list):
        raise DocumentError("edges: expected a list")
    n = len(labels)
    g = np.zeros((n, n), dtype=np.int64)
    seen: set[tuple[str, str]] = set()
    for idx, edge in enumerate(edges):
        where = f"edges[{idx}]"
        if not isinstance(edge, dict) or set(edge) != {"from", "to", "kind"}:
            raise DocumentError(f"{where}: expected an object with from, to, kind")
        src, dst, kind = edge["from"], edge["to"], edge["kind"]
        if src not in index:
            raise DocumentError(f"{where}.from: unknown argument {src!r}")
        if dst not in index:
            raise DocumentError(f"{where}.to: unknown argument {dst!r}")
        if kind not in _EDGE_KINDS:
            raise DocumentError(f'{where}.kind: expected "attack" or "support"')
        if (src, dst) in seen:
            raise DocumentError(f"{where}: duplicate edge {src!r} -> {dst!r} "
                                "(one relation per ordered pair)")
        seen.add((src, dst))
        g[index[dst], index[src]] = _EDGE_KINDS[kind]
    return Wasa(tuple(labels), g, np.array(weights), domain)


def serialize(wasa: Wasa) -> str:
    """Inverse of parse; edge order is row-major over the matrix."""
    edges = []
    for i in range(wasa.n):
        for j in range(wasa.n):
            sign = int(wasa.g[i, j])
            if sign:
                edges.append({"from": wasa.labels[j], "to": wasa.labels[i],
                              "kind": _SIGN_KIND[sign]})
    doc = {
        "domain": _domain_to_json(wasa.domain),
        "arguments": [{"id": lab, "weight": float(w)}
                      for lab, w in zip(wasa.labels, wasa.w)],
        "edges": edges,
    }
    return json.dumps(doc, indent=2) + "\n"


def load(path: str) -> Wasa:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(wasa: Wasa, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(wasa))
