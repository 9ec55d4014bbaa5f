"""Byte-stable output documents: graph-dot, graph-json, table-csv and certificate-json."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .graphs import LabeledGraph
from .groups.affine import AffineElement
from .groups.bs import BSElement
from .groups.heisenberg import HeisenbergElement
from .groups.lamplighter import LamplighterElement, lamplighter
from .tree import Ray

FORMATS = ("graph-dot", "graph-json", "table-csv", "certificate-json")
TOOL = "scaleinv"


class FormatError(ValueError):
    pass


# -- payload encoding -------------------------------------------------------------------

def encode(x):
    """JSON value for a graph payload or certificate entry."""
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Ray):
        return {"ray": str(x)}
    if isinstance(x, tuple) and all(isinstance(i, int) for i in x):
        return {"word": list(x)}
    if hasattr(x, "serialize"):
        return x.serialize()
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    raise FormatError(f"cannot encode {type(x).__name__}")


def decode(obj):
    """Inverse of ``encode`` for graph payloads."""
    if isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, list) and len(obj) == 3 and all(isinstance(i, int) for i in obj):
        return HeisenbergElement(*obj)
    if isinstance(obj, dict):
        keys = set(obj)
        if keys == {"ray"}:
            return Ray.parse(obj["ray"])
        if keys == {"word"}:
            return tuple(obj["word"])
        if keys == {"m", "lamps"}:
            return lamplighter(obj["m"], obj["lamps"])
        if keys == {"t", "r", "m"}:
            return BSElement(obj["t"], Fraction(obj["r"]), obj["m"])
        if keys == {"matrix", "vector"}:
            return AffineElement(tuple(tuple(r) for r in obj["matrix"]), tuple(obj["vector"]))
    raise FormatError(f"unrecognised payload {obj!r}")


def _canon(x) -> str:
    return json.dumps(encode(x), sort_keys=True, separators=(",", ":"))


# -- documents ---------------------------------------------------------------------------

@dataclass
class OutputDocument:
    format: str
    payload: object
    command: str
    seed: int | None = None
    out: str | None = None

    def provenance(self) -> dict:
        return {"tool": TOOL, "version": __version__, "command": self.command, "seed": self.seed}

    def render(self) -> str:
        if self.format == "certificate-json":
            doc = {"format": self.format, "provenance": self.provenance(), "payload": self.payload}
            return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
        if self.format == "graph-json":
            doc = {"format": self.format, "provenance": self.provenance(), "graph": self.payload}
            return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
        if self.format == "graph-dot":
            head = "".join(f"// {k}: {v}\n" for k, v in self.provenance().items())
            return head + self.payload
        if self.format == "table-csv":
            head = "".join(f"# {k}: {v}\n" for k, v in self.provenance().items())
            return head + self.payload
        raise FormatError(f"unsupported format {self.format!r}")


# -- graphs ----------------------------------------------------------------------------------

def _graph_order(graph: LabeledGraph):
    order = sorted(range(graph.number_of_vertices()), key=lambda v: _canon(graph.payload(v)))
    new_id = {old: i for i, old in enumerate(order)}
    edges = sorted((min(new_id[u], new_id[v]), max(new_id[u], new_id[v]), lab)
                   for u, v, lab in graph.edges)
    return order, edges


def graph_to_json(graph: LabeledGraph) -> dict:
    order, edges = _graph_order(graph)
    return {
        "metadata": {k: encode(graph.metadata[k]) for k in sorted(graph.metadata)},
        "vertices": [{"id": i, "payload": encode(graph.payload(v))} for i, v in enumerate(order)],
        "edges": [[u, v, lab] for u, v, lab in edges],
    }


def graph_from_json(doc: dict) -> LabeledGraph:
    body = doc.get("graph", doc)
    graph = LabeledGraph(body.get("metadata", {}))
    for vert in body["vertices"]:
        vid = graph.add_vertex(decode(vert["payload"]))
        if vid != vert["id"]:
            raise FormatError("vertex ids must be consecutive and payloads unique")
    for u, v, lab in body["edges"]:
        graph.add_edge(u, v, lab)
    return graph


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def graph_to_dot(graph: LabeledGraph) -> str:
    order, edges = _graph_order(graph)
    lines = ["graph G {"]
    for k in sorted(graph.metadata):
        lines.append(f"  // meta {k} = {json.dumps(encode(graph.metadata[k]))}")
    for i, v in enumerate(order):
        p = graph.payload(v)
        label = p.label() if hasattr(p, "label") else str(p)
        lines.append(f"  {i} [label={_dot_quote(label)}, payload={_dot_quote(_canon(p))}];")
    for u, v, lab in edges:
        lines.append(f"  {u} -- {v} [label={_dot_quote(lab)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


_QUOTED = r'"(?:[^"\\]|\\.)*"'
_VERTEX = re.compile(rf"^\s*(\d+) \[label=({_QUOTED}), payload=({_QUOTED})\];$")
_EDGE = re.compile(rf"^\s*(\d+) -- (\d+) \[label=({_QUOTED})\];$")
_META = re.compile(r"^\s*// meta (\S+) = (.*)$")


def graph_from_dot(text: str) -> LabeledGraph:
    meta, verts, edges = {}, [], []
    for line in text.splitlines():
        if m := _META.match(line):
            meta[m.group(1)] = json.loads(m.group(2))
        elif m := _VERTEX.match(line):
            verts.append((int(m.group(1)), json.loads(_dot_unquote(m.group(3)))))
        elif m := _EDGE.match(line):
            edges.append((int(m.group(1)), int(m.group(2)), _dot_unquote(m.group(3))))
    graph = LabeledGraph(meta)
    for i, payload in verts:
        if graph.add_vertex(decode(payload)) != i:
            raise FormatError("vertex ids must be consecutive")
    for u, v, lab in edges:
        graph.add_edge(u, v, lab)
    return graph


def serialize_graph(graph: LabeledGraph, fmt: str, command: str = "", seed=None) -> OutputDocument:
    if fmt == "graph-json":
        return OutputDocument(fmt, graph_to_json(graph), command, seed)
    if fmt == "graph-dot":
        return OutputDocument(fmt, graph_to_dot(graph), command, seed)
    raise FormatError(f"unsupported graph format {fmt!r}")


def parse_graph(text: str, fmt: str) -> LabeledGraph:
    if fmt == "graph-json":
        return graph_from_json(json.loads(text))
    if fmt == "graph-dot":
        return graph_from_dot(text)
    raise FormatError(f"unsupported graph format {fmt!r}")


# -- tables --------------------------------------------------------------------------------------

def table_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _cell(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (list, dict)):
        return json.dumps(x, separators=(",", ":"))
    return str(x)


def parse_table(text: str) -> list[list[str]]:
    body = "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))
    return list(csv.reader(io.StringIO(body)))
