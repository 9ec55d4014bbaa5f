"""Generator-labeled graphs and Cayley balls."""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable


class LabeledGraph:
    """Undirected graph whose vertices carry unique payloads and whose edges carry labels.

    An edge is stored once as (u, v, label) with u < v; two different labels
    on the same pair are two edges.
    """

    def __init__(self, metadata: dict | None = None):
        self.metadata = dict(metadata or {})
        self._payloads: list = []
        self._index: dict = {}
        self._edges: set = set()
        self._adj: list[set] = []
        self.distance: list | None = None

    def add_vertex(self, payload: Hashable) -> int:
        vid = self._index.get(payload)
        if vid is None:
            vid = len(self._payloads)
            self._payloads.append(payload)
            self._index[payload] = vid
            self._adj.append(set())
        return vid

    def add_edge(self, u: int, v: int, label: str = "") -> None:
        if u == v:
            return
        if u > v:
            u, v = v, u
        self._edges.add((u, v, label))
        self._adj[u].add(v)
        self._adj[v].add(u)

    def vertex_id(self, payload):
        return self._index.get(payload)

    def __contains__(self, payload):
        return payload in self._index

    def payload(self, vid: int):
        return self._payloads[vid]

    def payloads(self) -> list:
        return list(self._payloads)

    @property
    def edges(self) -> list:
        return sorted(self._edges)

    def number_of_vertices(self) -> int:
        return len(self._payloads)

    def number_of_edges(self) -> int:
        return len(self._edges)

    def neighbors(self, vid: int) -> set:
        return self._adj[vid]

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def is_connected(self, vertices: Iterable[int] | None = None) -> bool:
        verts = set(range(len(self._payloads)) if vertices is None else vertices)
        if not verts:
            return True
        start = next(iter(verts))
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in self._adj[u]:
                if v in verts and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == len(verts)

    def __eq__(self, other):
        """Equal payload sets, equal labeled edges between payloads, equal metadata."""
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (set(self._payloads) == set(other._payloads)
                and self._edge_payloads() == other._edge_payloads()
                and self.metadata == other.metadata)

    __hash__ = None

    def _edge_payloads(self) -> set:
        p = self._payloads
        return {(frozenset((p[u], p[v])), lab) for u, v, lab in self._edges}

    def __repr__(self):
        return f"LabeledGraph({self.number_of_vertices()} vertices, {self.number_of_edges()} edges)"


def _sort_key(item):
    name, g = item
    return (name, repr(g.serialize()) if hasattr(g, "serialize") else repr(g))


def cayley_ball(generators: dict, identity, radius: int, metadata: dict | None = None) -> LabeledGraph:
    """Ball of the given radius around the identity, g joined to g*s for each generator s.

    BFS visits generators in name order, so vertex ids are reproducible.
    Edges are all generator edges between ball vertices, labeled by the
    generator that carries the lower vertex id to the higher one.
    """
    gens = sorted(generators.items(), key=_sort_key)
    graph = LabeledGraph({"radius": radius, **(metadata or {})})
    graph.add_vertex(identity)
    dist = {identity: 0}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        if dist[g] == radius:
            continue
        for _, s in gens:
            h = g * s
            if h not in dist:
                dist[h] = dist[g] + 1
                graph.add_vertex(h)
                queue.append(h)
    for vid, g in enumerate(graph.payloads()):
        for name, s in gens:
            other = graph.vertex_id(g * s)
            # generators are inverse-closed, so each edge is seen from its lower end
            if other is not None and other > vid:
                graph.add_edge(vid, other, name)
    graph.distance = [dist[g] for g in graph.payloads()]
    return graph
