"""Nucleus computation, Moore diagrams, the open set condition and restriction probabilities."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .tree import TreeAction

DEFAULT_MAX_ELEMENTS = 10_000
DEFAULT_MAX_DEPTH = 64


class BudgetExceeded(RuntimeError):
    """A restriction closure grew past its cap."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def _key(g):
    return g.sort_key()


@dataclass(frozen=True)
class Nucleus:
    elements: tuple
    transitions: dict  # (element, letter) -> (letter, element)
    arity: int
    identity: object

    @classmethod
    def from_action(cls, action: TreeAction, elements) -> "Nucleus":
        elems = tuple(sorted(set(elements), key=_key))
        trans = {}
        for g in elems:
            for x in range(action.arity):
                trans[(g, x)] = action.act_letter(g, x)
        return cls(elems, trans, action.arity, action.identity)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self._set

    @property
    def _set(self):
        s = self.__dict__.get("_elem_set")
        if s is None:
            s = frozenset(self.elements)
            object.__setattr__(self, "_elem_set", s)
        return s

    def nontrivial(self) -> tuple:
        return tuple(g for g in self.elements if g != self.identity)

    def restriction(self, g, x: int):
        return self.transitions[(g, x)][1]

    def moore_diagram(self) -> list[tuple]:
        """Rows (state index, input letter, output letter, target index) in element order."""
        index = {g: i for i, g in enumerate(self.elements)}
        return [(index[g], x, y, index[h])
                for g in self.elements for x in range(self.arity)
                for (y, h) in [self.transitions[(g, x)]]]

    def is_restriction_closed(self) -> bool:
        return all(h in self for (_, h) in self.transitions.values())


@dataclass
class ContractionReport:
    contracting: bool
    nucleus: Nucleus | None
    depth_certificate: int | None
    pair_depths: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "Contracting" if self.contracting else "NotContractingWithinBudget"


def restriction_closure(action: TreeAction, seed, max_elements: int = DEFAULT_MAX_ELEMENTS) -> frozenset:
    """Smallest set containing seed, inverses and the identity, closed under first-level restrictions."""
    out = {action.identity}
    queue = deque()
    for g in seed:
        for h in (g, g.inverse()):
            if h not in out:
                out.add(h)
                queue.append(h)
    while queue:
        g = queue.popleft()
        for r in action.wreath_recursion(g).sections:
            if r not in out:
                out.add(r)
                if len(out) > max_elements:
                    raise BudgetExceeded(f"restriction closure exceeded {max_elements} elements",
                                         frozenset(out))
                queue.append(r)
    return frozenset(out)


def _restriction_graph(action, start, max_elements, max_depth):
    """Digraph of all restrictions reachable from ``start`` (bounded)."""
    graph = nx.DiGraph()
    graph.add_node(start)
    depth = {start: 0}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for r in action.wreath_recursion(g).sections:
            graph.add_edge(g, r)
            if r not in depth:
                if depth[g] + 1 > max_depth or len(depth) >= max_elements:
                    raise BudgetExceeded("restriction graph exceeded its budget")
                depth[r] = depth[g] + 1
                queue.append(r)
    return graph


def _recurrent(graph: nx.DiGraph) -> set:
    """Elements on cycles together with everything reachable from them."""
    cyc = set()
    for comp in nx.strongly_connected_components(graph):
        if len(comp) > 1:
            cyc |= comp
        else:
            (v,) = comp
            if graph.has_edge(v, v):
                cyc.add(v)
    out = set(cyc)
    for v in cyc:
        out |= nx.descendants(graph, v)
    return out


def _entry_depth(graph: nx.DiGraph, start, inside) -> int:
    """Least n such that every restriction of ``start`` at level >= n lies in ``inside``."""
    memo: dict = {}
    order = list(nx.dfs_postorder_nodes(graph, start))
    for v in order:
        if v in inside:
            memo[v] = 0
        else:
            memo[v] = 1 + max((memo[w] for w in graph.successors(v)), default=0)
    return memo[start]


def _norm(action, g) -> int:
    fac = getattr(action, "factorize", None)
    if fac is not None:
        return sum(abs(e) for _, e in fac(g))
    return len(repr(g.serialize()))


def compute_nucleus(action: TreeAction, generators=None, max_elements: int = DEFAULT_MAX_ELEMENTS,
                    max_depth: int = DEFAULT_MAX_DEPTH) -> ContractionReport:
    """Fixed-point search for the nucleus.

    Start from the recurrent part of the restriction closure of the generators;
    for every pair (g, h) of candidates follow the restrictions of g*h and add
    any element that sits on (or below) a restriction cycle outside the
    candidate set. Contracting is reported only after a full pass adds nothing.
    """
    if generators is None:
        generators = list(action.generators.values())
    evidence: dict = {"candidate_sizes": [], "max_new_norm": []}
    try:
        closure = restriction_closure(action, generators, max_elements)
    except BudgetExceeded as exc:
        evidence["reason"] = str(exc)
        return ContractionReport(False, None, None, {}, evidence)
    g0 = nx.DiGraph()
    for g in closure:
        for r in action.wreath_recursion(g).sections:
            g0.add_edge(g, r)
    cand = _recurrent(g0) | {action.identity}
    while True:
        evidence["candidate_sizes"].append(len(cand))
        added = set()
        pair_depths = {}
        try:
            for g in sorted(cand, key=_key):
                for h in sorted(cand, key=_key):
                    p = g * h
                    if p in cand:
                        pair_depths[(g, h)] = 0
                        continue
                    graph = _restriction_graph(action, p, max_elements, max_depth)
                    new = _recurrent(graph) - cand
                    if new:
                        added |= new
                    else:
                        pair_depths[(g, h)] = _entry_depth(graph, p, cand)
                if len(cand) + len(added) > max_elements:
                    raise BudgetExceeded("candidate set exceeded its cap")
        except BudgetExceeded as exc:
            evidence["reason"] = str(exc)
            if added:
                evidence["max_new_norm"].append(max(_norm(action, x) for x in added))
            return ContractionReport(False, None, None, {}, evidence)
        if not added:
            break
        evidence["max_new_norm"].append(max(_norm(action, x) for x in added))
        cand |= added
    nucleus = Nucleus.from_action(action, cand)
    if not nucleus.is_restriction_closed():
        raise AssertionError("candidate set is not restriction-closed")
    depth = max(pair_depths.values(), default=0)
    return ContractionReport(True, nucleus, depth, pair_depths, evidence)


def is_nucleus_closed(action: TreeAction, elements, max_elements: int = DEFAULT_MAX_ELEMENTS,
                      max_depth: int = DEFAULT_MAX_DEPTH) -> bool:
    """Restriction-closed, and every pairwise product only recurs inside the set."""
    s = set(elements)
    for g in s:
        if any(r not in s for r in action.wreath_recursion(g).sections):
            return False
    for g in s:
        for h in s:
            p = g * h
            if p in s:
                continue
            try:
                graph = _restriction_graph(action, p, max_elements, max_depth)
            except BudgetExceeded:
                return False
            if _recurrent(graph) - s:
                return False
    return True


# -- open set condition and restriction probabilities -------------------------------

@dataclass(frozen=True)
class Holds:
    witnesses: dict  # element -> shortest word v with g|_v = identity


@dataclass(frozen=True)
class Fails:
    states: tuple


def open_set_condition(nucleus: Nucleus):
    """Holds iff the identity state is reachable from every state of the Moore diagram."""
    witness = {nucleus.identity: ()}
    # reverse BFS from the identity
    preds: dict = {g: [] for g in nucleus.elements}
    for (g, x), (_, h) in nucleus.transitions.items():
        preds.setdefault(h, []).append((g, x))
    queue = deque([nucleus.identity])
    while queue:
        h = queue.popleft()
        for g, x in sorted(preds.get(h, []), key=lambda p: (p[1], _key(p[0]))):
            if g not in witness:
                witness[g] = (x,) + witness[h]
                queue.append(g)
    missing = tuple(g for g in nucleus.elements if g not in witness)
    if missing:
        return Fails(missing)
    return Holds(witness)


def witness_length(nucleus: Nucleus) -> int:
    res = open_set_condition(nucleus)
    if isinstance(res, Fails):
        raise ValueError("open set condition fails")
    return max(len(v) for v in res.witnesses.values())


def nontrivial_restriction_probability(nucleus: Nucleus, depth: int) -> Fraction:
    """P[some nucleus element has nontrivial restriction along n uniform random letters].

    Exact: the set-valued chain S_{k+1} = {g|_x : g in S_k} minus the identity,
    started from the nontrivial elements, with weight 1/t per letter.
    """
    if isinstance(open_set_condition(nucleus), Fails):
        raise ValueError("open set condition fails")
    start = frozenset(nucleus.nontrivial())
    if not start:
        return Fraction(0)
    dist = {start: Fraction(1)}
    step = Fraction(1, nucleus.arity)
    ident = nucleus.identity
    for _ in range(depth):
        nxt: dict = {}
        for s, p in dist.items():
            for x in range(nucleus.arity):
                t = frozenset(h for h in (nucleus.transitions[(g, x)][1] for g in s) if h != ident)
                if t:
                    nxt[t] = nxt.get(t, 0) + p * step
        dist = nxt
    return sum(dist.values(), Fraction(0))


def probability_bound(nucleus: Nucleus, depth: int) -> Fraction:
    """|N| (1 - t^-l)^floor(n/l) with l the longest shortest witness."""
    ell = max(witness_length(nucleus), 1)
    return len(nucleus) * (1 - Fraction(1, nucleus.arity ** ell)) ** (depth // ell)
