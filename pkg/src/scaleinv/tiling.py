"""Tiles and tilings: letter adjacency, level tilings of Cayley balls, Folner profiles,
monotile lifts along subgroup chains and the Diestel-Leader ball check."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .graphs import LabeledGraph, cayley_ball
from .nucleus import Nucleus, open_set_condition, Fails
from .tree import DEFAULT_BUDGET, DivergedAfter, Ray, TreeAction, rays_agree_from


class OrbitDiverged(RuntimeError):
    def __init__(self, element, depth):
        super().__init__(f"orbit point of {element!r} did not close within depth {depth}")
        self.element = element
        self.depth = depth


# -- letter adjacency -----------------------------------------------------------------

def letter_adjacency_graph(nucleus: Nucleus, witnesses=None) -> tuple[LabeledGraph, bool]:
    """Letters i, j are joined when some nucleus element sends i to j with trivial restriction.

    Each unordered pair keeps the label of the first such element in nucleus
    order. ``witnesses`` restricts the elements consulted to a subset.
    """
    graph = LabeledGraph({"kind": "letter-adjacency"})
    for i in range(nucleus.arity):
        graph.add_vertex(i)
    seen = set()
    allowed = None if witnesses is None else set(witnesses)
    for g in nucleus.elements:
        if g == nucleus.identity or (allowed is not None and g not in allowed):
            continue
        for i in range(nucleus.arity):
            j, r = nucleus.transitions[(g, i)]
            if j != i and r == nucleus.identity:
                pair = (min(i, j), max(i, j))
                if pair not in seen:
                    seen.add(pair)
                    graph.add_edge(pair[0], pair[1], g.label())
    return graph, graph.is_connected()


def tile_neighbors(nucleus: Nucleus, g, h) -> bool:
    return g.inverse() * h in nucleus


def nucleus_generators(nucleus: Nucleus) -> dict:
    return {g.label(): g for g in nucleus.nontrivial()}


def nucleus_ball(nucleus: Nucleus, radius: int) -> LabeledGraph:
    return cayley_ball(nucleus_generators(nucleus), nucleus.identity, radius,
                       {"kind": "cayley-ball"})


# -- random rays ---------------------------------------------------------------------

def random_ray(arity: int, seed: int, preperiod: int = 64, period: int = 1) -> Ray:
    """Seeded ray with a long random preperiod followed by a random period."""
    rng = random.Random(seed)
    pre = tuple(rng.randrange(arity) for _ in range(preperiod))
    per = tuple(rng.randrange(arity) for _ in range(period))
    return Ray(pre, per)


# -- level tilings --------------------------------------------------------------------

@dataclass
class TilingLevel:
    level: int
    ray: Ray
    ball: LabeledGraph
    orbit: dict          # vertex id -> orbit ray
    tiles: dict          # tile key (Ray) -> sorted list of vertex ids
    graph: LabeledGraph  # tiles as vertices
    interior: list       # keys of tiles lying entirely inside the ball
    certificate: dict = field(default_factory=dict)

    def tile_of(self, vid: int) -> Ray:
        return self.orbit[vid].tail(self.level)


def _orbit_points(action, ball: LabeledGraph, ray: Ray, budget: int) -> dict:
    orbit = {0: ray}
    order = sorted(range(ball.number_of_vertices()), key=lambda v: ball.distance[v])
    for v in order[1:]:
        g = ball.payload(v)
        u = min((u for u in ball.neighbors(v) if ball.distance[u] < ball.distance[v]))
        step = ball.payload(u).inverse() * g
        pt = action.orbit_point(orbit[u], step, budget)
        if isinstance(pt, DivergedAfter):
            raise OrbitDiverged(g, pt.depth)
        orbit[v] = pt
    return orbit


def level_tiling(action: TreeAction, nucleus: Nucleus, ray: Ray, radius: int, level: int,
                 budget: int = DEFAULT_BUDGET) -> TilingLevel:
    """Partition the nucleus ball of the given radius into level-k tiles and certify it.

    g and h share a tile when w^g and w^h agree from position k on. Each
    interior tile is regrown without the ball restriction to confirm it is
    connected with exactly t^k elements and distinct orbit points. The
    certificate sends a tile to the common restriction g|_(w_1..w_k) of its
    members and checks that tile adjacency matches nucleus adjacency of the
    images in both directions.
    """
    ball = nucleus_ball(nucleus, radius)
    orbit = _orbit_points(action, ball, ray, budget)
    tiles: dict = {}
    for v in range(ball.number_of_vertices()):
        tiles.setdefault(orbit[v].tail(level), []).append(v)
    size = nucleus.arity ** level
    gens = list(nucleus.nontrivial())
    prefix = ray.prefix(level)
    violations = []
    interior = []
    images = {}
    full_tiles = {}
    for key in sorted(tiles, key=str):
        members = tiles[key]
        g0 = ball.payload(members[0])
        found = {g0: orbit[members[0]]}
        queue = deque([g0])
        while queue and len(found) <= size:
            g = queue.popleft()
            for n in gens:
                h = g * n
                if h in found:
                    continue
                pt = action.orbit_point(found[g], n, budget)
                if isinstance(pt, DivergedAfter):
                    raise OrbitDiverged(h, pt.depth)
                if pt.tail(level) == key:
                    found[h] = pt
                    queue.append(h)
        full_tiles[key] = found
        if len(found) != size or len(set(found.values())) != size:
            violations.append({"tile": str(key), "size": len(found),
                               "distinct_points": len(set(found.values()))})
            continue
        if all(h in ball for h in found):
            interior.append(key)
            restr = {action.restriction(h, prefix) for h in found}
            if len(restr) != 1:
                violations.append({"tile": str(key), "reason": "restriction map not constant"})
                continue
            images[key] = restr.pop()
    # tiling graph on all tiles of the ball
    tgraph = LabeledGraph({"kind": "tiling", "level": level, "radius": radius})
    keys = sorted(tiles, key=str)
    for key in keys:
        tgraph.add_vertex(key)
    for u, v, _ in ball.edges:
        ku, kv = orbit[u].tail(level), orbit[v].tail(level)
        if ku != kv:
            tgraph.add_edge(tgraph.vertex_id(ku), tgraph.vertex_id(kv))
    # certificate on interior tiles, adjacency taken from the full tiles
    checked = 0
    label_agree = 0
    owner = {h: key for key in interior for h in full_tiles[key]}
    adjacent_pairs = set()
    for key in interior:
        for h in full_tiles[key]:
            for n in gens:
                other = owner.get(h * n)
                if other is not None and other != key:
                    adjacent_pairs.add((key, other))
    ilist = [k for k in interior if k in images]
    for a in ilist:
        for b in ilist:
            if a == b:
                continue
            checked += 1
            tiles_adj = (a, b) in adjacent_pairs
            img_adj = tile_neighbors(nucleus, images[a], images[b])
            if tiles_adj != img_adj:
                violations.append({"tiles": [str(a), str(b)], "tile_adjacent": tiles_adj,
                                   "image_adjacent": img_adj})
            elif tiles_adj:
                label_agree += 1
    cert = {
        "ok": not violations,
        "tile_size": size,
        "tiles": len(tiles),
        "interior_tiles": len(interior),
        "checked_pairs": checked,
        "adjacent_interior_pairs": label_agree,
        "injective": len(set(images.values())) == len(images),
        "violations": violations,
    }
    if not cert["injective"]:
        cert["ok"] = False
    return TilingLevel(level, ray, ball, orbit, {k: sorted(v) for k, v in tiles.items()},
                       tgraph, interior, cert)


# -- Folner profile ----------------------------------------------------------------------

@dataclass(frozen=True)
class FolnerRow:
    level: int
    volume: int
    boundary: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.boundary, self.volume)


def folner_profile(action: TreeAction, nucleus: Nucleus, ray: Ray | None, levels) -> list[FolnerRow]:
    """Count boundary tiles: length-k words u such that some nucleus element has g|_u nontrivial.

    Depth-first enumeration over words using the action directly, memoized on
    the set of surviving restrictions and the remaining length.
    """
    if isinstance(open_set_condition(nucleus), Fails):
        raise ValueError("open set condition fails")
    t = nucleus.arity
    start = frozenset(nucleus.nontrivial())

    @lru_cache(maxsize=None)
    def count(states: frozenset, remaining: int) -> int:
        if not states:
            return 0
        if remaining == 0:
            return 1
        total = 0
        for x in range(t):
            nxt = frozenset(r for r in (action.restriction(g, (x,)) for g in states)
                            if not r.is_identity())
            total += count(nxt, remaining - 1)
        return total

    rows = [FolnerRow(k, t ** k, count(start, k)) for k in levels]
    count.cache_clear()
    return rows


# -- exhaustion index ------------------------------------------------------------------

@dataclass(frozen=True)
class TailsDiffer:
    image: Ray


def exhaustion_index(action: TreeAction, ray: Ray, g, budget: int = DEFAULT_BUDGET):
    """Least n0 with (w^g)_n = w_n for all n >= n0; TailsDiffer if that never happens."""
    img = action.orbit_point(ray, g, budget)
    if isinstance(img, DivergedAfter):
        return img
    n = rays_agree_from(img, ray)
    if n is None:
        return TailsDiffer(img)
    return n


# -- monotile lift -----------------------------------------------------------------------

@dataclass
class MonotileResult:
    level: int
    prototile: list            # the connected transversal C_n (group elements)
    schreier: LabeledGraph     # Schreier graph on level-n vertices
    connected: bool
    interior_vertices: int
    multiplicity_ok: bool      # every interior ball vertex lies in exactly one translate
    boundary_ratio: Fraction

    @property
    def ok(self) -> bool:
        return self.connected and self.multiplicity_ok


def monotile_lift(action: TreeAction, generators: dict, level: int, radius: int) -> MonotileResult:
    """Lift a BFS spanning tree of the level-n Schreier graph to the Cayley graph.

    G_n is the stabilizer of the vertex 0^n; its right cosets are the level-n
    vertices. The lifted tree gives a connected transversal C_n; the check
    confirms every vertex of the ball interior is k*c for exactly one c in C_n
    with k in G_n.
    """
    gens = sorted(generators.items())
    gens = sorted(gens + [(name + "^-1", s.inverse()) for name, s in gens
                          if s.inverse() not in generators.values()])
    root = (0,) * level
    identity = action.identity
    lift = {root: identity}
    schreier = LabeledGraph({"kind": "schreier", "level": level})
    schreier.add_vertex(root)
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for name, s in gens:
            w = action.act_word(s, v)
            if w not in lift:
                lift[w] = lift[v] * s
                schreier.add_vertex(w)
                queue.append(w)
            schreier.add_edge(schreier.vertex_id(v), schreier.vertex_id(w), name)
    if len(lift) != action.arity ** level:
        raise AssertionError("Schreier graph is not connected")
    proto = [lift[v] for v in sorted(lift)]
    proto_set = set(proto)
    ball = cayley_ball(dict(gens), identity, radius)
    cayley_connected = _connected_in_cayley(proto_set, [s for _, s in gens])
    reach = max(ball_distance(proto, dict(gens)).values())
    interior = [v for v in range(ball.number_of_vertices()) if ball.distance[v] <= radius - reach]
    ok = True
    for v in interior:
        g = ball.payload(v)
        hits = sum(1 for c in proto if action.act_word(g * c.inverse(), root) == root)
        if hits != 1:
            ok = False
            break
    boundary = sum(1 for c in proto if any(c * s not in proto_set for _, s in gens))
    return MonotileResult(level, proto, schreier, cayley_connected, len(interior), ok,
                          Fraction(boundary, len(proto)))


def _connected_in_cayley(elements: set, gens: list) -> bool:
    start = next(iter(elements))
    seen = {start}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = g * s
            if h in elements and h not in seen:
                seen.add(h)
                queue.append(h)
    return len(seen) == len(elements)


def ball_distance(elements, generators: dict) -> dict:
    """Word length of each element, by BFS until all are found."""
    targets = set(elements)
    identity = next(iter(targets)).identity()
    dist = {identity: 0}
    queue = deque([identity])
    gens = [s for _, s in sorted(generators.items())]
    while queue and not targets <= dist.keys():
        g = queue.popleft()
        for s in gens:
            h = g * s
            if h not in dist:
                dist[h] = dist[g] + 1
                queue.append(h)
    return {g: dist[g] for g in targets}


# -- Diestel-Leader check ---------------------------------------------------------------

@dataclass
class DLReport:
    radius: int
    generator_images: dict
    homomorphism: bool
    into_subgroup: bool
    onto_subgroup: bool
    ball_bijection: bool
    edges_preserved: bool

    @property
    def ok(self) -> bool:
        return all((self.homomorphism, self.into_subgroup, self.onto_subgroup,
                    self.ball_bijection, self.edges_preserved))


def dl_isomorphism_check(radius: int, seed: int = 0, samples: int = 200, cap: int = 8) -> DLReport:
    """g -> iota(phi_0(g)) maps the lamplighter onto <Rs, sR> and balls onto balls.

    The source ball uses generators {R, Rs}, the target ball {sR, Rs}.
    """
    from .chains import lamplighter_chain

    if radius > cap:
        raise ValueError(f"radius {radius} exceeds cap {cap}")
    chain = lamplighter_chain()
    grp = chain.group

    def f(g):
        return grp.iota(chain.phi_i(0, g))

    R, s = grp.generators["R"], grp.generators["s"]
    Rs, sR = R * s, s * R

    def in_sub(g):
        return (g.shift + len(g.support)) % 2 == 0

    images = {"R": f(R), "Rs": f(Rs)}
    gen_ok = {images["R"], images["Rs"]} == {sR, Rs}
    rng = random.Random(seed)
    hom = gen_ok and all(f(x * y) == f(x) * f(y) for x, y in
                         ((grp.random_element(rng), grp.random_element(rng)) for _ in range(samples)))
    src_gens = {"R": R, "R^-1": R.inverse(), "Rs": Rs, "Rs^-1": Rs.inverse()}
    dst_gens = {"R": images["R"], "R^-1": images["R"].inverse(),
                "Rs": images["Rs"], "Rs^-1": images["Rs"].inverse()}
    src = cayley_ball(src_gens, grp.identity, radius)
    dst = cayley_ball(dst_gens, grp.identity, radius)
    mapped = [f(g) for g in src.payloads()]
    into = all(in_sub(x) for x in mapped)
    # onto: every subgroup element in the target ball has a preimage under phi_0 after iota
    onto = all(in_sub(k) and grp.in_psi_image(grp.iota(k).lamps) for k in dst.payloads())
    bij = set(mapped) == set(dst.payloads()) and len(set(mapped)) == len(mapped)
    edges_ok = bij and src.number_of_edges() == dst.number_of_edges() and all(
        mapped[u] * dst_gens[lab] == mapped[v]
        and dst.adjacent(dst.vertex_id(mapped[u]), dst.vertex_id(mapped[v]))
        for u, v, lab in src.edges)
    return DLReport(radius, {k: v.serialize() for k, v in images.items()}, hom, into, onto, bij, edges_ok)


# -- nested tiles ----------------------------------------------------------------------

def tile_exhaustion(action: TreeAction, nucleus: Nucleus, ray: Ray, levels,
                    budget: int = DEFAULT_BUDGET) -> list[list]:
    """The level-k tiles containing the identity, for each k in ``levels``.

    They are nested: equal tails from position k on imply equal tails from k + 1.
    """
    gens = list(nucleus.nontrivial())
    out = []
    for k in levels:
        key = ray.tail(k)
        found = {action.identity: ray}
        queue = deque([action.identity])
        while queue:
            g = queue.popleft()
            for n in gens:
                h = g * n
                if h in found:
                    continue
                pt = action.orbit_point(found[g], n, budget)
                if isinstance(pt, DivergedAfter):
                    raise OrbitDiverged(h, pt.depth)
                if pt.tail(k) == key:
                    found[h] = pt
                    queue.append(h)
            if len(found) > nucleus.arity ** k:
                raise AssertionError("tile exceeds t^k elements")
        out.append(sorted(found, key=lambda g: g.sort_key()))
    return out
