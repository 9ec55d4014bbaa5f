import itertools
import random

import networkx as nx
import pytest

from scaleinv.graphs import LabeledGraph, cayley_ball
from scaleinv.nucleus import compute_nucleus
from scaleinv.tiling import (TailsDiffer, dl_isomorphism_check, exhaustion_index, folner_profile,
                             letter_adjacency_graph, level_tiling, monotile_lift, random_ray,
                             tile_exhaustion)
from scaleinv.tree import Ray, action_for, heisenberg_action


@pytest.fixture(scope="module", params=[1, 2])
def heis(request):
    action = heisenberg_action(request.param)
    return request.param, action, compute_nucleus(action).nucleus


def _adjacent_by_words(action, g, i, j, depth=3):
    """g sends every word i u to j u, checked on all u of the given length."""
    return all(action.act_word(g, (i,) + u) == (j,) + u
               for u in itertools.product(range(action.arity), repeat=depth))


def test_letter_adjacency_against_word_action(heis):
    example, action, nuc = heis
    graph, connected = letter_adjacency_graph(nuc)
    expected = set()
    for g in nuc.nontrivial():
        for i, j in itertools.permutations(range(4), 2):
            if _adjacent_by_words(action, g, i, j):
                expected.add((min(i, j), max(i, j)))
    assert {(u, v) for u, v, _ in graph.edges} == expected
    assert connected
    # the full nucleus joins more letter pairs than A and B alone
    assert len(expected) == {1: 6, 2: 5}[example]


def test_letter_adjacency_labels_are_witnesses(heis):
    _, action, nuc = heis
    graph, _ = letter_adjacency_graph(nuc)
    by_label = {g.label(): g for g in nuc.nontrivial()}
    for u, v, lab in graph.edges:
        g = by_label[lab]
        assert _adjacent_by_words(action, g, u, v) or _adjacent_by_words(action, g, v, u)


def test_cayley_ball_matches_networkx():
    action = heisenberg_action(1)
    gens = {k: action.generators[k] for k in ("A", "C")}
    gens.update({k + "^-1": g.inverse() for k, g in list(gens.items())})
    ball = cayley_ball(gens, action.identity, 4)
    g = nx.Graph()
    frontier = {action.identity}
    g.add_node(action.identity)
    for _ in range(4):
        nxt = set()
        for x in frontier:
            for s in gens.values():
                g.add_edge(x, x * s)
                nxt.add(x * s)
        frontier = nxt
    dist = nx.single_source_shortest_path_length(g, action.identity)
    inside = {x for x, d in dist.items() if d <= 4}
    assert set(ball.payloads()) == inside
    assert all(ball.distance[ball.vertex_id(x)] == dist[x] for x in inside)
    assert ball.number_of_edges() == g.subgraph(inside).number_of_edges()


def test_random_ray_is_seeded():
    assert random_ray(4, 9) == random_ray(4, 9)
    assert random_ray(4, 9) != random_ray(4, 10)
    ray = random_ray(3, 1, preperiod=5, period=2)
    assert all(0 <= ray.letter(i) < 3 for i in range(20))


@pytest.mark.parametrize("level", [1, 2])
def test_level_tiling_partition(heis, level):
    _, action, nuc = heis
    tl = level_tiling(action, nuc, random_ray(4, seed=level), radius=3, level=level)
    members = sorted(v for vs in tl.tiles.values() for v in vs)
    assert members == list(range(tl.ball.number_of_vertices()))
    assert all(len(vs) <= 4 ** level for vs in tl.tiles.values())
    for key in tl.interior:
        assert len(tl.tiles[key]) == 4 ** level
    assert tl.certificate["ok"] and tl.certificate["injective"]
    for v in range(tl.ball.number_of_vertices()):
        assert tl.tile_of(v) in tl.tiles and v in tl.tiles[tl.tile_of(v)]


def test_tile_exhaustion_nested(heis):
    _, action, nuc = heis
    tiles = tile_exhaustion(action, nuc, random_ray(4, seed=3), range(4))
    assert [len(t) for t in tiles] == [1, 4, 16, 64]
    assert tiles[0] == [action.identity]
    for small, big in zip(tiles, tiles[1:]):
        assert set(small) <= set(big)


def test_folner_profile_brute_force(heis):
    _, action, nuc = heis
    rows = folner_profile(action, nuc, None, range(5))
    gens = nuc.nontrivial()
    for row in rows:
        brute = sum(1 for u in itertools.product(range(4), repeat=row.level)
                    if any(not action.restriction(g, u).is_identity() for g in gens))
        assert row.volume == 4 ** row.level and row.boundary == brute
    assert rows[0].ratio == 1


def test_exhaustion_index_against_prefixes(heis):
    _, action, nuc = heis
    rng = random.Random(8)
    ray = random_ray(4, seed=5, preperiod=10)
    for g in rng.sample(list(nuc.elements), 10) + [action.identity]:
        n0 = exhaustion_index(action, ray, g)
        w = ray.prefix(60)
        img = action.act_word(g, w)
        diffs = [i for i in range(60) if img[i] != w[i]]
        if diffs and diffs[-1] >= 50:
            # a periodic ray can be moved along its whole tail
            assert isinstance(n0, TailsDiffer) and n0.image.prefix(60) == img
        else:
            assert n0 == (diffs[-1] + 1 if diffs else 0)


def test_exhaustion_index_tails_differ():
    action = action_for("z")
    one = action.generators["e0"]
    # the all-ones ray is -1 in the 2-adics; adding 1 gives 0, which never agrees with it
    res = exhaustion_index(action, Ray((), (1,)), one)
    assert isinstance(res, TailsDiffer)


def test_monotile_schreier_graph():
    action = action_for("z")
    res = monotile_lift(action, dict(action.generators), 3, radius=12)
    assert res.schreier.number_of_vertices() == 8
    assert res.schreier.is_connected()
    assert res.ok and 0 < res.boundary_ratio <= 1


def test_dl_check_radius_cap():
    with pytest.raises(ValueError):
        dl_isomorphism_check(9)
    assert dl_isomorphism_check(2).ok


def test_labeled_graph_basics():
    g = LabeledGraph({"k": 1})
    a, b = g.add_vertex("a"), g.add_vertex("b")
    assert g.add_vertex("a") == a
    g.add_edge(a, b, "x")
    assert g.adjacent(a, b) and g.neighbors(a) == {b}
    assert g.is_connected()
    g.add_vertex("c")
    assert not g.is_connected()
