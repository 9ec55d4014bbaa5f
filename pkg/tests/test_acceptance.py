"""The thirteen acceptance criteria, one test (or a few) per criterion.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import random
import time
from fractions import Fraction
from itertools import product

import pytest

from scaleinv import chains, cli
from scaleinv.chains import affine_chain, bs_chain, lamplighter_chain
from scaleinv.groups.affine import mat_add, mat_identity, mat_pow, mat_scale
from scaleinv.groups.heisenberg import HeisenbergElement, HeisenbergGroup, in_power_image_242
from scaleinv.groups.base import commutator
from scaleinv.groups.lamplighter import lamplighter
from scaleinv.groups.spec import DEFAULT_AFFINE_MATRICES, heisenberg_242
from scaleinv.nucleus import (Holds, compute_nucleus, nontrivial_restriction_probability,
                              open_set_condition, probability_bound, restriction_closure)
from scaleinv.percolation import (BoxSpec, bernoulli_sites, box_substrate, centered_boxes, clusters,
                                  good_box, nondecreasing_within_noise, renorm_experiment,
                                  unique_giant_profile)
from scaleinv.tiling import (dl_isomorphism_check, folner_profile, letter_adjacency_graph,
                             level_tiling, monotile_lift, random_ray)
from scaleinv.tree import (Fixed, MovedAtDepth, Ray, WreathDatum, action_for, heisenberg_action,
                           lamplighter_recursion_action, perm_from_cycles)

from . import oracles

H = HeisenbergGroup()


def heis(word):
    return H.eval_word(word)


def with_inverses(words):
    out = {H.identity}
    for w in words:
        g = heis(w)
        out |= {g, g.inverse()}
    return out


_NUCLEI = {}


def heis_nucleus(example):
    if example not in _NUCLEI:
        action = heisenberg_action(example)
        t0 = time.perf_counter()
        rep = compute_nucleus(action)
        _NUCLEI[example] = (action, rep, time.perf_counter() - t0)
    return _NUCLEI[example]


# -- 1 ------------------------------------------------------------------------------------

PRINTED_NUCLEUS = {
    1: "A C CA AC AC^-1 B BA BC BA^-1 BC^-1 BCA^-1 BAC^-1".split(),
    2: "A B C AB BC BC^-1 C^-1A C^-2AC".split(),
}


@pytest.mark.criterion(1, "Heisenberg nuclei: 25 and 17 elements equal to the printed lists")
@pytest.mark.parametrize("example,size", [(1, 25), (2, 17)])
def test_c01_heisenberg_nuclei(example, size):
    _, rep, elapsed = heis_nucleus(example)
    assert rep.contracting
    assert len(rep.nucleus) == size
    assert set(rep.nucleus.elements) == with_inverses(PRINTED_NUCLEUS[example])
    assert elapsed < 60


# -- 2 ------------------------------------------------------------------------------------

@pytest.mark.criterion(2, "restriction closures of {A, C} equal the printed generating sets")
def test_c02_closures():
    a, c = heis("A"), heis("C")
    got1 = restriction_closure(heisenberg_action(1), [a, c])
    # the printed list reads "B, B^-1 ACA^-1"; with a comma it is B^-1 and ACA^-1 separately
    comma = with_inverses("A C CAC^-1 B B^-1 ACA^-1".split())
    product_reading = with_inverses("A C CAC^-1 B B^-1ACA^-1".split())
    assert got1 == comma and len(got1) == 11
    assert got1 != product_reading
    got2 = restriction_closure(heisenberg_action(2), [a, c])
    assert got2 == with_inverses("A B C AB BC^-1 C^-1A C^-2AC".split())
    assert len(got2) == 15


# -- 3 ------------------------------------------------------------------------------------

# A(0w)=1w, A(2w)=3w plus B(2w)=0w, B(3w)=1w (ex.1) or B(0w)=2w, B(1w)=3w (ex.2)
PRINTED_EDGES = {1: {(0, 1), (2, 3), (0, 2), (1, 3)}, 2: {(0, 1), (2, 3), (0, 2), (1, 3)}}


@pytest.mark.criterion(3, "open set condition and letter-adjacency edges of the examples")
@pytest.mark.parametrize("example", [1, 2])
def test_c03_open_set_and_adjacency(example):
    _, rep, _ = heis_nucleus(example)
    nuc = rep.nucleus
    assert isinstance(open_set_condition(nuc), Holds)
    witnesses = with_inverses(["A", "B"]) - {H.identity}
    graph, connected = letter_adjacency_graph(nuc, witnesses=witnesses)
    assert connected
    assert {(u, v) for u, v, _ in graph.edges} == PRINTED_EDGES[example]
    full, full_connected = letter_adjacency_graph(nuc)
    assert full_connected
    assert PRINTED_EDGES[example] <= {(u, v) for u, v, _ in full.edges}


# -- 4 ------------------------------------------------------------------------------------

PRINTED_RECURSIONS = {
    1: {"A": ("(01)(23)", ["1", "C", "1", "C"]),
        "C": ("(13)", ["A", "CAC^-1", "A", "A"]),
        "B": ("(02)(13)", ["B^-1", "CB^-1C^-1", "1", "1"]),
        "CAC^-1": ("(03)(12)", ["1", "C", "B", "ACA^-1"]),
        "ACA^-1": ("(02)", ["CAC^-1", "CAC^-1", "A", "CAC^-1"])},
    2: {"A": ("(01)(23)", ["1", "C^-1A", "1", "C^-1A"]),
        "C": ("(0123)", ["C", "A", "C", "AB"]),
        "C^-1A": ("(02)", ["C^-1", "C^-1", "BC^-1", "C^-1"]),
        "AB": ("(03)(12)", ["1", "C^-1A", "B", "C^-2AC"]),
        "BC^-1": ("(0123)", ["A^-1", "C^-1", "A^-1", "BC^-1"]),
        "B": ("(02)(13)", ["1", "1", "B", "B"]),
        "C^-2AC": ("(13)", ["BC^-1", "C^-1", "BC^-1", "BC^-1"])},
}


@pytest.mark.criterion(4, "printed wreath recursions and Heisenberg relations")
@pytest.mark.parametrize("example", [1, 2])
def test_c04_recursions(example):
    action = heisenberg_action(example)
    for word, (cyc, secs) in PRINTED_RECURSIONS[example].items():
        expected = WreathDatum(perm_from_cycles(cyc, 4), tuple(heis(s) for s in secs))
        assert action.wreath_recursion(heis(word)) == expected, word
    a, b, c = heis("A"), heis("B"), heis("C")
    assert b == commutator(a, c) == a.inverse() * c.inverse() * a * c
    assert commutator(a, b).is_identity() and commutator(c, b).is_identity()
    ident = WreathDatum(tuple(range(4)), (H.identity,) * 4)
    assert action.wreath_recursion(commutator(a, b)) == ident
    # the recursion is a homomorphism: [A,B] computed through wreath products is trivial too
    da, db = action.wreath_recursion(a), action.wreath_recursion(b)
    assert da.inverse() * db.inverse() * da * db == ident


# -- 5 ------------------------------------------------------------------------------------

@pytest.mark.criterion(5, "lamplighter action table, s = eps, phi_0/phi_1 values, (g, iota g) form, DL(2,2)")
def test_c05_lamplighter():
    action = lamplighter_recursion_action()
    grp = action.group
    a, b, s, R = (grp.generators[n] for n in ("a", "b", "s", "R"))
    # the four-line table: (0w)^a = 1 w^b, (1w)^a = 0 w^a, (0w)^b = 0 w^b, (1w)^b = 1 w^a
    assert action.act_letter(a, 0) == (1, b)
    assert action.act_letter(a, 1) == (0, a)
    assert action.act_letter(b, 0) == (0, b)
    assert action.act_letter(b, 1) == (1, a)
    assert action.wreath_recursion(s) == WreathDatum((1, 0), (grp.identity, grp.identity))
    chain = lamplighter_chain()
    assert chain.phi_i(0, a) == a.inverse() * b * a == s * R * s
    assert chain.phi_i(1, b) == s * R * s
    assert chain.phi_i(1, a) == chain.phi_i(0, b) == b
    assert chain.phi_i(0, a) == lamplighter(1, [0, 1])  # (1, t) with t = 1 + u
    rng = random.Random(5)
    words = [tuple(rng.randrange(2) for _ in range(12)) for _ in range(16)]
    for _ in range(100):
        g = grp.random_element(rng)
        ig = grp.iota(g)
        for i, (left, right) in enumerate(((g, ig), (ig, g))):
            img = chain.phi_i(i, g)
            for w in words:
                assert action.act_word(img, (0,) + w[:11]) == (0,) + action.act_word(left, w[:11])
                assert action.act_word(img, (1,) + w[:11]) == (1,) + action.act_word(right, w[:11])
    assert dl_isomorphism_check(4, seed=11).ok


# -- 6 ------------------------------------------------------------------------------------

@pytest.mark.criterion(6, "periodic-ray witnesses: lamplighter, BS, affine, unipotent")
@pytest.mark.parametrize("k", range(1, 9))
def test_c06_lamplighter_witness(k):
    w = chains.ll_periodic_witness(k)
    assert w.fixed and not w.element.is_identity()
    assert chains.verify_gf2_certificate(w.certificate, k)
    ell, m = w.certificate["ell"], w.certificate["m"]
    assert oracles.gf2_divides(k, ell, m)
    # power-series oracle: the element fixes P / (1 + t^k)
    n = 8 * k + 16
    point = oracles.power_series_mod2([1] + [0] * (k - 1), [1] + [0] * (k - 1) + [1], n)
    image = oracles.lamplighter_apply_series(w.element.shift, sorted(w.element.support), point)
    assert image == point
    assert Ray.parse("(" + "1" + "0" * (k - 1) + ")") == w.ray


@pytest.mark.criterion(6, "periodic-ray witnesses: lamplighter, BS, affine, unipotent")
@pytest.mark.parametrize("m,ell", [(2, 3), (3, 2)])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_c06_bs_witness(m, ell, p):
    for a in range(ell ** p):
        w = chains.bs_periodic_witness(m, ell, p, a)
        assert w.fixed and not w.element.is_identity(), (a, w.verdict)
        assert w.certificate["digits_match"] and w.certificate["intersection_members_k_le_8"]
        point = Fraction(a, 1 - ell ** p)
        assert oracles.bs_fixes_point(m, w.element.exponent, w.element.translation, point)


@pytest.mark.criterion(6, "periodic-ray witnesses: lamplighter, BS, affine, unipotent")
@pytest.mark.parametrize("d", [2, 3])
def test_c06_affine_witness(d):
    rng = random.Random(d)
    vectors = [tuple(rng.randint(-5, 5) for _ in range(d)) for _ in range(6)]
    vectors += [(0,) * d, (1,) + (0,) * (d - 1), (0,) * (d - 1) + (3,)]
    for v in vectors:
        for p in (1, 2, 3):
            w = chains.affine_periodic_witness(v, p)
            alpha = w.element.matrix
            assert alpha != mat_identity(d)
            assert all(mat_pow(alpha, k) == mat_add(mat_scale(mat_add(alpha, mat_scale(mat_identity(d), -1)), k),
                                                    mat_identity(d)) for k in range(-20, 21))
            assert w.fixed, (v, p, w.verdict)
            point = tuple(Fraction(x, 1 - 2 ** p) for x in v)
            assert oracles.affine_fixes_point(alpha, w.element.vector, point)


@pytest.mark.criterion(6, "periodic-ray witnesses: lamplighter, BS, affine, unipotent")
@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_c06_unipotent_witness(d, p):
    rng = random.Random(100 * d + p)
    for _ in range(3):
        M = chains.random_unitriangular(d, rng)
        w = chains.unipotent_witness(M, p)
        n, q = w.certificate["n"], 2 ** p - 1
        diff = mat_add(mat_pow(M, n), mat_scale(mat_identity(d), -1))
        assert all(x % q == 0 for row in diff for x in row)
        assert w.fixed, (M, p, w.verdict)
        point = tuple(Fraction(x, 1 - 2 ** p) for x in w.params["v"])
        assert oracles.affine_fixes_point(w.element.matrix, w.element.vector, point)
        assert w.certificate["intersection_members_k_le_8"]


# -- 7 ------------------------------------------------------------------------------------

FAMILIES = ["heis-ex1", "heis-ex2", "lamplighter", "bs", "affine"]


def _random_ray(rng, arity):
    pre = tuple(rng.randrange(arity) for _ in range(rng.randint(0, 3)))
    per = tuple(rng.randrange(arity) for _ in range(rng.randint(1, 3)))
    return Ray(pre, per)


@pytest.mark.criterion(7, "stabilizes_ray agrees with depth-16 prefix checking")
@pytest.mark.parametrize("family", FAMILIES)
def test_c07_ray_oracle(family):
    action = action_for(family)
    group = action.group if hasattr(action, "group") else action.spec.group
    rng = random.Random(family)
    for _ in range(100):
        g = group.random_element(rng, 3)
        ray = _random_ray(rng, action.arity)
        verdict = action.stabilizes_ray(g, ray)
        brute = oracles.brute_force_ray_verdict(action, g, ray, 16)
        if isinstance(verdict, Fixed):
            assert brute == "fixed"
        else:
            assert isinstance(verdict, MovedAtDepth) and verdict.depth == brute


# -- 8 ------------------------------------------------------------------------------------

@pytest.mark.criterion(8, "tiling pipeline on Heisenberg radius-3 balls")
@pytest.mark.parametrize("example", [1, 2])
@pytest.mark.parametrize("level", [1, 2])
def test_c08_level_tiling(example, level):
    action, rep, _ = heis_nucleus(example)
    nuc = rep.nucleus
    ray = random_ray(4, seed=example)
    tl = level_tiling(action, nuc, ray, radius=3, level=level)
    assert tl.certificate["ok"], tl.certificate["violations"][:3]
    assert tl.interior
    for key in tl.interior:
        members = tl.tiles[key]
        assert len(members) == 4 ** level
        assert tl.ball.is_connected(members)


@pytest.mark.criterion(8, "tiling pipeline on Heisenberg radius-3 balls")
@pytest.mark.parametrize("example", [1, 2])
def test_c08_folner(example):
    action, rep, _ = heis_nucleus(example)
    nuc = rep.nucleus
    rows = folner_profile(action, nuc, None, range(13))
    for row in rows:
        if row.level <= 5:
            assert row.ratio == nontrivial_restriction_probability(nuc, row.level)
        assert row.ratio <= probability_bound(nuc, row.level)


# -- 9 ------------------------------------------------------------------------------------

CHAINS = {
    "lamplighter": lambda: lamplighter_chain(),
    "bs-2-3": lambda: bs_chain(2, 3),
    "bs-3-2": lambda: bs_chain(3, 2),
    "affine-2": lambda: affine_chain(2, DEFAULT_AFFINE_MATRICES[2]),
    "affine-3": lambda: affine_chain(3, DEFAULT_AFFINE_MATRICES[3]),
}


@pytest.mark.criterion(9, "chain machinery: stabilizer membership, phi_i images, composition")
@pytest.mark.parametrize("name", sorted(CHAINS))
def test_c09_chains(name):
    chain = CHAINS[name]()
    grp = chain.group
    rng = random.Random(name)
    for _ in range(1000):
        word = tuple(rng.randrange(chain.arity) for _ in range(rng.randint(0, 5)))
        g = grp.random_element(rng, 3)
        node = chain.node(word)
        assert node == chain.node_direct(word)
        # membership predicate against the tree action
        assert chain.stabilizer_member(node, g) == (chain.action.act_word(g, word) == word)
        img = chain.phi_compose(word, g)
        assert img == chain.phi_direct(word, g)
        assert chain.stabilizer_member(node, img)
        assert chain.action.restriction(img, word) == g
        if word:
            i = word[0]
            one = chain.phi_i(i, g)
            assert chain.stabilizer_member(chain.node((i,)), one)
            assert chain.action.act_letter(one, i) == (i, g)


# -- 10 -----------------------------------------------------------------------------------

@pytest.mark.criterion(10, "(2x, 4y, 2z) map: index 16 and trivial 8-fold intersection")
def test_c10_intersection():
    spec = heisenberg_242()
    reps = spec.right_coset_representatives()
    assert len(reps) == 16
    # coset enumeration oracle: the 2 x 4 x 2 box hits each right coset exactly once
    box = [HeisenbergElement(x, y, z) for x, y, z in product(range(2), range(4), range(2))]
    classes = []
    for g in box:
        if not any(oracles.heis_power_image_brute(*_coords(g * h.inverse()), 1) for h in classes):
            classes.append(g)
    assert len(classes) == 16
    found = chains.strong_si_intersection_check(in_power_image_242, 8, 50)
    assert found == [H.identity]
    brute = [c for c in product(range(-50, 51), repeat=3)
             if all(oracles.heis_power_image_brute(*c, k) for k in range(1, 9))]
    assert brute == [(0, 0, 0)]


def _coords(g):
    return g.x, g.y, g.z


# -- 11 -----------------------------------------------------------------------------------

def _two_sigma(frac, trials):
    return 2 * (frac * (1 - frac) / trials) ** 0.5


@pytest.mark.criterion(11, "percolation: degenerate p, good boxes, giant-cluster profile")
def test_c11_degenerate():
    sub = box_substrate(BoxSpec(2, 16))
    closed = bernoulli_sites(sub, 0.0, seed=1)
    assert closed.open_count == 0 and clusters(sub, closed).sizes == ()
    assert not good_box(closed, 0.5)
    full = bernoulli_sites(sub, 1.0, seed=1)
    st = clusters(sub, full)
    assert st.sizes == (256,) and st.c2 == 0
    assert good_box(full, 0.5)


_RENORM = {}


def _renorm(p):
    if p not in _RENORM:
        _RENORM[p] = renorm_experiment(2, [16, 32, 64], p, 0.5, 200, seed=2024)
    return _RENORM[p]


@pytest.mark.criterion(11, "percolation: degenerate p, good boxes, giant-cluster profile")
def test_c11_supercritical_good_boxes():
    rows = _renorm(0.75)
    last = rows[-1]
    frac = float(last.fraction)
    assert frac + _two_sigma(frac, last.trials) >= 0.9
    assert nondecreasing_within_noise(rows, sigmas=2)


@pytest.mark.criterion(11, "percolation: degenerate p, good boxes, giant-cluster profile")
def test_c11_subcritical_good_boxes():
    last = _renorm(0.3)[-1]
    frac = float(last.fraction)
    assert frac - _two_sigma(frac, last.trials) <= 0.05


@pytest.mark.criterion(11, "percolation: degenerate p, good boxes, giant-cluster profile")
def test_c11_giant_profile():
    sub, tiles = centered_boxes(2, [16, 32, 64])
    rows = unique_giant_profile(sub, tiles, 0.75, 200, seed=2024)
    ratios = [r.ratio for r in rows]
    assert ratios[0] > ratios[1] > ratios[2]


# -- 12 -----------------------------------------------------------------------------------

@pytest.mark.criterion(12, "monotile lifts: Z intervals, lamplighter and BS transversals")
@pytest.mark.parametrize("level", [1, 2, 3, 4])
def test_c12_integers(level):
    action = action_for("z")
    res = monotile_lift(action, dict(action.generators), level, radius=2 ** level + 4)
    shifts = sorted(g.vector[0] for g in res.prototile)
    assert shifts == list(range(shifts[0], shifts[0] + 2 ** level))
    assert res.ok


@pytest.mark.criterion(12, "monotile lifts: Z intervals, lamplighter and BS transversals")
@pytest.mark.parametrize("group", ["lamplighter", "bs"])
def test_c12_level_one(group):
    action = action_for(group)
    gens = {k: action.generators[k] for k in ("a", "b")}
    res = monotile_lift(action, gens, 1, 6)
    assert res.connected and res.multiplicity_ok
    assert len(res.prototile) == action.arity
    assert res.interior_vertices > 0


# -- 13 -----------------------------------------------------------------------------------

SEEDED = [
    ["tiling", "--group", "heis-ex1", "--seed", "7", "--level", "1", "--radius", "2", "--depth", "4"],
    ["tiling", "--group", "heis-ex2", "--seed", "7", "--format", "graph-json", "--radius", "2"],
    ["dlcheck", "--seed", "3", "--radius", "3", "--samples", "50"],
    ["percolate", "--seed", "5", "--n", "8", "16", "--trials", "20"],
    ["percolate", "--seed", "5", "--experiment", "profile", "--n", "8", "16", "--trials", "20"],
    ["percolate", "--seed", "5", "--experiment", "profile", "--group", "heis-ex1", "--level", "2",
     "--trials", "10"],
    ["witness", "--family", "unipotent", "--seed", "9", "--d", "3", "--p", "2"],
    ["nucleus", "--group", "heis-ex2"],
    ["ball", "--group", "heis-ex1", "--format", "graph-dot"],
]


@pytest.mark.criterion(13, "seeded commands give byte-identical documents")
@pytest.mark.parametrize("argv", SEEDED, ids=lambda a: "-".join(a[:3]))
def test_c13_determinism(argv, tmp_path):
    outputs = []
    for run in range(2):
        path = tmp_path / f"out{run}"
        code = cli.main(argv + ["--out", str(path)])
        assert code == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1] and outputs[0]
