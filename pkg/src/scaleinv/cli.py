"""Command-line front end.

Every subcommand prints one output document; exit status is 0 on success,
1 when a verification fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import random
import shlex
import sys
from dataclasses import dataclass

from . import chains, nucleus as nuc, tiling
from .graphs import cayley_ball
from .groups.base import ConfigurationError
from .groups.spec import build_spec
from .percolation import (centered_boxes, nondecreasing_within_noise, renorm_experiment,
                          strictly_decreasing, substrate_from_elements, unique_giant_profile)
from .serialize import FormatError, OutputDocument, encode, serialize_graph, table_csv
from .tree import Fixed, MovedAtDepth, action_for

GROUPS = ("lamplighter", "bs", "affine", "heis-ex1", "heis-ex2", "heis-2-4-2", "z")
GRAPH_FORMATS = ("graph-dot", "graph-json")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _verdict(v) -> str:
    if isinstance(v, Fixed):
        return "Fixed"
    if isinstance(v, MovedAtDepth):
        return f"MovedAtDepth({v.depth})"
    return f"DivergedAfter({v.depth})"


def _group_params(args) -> dict:
    return {k: getattr(args, k, None) for k in ("m", "ell", "d")}


def _action(args):
    return action_for(args.group, **_group_params(args))


# -- subcommands ------------------------------------------------------------------------------

def cmd_nucleus(args, ctx):
    action = _action(args)
    rep = nuc.compute_nucleus(action, max_elements=args.max_elements, max_depth=args.max_depth)
    payload = {"group": args.group, "status": rep.status}
    ok = rep.contracting
    if rep.contracting:
        n = rep.nucleus
        osc = nuc.open_set_condition(n)
        minimal = nuc.is_nucleus_closed(action, n.elements)
        payload.update({
            "size": len(n),
            "depth_certificate": rep.depth_certificate,
            "restriction_closed": n.is_restriction_closed(),
            "closed_under_products": minimal,
            "open_set_condition": isinstance(osc, nuc.Holds),
            "witness_length": max(len(v) for v in osc.witnesses.values()) if isinstance(osc, nuc.Holds) else None,
            "elements": [{"index": i, "label": g.label(), "normal_form": encode(g)}
                         for i, g in enumerate(n.elements)],
            "moore_diagram": [list(r) for r in n.moore_diagram()],
        })
        ok = ok and n.is_restriction_closed() and minimal
        if args.format == "table-csv":
            rows = [(i, x, y, j, n.elements[i].label(), n.elements[j].label())
                    for i, x, y, j in n.moore_diagram()]
            return ok, OutputDocument("table-csv", table_csv(
                ["state", "input", "output", "target", "state_label", "target_label"], rows),
                ctx.command, ctx.seed)
    else:
        payload["evidence"] = encode(rep.evidence)
    return ok, OutputDocument("certificate-json", payload, ctx.command, ctx.seed)


def cmd_recursion(args, ctx):
    action = _action(args)
    names = args.word or sorted(action.generators)
    rows = []
    for w in names:
        g = action.generators[w] if w in action.generators else _eval(action, args, w)
        wd = action.wreath_recursion(g)
        rows.append({"word": w, "element": encode(g), "permutation": wd.cycles() or "()",
                     "sections": [s.label() for s in wd.sections]})
    if args.format == "table-csv":
        body = table_csv(["word", "permutation", "sections"],
                         [(r["word"], r["permutation"], " ".join(r["sections"])) for r in rows])
        return True, OutputDocument("table-csv", body, ctx.command, ctx.seed)
    return True, OutputDocument("certificate-json", {"group": args.group, "recursions": rows}, ctx.command, ctx.seed)


def _eval(action, args, word):
    spec = build_spec(args.group, **_group_params(args))
    return spec.eval_word(word)


def _contracting(action, args):
    rep = nuc.compute_nucleus(action)
    if not rep.contracting:
        raise ConfigurationError(f"{args.group}: no nucleus within budget")
    return rep.nucleus


def cmd_tiling(args, ctx):
    action = _action(args)
    n = _contracting(action, args)
    ray = tiling.random_ray(n.arity, args.seed)
    lvl = tiling.level_tiling(action, n, ray, args.radius, args.level)
    if args.format in GRAPH_FORMATS:
        return lvl.certificate["ok"], serialize_graph(lvl.graph, args.format, ctx.command, ctx.seed)
    adj, connected = tiling.letter_adjacency_graph(n)
    rows = tiling.folner_profile(action, n, ray, range(args.depth + 1))
    folner = []
    agree = True
    for r in rows:
        prob = nuc.nontrivial_restriction_probability(n, r.level)
        bound = nuc.probability_bound(n, r.level)
        agree = agree and r.ratio == prob and r.ratio <= bound
        folner.append({"level": r.level, "volume": r.volume, "boundary": r.boundary,
                       "ratio": str(r.ratio), "probability": str(prob), "bound": str(bound)})
    payload = {
        "group": args.group, "ray": str(ray), "radius": args.radius, "level": args.level,
        "tiling": lvl.certificate,
        "letter_adjacency": {"connected": connected, "edges": [list(e) for e in adj.edges]},
        "folner": folner, "folner_agrees": agree,
    }
    return lvl.certificate["ok"] and connected and agree, OutputDocument("certificate-json", payload, ctx.command, ctx.seed)


def _csv_ints(text):
    return tuple(int(x) for x in text.split(",")) if text else None


def cmd_witness(args, ctx):
    fam = args.family
    if fam == "lamplighter":
        w = chains.ll_periodic_witness(args.k or 1)
        checks = {"gf2_certificate": chains.verify_gf2_certificate(w.certificate, args.k or 1)}
    elif fam == "bs":
        w = chains.bs_periodic_witness(args.m or 2, args.ell or 3, args.p or 1, args.a or 0, args.b or 0)
        checks = {"intersection_members": w.certificate["intersection_members_k_le_8"]}
    elif fam == "affine":
        v = _csv_ints(args.v) or (1, 2)
        w = chains.affine_periodic_witness(v, args.p or 1)
        checks = {k: w.certificate[k] for k in ("fixes_v", "power_identity", "powers_distinct")}
    elif fam == "unipotent":
        if args.seed is None:
            raise UsageError("witness --family unipotent: --seed is required")
        rng = random.Random(args.seed)
        M = chains.random_unitriangular(args.d or 3, rng)
        w = chains.unipotent_witness(M, args.p or 1, _csv_ints(args.v))
        checks = {"divisible": w.certificate["divisible"],
                  "intersection_members": w.certificate["intersection_members_k_le_8"]}
    else:
        raise UsageError(f"unknown family {fam!r}")
    ok = w.fixed and all(checks.values())
    payload = {"family": w.family, "params": encode(w.params), "element": encode(w.element),
               "ray": str(w.ray), "verdict": _verdict(w.verdict),
               "certificate": encode(w.certificate), "checks": checks}
    return ok, OutputDocument("certificate-json", payload, ctx.command, ctx.seed)


def cmd_ball(args, ctx):
    action = _action(args)
    if args.generators == "nucleus":
        gens = tiling.nucleus_generators(_contracting(action, args))
    else:
        gens = {}
        for name, g in sorted(action.generators.items()):
            gens[name] = g
            if g.inverse() not in gens.values():
                gens[name + "^-1"] = g.inverse()
    ball = cayley_ball(gens, action.identity, args.radius, {"group": args.group})
    if args.format in GRAPH_FORMATS:
        return True, serialize_graph(ball, args.format, ctx.command, ctx.seed)
    payload = {"group": args.group, "radius": args.radius, "vertices": ball.number_of_vertices(),
               "edges": ball.number_of_edges(),
               "sphere_sizes": [ball.distance.count(r) for r in range(args.radius + 1)]}
    return True, OutputDocument("certificate-json", payload, ctx.command, ctx.seed)


MONOTILE_GENERATORS = {"lamplighter": ("a", "b"), "bs": ("a", "b")}


def cmd_monotile(args, ctx):
    action = _action(args)
    names = MONOTILE_GENERATORS.get(args.group, tuple(sorted(action.generators)))
    gens = {k: action.generators[k] for k in names}
    res = tiling.monotile_lift(action, gens, args.level, args.radius)
    if args.format in GRAPH_FORMATS:
        return res.ok, serialize_graph(res.schreier, args.format, ctx.command, ctx.seed)
    payload = {"group": args.group, "level": args.level, "radius": args.radius,
               "prototile": [encode(c) for c in res.prototile], "connected": res.connected,
               "interior_vertices": res.interior_vertices, "partition": res.multiplicity_ok,
               "boundary_ratio": str(res.boundary_ratio)}
    return res.ok, OutputDocument("certificate-json", payload, ctx.command, ctx.seed)


def cmd_dlcheck(args, ctx):
    rep = tiling.dl_isomorphism_check(args.radius, seed=args.seed, samples=args.samples)
    payload = {"radius": rep.radius, "generator_images": rep.generator_images,
               "homomorphism": rep.homomorphism, "into_subgroup": rep.into_subgroup,
               "onto_subgroup": rep.onto_subgroup, "ball_bijection": rep.ball_bijection,
               "edges_preserved": rep.edges_preserved}
    return rep.ok, OutputDocument("certificate-json", payload, ctx.command, ctx.seed)


def cmd_percolate(args, ctx):
    ns = args.n or [16, 32, 64]
    if args.experiment == "renorm":
        rows = renorm_experiment(args.d, ns, args.p, args.eps, args.trials, args.seed)
        body = table_csv(["n", "trials", "good", "fraction"],
                         [(r.n, r.trials, r.good, float(r.fraction)) for r in rows])
        trend = nondecreasing_within_noise(rows)
        return True, OutputDocument("table-csv", body + f"# nondecreasing_within_2sigma: {trend}\n", ctx.command, ctx.seed)
    if args.group in (None, "box"):
        sub, tiles = centered_boxes(args.d, ns)
        levels = ns
    else:
        action = _action(args)
        n = _contracting(action, args)
        ray = tiling.random_ray(n.arity, args.seed)
        levels = list(range(args.level + 1))
        tile_list = tiling.tile_exhaustion(action, n, ray, levels)
        sub = substrate_from_elements(tile_list[-1], list(n.nontrivial()))
        index = {g: i for i, g in enumerate(tile_list[-1])}
        tiles = [[index[g] for g in t] for t in tile_list]
    rows = unique_giant_profile(sub, tiles, args.p, args.trials, args.seed)
    body = table_csv(["level", "volume", "median_c2_over_c1", "median_c1_share", "median_density"],
                     [(lv, r.volume, r.ratio, r.giant_share, r.density) for lv, r in zip(levels, rows)])
    trend = strictly_decreasing(r.ratio for r in rows)
    return True, OutputDocument("table-csv", body + f"# ratio_decreasing: {trend}\n", ctx.command, ctx.seed)


def cmd_intersect(args, ctx):
    spec = build_spec(args.group)
    if args.group != "heis-2-4-2":
        raise UsageError("intersect supports --group heis-2-4-2")
    from .groups.heisenberg import in_power_image_242

    found = chains.strong_si_intersection_check(in_power_image_242, args.depth, args.bound)
    index = len(spec.right_coset_representatives())
    payload = {"group": args.group, "index": index, "depth": args.depth, "bound": args.bound,
               "count": len(found), "elements": [encode(g) for g in found[:100]],
               "identity_only": len(found) == 1 and found[0].is_identity()}
    ok = index == spec.arity
    return ok, OutputDocument("certificate-json", payload, ctx.command, ctx.seed)


# -- parser -------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scaleinv", description="Self-similar actions, nuclei, tilings and witnesses.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats, default, group=True, group_choices=GROUPS):
        if group:
            p.add_argument("--group", choices=group_choices, required=True)
            p.add_argument("--m", type=int, help="BS multiplier (default 2)")
            p.add_argument("--ell", type=int, help="BS tree arity (default 3)")
            p.add_argument("--d", type=int, help="affine dimension (default 2)")
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", help="write the document here instead of stdout")

    p = sub.add_parser("nucleus", help="nucleus, Moore diagram and contraction certificate")
    common(p, ("certificate-json", "table-csv"), "certificate-json")
    p.add_argument("--max-elements", type=int, default=1000)
    p.add_argument("--max-depth", type=int, default=64)
    p.set_defaults(func=cmd_nucleus)

    p = sub.add_parser("recursion", help="wreath recursions of generators or words")
    common(p, ("certificate-json", "table-csv"), "certificate-json")
    p.add_argument("--word", action="append", help="word over the generators (repeatable)")
    p.set_defaults(func=cmd_recursion)

    p = sub.add_parser("tiling", help="level tiling certificate and Folner profile")
    common(p, ("certificate-json",) + GRAPH_FORMATS, "certificate-json")
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--depth", type=int, default=5, help="largest Folner level")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_tiling)

    p = sub.add_parser("witness", help="periodic-ray stabilizer witnesses")
    p.add_argument("--family", choices=("lamplighter", "bs", "affine", "unipotent"), required=True)
    p.add_argument("--k", type=int, help="lamplighter period")
    p.add_argument("--m", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--p", type=int, help="period length")
    p.add_argument("--a", type=int, help="BS residue")
    p.add_argument("--b", type=int, help="BS denominator exponent")
    p.add_argument("--v", help="comma-separated integer vector")
    p.add_argument("--d", type=int, help="unipotent dimension")
    p.add_argument("--seed", type=int)
    common(p, ("certificate-json",), "certificate-json", group=False)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("ball", help="Cayley ball")
    common(p, ("certificate-json",) + GRAPH_FORMATS, "graph-json")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--generators", choices=("standard", "nucleus"), default="standard")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("monotile", help="spanning-tree monotile lift")
    common(p, ("certificate-json",) + GRAPH_FORMATS, "certificate-json",
           group_choices=("z", "lamplighter", "bs", "affine"))
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--radius", type=int, default=6)
    p.set_defaults(func=cmd_monotile)

    p = sub.add_parser("dlcheck", help="lamplighter ball check for g -> iota(phi_0(g))")
    common(p, ("certificate-json",), "certificate-json", group=False)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_dlcheck)

    p = sub.add_parser("percolate", help="site percolation experiments")
    common(p, ("table-csv",), "table-csv", group=False)
    p.add_argument("--experiment", choices=("renorm", "profile"), default="renorm")
    p.add_argument("--group", choices=("box", "heis-ex1", "heis-ex2"), default="box")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, nargs="+", help="box sides")
    p.add_argument("--level", type=int, default=3, help="largest tile level for group tiles")
    p.add_argument("--p", type=float, default=0.75)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_percolate, m=None, ell=None)

    p = sub.add_parser("intersect", help="iterated-image intersection in a box")
    common(p, ("certificate-json",), "certificate-json", group_choices=("heis-2-4-2",))
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--bound", type=int, default=50)
    p.set_defaults(func=cmd_intersect)
    return parser


@dataclass(frozen=True)
class _Context:
    command: str
    seed: int | None


def _without_out(argv):
    """The argument list minus --out, so a document does not depend on where it is written."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--out":
            skip = True
        elif not a.startswith("--out="):
            out.append(a)
    return out


def run(argv) -> tuple[int, list[OutputDocument]]:
    argv = list(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2, []
    ctx = _Context("scaleinv " + shlex.join(_without_out(argv)), getattr(args, "seed", None))
    try:
        ok, doc = args.func(args, ctx)
    except (UsageError, ConfigurationError, FormatError, ValueError) as exc:
        print(f"scaleinv {args.command}: {exc}", file=sys.stderr)
        return 2, []
    doc.out = getattr(args, "out", None)
    return (0 if ok else 1), [doc]


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, docs = run(argv)
    for doc in docs:
        text = doc.render()
        if doc.out:
            with open(doc.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
