"""GroupSpec: a group family instance together with an injective endomorphism of finite index."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import heisenberg as heis
from .affine import AffineGroup, mat_identity
from .base import ConfigurationError, Element, NotInImage
from .bs import BSGroup
from .lamplighter import LamplighterGroup


@dataclass
class GroupSpec:
    """Group instance, endomorphism phi, its image predicate and partial inverse psi.

    ``transversal`` (optional) lists g_0..g_{t-1}; ``transversal_decompose``
    writes g = g_j * phi(h). The index of phi(G) is checked by coset
    enumeration when the spec is built.
    """

    family: str
    name: str
    group: object
    arity: int
    phi: Callable
    in_image: Callable
    psi: Callable
    transversal: tuple | None = None
    generators: dict = field(default_factory=dict)
    coset_limit: int = 4096

    def __post_init__(self):
        if not self.generators:
            self.generators = dict(self.group.generators)
        found = len(self.right_coset_representatives())
        if found != self.arity:
            raise ConfigurationError(
                f"{self.name}: image has index {found}, expected {self.arity}")
        if self.transversal is not None and len(self.transversal) != self.arity:
            raise ConfigurationError(f"{self.name}: transversal has wrong length")

    @property
    def identity(self):
        return self.group.identity

    def symmetric_generators(self) -> dict:
        out = {}
        for name, g in sorted(self.generators.items()):
            out[name] = g
            out[name + "^-1"] = g.inverse()
        return out

    def eval_word(self, word) -> Element:
        return self.group.eval_word(word)

    def phi_apply(self, g):
        return self.phi(self.group.check(g))

    def psi_apply(self, g):
        """Inverse of phi on its image; raises NotInImage outside it."""
        self.group.check(g)
        if not self.in_image(g):
            raise NotInImage(f"{g!r} is not in the image of {self.name}")
        return self.psi(g)

    def transversal_decompose(self, g) -> tuple[int, Element]:
        if self.transversal is None:
            raise ConfigurationError(f"{self.name} has no transversal")
        hits = [j for j, r in enumerate(self.transversal) if self.in_image(r.inverse() * g)]
        if len(hits) != 1:
            raise ConfigurationError(
                f"{self.name}: {g!r} lies in {len(hits)} transversal cosets")
        j = hits[0]
        return j, self.psi(self.transversal[j].inverse() * g)

    def same_right_coset(self, g, h) -> bool:
        return self.in_image(g * h.inverse())

    def right_coset_representatives(self) -> list:
        """Enumerate right cosets phi(G)g by breadth-first search on the Schreier graph."""
        gens = list(self.symmetric_generators().values())
        reps = [self.identity]
        frontier = [self.identity]
        while frontier:
            nxt = []
            for r in frontier:
                for s in gens:
                    g = r * s
                    if not any(self.same_right_coset(g, q) for q in reps):
                        reps.append(g)
                        nxt.append(g)
                        if len(reps) > self.coset_limit:
                            raise ConfigurationError(f"{self.name}: index exceeds {self.coset_limit}")
            frontier = nxt
        return reps

    def random_element(self, rng: random.Random, size: int = 4):
        return self.group.random_element(rng, size)


# -- builders --------------------------------------------------------------------

def _heisenberg(name, arity, phi, in_image, psi, transversal=None):
    group = heis.HeisenbergGroup()
    gens = {"A": heis.A, "C": heis.C}
    return GroupSpec("heisenberg", name, group, arity, phi, in_image, psi,
                     transversal=transversal, generators=gens)


def heisenberg_ex1(transversal=None) -> GroupSpec:
    """phi(a, b, c) = (2c, 2ac - 2b, a): A -> C, C -> A^2, B^-1 -> B^2."""
    if transversal is None:
        binv = heis.B.inverse()
        transversal = (heis.ONE, heis.A, binv, binv * heis.A)
    return _heisenberg("heis-ex1", 4, heis.phi_ex1, heis.in_image_ex1, heis.psi_ex1, transversal)


def heisenberg_ex2(transversal=None) -> GroupSpec:
    return _heisenberg("heis-ex2", 4, heis.phi_ex2, heis.in_image_ex2, heis.psi_ex2, transversal)


def heisenberg_242() -> GroupSpec:
    return _heisenberg("heis-2-4-2", 16, heis.phi_242, heis.in_image_242, heis.psi_242)


def chain_spec(group, name: str) -> GroupSpec:
    """Spec of G = A x| H with phi(alpha, h) = (alpha, psi(h)) and translation transversal.

    The image of phi is the stabilizer of the coset H_1, so the transversal
    action it defines is the action on the coset tree of the chain.
    """
    alpha_id, _ = group.split(group.identity)

    def phi(g):
        alpha, h = group.split(g)
        return group.join(alpha, group.psi(h))

    def in_image(g):
        return group.in_psi_image(group.split(g)[1])

    def psi(g):
        alpha, h = group.split(g)
        return group.join(alpha, group.psi_inv(h))

    transversal = tuple(group.join(alpha_id, group.y(i)) for i in range(group.arity))
    return GroupSpec(group.family, name, group, group.arity, phi, in_image, psi,
                     transversal=transversal)


def lamplighter_spec(moduli=(2,)) -> GroupSpec:
    return chain_spec(LamplighterGroup(moduli), "lamplighter")


def bs_spec(m: int = 2, ell: int = 3) -> GroupSpec:
    return chain_spec(BSGroup(m, ell), f"bs-{m}-{ell}")


def affine_spec(d: int = 2, matrices: dict | None = None) -> GroupSpec:
    return chain_spec(AffineGroup(d, matrices), f"affine-{d}")


def z_spec() -> GroupSpec:
    """The integers as the one-dimensional affine group with trivial linear part."""
    return chain_spec(AffineGroup(1), "z")


DEFAULT_AFFINE_MATRICES = {
    2: {"M": ((1, 1), (0, 1))},
    3: {"M": ((1, 1, 0), (0, 1, 1), (0, 0, 1))},
}


def build_spec(name: str, **params) -> GroupSpec:
    """Spec by CLI-style name."""
    if name == "heis-ex1":
        return heisenberg_ex1()
    if name == "heis-ex2":
        return heisenberg_ex2()
    if name == "heis-2-4-2":
        return heisenberg_242()
    if name == "lamplighter":
        return lamplighter_spec()
    if name == "bs":
        return bs_spec(params.get("m") or 2, params.get("ell") or 3)
    if name == "affine":
        d = params.get("d") or 2
        return affine_spec(d, DEFAULT_AFFINE_MATRICES.get(d, {}))
    if name == "z":
        return z_spec()
    raise ConfigurationError(f"unknown group {name!r}")


__all__ = ["GroupSpec", "heisenberg_ex1", "heisenberg_ex2", "heisenberg_242", "chain_spec",
           "lamplighter_spec", "bs_spec", "affine_spec", "z_spec", "build_spec", "mat_identity"]
