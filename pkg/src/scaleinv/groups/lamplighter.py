"""Lamplighter groups F wr Z acting on F[[t]] by F(t) -> (1+t)^m F(t) + sum f(k)(1+t)^k.

Elements are the pairs (m, f). F is a direct sum of cyclic groups Z/q_c; each
cyclic component carries its own Laurent polynomial in u = 1 + t. Products
compose the transformations left to right (``g * h`` applies g first), which is
the order in which the group acts on the binary tree.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import prod

from . import laurent as lp
from .base import Element, FamilyMismatchError, NotInImage, eval_word


@dataclass(frozen=True, slots=True)
class LamplighterElement(Element):
    shift: int
    lamps: tuple  # one laurent.Poly per cyclic component
    moduli: tuple = (2,)

    def family_key(self):
        return ("lamplighter", self.moduli)

    def identity(self):
        return LamplighterElement(0, tuple(lp.ZERO for _ in self.moduli), self.moduli)

    def is_identity(self):
        return self.shift == 0 and not any(self.lamps)

    def _mul(self, other):
        m2 = other.shift
        lamps = tuple(
            lp.add(lp.shift(p, m2), r, q)
            for p, r, q in zip(self.lamps, other.lamps, self.moduli))
        return LamplighterElement(self.shift + m2, lamps, self.moduli)

    def inverse(self):
        lamps = tuple(lp.neg(lp.shift(p, -self.shift), q)
                      for p, q in zip(self.lamps, self.moduli))
        return LamplighterElement(-self.shift, lamps, self.moduli)

    @property
    def support(self) -> frozenset:
        return frozenset(e for p in self.lamps for e, _ in p)

    def serialize(self):
        if self.moduli == (2,):
            return {"m": self.shift, "lamps": sorted(self.support)}
        return {"m": self.shift, "moduli": list(self.moduli),
                "lamps": [[list(t) for t in p] for p in self.lamps]}

    def __repr__(self):
        if self.moduli == (2,):
            return f"LL({self.shift}, {sorted(self.support)})"
        return f"LL({self.shift}, {self.lamps}, q={self.moduli})"

    # power-series semantics, used as the ground-truth oracle
    def apply_series(self, series: list[list[int]]) -> list[list[int]]:
        """Act on truncated series (one coefficient list per component)."""
        n = len(series[0])
        out = []
        for comp, (p, q) in enumerate(zip(self.lamps, self.moduli)):
            um = lp.binomial_series(self.shift, q, n)
            f = series[comp]
            res = [sum(um[j] * f[i - j] for j in range(i + 1)) % q for i in range(n)]
            hs = lp.to_t_series(p, q, n)
            out.append([(a + b) % q for a, b in zip(res, hs)])
        return out


def lamplighter(m: int, support=(), moduli=(2,)) -> LamplighterElement:
    """Build an element from its position and (for F = Z/2) its lamp support."""
    if moduli == (2,):
        return LamplighterElement(m, (lp.normalize([(k, 1) for k in support], 2),), (2,))
    lamps = tuple(lp.normalize(p, q) for p, q in zip(support, moduli))
    return LamplighterElement(m, lamps, tuple(moduli))


class LamplighterGroup:
    """The group F wr Z with F = Z/q_1 + ... + Z/q_r, plus its coset-tree data.

    The tree has arity |F|: H = F[u, 1/u], H_1 = tH, and the first letter of a
    point of F[[t]] is its constant coefficient (mixed radix over components).
    """

    family = "lamplighter"

    def __init__(self, moduli=(2,)):
        self.moduli = tuple(moduli)
        self.arity = prod(self.moduli)
        self.identity = LamplighterElement(0, tuple(lp.ZERO for _ in self.moduli), self.moduli)
        self.generators = self._generators()

    def _generators(self):
        gens = {"R": LamplighterElement(1, self.identity.lamps, self.moduli),
                "L": LamplighterElement(-1, self.identity.lamps, self.moduli)}
        for c, q in enumerate(self.moduli):
            lamps = tuple(lp.monomial(0, 1, qq) if i == c else lp.ZERO
                          for i, qq in enumerate(self.moduli))
            name = "s" if len(self.moduli) == 1 else f"s{c}"
            gens[name] = LamplighterElement(0, lamps, self.moduli)
        if self.moduli == (2,):
            gens["a"] = gens["R"] * gens["s"]
            gens["b"] = gens["R"]
        return gens

    def check(self, g):
        if not isinstance(g, LamplighterElement) or g.moduli != self.moduli:
            raise FamilyMismatchError(f"{g!r} is not in {self.family}{self.moduli}")
        return g

    def eval_word(self, word):
        return eval_word(self.generators, self.identity, word)

    def random_element(self, rng: random.Random, size: int = 4) -> LamplighterElement:
        m = rng.randint(-size, size)
        lamps = tuple(
            lp.normalize([(rng.randint(-size, size), rng.randrange(1, q))
                          for _ in range(rng.randint(0, size))], q)
            for q in self.moduli)
        return LamplighterElement(m, lamps, self.moduli)

    def iota(self, g: LamplighterElement) -> LamplighterElement:
        """The automorphism swapping a and b (F = Z/2 only).

        Factor g over {s, R} as a product of conjugates R^-k s R^k times R^m,
        then substitute R -> a; s = b^-1 a is sent to a^-1 b = s.
        """
        if self.moduli != (2,):
            raise ValueError("iota is defined for F = Z/2")
        self.check(g)
        a, s = self.generators["a"], self.generators["s"]
        result = self.identity
        base = lp.shift(g.lamps[0], -g.shift)
        for k, _ in base:
            result = result * (a ** (-k)) * s * (a ** k)
        return result * a ** g.shift

    # -- chain protocol: G = Z x| H with H = F[u, 1/u] -------------------------
    def split(self, g):
        return g.shift, g.lamps

    def join(self, alpha, h):
        return LamplighterElement(alpha, h, self.moduli)

    def h_zero(self):
        return self.identity.lamps

    def h_add(self, h1, h2):
        return tuple(lp.add(a, b, q) for a, b, q in zip(h1, h2, self.moduli))

    def h_neg(self, h):
        return tuple(lp.neg(a, q) for a, q in zip(h, self.moduli))

    def alpha_apply(self, alpha, h):
        return tuple(lp.shift(a, alpha) for a in h)

    def alpha_is_identity(self, alpha):
        return alpha == 0

    def psi(self, h):
        return tuple(lp.times_t(a, q) for a, q in zip(h, self.moduli))

    def in_psi_image(self, h):
        return all(lp.value_at_one(a, q) == 0 for a, q in zip(h, self.moduli))

    def in_psi_power(self, h, n):
        return all(lp.divisible_by_t_power(a, n, q) for a, q in zip(h, self.moduli))

    def psi_inv(self, h):
        if not self.in_psi_image(h):
            raise NotInImage("lamp configuration is not divisible by t")
        return tuple(lp.div_t(a, q) for a, q in zip(h, self.moduli))

    def letter(self, h) -> int:
        i = 0
        for a, q in zip(h, self.moduli):
            i = i * q + lp.value_at_one(a, q)
        return i

    def y(self, i: int):
        digits = []
        for q in reversed(self.moduli):
            digits.append(i % q)
            i //= q
        digits.reverse()
        return tuple(lp.monomial(0, d, q) for d, q in zip(digits, self.moduli))

    def series_of_word(self, word, n=None):
        """Point of F[[t]] encoded by a tree word (component digits per letter)."""
        n = len(word) if n is None else n
        out = [[0] * n for _ in self.moduli]
        for i, x in enumerate(word[:n]):
            for c, d in enumerate(self._digits(x)):
                out[c][i] = d
        return out

    def word_of_series(self, series):
        n = len(series[0])
        word = []
        for i in range(n):
            x = 0
            for c, q in enumerate(self.moduli):
                x = x * q + series[c][i]
            word.append(x)
        return tuple(word)

    def _digits(self, x):
        digits = []
        for q in reversed(self.moduli):
            digits.append(x % q)
            x //= q
        return list(reversed(digits))
