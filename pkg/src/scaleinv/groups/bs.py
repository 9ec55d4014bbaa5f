"""Solvable Baumslag-Solitar groups BS(1, m) as affine maps x -> m^t x + r of Z[1/m]."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .base import ConfigurationError, Element, FamilyMismatchError, NotInImage, eval_word


def _is_m_adic(r: Fraction, m: int) -> bool:
    d = r.denominator
    while d > 1:
        g = gcd(d, m)
        if g == 1:
            return False
        d //= g
    return True


@dataclass(frozen=True, slots=True)
class BSElement(Element):
    exponent: int
    translation: Fraction
    m: int = 2

    def __post_init__(self):
        if not isinstance(self.translation, Fraction):
            object.__setattr__(self, "translation", Fraction(self.translation))
        if not _is_m_adic(self.translation, self.m):
            raise ValueError(f"{self.translation} is not in Z[1/{self.m}]")

    def family_key(self):
        return ("bs", self.m)

    def identity(self):
        return BSElement(0, Fraction(0), self.m)

    def is_identity(self):
        return self.exponent == 0 and self.translation == 0

    def _scale(self, t: int, r: Fraction) -> Fraction:
        return r * self.m ** t if t >= 0 else r / self.m ** (-t)

    def _mul(self, other):
        return BSElement(self.exponent + other.exponent,
                         self._scale(other.exponent, self.translation) + other.translation,
                         self.m)

    def inverse(self):
        return BSElement(-self.exponent, -self._scale(-self.exponent, self.translation), self.m)

    def apply(self, x: Fraction) -> Fraction:
        return self._scale(self.exponent, Fraction(x)) + self.translation

    def serialize(self):
        return {"t": self.exponent, "r": str(self.translation), "m": self.m}

    def __repr__(self):
        return f"BS{self.m}({self.exponent}, {self.translation})"


class BSGroup:
    """BS(1, m) = <a, b | b a b^-1 = a^m> acting on the l-ary tree of Z[1/m] / l^n Z[1/m].

    Multiplication by m is the acting automorphism; the chain is H_n = l^n H.
    Generators: s_i : x -> m x + i, a = s_1 s_0^-1 (translation by 1/m) and
    b = s_0^-1, oriented so that b a b^-1 = a^m under left-to-right products.
    """

    family = "bs"

    def __init__(self, m: int = 2, ell: int = 3):
        if m < 2 or ell < 2:
            raise ConfigurationError("need m >= 2 and ell >= 2")
        if gcd(m, ell) != 1:
            raise ConfigurationError(f"gcd(m, ell) must be 1, got m={m}, ell={ell}")
        self.m, self.ell = m, ell
        self.arity = ell
        self.identity = BSElement(0, Fraction(0), m)
        s0 = BSElement(1, Fraction(0), m)
        s1 = BSElement(1, Fraction(1), m)
        a = s1 * s0.inverse()
        self.generators = {"a": a, "b": s0.inverse(), "s0": s0, "s1": s1}

    def element(self, t, r) -> BSElement:
        return BSElement(t, Fraction(r), self.m)

    def check(self, g):
        if not isinstance(g, BSElement) or g.m != self.m:
            raise FamilyMismatchError(f"{g!r} is not in BS(1,{self.m})")
        return g

    def eval_word(self, word):
        return eval_word(self.generators, self.identity, word)

    def random_element(self, rng: random.Random, size: int = 4) -> BSElement:
        return BSElement(rng.randint(-size, size),
                         Fraction(rng.randint(-size ** 2, size ** 2), self.m ** rng.randint(0, size)),
                         self.m)

    # -- chain protocol: G = <m> x| Z[1/m] ------------------------------------
    def split(self, g):
        return g.exponent, g.translation

    def join(self, alpha, h):
        return BSElement(alpha, h, self.m)

    def h_zero(self):
        return Fraction(0)

    def h_add(self, h1, h2):
        return h1 + h2

    def h_neg(self, h):
        return -h

    def alpha_apply(self, alpha, h):
        return h * self.m ** alpha if alpha >= 0 else h / self.m ** (-alpha)

    def alpha_is_identity(self, alpha):
        return alpha == 0

    def psi(self, h):
        return h * self.ell

    def letter(self, h) -> int:
        return h.numerator * pow(h.denominator, -1, self.ell) % self.ell

    def in_psi_image(self, h):
        return self.letter(h) == 0

    def in_psi_power(self, h, n):
        return h.numerator % self.ell ** n == 0

    def psi_inv(self, h):
        if not self.in_psi_image(h):
            raise NotInImage(f"{h} is not in {self.ell}Z[1/{self.m}]")
        return h / self.ell

    def y(self, i: int):
        return Fraction(i)
