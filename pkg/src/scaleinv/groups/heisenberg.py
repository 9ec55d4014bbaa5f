"""Integer Heisenberg group in upper unitriangular coordinates, and its self-embeddings."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .base import Element, FamilyMismatchError, NotInImage, eval_word


@dataclass(frozen=True, slots=True)
class HeisenbergElement(Element):
    """The matrix [[1, x, y], [0, 1, z], [0, 0, 1]]."""

    x: int
    y: int
    z: int

    def family_key(self):
        return ("heisenberg",)

    def identity(self):
        return HeisenbergElement(0, 0, 0)

    def is_identity(self):
        return self.x == 0 and self.y == 0 and self.z == 0

    def _mul(self, o):
        return HeisenbergElement(self.x + o.x, self.y + o.y + self.x * o.z, self.z + o.z)

    def inverse(self):
        return HeisenbergElement(-self.x, -self.y + self.x * self.z, -self.z)

    def as_matrix(self):
        return ((1, self.x, self.y), (0, 1, self.z), (0, 0, 1))

    def normal_word(self) -> list[tuple[str, int]]:
        """Exponents of the normal form A^x C^z B^(y - xz)."""
        word = [("A", self.x), ("C", self.z), ("B", self.y - self.x * self.z)]
        return [(n, e) for n, e in word if e]

    def serialize(self):
        return [self.x, self.y, self.z]

    def label(self) -> str:
        word = self.normal_word()
        if not word:
            return "1"
        return "".join(n if e == 1 else f"{n}^{e}" for n, e in word)

    def __repr__(self):
        return f"H({self.x}, {self.y}, {self.z})"


A = HeisenbergElement(1, 0, 0)
B = HeisenbergElement(0, 1, 0)
C = HeisenbergElement(0, 0, 1)
ONE = HeisenbergElement(0, 0, 0)


class HeisenbergGroup:
    family = "heisenberg"

    def __init__(self):
        self.identity = ONE
        self.generators = {"A": A, "B": B, "C": C}

    def check(self, g):
        if not isinstance(g, HeisenbergElement):
            raise FamilyMismatchError(f"{g!r} is not a Heisenberg element")
        return g

    def eval_word(self, word):
        return eval_word(self.generators, self.identity, word)

    def random_element(self, rng: random.Random, size: int = 4) -> HeisenbergElement:
        return HeisenbergElement(rng.randint(-size, size), rng.randint(-size * size, size * size),
                                 rng.randint(-size, size))


# -- endomorphisms ---------------------------------------------------------------
# Each comes as (phi, in_image, psi) with psi the inverse of phi on its image.

def _quad2(a: int, c: int) -> int:
    return -a * c + (c * c - c - a * a + a) // 2


def phi_ex1(g: HeisenbergElement) -> HeisenbergElement:
    a, b, c = g.x, g.y, g.z
    return HeisenbergElement(2 * c, -2 * b + 2 * a * c, a)


def in_image_ex1(g: HeisenbergElement) -> bool:
    return g.x % 2 == 0 and g.y % 2 == 0


def psi_ex1(g: HeisenbergElement) -> HeisenbergElement:
    if not in_image_ex1(g):
        raise NotInImage(f"{g!r} is outside the image")
    return HeisenbergElement(g.z, (g.x * g.z - g.y) // 2, g.x // 2)


def phi_ex2(g: HeisenbergElement) -> HeisenbergElement:
    a, b, c = g.x, g.y, g.z
    return HeisenbergElement(a + c, 2 * b + _quad2(a, c), c - a)


def in_image_ex2(g: HeisenbergElement) -> bool:
    if (g.x - g.z) % 2:
        return False
    a, c = (g.x - g.z) // 2, (g.x + g.z) // 2
    return (g.y - _quad2(a, c)) % 2 == 0


def psi_ex2(g: HeisenbergElement) -> HeisenbergElement:
    if not in_image_ex2(g):
        raise NotInImage(f"{g!r} is outside the image")
    a, c = (g.x - g.z) // 2, (g.x + g.z) // 2
    return HeisenbergElement(a, (g.y - _quad2(a, c)) // 2, c)


def phi_242(g: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(2 * g.x, 4 * g.y, 2 * g.z)


def in_image_242(g: HeisenbergElement) -> bool:
    return g.x % 2 == 0 and g.y % 4 == 0 and g.z % 2 == 0


def psi_242(g: HeisenbergElement) -> HeisenbergElement:
    if not in_image_242(g):
        raise NotInImage(f"{g!r} is outside the image")
    return HeisenbergElement(g.x // 2, g.y // 4, g.z // 2)


def in_power_image_242(g: HeisenbergElement, k: int) -> bool:
    """Membership in the k-th iterated image {2^k | x, 4^k | y, 2^k | z}."""
    return g.x % (1 << k) == 0 and g.y % (1 << (2 * k)) == 0 and g.z % (1 << k) == 0
