"""Affine groups A x| Z^d with A inside GL(d, Z), acting on Z^d by x -> alpha x + h."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product as iproduct

from .base import ConfigurationError, Element, FamilyMismatchError, NotInImage, eval_word

Matrix = tuple  # tuple of row tuples
Vector = tuple


def mat_identity(d: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    cols = list(zip(*y))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in x)


def mat_vec(x: Matrix, v: Vector) -> Vector:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in x)


def mat_add(x: Matrix, y: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(x, y))


def mat_scale(x: Matrix, c: int) -> Matrix:
    return tuple(tuple(c * a for a in r) for r in x)


def mat_det(x: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(x)
    a = [list(r) for r in x]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def mat_inverse(x: Matrix) -> Matrix:
    """Inverse of a unimodular integer matrix (adjugate over det = +-1)."""
    from sympy import Matrix as SMatrix

    det = mat_det(x)
    if det not in (1, -1):
        raise ValueError("matrix is not unimodular")
    inv = SMatrix(x).adjugate() * det
    return tuple(tuple(int(v) for v in inv.row(i)) for i in range(len(x)))


def mat_pow(x: Matrix, n: int) -> Matrix:
    if n < 0:
        return mat_pow(mat_inverse(x), -n)
    result = mat_identity(len(x))
    while n:
        if n & 1:
            result = mat_mul(result, x)
        x = mat_mul(x, x)
        n >>= 1
    return result


@dataclass(frozen=True, slots=True)
class AffineElement(Element):
    matrix: Matrix
    vector: Vector

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(int(a) for a in r) for r in self.matrix))
        object.__setattr__(self, "vector", tuple(int(a) for a in self.vector))
        if len(self.matrix) != len(self.vector) or mat_det(self.matrix) not in (1, -1):
            raise ValueError("affine element needs a unimodular matrix of matching size")

    @property
    def dim(self) -> int:
        return len(self.vector)

    def family_key(self):
        return ("affine", self.dim)

    def identity(self):
        return AffineElement(mat_identity(self.dim), (0,) * self.dim)

    def is_identity(self):
        return not any(self.vector) and self.matrix == mat_identity(self.dim)

    def _mul(self, other):
        # x -> other.matrix (self.matrix x + self.vector) + other.vector
        vec = tuple(a + b for a, b in zip(mat_vec(other.matrix, self.vector), other.vector))
        return AffineElement(mat_mul(other.matrix, self.matrix), vec)

    def inverse(self):
        inv = mat_inverse(self.matrix)
        return AffineElement(inv, tuple(-a for a in mat_vec(inv, self.vector)))

    def apply(self, x: Vector) -> Vector:
        return tuple(a + b for a, b in zip(mat_vec(self.matrix, x), self.vector))

    def serialize(self):
        return {"matrix": [list(r) for r in self.matrix], "vector": list(self.vector)}

    def __repr__(self):
        return f"Aff({[list(r) for r in self.matrix]}, {list(self.vector)})"


class AffineGroup:
    """A x| Z^d for a finitely generated A (given by matrix generators), with chain H_n = 2^n Z^d.

    The tree has arity 2^d; the letter of h is its reduction mod 2 read as a
    binary number (first coordinate most significant).
    """

    family = "affine"

    def __init__(self, d: int = 2, matrices: dict | None = None):
        if d < 1:
            raise ConfigurationError("dimension must be positive")
        self.d = d
        self.arity = 2 ** d
        self.identity = AffineElement(mat_identity(d), (0,) * d)
        gens = {}
        for i in range(d):
            e = tuple(int(i == j) for j in range(d))
            gens[f"e{i}"] = AffineElement(mat_identity(d), e)
        for name, mat in (matrices or {}).items():
            gens[name] = AffineElement(mat, (0,) * d)
        self.generators = gens
        self._letters = list(iproduct((0, 1), repeat=d))

    def element(self, matrix, vector) -> AffineElement:
        return AffineElement(matrix, vector)

    def translation(self, v) -> AffineElement:
        return AffineElement(mat_identity(self.d), v)

    def check(self, g):
        if not isinstance(g, AffineElement) or g.dim != self.d:
            raise FamilyMismatchError(f"{g!r} is not in the affine group of dimension {self.d}")
        return g

    def eval_word(self, word):
        return eval_word(self.generators, self.identity, word)

    def random_element(self, rng: random.Random, size: int = 4) -> AffineElement:
        g = self.identity
        names = sorted(self.generators)
        for _ in range(rng.randint(0, size)):
            g = g * self.generators[rng.choice(names)] ** rng.choice((-1, 1))
        return g * self.translation([rng.randint(-size, size) for _ in range(self.d)])

    # -- chain protocol --------------------------------------------------------
    def split(self, g):
        return g.matrix, g.vector

    def join(self, alpha, h):
        return AffineElement(alpha, h)

    def h_zero(self):
        return (0,) * self.d

    def h_add(self, h1, h2):
        return tuple(a + b for a, b in zip(h1, h2))

    def h_neg(self, h):
        return tuple(-a for a in h)

    def alpha_apply(self, alpha, h):
        return mat_vec(alpha, h)

    def alpha_is_identity(self, alpha):
        return alpha == mat_identity(self.d)

    def psi(self, h):
        return tuple(2 * a for a in h)

    def in_psi_image(self, h):
        return all(a % 2 == 0 for a in h)

    def in_psi_power(self, h, n):
        return all(a % (1 << n) == 0 for a in h)

    def psi_inv(self, h):
        if not self.in_psi_image(h):
            raise NotInImage(f"{h} is not in 2Z^{self.d}")
        return tuple(a // 2 for a in h)

    def letter(self, h) -> int:
        i = 0
        for a in h:
            i = 2 * i + a % 2
        return i

    def y(self, i: int):
        return self._letters[i]
