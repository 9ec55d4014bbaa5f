"""Subgroup chains H_n = psi^n(H) in G = A x| H, stabilizer endomorphisms and periodic-ray witnesses.

H is abelian and written additively throughout. A vertex at level n of the
coset tree is H_n + x; (alpha, h) sends it to H_n + alpha(x) + h.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

from sympy import totient

from .groups import laurent as lp
from .groups.affine import (AffineElement, AffineGroup, mat_add, mat_identity, mat_mul, mat_pow,
                            mat_scale)
from .groups.base import ConfigurationError
from .groups.bs import BSGroup
from .groups.lamplighter import LamplighterElement, LamplighterGroup
from .tree import ChainAction, DivergedAfter, Fixed, MovedAtDepth, Ray, TreeAction


# -- chains ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CosetNode:
    word: tuple
    representative: object

    @property
    def level(self) -> int:
        return len(self.word)


class SubgroupChain:
    """Coset tree of H_n = psi^n(H) with transversal y_0..y_{t-1} of psi(H)."""

    def __init__(self, group):
        self.group = group
        self.arity = group.arity
        self.identity = group.identity
        self.action = ChainAction(group)

    def node(self, word) -> CosetNode:
        """Representative x = y_(i1) + psi(y_(i2)) + ... + psi^(n-1)(y_(in))."""
        grp = self.group
        x = grp.h_zero()
        for i in reversed(word):
            x = grp.h_add(grp.psi(x), grp.y(i))
        return CosetNode(tuple(word), x)

    def node_direct(self, word) -> CosetNode:
        """Same representative, summing psi^(k-1)(y_(ik)) term by term."""
        grp = self.group
        x = grp.h_zero()
        for k, i in enumerate(word):
            term = grp.y(i)
            for _ in range(k):
                term = grp.psi(term)
            x = grp.h_add(x, term)
        return CosetNode(tuple(word), x)

    def stabilizer_member(self, node: CosetNode, g) -> bool:
        """g = (alpha, h) stabilizes H_n + x iff alpha(x) + h - x lies in H_n."""
        grp = self.group
        alpha, h = grp.split(g)
        x = node.representative
        diff = grp.h_add(grp.h_add(grp.alpha_apply(alpha, x), h), grp.h_neg(x))
        return grp.in_psi_power(diff, node.level)

    def phi_i(self, i: int, g):
        """(alpha, h) -> (alpha, psi(h) + y_i - alpha(y_i))."""
        if not 0 <= i < self.arity:
            raise ValueError(f"index {i} out of range")
        grp = self.group
        alpha, h = grp.split(g)
        y = grp.y(i)
        return grp.join(alpha, grp.h_add(grp.h_add(grp.psi(h), y), grp.h_neg(grp.alpha_apply(alpha, y))))

    def phi_compose(self, word, g):
        """phi_(i1) o ... o phi_(in) applied to g (innermost first)."""
        for i in reversed(tuple(word)):
            g = self.phi_i(i, g)
        return g

    def phi_direct(self, word, g):
        """(alpha, psi^n(h) + x - alpha(x)) with x the representative of the word."""
        grp = self.group
        alpha, h = grp.split(g)
        for _ in word:
            h = grp.psi(h)
        x = self.node_direct(word).representative
        return grp.join(alpha, grp.h_add(grp.h_add(h, x), grp.h_neg(grp.alpha_apply(alpha, x))))

    def index_check(self, samples: int = 200, seed: int = 0) -> bool:
        """psi(H) has exactly t cosets: the letters y_i are distinct and every sampled h lands on one."""
        grp = self.group
        letters = {grp.letter(grp.y(i)) for i in range(self.arity)}
        if letters != set(range(self.arity)):
            return False
        rng = random.Random(seed)
        for _ in range(samples):
            _, h = grp.split(grp.random_element(rng))
            j = grp.letter(h)
            if not grp.in_psi_image(grp.h_add(h, grp.h_neg(grp.y(j)))):
                return False
        return True

    def commutes_with_psi(self, samples: int = 200, seed: int = 0) -> bool:
        grp = self.group
        rng = random.Random(seed)
        for _ in range(samples):
            alpha, _ = grp.split(grp.random_element(rng))
            _, h = grp.split(grp.random_element(rng))
            if grp.psi(grp.alpha_apply(alpha, h)) != grp.alpha_apply(alpha, grp.psi(h)):
                return False
        return True


def lamplighter_chain(moduli=(2,)) -> SubgroupChain:
    return SubgroupChain(LamplighterGroup(moduli))


def bs_chain(m: int = 2, ell: int = 3) -> SubgroupChain:
    return SubgroupChain(BSGroup(m, ell))


def affine_chain(d: int = 2, matrices: dict | None = None) -> SubgroupChain:
    return SubgroupChain(AffineGroup(d, matrices))


# -- GF(2) polynomials and Lucas ----------------------------------------------------

@dataclass(frozen=True)
class GF2Poly:
    """Polynomial over GF(2); bit i of ``bits`` is the coefficient of x^i."""

    bits: int

    @classmethod
    def from_exponents(cls, exps) -> "GF2Poly":
        b = 0
        for e in exps:
            b ^= 1 << e
        return cls(b)

    @classmethod
    def one_plus_x_power(cls, n: int) -> "GF2Poly":
        """(1 + x)^n, coefficients by Lucas: C(n, j) odd iff j is a binary submask of n."""
        b = 0
        j = n
        while True:
            b |= 1 << j
            if j == 0:
                break
            j = (j - 1) & n
        return cls(b)

    @property
    def degree(self) -> int:
        return self.bits.bit_length() - 1

    def __add__(self, other):
        return GF2Poly(self.bits ^ other.bits)

    def __mul__(self, other):
        a, b, out = self.bits, other.bits, 0
        while b:
            if b & 1:
                out ^= a
            a <<= 1
            b >>= 1
        return GF2Poly(out)

    def __pow__(self, n: int):
        result, base = GF2Poly(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other) -> tuple["GF2Poly", "GF2Poly"]:
        if other.bits == 0:
            raise ZeroDivisionError("division by the zero polynomial")
        q, r = 0, self.bits
        dd = other.degree
        while r and r.bit_length() - 1 >= dd:
            shift = r.bit_length() - 1 - dd
            q ^= 1 << shift
            r ^= other.bits << shift
        return GF2Poly(q), GF2Poly(r)

    def exponents(self) -> list[int]:
        return [i for i in range(self.bits.bit_length()) if self.bits >> i & 1]


def lucas_odd(a: int, b: int) -> bool:
    """binomial(a, b) is odd iff every binary digit of b is at most that of a."""
    if a < 0 or b < 0:
        raise ValueError("arguments must be natural numbers")
    return b & ~a == 0


# -- witnesses -----------------------------------------------------------------------

@dataclass
class PeriodicWitness:
    family: str
    params: dict
    element: object
    ray: Ray
    certificate: dict = field(default_factory=dict)
    verdict: object = None

    @property
    def fixed(self) -> bool:
        return isinstance(self.verdict, Fixed)


def _stabilizes(action: TreeAction, g, ray: Ray):
    return action.stabilizes_ray(g, ray)


def powers_fixed(witness: PeriodicWitness, action: TreeAction, span: int = 10) -> bool:
    """g^k for |k| <= span are pairwise distinct and all fix the target ray."""
    g, ray = witness.element, witness.ray
    powers = [g ** k for k in range(-span, span + 1)]
    return len(set(powers)) == len(powers) and all(
        isinstance(action.stabilizes_ray(x, ray), Fixed) for x in powers)


def ll_exponents(k: int) -> tuple[int, int, dict]:
    """(l, m) with (1+x)^m + (1+x)^l divisible by 1 + x^k over GF(2)."""
    if k < 1:
        raise ValueError("k must be positive")
    kappa = (k & -k).bit_length() - 1
    K = k >> kappa
    phi_k = int(totient(K))
    ell = 2 ** (kappa + phi_k) - 1
    m = 2 ** (kappa + 2 * phi_k) - 1
    return ell, m, {"kappa": kappa, "K": K, "a": 2 ** kappa - 1, "totient": phi_k,
                    "u": [phi_k, 2 * phi_k]}


def ll_periodic_witness(k: int, word=None) -> PeriodicWitness:
    """Nontrivial lamplighter element fixing the period-k ray ``word^inf``.

    With Q = ((1+t)^m + (1+t)^l) / (1 + t^k) and P the polynomial of the
    period word, (m - l, (1+t)^(-l) Q P) fixes P / (1 + t^k).
    """
    word = tuple(word) if word is not None else (1,) + (0,) * (k - 1)
    if len(word) != k or any(x not in (0, 1) for x in word):
        raise ValueError("word must be a 0/1 word of length k")
    ell, m, data = ll_exponents(k)
    num = GF2Poly.one_plus_x_power(m) + GF2Poly.one_plus_x_power(ell)
    quotient, rem = num.divmod(GF2Poly.from_exponents([0, k]))
    # Q and P are polynomials in t; convert to Laurent polynomials in u = 1 + t
    q_poly = _t_poly_to_u(quotient.exponents())
    p_poly = _t_poly_to_u([i for i, x in enumerate(word) if x])
    lamps = lp.shift(lp.mul(q_poly, p_poly, 2), -ell)
    g = LamplighterElement(m - ell, (lamps,), (2,))
    ray = Ray((), word)
    action = ChainAction(LamplighterGroup())
    cert = {"ell": ell, "m": m, **data,
            "numerator_exponents": num.exponents(),
            "quotient_exponents": quotient.exponents(),
            "remainder_zero": rem.bits == 0}
    w = PeriodicWitness("lamplighter", {"k": k, "word": list(word)}, g, ray, cert)
    w.verdict = _stabilizes(action, g, ray)
    return w


def _t_poly_to_u(exps) -> lp.Poly:
    """sum t^e rewritten in u = 1 + t over GF(2), by Horner's rule with t = u + 1."""
    coeffs = set(exps)
    acc = 0
    for e in range(max(coeffs, default=-1), -1, -1):
        acc = (acc << 1) ^ acc ^ (e in coeffs)
    return lp.normalize([(j, 1) for j in GF2Poly(acc).exponents()], 2)


def verify_gf2_certificate(cert: dict, k: int) -> bool:
    """Re-check (1+x)^m + (1+x)^l = (1 + x^k) Q from the recorded exponents alone."""
    lhs = GF2Poly.one_plus_x_power(cert["m"]) + GF2Poly.one_plus_x_power(cert["ell"])
    q = GF2Poly.from_exponents(cert["quotient_exponents"])
    return lhs == GF2Poly.from_exponents([0, k]) * q


def adic_ray(coords, base: int, letter_of) -> Ray:
    """Tree ray of a point with rational coordinates in the base-adic integers.

    Each coordinate must have denominator prime to ``base``; ``letter_of``
    turns the tuple of coordinate digits into a tree letter.
    """
    state = tuple(Fraction(c) for c in coords)
    seen: dict = {}
    letters = []
    while state not in seen:
        seen[state] = len(letters)
        digits = tuple(c.numerator * pow(c.denominator, -1, base) % base for c in state)
        letters.append(letter_of(digits))
        state = tuple((c - d) / base for c, d in zip(state, digits))
    start = seen[state]
    return Ray(tuple(letters[:start]), tuple(letters[start:]))


def bs_periodic_witness(m: int, ell: int, p: int, a: int, b: int = 0) -> PeriodicWitness:
    """Element (t, f a / m^(c+b)) of BS(1, m) fixing the period-p ray of a / (m^b (1 - l^p)).

    l^p - 1 = m^c d with gcd(d, m) = 1, t is the least positive exponent with
    d | m^t - 1, and f = (m^t - 1) / d.
    """
    if math.gcd(m, ell) != 1:
        raise ConfigurationError("m and ell must be coprime")
    if p < 1 or not 0 <= a < ell ** p:
        raise ConfigurationError("need p >= 1 and 0 <= a < ell^p")
    n = ell ** p - 1
    c = 0
    while n % m == 0:
        n //= m
        c += 1
    d = n
    t = 1
    while (m ** t - 1) % d:
        t += 1
    f = (m ** t - 1) // d
    group = BSGroup(m, ell)
    h = Fraction(f * a, m ** (c + b))
    g = group.element(t, h)
    point = Fraction(a, m ** b * (1 - ell ** p))
    ray = adic_ray([point], ell, lambda ds: ds[0])
    action = ChainAction(group)
    # membership of h in every intersection term for k <= 8
    members = []
    for k in range(1, 9):
        centre = (1 - Fraction(m) ** t) * Fraction(a, m ** b) * Fraction(ell ** (k * p) - 1, ell ** p - 1)
        members.append(group.in_psi_power(h - centre, k * p))
    cert = {"c": c, "d": d, "t": t, "f": f, "translation": str(h),
            "intersection_members_k_le_8": all(members),
            "digits_match": b != 0 or ray == Ray((), _digits_le(a, ell, p))}
    w = PeriodicWitness("bs", {"m": m, "ell": ell, "p": p, "a": a, "b": b}, g, ray, cert)
    w.verdict = _stabilizes(action, g, ray)
    return w


def _digits_le(a: int, base: int, p: int) -> tuple:
    out = []
    for _ in range(p):
        out.append(a % base)
        a //= base
    return tuple(out)


def affine_fixing_matrix(v) -> tuple:
    """Non-identity unimodular alpha with alpha v = v (d >= 2)."""
    v = tuple(int(x) for x in v)
    d = len(v)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    alpha = [list(r) for r in mat_identity(d)]
    nz = [i for i, x in enumerate(v) if x]
    if not nz:
        alpha[0][1] = 1
        return tuple(tuple(r) for r in alpha)
    i = nz[0]
    j = 1 if i == 0 else 0
    x, y = v[i], v[j]
    alpha[i][i], alpha[i][j] = x * y + 1, -x * x
    alpha[j][i], alpha[j][j] = y * y, -x * y + 1
    return tuple(tuple(r) for r in alpha)


def affine_power_identity_check(alpha, ks) -> bool:
    """alpha^k == k (alpha - I) + I for every k given."""
    d = len(alpha)
    ident = mat_identity(d)
    diff = mat_add(alpha, mat_scale(ident, -1))
    return all(mat_pow(alpha, k) == mat_add(mat_scale(diff, k), ident) for k in ks)


def _vector_letter(bits) -> int:
    i = 0
    for b in bits:
        i = 2 * i + b
    return i


def affine_ray(v, p: int) -> Ray:
    """Ray of the 2-adic point v / (1 - 2^p)."""
    return adic_ray([Fraction(x, 1 - 2 ** p) for x in v], 2, _vector_letter)


def affine_periodic_witness(v, p: int) -> PeriodicWitness:
    alpha = affine_fixing_matrix(v)
    d = len(v)
    g = AffineElement(alpha, (0,) * d)
    ray = affine_ray(v, p)
    action = ChainAction(AffineGroup(d))
    cert = {"alpha": [list(r) for r in alpha],
            "fixes_v": tuple(sum(a * b for a, b in zip(row, v)) for row in alpha) == tuple(v),
            "power_identity": affine_power_identity_check(alpha, range(-20, 21))}
    powers = {mat_pow(alpha, k) for k in range(-20, 21)}
    cert["powers_distinct"] = len(powers) == 41
    w = PeriodicWitness("affine", {"v": list(v), "p": p}, g, ray, cert)
    w.verdict = _stabilizes(action, g, ray)
    return w


def is_unipotent(M) -> bool:
    d = len(M)
    n = mat_add(M, mat_scale(mat_identity(d), -1))
    return mat_pow(n, d) == tuple(tuple(0 for _ in range(d)) for _ in range(d)) if d else True


def unipotent_witness(M, p: int, v=None) -> PeriodicWitness:
    """alpha = M^n with n = d! (2^p - 1), h = -Mt v where Mt = (I - M^n) / (2^p - 1)."""
    M = tuple(tuple(int(x) for x in r) for r in M)
    d = len(M)
    if not is_unipotent(M):
        raise ConfigurationError("matrix is not unipotent")
    v = tuple(v) if v is not None else tuple((i + 1) % 2 ** p for i in range(d))
    if any(not 0 <= x < 2 ** p for x in v):
        raise ConfigurationError("v must have entries in [0, 2^p)")
    q = 2 ** p - 1
    n = math.factorial(d) * q
    Mn = mat_pow(M, n)
    ident = mat_identity(d)
    diff = mat_add(ident, mat_scale(Mn, -1))
    divisible = all(x % q == 0 for r in diff for x in r)
    mt = tuple(tuple(x // q for x in r) for r in diff)
    h = tuple(-sum(a * b for a, b in zip(row, v)) for row in mt)
    g = AffineElement(Mn, h)
    ray = affine_ray(v, p)
    members = []
    iv = tuple(sum(a * b for a, b in zip(row, v)) for row in diff)  # (I - alpha) v
    for k in range(1, 9):
        geo = (2 ** (p * k) - 1) // q
        centre = tuple(x * geo for x in iv)
        members.append(all((hh - cc) % 2 ** (p * k) == 0 for hh, cc in zip(h, centre)))
    cert = {"n": n, "divisible": divisible, "translation": list(h),
            "intersection_members_k_le_8": all(members)}
    action = ChainAction(AffineGroup(d))
    w = PeriodicWitness("unipotent", {"M": [list(r) for r in M], "p": p, "v": list(v)}, g, ray, cert)
    w.verdict = _stabilizes(action, g, ray)
    return w


def random_unitriangular(d: int, rng: random.Random, size: int = 3) -> tuple:
    return tuple(tuple(1 if i == j else (rng.randint(-size, size) if j > i else 0)
                       for j in range(d)) for i in range(d))


# -- trivial-stabilizer search -------------------------------------------------------

class SearchExhausted(RuntimeError):
    def __init__(self, survivors):
        super().__init__(f"{len(survivors)} elements fix every prefix found")
        self.survivors = survivors


def trivial_ray_search(action: TreeAction, elements, depth: int = 32, seed: int = 0,
                       attempts: int = 64):
    """Find a word v of length <= depth moved by every nontrivial element.

    Returns (v, {element: first moved depth}); v is cut at the deepest move.
    """
    rng = random.Random(seed)
    targets = [g for g in elements if not g.is_identity()]
    if not targets:
        return (), {}
    survivors = targets
    for _ in range(attempts):
        v = tuple(rng.randrange(action.arity) for _ in range(depth))
        cert = {}
        survivors = []
        for g in targets:
            img = action.act_word(g, v)
            moved = next((i + 1 for i, (a, b) in enumerate(zip(img, v)) if a != b), None)
            if moved is None:
                survivors.append(g)
            else:
                cert[g] = moved
        if not survivors:
            return v[:max(cert.values())], cert
    raise SearchExhausted(survivors)


# -- strong scale-invariance intersections ------------------------------------------

def strong_si_intersection_check(in_power_image, depth: int, bound: int, dim: int = 3, make=None):
    """Box elements lying in every phi^k(G), k <= depth."""
    from .groups.heisenberg import HeisenbergElement

    make = make or (lambda c: HeisenbergElement(*c))
    out = []
    rng = range(-bound, bound + 1)
    for coords in iproduct(rng, repeat=dim):
        g = make(coords)
        if all(in_power_image(g, k) for k in range(1, depth + 1)):
            out.append(g)
    return out
