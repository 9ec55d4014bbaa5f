"""Laurent polynomials in u = 1 + t over Z/q, stored as sorted (exponent, coeff) tuples.

The lamplighter's translation part lives here: a lamp configuration f is the
polynomial sum f(k) u^k, and the tree coordinate t is u - 1.
"""

from __future__ import annotations

from collections import defaultdict

Poly = tuple  # tuple[tuple[int, int], ...]

ZERO: Poly = ()


def normalize(terms, q: int) -> Poly:
    acc: dict[int, int] = defaultdict(int)
    for e, c in terms:
        acc[e] += c
    return tuple(sorted((e, c % q) for e, c in acc.items() if c % q))


def monomial(e: int, c: int, q: int) -> Poly:
    return normalize([(e, c)], q)


def _to_bits(p: Poly, lo: int) -> int:
    x = 0
    for e, _ in p:
        x |= 1 << (e - lo)
    return x


def _from_bits(x: int, lo: int) -> Poly:
    return tuple((lo + i, 1) for i, b in enumerate(reversed(bin(x)[2:])) if b == "1") if x else ZERO


def add(p: Poly, r: Poly, q: int) -> Poly:
    if q == 2 and len(p) + len(r) > 32:
        lo = min(p[0][0] if p else 0, r[0][0] if r else 0)
        return _from_bits(_to_bits(p, lo) ^ _to_bits(r, lo), lo)
    return normalize(list(p) + list(r), q)


def neg(p: Poly, q: int) -> Poly:
    return tuple((e, (-c) % q) for e, c in p)


def sub(p: Poly, r: Poly, q: int) -> Poly:
    return add(p, neg(r, q), q)


def shift(p: Poly, k: int) -> Poly:
    """Multiply by u^k."""
    return tuple((e + k, c) for e, c in p)


def scale(p: Poly, c: int, q: int) -> Poly:
    return normalize([(e, c * a) for e, a in p], q)


def mul(p: Poly, r: Poly, q: int) -> Poly:
    return normalize([(e1 + e2, c1 * c2) for e1, c1 in p for e2, c2 in r], q)


def value_at_one(p: Poly, q: int) -> int:
    """Constant term in t, i.e. the value at u = 1."""
    return sum(c for _, c in p) % q


def times_t(p: Poly, q: int) -> Poly:
    """Multiply by t = u - 1."""
    return add(shift(p, 1), neg(p, q), q)


def div_t(p: Poly, q: int) -> Poly:
    """Exact division by t = u - 1; requires value_at_one(p) == 0."""
    if not p:
        return ZERO
    lo = p[0][0]
    if q == 2 and len(p) > 32:
        if len(p) % 2:
            raise ValueError("polynomial is not divisible by t")
        # quotient coefficient j is the parity of the coefficients above j
        x = _to_bits(p, lo) >> 1
        k = 1
        while k < x.bit_length():
            x ^= x >> k
            k <<= 1
        return _from_bits(x, lo)
    hi = p[-1][0]
    coeffs = dict(p)
    # synthetic division of u^-lo * p by (u - 1)
    out = []
    carry = 0
    for e in range(hi, lo, -1):
        carry = (carry + coeffs.get(e, 0)) % q
        out.append((e - 1, carry))
    if (carry + coeffs.get(lo, 0)) % q:
        raise ValueError("polynomial is not divisible by t")
    return normalize(out, q)


def divisible_by_t_power(p: Poly, n: int, q: int) -> bool:
    for _ in range(n):
        if value_at_one(p, q):
            return False
        p = div_t(p, q)
    return True


def to_t_series(p: Poly, q: int, n: int) -> list[int]:
    """First n coefficients of p as a power series in t."""
    out = [0] * n
    for e, c in p:
        for i, a in enumerate(binomial_series(e, q, n)):
            out[i] = (out[i] + c * a) % q
    return out


def binomial_series(e: int, q: int, n: int) -> list[int]:
    """Coefficients of (1 + t)^e mod (q, t^n); negative e allowed."""
    out = [0] * n
    coef = 1
    for i in range(n):
        out[i] = coef % q
        coef = coef * (e - i) // (i + 1)
    return out
