"""Shared element protocol, errors and word parsing for the group families."""

from __future__ import annotations

import re
from typing import Iterable, Sequence, Union


class FamilyMismatchError(TypeError):
    """Raised when elements of different group instances are combined."""


class NotInImage(ValueError):
    """Raised by a virtual endomorphism when its argument is outside the image."""


class ConfigurationError(ValueError):
    """Inconsistent group or action configuration (bad transversal, bad index)."""


class UnknownGenerator(KeyError):
    pass


class Element:
    """Mixin giving group elements operator syntax.

    Subclasses implement ``_mul``, ``inverse``, ``family_key`` and
    ``is_identity``; everything else is derived here.
    """

    __slots__ = ()

    def family_key(self):
        raise NotImplementedError

    def _mul(self, other):
        raise NotImplementedError

    def inverse(self):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def is_identity(self) -> bool:
        return self == self.identity()

    def __mul__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if self.family_key() != other.family_key():
            raise FamilyMismatchError(
                f"cannot multiply {self.family_key()} by {other.family_key()}")
        return self._mul(other)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.identity()
        base = self
        while n:
            if n & 1:
                result = result._mul(base)
            base = base._mul(base)
            n >>= 1
        return result

    def serialize(self):
        """JSON-able, order-stable representation."""
        raise NotImplementedError

    def sort_key(self):
        return repr(self.serialize())

    def label(self) -> str:
        """Short human-readable name used for graph edge labels."""
        return repr(self)


def mul(g: Element, h: Element) -> Element:
    return g * h


def inv(g: Element) -> Element:
    return g.inverse()


def commutator(g: Element, h: Element) -> Element:
    """[g, h] = g^-1 h^-1 g h."""
    return g.inverse() * h.inverse() * g * h


WordLike = Union[str, Sequence[tuple[str, int]]]


def parse_word(word: WordLike, names: Iterable[str]) -> list[tuple[str, int]]:
    """Parse ``"b^-1 a"``, ``"CAC^-1"`` or ``"A⁻¹C⁻¹AC"`` into (name, exponent) pairs.

    Names are matched greedily, longest first, so multi-character generator
    names (``s0``) coexist with single letters. ``1`` denotes the identity.
    """
    if not isinstance(word, str):
        return [(str(n), int(e)) for n, e in word]
    ordered = sorted(names, key=len, reverse=True)
    out: list[tuple[str, int]] = []
    pos = 0
    text = word.replace("*", " ").replace("·", " ")
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch == "1" and not any(text.startswith(n, pos) for n in ordered):
            pos += 1
            continue
        for name in ordered:
            if text.startswith(name, pos):
                pos += len(name)
                break
        else:
            raise UnknownGenerator(f"unknown generator at {text[pos:]!r}")
        exp = 1
        if text.startswith("⁻¹", pos):
            exp, pos = -1, pos + 2
        elif text.startswith("^", pos):
            m = re.match(r"\^\(?(-?\d+)\)?", text[pos:])
            if not m:
                raise UnknownGenerator(f"bad exponent at {text[pos:]!r}")
            exp = int(m.group(1))
            pos += m.end()
        out.append((name, exp))
    return out


def eval_word(generators: dict, identity: Element, word: WordLike) -> Element:
    """Left-to-right product of a word over named generators."""
    result = identity
    for name, exp in parse_word(word, generators):
        if name not in generators:
            raise UnknownGenerator(name)
        result = result * generators[name] ** exp
    return result
