"""Self-similar actions on the t-ary tree: wreath recursions, restrictions and rays.

Everything is a right action: ``w^(g*h) == (w^g)^h``. A WreathDatum stores the
letter permutation as ``perm[i] = i^g`` and ``sections[i] = g|_i``, indexed by
input letter, so ``(g*h)|_i = g|_i * h|_(i^g)``.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Sequence

from .groups.base import ConfigurationError, Element, UnknownGenerator, parse_word
from .groups import heisenberg as heis
from .groups.spec import GroupSpec

DEFAULT_BUDGET = 1 << 14

TreeWord = tuple


# -- outcome values ----------------------------------------------------------------

@dataclass(frozen=True)
class Fixed:
    pass


@dataclass(frozen=True)
class MovedAtDepth:
    depth: int


@dataclass(frozen=True)
class DivergedAfter:
    depth: int


# -- rays ------------------------------------------------------------------------------

def _primitive_root(word: tuple) -> tuple:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


@dataclass(frozen=True)
class Ray:
    """Eventually periodic infinite word ``preperiod + period^inf`` in canonical form."""

    preperiod: tuple
    period: tuple

    def __post_init__(self):
        pre, per = tuple(self.preperiod), tuple(self.period)
        if not per:
            raise ValueError("period must be nonempty")
        per = _primitive_root(per)
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def parse(cls, text: str) -> "Ray":
        """Parse ``"1(0)"``-style notation: preperiod then period in parentheses."""
        m = re.fullmatch(r"\s*([0-9,\s]*)\(([0-9,\s]+)\)\s*", text)
        if not m:
            raise ValueError(f"bad ray {text!r}")

        def letters(s):
            s = s.replace(" ", "")
            return tuple(int(c) for c in (s.split(",") if "," in s else s) if c != "")

        return cls(letters(m.group(1)), letters(m.group(2)))

    def letter(self, n: int) -> int:
        if n < len(self.preperiod):
            return self.preperiod[n]
        return self.period[(n - len(self.preperiod)) % len(self.period)]

    def prefix(self, n: int) -> tuple:
        return tuple(self.letter(i) for i in range(n))

    def tail(self, k: int) -> "Ray":
        """The ray with its first k letters removed."""
        if k <= len(self.preperiod):
            return Ray(self.preperiod[k:], self.period)
        r = (k - len(self.preperiod)) % len(self.period)
        return Ray((), self.period[r:] + self.period[:r])

    def __str__(self):
        return "".join(map(str, self.preperiod)) + "(" + "".join(map(str, self.period)) + ")"

    def serialize(self):
        return {"preperiod": list(self.preperiod), "period": list(self.period)}


def rays_agree_from(u: Ray, v: Ray) -> int | None:
    """Least n such that u and v agree at every position >= n, or None if never."""
    from math import lcm

    span = max(len(u.preperiod), len(v.preperiod))
    cyc = lcm(len(u.period), len(v.period))
    if any(u.letter(i) != v.letter(i) for i in range(span, span + cyc)):
        return None
    n = span
    while n > 0 and u.letter(n - 1) == v.letter(n - 1):
        n -= 1
    return n


# -- wreath data --------------------------------------------------------------------

def perm_from_cycles(text: str, arity: int) -> tuple:
    """``"(01)(23)"`` -> (1, 0, 3, 2); each cycle maps a letter to its successor."""
    perm = list(range(arity))
    for cyc in re.findall(r"\(([^)]*)\)", text):
        pts = [int(c) for c in cyc.replace(",", " ").split()] if ("," in cyc or " " in cyc.strip()) \
            else [int(c) for c in cyc]
        if any(not 0 <= x < arity for x in pts):
            raise ValueError(f"{text!r} uses a letter outside 0..{arity - 1}")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a] = b
    if sorted(perm) != list(range(arity)):
        raise ValueError(f"{text!r} is not a permutation of {arity} letters")
    return tuple(perm)


@dataclass(frozen=True)
class WreathDatum:
    perm: tuple
    sections: tuple

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))) or len(self.sections) != len(self.perm):
            raise ValueError("perm must be a bijection with one section per letter")

    @property
    def arity(self):
        return len(self.perm)

    def __mul__(self, other: "WreathDatum") -> "WreathDatum":
        perm = tuple(other.perm[p] for p in self.perm)
        sections = tuple(g * other.sections[p] for g, p in zip(self.sections, self.perm))
        return WreathDatum(perm, sections)

    def inverse(self) -> "WreathDatum":
        inv = [0] * self.arity
        for i, p in enumerate(self.perm):
            inv[p] = i
        return WreathDatum(tuple(inv), tuple(self.sections[inv[j]].inverse() for j in range(self.arity)))

    def is_permutation_free(self) -> bool:
        return self.perm == tuple(range(self.arity))

    def cycles(self) -> str:
        seen, out = set(), []
        for i in range(self.arity):
            if i in seen or self.perm[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.perm[j]
            out.append("(" + "".join(map(str, cyc)) + ")" if self.arity <= 10
                       else "(" + ",".join(map(str, cyc)) + ")")
        return "".join(out)

    def serialize(self):
        return {"perm": list(self.perm), "sections": [g.serialize() for g in self.sections]}


def identity_datum(identity: Element, arity: int) -> WreathDatum:
    return WreathDatum(tuple(range(arity)), (identity,) * arity)


# -- actions --------------------------------------------------------------------------

class TreeAction:
    """Common operations; subclasses provide ``_compute_wreath``."""

    arity: int
    identity: Element
    name: str = "action"

    def __init__(self):
        self._cache: dict = {}
        self._lock = threading.Lock()

    def _compute_wreath(self, g) -> WreathDatum:
        raise NotImplementedError

    def wreath_recursion(self, g) -> WreathDatum:
        """Memoized; the cache is written under a lock so concurrent readers see serial results."""
        d = self._cache.get(g)
        if d is None:
            d = self._compute_wreath(g)
            with self._lock:
                if len(self._cache) > 500_000:
                    self._cache.clear()
                self._cache[g] = d
        return d

    def act_letter(self, g, i: int):
        if not 0 <= i < self.arity:
            raise ValueError(f"letter {i} out of range for arity {self.arity}")
        d = self.wreath_recursion(g)
        return d.perm[i], d.sections[i]

    def act_word(self, g, w: Sequence[int]) -> TreeWord:
        out = []
        for x in w:
            y, g = self.act_letter(g, x)
            out.append(y)
        return tuple(out)

    def restriction(self, g, v: Sequence[int]):
        for x in v:
            _, g = self.act_letter(g, x)
        return g

    def orbit_point(self, w: Ray, g, budget: int = DEFAULT_BUDGET):
        """The image ray w^g, or DivergedAfter when no restriction cycle appears within budget."""
        out = []
        pre = len(w.preperiod)
        per = len(w.period)
        seen: dict = {}
        pos = 0
        while pos < pre + budget:
            if g.is_identity():
                tail = w.tail(pos)
                return Ray(tuple(out) + tail.preperiod, tail.period)
            if pos >= pre:
                key = (g, (pos - pre) % per)
                if key in seen:
                    start = seen[key]
                    return Ray(tuple(out[:start]), tuple(out[start:]))
                seen[key] = pos
            y, g = self.act_letter(g, w.letter(pos))
            out.append(y)
            pos += 1
        return DivergedAfter(budget)

    def stabilizes_ray(self, g, w: Ray, budget: int = DEFAULT_BUDGET):
        pre = len(w.preperiod)
        per = len(w.period)
        seen = set()
        pos = 0
        while pos < pre + budget:
            if g.is_identity():
                return Fixed()
            if pos >= pre:
                key = (g, (pos - pre) % per)
                if key in seen:
                    return Fixed()
                seen.add(key)
            x = w.letter(pos)
            y, g = self.act_letter(g, x)
            pos += 1
            if y != x:
                return MovedAtDepth(pos)
        return DivergedAfter(budget)


class ChainAction(TreeAction):
    """Action of G = A x| H on the coset tree of H_n = psi^n(H), computed in closed form.

    For (alpha, h) and letter i: v = alpha(y_i) + h, the image letter j is
    the H_1-coset of v, and the restriction is (alpha, psi^-1(v - y_j)).
    """

    def __init__(self, group, name: str | None = None):
        super().__init__()
        self.group = group
        self.arity = group.arity
        self.identity = group.identity
        self.name = name or group.family
        self.generators = dict(group.generators)
        self._ys = [group.y(i) for i in range(self.arity)]

    def act_letter(self, g, i: int):
        grp = self.group
        alpha, h = grp.split(g)
        v = grp.h_add(grp.alpha_apply(alpha, self._ys[i]), h)
        j = grp.letter(v)
        return j, grp.join(alpha, grp.psi_inv(grp.h_add(v, grp.h_neg(self._ys[j]))))

    def _compute_wreath(self, g):
        pairs = [ChainAction.act_letter(self, g, i) for i in range(self.arity)]
        return WreathDatum(tuple(j for j, _ in pairs), tuple(r for _, r in pairs))


class TransversalAction(TreeAction):
    """Action defined by an injective endomorphism and a right transversal r_0..r_{t-1}.

    (i w)^g = j w^(psi(r_i g r_j^-1)), where j is the unique letter with
    r_i g r_j^-1 in phi(G).
    """

    def __init__(self, spec: GroupSpec, transversal=None):
        super().__init__()
        self.spec = spec
        self.transversal = tuple(transversal if transversal is not None else spec.transversal)
        self.arity = spec.arity
        self.identity = spec.identity
        self.name = spec.name
        self.generators = dict(spec.generators)
        self._inv = tuple(r.inverse() for r in self.transversal)
        for i, r in enumerate(self.transversal):
            for j in range(i):
                if spec.same_right_coset(r, self.transversal[j]):
                    raise ConfigurationError("transversal has two elements in one right coset")

    def _compute_wreath(self, g):
        perm, sections = [], []
        for r in self.transversal:
            x = r * g
            hits = [j for j, ri in enumerate(self._inv) if self.spec.in_image(x * ri)]
            if len(hits) != 1:
                raise ConfigurationError(f"{len(hits)} transversal cosets match")
            j = hits[0]
            perm.append(j)
            sections.append(self.spec.psi(x * self._inv[j]))
        return WreathDatum(tuple(perm), tuple(sections))


class RecursionAction(TreeAction):
    """Action given by wreath recursions of named generators.

    ``recursions`` maps a generator name to (perm, section words). Elements
    are factored into generator powers by ``factorize``; ``aliases`` names
    further elements by words over the recursion generators.
    """

    def __init__(self, group, arity: int, recursions: dict, factorize, aliases: dict | None = None,
                 name: str = "recursion"):
        super().__init__()
        self.group = group
        self.arity = arity
        self.identity = group.identity
        self.name = name
        self.factorize = factorize
        self.aliases = dict(aliases or {})
        self.generators = {}
        self.base: dict[str, WreathDatum] = {}
        self.section_words = {}
        for gname, (perm, words) in recursions.items():
            if isinstance(perm, str):
                perm = perm_from_cycles(perm, arity)
            self.section_words[gname] = (tuple(perm), tuple(words))
            self.base[gname] = WreathDatum(tuple(perm), tuple(group.eval_word(w) for w in words))
            self.generators[gname] = group.generators[gname]
        self._powers: dict = {}
        for alias, word in self.aliases.items():
            d = identity_datum(self.identity, arity)
            for n, e in parse_word(word, self.base):
                d = d * self._base_power(n, e)
            self.base[alias] = d

    def _base_power(self, name: str, e: int) -> WreathDatum:
        if name not in self.base:
            raise UnknownGenerator(name)
        if e < 0:
            key = (name, "inv")
            if key not in self._powers:
                self._powers[key] = self.base[name].inverse()
            base_key, base = key, self._powers[key]
            e = -e
        else:
            base_key, base = (name, "pos"), self.base[name]
        result = identity_datum(self.identity, self.arity)
        k = 0
        while e:
            if e & 1:
                result = result * self._square(base_key, base, k)
            e >>= 1
            k += 1
        return result

    def _square(self, key, base, k):
        ck = (key, k)
        d = self._powers.get(ck)
        if d is None:
            d = base if k == 0 else self._square(key, base, k - 1) * self._square(key, base, k - 1)
            self._powers[ck] = d
        return d

    def _compute_wreath(self, g):
        d = identity_datum(self.identity, self.arity)
        for name, e in self.factorize(g):
            d = d * self._base_power(name, e)
        return d


# -- concrete actions -----------------------------------------------------------------

def lamplighter_recursion_action(group=None) -> RecursionAction:
    """a = (b, a) eps, b = (b, a) on the binary tree, elements factored over {a, b}."""
    from .groups import laurent as lp
    from .groups.lamplighter import LamplighterGroup

    group = group or LamplighterGroup()

    def factorize(g):
        # g = prod_k (R^-k s R^k) * R^m with R = b and s = b^-1 a
        word = []
        for k, _ in lp.shift(g.lamps[0], -g.shift):
            word += [("b", -k - 1), ("a", 1), ("b", k)]
        word.append(("b", g.shift))
        return [(n, e) for n, e in word if e]

    recursions = {"a": ("(01)", ["b", "a"]), "b": ("", ["b", "a"])}
    return RecursionAction(group, 2, recursions, factorize, name="lamplighter")


HEIS_EX1_RECURSIONS = {
    "A": ("(01)(23)", ["1", "C", "1", "C"]),
    "C": ("(13)", ["A", "CAC^-1", "A", "A"]),
}

HEIS_EX2_RECURSIONS = {
    "A": ("(01)(23)", ["1", "C^-1A", "1", "C^-1A"]),
    "C": ("(0123)", ["C", "A", "C", "AB"]),
}


def _heis_factorize(g):
    return g.normal_word()


def heisenberg_action(example: int) -> RecursionAction:
    recursions = {1: HEIS_EX1_RECURSIONS, 2: HEIS_EX2_RECURSIONS}[example]
    group = heis.HeisenbergGroup()
    return RecursionAction(group, 4, recursions, _heis_factorize,
                           aliases={"B": "A^-1 C^-1 A C"}, name=f"heis-ex{example}")


def transversal_search(spec: GroupSpec, recursions: dict, radius: int = 4):
    """Look for a right transversal whose transversal action reproduces given recursions.

    The first representative ranges over words of length <= radius in the group
    generators; the recursions then force the remaining ones (a representative
    r_j is determined by r_i g r_j^-1 = phi(section)). Returns a tuple of
    representatives or None.
    """
    from .graphs import cayley_ball

    group = spec.group
    parsed = {n: (perm_from_cycles(p, spec.arity) if isinstance(p, str) else tuple(p),
                  tuple(group.eval_word(w) for w in ws)) for n, (p, ws) in recursions.items()}
    ball = cayley_ball(spec.symmetric_generators(), spec.identity, radius)
    candidates = sorted(ball.payloads(), key=lambda g: (g.sort_key()))
    for r0 in candidates:
        reps: dict[int, Element] = {0: r0}
        stack = [0]
        ok = True
        while stack and ok:
            i = stack.pop()
            for n, (perm, secs) in parsed.items():
                g = group.generators[n]
                j = perm[i]
                rj = (spec.phi(secs[i]).inverse() * reps[i] * g)
                if j in reps:
                    if reps[j] != rj:
                        ok = False
                        break
                else:
                    reps[j] = rj
                    stack.append(j)
                # backwards along the inverse generator
                inv_i = perm.index(i)
                if inv_i not in reps:
                    # r_inv_i g r_i^-1 = phi(secs[inv_i])  =>  r_inv_i = phi(secs[inv_i]) r_i g^-1
                    reps[inv_i] = spec.phi(secs[inv_i]) * reps[i] * g.inverse()
                    stack.append(inv_i)
                elif reps[inv_i] != spec.phi(secs[inv_i]) * reps[i] * g.inverse():
                    ok = False
                    break
        if not ok or len(reps) != spec.arity:
            continue
        transversal = tuple(reps[i] for i in range(spec.arity))
        try:
            action = TransversalAction(spec, transversal)
            if all(action.wreath_recursion(group.generators[n]) == WreathDatum(*parsed[n])
                   for n in parsed):
                return transversal
        except ConfigurationError:
            continue
    return None


def action_for(name: str, **params) -> TreeAction:
    """Default tree action for a CLI group name."""
    from .groups.spec import build_spec

    if name == "heis-ex1":
        return heisenberg_action(1)
    if name == "heis-ex2":
        return heisenberg_action(2)
    if name == "lamplighter":
        return lamplighter_recursion_action()
    spec = build_spec(name, **params)
    if name == "heis-2-4-2":
        reps = spec.right_coset_representatives()
        return TransversalAction(spec, reps)
    return ChainAction(spec.group, spec.name)
