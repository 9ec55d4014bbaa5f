"""Exact arithmetic for the lamplighter, Baumslag-Solitar, affine and Heisenberg families."""

from .base import (ConfigurationError, Element, FamilyMismatchError, NotInImage,
                   UnknownGenerator, commutator, eval_word, inv, mul, parse_word)
from .affine import AffineElement, AffineGroup
from .bs import BSElement, BSGroup
from .heisenberg import HeisenbergElement, HeisenbergGroup
from .lamplighter import LamplighterElement, LamplighterGroup, lamplighter
from .spec import (GroupSpec, affine_spec, bs_spec, build_spec, chain_spec, heisenberg_242,
                   heisenberg_ex1, heisenberg_ex2, lamplighter_spec, z_spec)
