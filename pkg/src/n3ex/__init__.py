"""Existential N3: parsing, piece normal form, translation to existential
rules and back, and a restricted-chase reasoner."""
from .model import (
    Atom,
    Conjunction,
    Constant,
    ExRule,
    Existential,
    Implication,
    Null,
    RuleSet,
    Substitution,
    Triple,
    Universal,
    Variable,
    apply,
    components,
    free_existentials,
    is_well_formed,
    universals,
)
from .parser import ParseError, parse_n3, parse_rules, serialize_n3, serialize_rules

__version__ = "0.1.0"
