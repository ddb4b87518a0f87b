"""Sahlqvist correspondence for instantial neighbourhood logic."""

from inlcorr.bimodal import correspondent_via_bimodal, is_bimodal_sahlqvist, tau
from inlcorr.classifier import SahlqvistClass, Verdict, classify
from inlcorr.correspondence import NotSahlqvistError, correspondent_direct
from inlcorr.formula import (
    And,
    Bot,
    Box,
    Iff,
    Implies,
    Not,
    Or,
    Prop,
    Top,
    is_negative,
    is_positive,
    is_pseudo_boxed_atom,
    is_pure,
    polarity,
    substitute_props,
)
from inlcorr.parser import ParseError, parse_inl, print_bimodal, print_fo, print_inl
from inlcorr.semantics import Model, NeighbourhoodFrame, enumerate_frames, satisfies, valid_at
from inlcorr.translation import st

__all__ = [
    "And", "Bot", "Box", "Iff", "Implies", "Not", "Or", "Prop", "Top",
    "polarity", "is_positive", "is_negative", "is_pure", "is_pseudo_boxed_atom", "substitute_props",
    "parse_inl", "print_inl", "print_fo", "print_bimodal", "ParseError",
    "NeighbourhoodFrame", "Model", "satisfies", "valid_at", "enumerate_frames",
    "st", "classify", "Verdict", "SahlqvistClass",
    "correspondent_direct", "NotSahlqvistError",
    "tau", "is_bimodal_sahlqvist", "correspondent_via_bimodal",
]
