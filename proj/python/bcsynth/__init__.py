"""Barrier-certificate synthesis for polynomial ODE systems."""

from _bcsynth import (  # noqa: F401
    Poly,
    completeness_threshold,
    export_smt,
    groebner_basis,
    ideal_member,
    lie_derivative,
    parse_poly,
    simulate,
    synthesize,
    validate,
)

__all__ = [
    "Poly",
    "completeness_threshold",
    "export_smt",
    "groebner_basis",
    "ideal_member",
    "lie_derivative",
    "parse_poly",
    "simulate",
    "synthesize",
    "validate",
]
