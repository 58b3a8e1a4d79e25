"""Resource-driven substructural defeasible logic: parsing, proof search, analysis."""

from .core import (
    Arrow,
    Body,
    Head,
    Instance,
    Literal,
    Rule,
    Strength,
    Structure,
    Tag,
    Theory,
    ValidationReport,
    Variant,
    complement,
    lit,
    validate_theory,
)

__version__ = "0.1.0"

__all__ = [
    "Arrow", "Body", "Head", "Instance", "Literal", "Rule", "Strength", "Structure", "Tag",
    "Theory", "ValidationReport", "Variant", "complement", "lit", "validate_theory",
]
