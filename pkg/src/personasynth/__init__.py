"""Persona-driven synthetic data: derive personas from text, expand them through relations,
deduplicate them, and use them to steer scenario-templated generation and evaluation."""

from .persona import Persona, RelationEdge, Scenario, Solution, SourceText, SynthesisItem

__version__ = "0.1.0"

__all__ = ["Persona", "RelationEdge", "Scenario", "Solution", "SourceText", "SynthesisItem", "__version__"]
