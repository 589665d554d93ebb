"""Persona-driven prompt rendering and generation."""

from .generate import (
    SYNTHESIS_DECODING,
    SynthesisJob,
    convert_tool_schema_to_impl,
    derive_demo_personas,
    item_id,
    synthesize,
)
from .prompts import (
    SCENARIOS,
    Demo,
    Mode,
    PromptSpec,
    Template,
    TemplateRegistry,
    default_registry,
    list_scenarios,
    render_prompt,
)

__all__ = [
    "SCENARIOS", "SYNTHESIS_DECODING", "Demo", "Mode", "PromptSpec", "SynthesisJob", "Template",
    "TemplateRegistry", "convert_tool_schema_to_impl", "default_registry", "derive_demo_personas",
    "item_id", "list_scenarios", "render_prompt", "synthesize",
]
