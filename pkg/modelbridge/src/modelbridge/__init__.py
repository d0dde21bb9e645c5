"""Model-side driver: batch recipe generation against an OpenAI-compatible
endpoint and logit-lens layer export."""

__version__ = "0.1.0"

from .generate import GenerationJob, GenerationReport, JobFailure, generate
from .layers import LAYER_TAGS, UnsupportedModelError, export_layers
from .parse import CompletionParseError, ParsedRecipe, parse_completion

__all__ = [
    "GenerationJob", "GenerationReport", "JobFailure", "generate",
    "LAYER_TAGS", "UnsupportedModelError", "export_layers",
    "CompletionParseError", "ParsedRecipe", "parse_completion",
]
