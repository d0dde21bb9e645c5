"""Parse model completions back into the corpus recipe schema.

Prompts end with "Title:", so a completion is expected to carry a title,
an ingredients section, and an instructions section. Anything that cannot
be carved into those three parts is a parse failure; the raw completion is
preserved so failed generations stay inspectable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_INGREDIENTS_RE = re.compile(r"^\s*(?:\d+\s*[.)]\s*)?(?:a list of )?ingredients\b[:\s]*$",
                             re.IGNORECASE)
_INSTRUCTIONS_RE = re.compile(
    r"^\s*(?:\d+\s*[.)]\s*)?(?:a set of )?(?:cooking )?(?:instructions|directions|method|steps)\b[:\s]*$",
    re.IGNORECASE)
_BULLET_RE = re.compile(r"^\s*(?:[-*•]|\d+\s*[.)])\s*")


class CompletionParseError(ValueError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class ParsedRecipe:
    title: str
    ingredients: tuple[str, ...]
    instructions: str


def parse_completion(text: str) -> ParsedRecipe:
    """Split a completion into title / ingredients / instructions.

    The title is everything before the ingredients header; ingredient lines
    run until the instructions header; the instructions are the rest.
    """
    lines = text.splitlines()
    ingredients_at = None
    instructions_at = None
    for i, line in enumerate(lines):
        if ingredients_at is None and _INGREDIENTS_RE.match(line):
            ingredients_at = i
        elif (ingredients_at is not None and instructions_at is None
                and _INSTRUCTIONS_RE.match(line)):
            instructions_at = i
            break
    if ingredients_at is None:
        raise CompletionParseError("no ingredients section")
    if instructions_at is None:
        raise CompletionParseError("no instructions section")

    title_lines = [ln.strip() for ln in lines[:ingredients_at]]
    title = " ".join(ln for ln in title_lines if ln)
    title = re.sub(r"^title\s*:\s*", "", title, flags=re.IGNORECASE).strip()
    if not title:
        raise CompletionParseError("empty title")

    ingredients = []
    for line in lines[ingredients_at + 1:instructions_at]:
        item = _BULLET_RE.sub("", line).strip()
        if item:
            ingredients.append(item)
    if not ingredients:
        raise CompletionParseError("empty ingredients section")

    instructions = "\n".join(
        ln.strip() for ln in lines[instructions_at + 1:] if ln.strip())
    if not instructions:
        raise CompletionParseError("empty instructions section")

    return ParsedRecipe(title=title, ingredients=tuple(ingredients),
                        instructions=instructions)
