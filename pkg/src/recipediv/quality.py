"""Generation-quality statistics: structural validity, length, repetition,
English rate, and ingredient usage, reported per model.

Length is counted on raw whitespace tokens of the instructions; sentences
split on . ! ? and newlines; a sentence is flagged for repetition when it
contains a run of three or more identical consecutive tokens. English
detection is a stopword-ratio heuristic behind a pluggable interface.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Protocol

from .corpus import Recipe, Source, preprocess
from .ingredients import normalize_ingredient
from .textproc import PosTagger, tokenize

_SENTENCE_RE = re.compile(r"[.!?\n]+")


def _load_stopwords() -> frozenset[str]:
    ref = resources.files("recipediv.data").joinpath("stopwords.txt")
    words = []
    for line in ref.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line)
    return frozenset(words)


STOPWORDS = _load_stopwords()


class EnglishDetector(Protocol):
    def is_english(self, text: str) -> bool:
        ...


class StopwordRatioDetector:
    """English iff the fraction of tokens found in the stopword list reaches
    the threshold. Transparent and testable; swap in a stronger detector via
    the protocol if needed."""

    def __init__(self, threshold: float = 0.15,
                 stopwords: frozenset[str] = STOPWORDS):
        self.threshold = threshold
        self.stopwords = stopwords

    def is_english(self, text: str) -> bool:
        tokens = tokenize(text)
        if not tokens:
            return False
        hits = sum(1 for t in tokens if t in self.stopwords)
        return hits / len(tokens) >= self.threshold


@dataclass(frozen=True)
class ValidityVerdict:
    valid: bool
    reasons: tuple[str, ...] = ()


def validate_recipe(r: Recipe) -> ValidityVerdict:
    """Structurally valid: non-empty title, at least one ingredient line,
    non-empty instructions."""
    reasons = []
    if not r.title.strip():
        reasons.append("empty title")
    if not any(line.strip() for line in r.ingredients):
        reasons.append("no ingredients")
    if not r.instructions.strip():
        reasons.append("empty instructions")
    return ValidityVerdict(valid=not reasons, reasons=tuple(reasons))


def split_sentences(text: str) -> list[list[str]]:
    """Whitespace-token lists for each sentence of ``text``."""
    out = []
    for part in _SENTENCE_RE.split(text):
        tokens = part.split()
        if tokens:
            out.append(tokens)
    return out


def has_repetition(sentence_tokens: list[str], run: int = 3) -> bool:
    streak = 1
    for prev, cur in zip(sentence_tokens, sentence_tokens[1:]):
        streak = streak + 1 if cur == prev else 1
        if streak >= run:
            return True
    return run <= 1 and bool(sentence_tokens)


def ingredient_usage(r: Recipe, tagger: PosTagger | None = None) -> float | None:
    """Fraction of the recipe's normalized ingredient heads whose lemma
    occurs in the preprocessed instruction stream. None when no ingredient
    line survives normalization."""
    heads = []
    for raw in r.ingredients:
        norm = normalize_ingredient(raw, tagger)
        if norm is not None:
            heads.append(norm.head_lemma)
    if not heads:
        return None
    instruction_lemmas = set(preprocess(r.instructions, tagger).tokens)
    used = sum(1 for h in heads if h in instruction_lemmas)
    return used / len(heads)


@dataclass(frozen=True)
class QualityConfig:
    too_short_tokens: int = 50
    repetition_run: int = 3
    english_threshold: float = 0.15


@dataclass(frozen=True)
class QualityReport:
    model_name: str
    n_total: int
    n_valid: int
    mean_length: float
    pct_too_short: float
    pct_repetition: float
    pct_english: float
    mean_ingredient_usage: float


def _group_key(r: Recipe) -> str:
    return r.model_name or "unknown-model" if r.source is Source.MODEL_GENERATED else "human"


def quality_stats(recipes: Iterable[Recipe], config: QualityConfig | None = None,
                  tagger: PosTagger | None = None,
                  detector: EnglishDetector | None = None) -> dict[str, QualityReport]:
    """One QualityReport per model key ("human" for human recipes).

    Percentage and mean columns are computed over the valid recipes of the
    group; pct_repetition is the share of flagged sentences pooled across
    the group's valid instructions.
    """
    config = config or QualityConfig()
    detector = detector or StopwordRatioDetector(threshold=config.english_threshold)
    groups: dict[str, list[Recipe]] = {}
    for r in recipes:
        groups.setdefault(_group_key(r), []).append(r)

    reports: dict[str, QualityReport] = {}
    for key in sorted(groups):
        members = groups[key]
        valid = [r for r in members if validate_recipe(r).valid]
        lengths = [len(r.instructions.split()) for r in valid]
        n_valid = len(valid)
        too_short = sum(1 for n in lengths if n < config.too_short_tokens)
        n_sentences = 0
        n_flagged = 0
        for r in valid:
            for sent in split_sentences(r.instructions):
                n_sentences += 1
                if has_repetition(sent, config.repetition_run):
                    n_flagged += 1
        english = sum(1 for r in valid if detector.is_english(r.instructions))
        usages = [u for u in (ingredient_usage(r, tagger) for r in valid)
                  if u is not None]
        reports[key] = QualityReport(
            model_name=key,
            n_total=len(members),
            n_valid=n_valid,
            mean_length=math.fsum(lengths) / n_valid if n_valid else 0.0,
            pct_too_short=100.0 * too_short / n_valid if n_valid else 0.0,
            pct_repetition=100.0 * n_flagged / n_sentences if n_sentences else 0.0,
            pct_english=100.0 * english / n_valid if n_valid else 0.0,
            mean_ingredient_usage=(100.0 * math.fsum(usages) / len(usages)
                                   if usages else 0.0),
        )
    return reports


QUALITY_CSV_COLUMNS = ("model_name", "n_total", "n_valid", "mean_length",
                       "pct_too_short", "pct_repetition", "pct_english",
                       "mean_ingredient_usage")


def write_quality_csv(reports: dict[str, QualityReport], path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(QUALITY_CSV_COLUMNS)
        for key in sorted(reports):
            rep = reports[key]
            writer.writerow([rep.model_name, rep.n_total, rep.n_valid,
                             repr(rep.mean_length), repr(rep.pct_too_short),
                             repr(rep.pct_repetition), repr(rep.pct_english),
                             repr(rep.mean_ingredient_usage)])
