"""Tokenization and the pluggable POS-tagging/lemmatization interface.

The bundled tagger is rule-based (closed-class lexicon + suffix heuristics +
a small exception table) so the package runs with zero heavy dependencies.
Any tagger implementing :class:`PosTagger` can be plugged in instead; the
metric math downstream only sees lowercase lemma streams.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

# Maximal digit runs and maximal letter runs; everything else is a boundary.
# "2tsp" -> ["2", "tsp"], "sauté" stays one token.
_TOKEN_RE = re.compile(r"\d+|[^\W\d_]+", re.UNICODE)

_VOWELS = set("aeiou")
_VOWELS_Y = set("aeiouy")


def tokenize(text: str) -> list[str]:
    """Lowercased Unicode tokens; digit runs are kept as single tokens."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


class Pos(str, Enum):
    NOUN = "noun"
    VERB = "verb"
    ADJ = "adjective"
    ADV = "adverb"
    NUM = "number"
    OTHER = "other"


#: POS classes preserved by the instruction filter.
CONTENT_POS = frozenset({Pos.NOUN, Pos.VERB, Pos.ADJ, Pos.ADV, Pos.NUM})


@dataclass(frozen=True)
class TaggedToken:
    token: str
    pos: Pos
    lemma: str


class PosTagger(Protocol):
    def tag(self, tokens: Sequence[str]) -> list[TaggedToken]:
        ...


# Determiners, pronouns, prepositions, conjunctions, auxiliaries, particles.
# Deliberately excludes plain adverbs (then, also, gently, ...) which the
# five-class filter keeps.
_CLOSED_CLASS = frozenset("""
a an the this that these those some any each every either neither no all both
another such
i me my mine you your yours he him his she her hers it its we us our ours
they them their theirs myself yourself himself herself itself ourselves
yourselves themselves one ones something anything nothing everything
who whom whose which what
and or but nor if because although though while whereas unless until since
whether than as
of in on at by for with about against between among into through during
before after above below to from up down out off over under onto upon per
via within without along across behind beside near
is am are was were be been being
has have had having do does did done doing
will would shall should can could may might must ought
not
""".split())

# word -> (pos, lemma); irregulars and rule stragglers seen in cooking text.
_EXCEPTIONS: dict[str, tuple[Pos, str]] = {
    "leaves": (Pos.NOUN, "leaf"),
    "loaves": (Pos.NOUN, "loaf"),
    "halves": (Pos.NOUN, "half"),
    "knives": (Pos.NOUN, "knife"),
    "shelves": (Pos.NOUN, "shelf"),
    "children": (Pos.NOUN, "child"),
    "feet": (Pos.NOUN, "foot"),
    "teeth": (Pos.NOUN, "tooth"),
    "geese": (Pos.NOUN, "goose"),
    "mice": (Pos.NOUN, "mouse"),
    "people": (Pos.NOUN, "person"),
    "made": (Pos.VERB, "make"),
    "making": (Pos.VERB, "make"),
    "given": (Pos.VERB, "give"),
    "taken": (Pos.VERB, "take"),
    "left": (Pos.VERB, "leave"),
    "kept": (Pos.VERB, "keep"),
    "cut": (Pos.VERB, "cut"),
    "put": (Pos.VERB, "put"),
    "set": (Pos.VERB, "set"),
    "served": (Pos.VERB, "serve"),
    "serving": (Pos.VERB, "serve"),
    "garnish": (Pos.NOUN, "garnish"),
    "radish": (Pos.NOUN, "radish"),
    "relish": (Pos.NOUN, "relish"),
    "better": (Pos.ADJ, "good"),
    "best": (Pos.ADJ, "good"),
    "once": (Pos.ADV, "once"),
    "twice": (Pos.ADV, "twice"),
}

_ADJ_SUFFIXES = ("ous", "ful", "less", "ive", "able", "ible", "ish")


def _vowel_groups(s: str) -> int:
    groups = 0
    prev = False
    for ch in s:
        cur = ch in _VOWELS_Y
        if cur and not prev:
            groups += 1
        prev = cur
    return groups


def _ends_cvc(s: str) -> bool:
    if len(s) < 3:
        return False
    c2, v, c1 = s[-3], s[-2], s[-1]
    return (c2 not in _VOWELS and v in _VOWELS
            and c1 not in _VOWELS and c1 not in "wxy")


def _restore_stem(stem: str) -> str:
    """Undouble a final consonant or restore a dropped 'e' after stripping
    an inflection suffix."""
    if len(stem) == 2:
        return stem + "e"
    if (len(stem) >= 3 and stem[-1] == stem[-2]
            and stem[-1] not in _VOWELS
            and stem[-1] not in "lszf"):
        return stem[:-1]
    if _ends_cvc(stem) and _vowel_groups(stem) == 1:
        return stem + "e"
    return stem


def _noun_lemma(token: str) -> str:
    if token in _EXCEPTIONS and _EXCEPTIONS[token][0] is Pos.NOUN:
        return _EXCEPTIONS[token][1]
    if len(token) < 4 or not token.endswith("s"):
        return token
    if token.endswith(("ss", "us", "is")):
        return token
    if token.endswith("ies") and len(token) > 4:
        return token[:-3] + "y"
    if token.endswith(("sses", "shes", "ches", "xes", "zes", "oes")):
        return token[:-2]
    return token[:-1]


def noun_lemma(token: str) -> str:
    """Plural-stripping lemma used for noun phrases (ingredient lines)."""
    return _noun_lemma(token)


def _verb_lemma_ing(token: str) -> str | None:
    if len(token) < 5 or not token.endswith("ing"):
        return None
    stem = token[:-3]
    if not any(ch in _VOWELS_Y for ch in stem):
        return None
    return _restore_stem(stem)


def _verb_lemma_ed(token: str) -> str | None:
    if len(token) < 4 or not token.endswith("ed"):
        return None
    if token.endswith("eed"):
        return None
    if token.endswith("ied") and len(token) >= 5:
        return token[:-3] + "y"
    stem = token[:-2]
    if not any(ch in _VOWELS_Y for ch in stem):
        return None
    return _restore_stem(stem)


class RuleTagger:
    """Suffix-heuristic tagger with an exception lexicon.

    Closed-class words map to :data:`Pos.OTHER` (checked on the surface form
    and on the lemma, which keeps filtering idempotent). Everything else
    lands in one of the five content classes, defaulting to noun.
    """

    def tag_one(self, token: str) -> TaggedToken:
        if token in _CLOSED_CLASS:
            return TaggedToken(token, Pos.OTHER, token)
        if token in _EXCEPTIONS:
            pos, lemma = _EXCEPTIONS[token]
            return TaggedToken(token, pos, lemma)
        if token.isnumeric():
            return TaggedToken(token, Pos.NUM, token)
        if token.endswith("ly") and len(token) > 3:
            return TaggedToken(token, Pos.ADV, token)
        lemma = _verb_lemma_ing(token)
        if lemma is not None:
            return self._guard(token, Pos.VERB, lemma)
        lemma = _verb_lemma_ed(token)
        if lemma is not None:
            return self._guard(token, Pos.VERB, lemma)
        if token.endswith(_ADJ_SUFFIXES) and len(token) > 4:
            return TaggedToken(token, Pos.ADJ, token)
        return self._guard(token, Pos.NOUN, _noun_lemma(token))

    @staticmethod
    def _guard(token: str, pos: Pos, lemma: str) -> TaggedToken:
        # A lemma that lands in the closed class would reappear as droppable
        # text on a second pass; drop the token outright instead.
        if lemma in _CLOSED_CLASS:
            return TaggedToken(token, Pos.OTHER, lemma)
        return TaggedToken(token, pos, lemma)

    def tag(self, tokens: Sequence[str]) -> list[TaggedToken]:
        return [self.tag_one(t) for t in tokens]


_DEFAULT_TAGGER: RuleTagger | None = None


def default_tagger() -> RuleTagger:
    global _DEFAULT_TAGGER
    if _DEFAULT_TAGGER is None:
        _DEFAULT_TAGGER = RuleTagger()
    return _DEFAULT_TAGGER


def content_lemmas(text: str, tagger: PosTagger | None = None) -> list[str]:
    """Lowercase lemmas of the content tokens of ``text``, order preserved."""
    tagger = tagger or default_tagger()
    return [t.lemma for t in tagger.tag(tokenize(text)) if t.pos in CONTENT_POS]
