"""Ingredient normalization and the cultural-grounding analyses: overlap and
preservation against reference pools, TF-IDF country profiles with cosine
attribution, title country detection, mismatch reporting, and top-k tables.

Ingredient identity is the full normalized phrase (multiword), not just the
head lemma; idf is base-2 with no smoothing, so phrases present in every
country carry no attribution signal.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable

from .corpus import Corpus, CountryLexicon, Dish, Recipe, Source
from .textproc import PosTagger, Pos, default_tagger, noun_lemma, tokenize

_PAREN_RE = re.compile(r"\([^)]*\)|\[[^\]]*\]")


def _load_stopwords() -> frozenset[str]:
    ref = resources.files("recipediv.data").joinpath("stopwords.txt")
    return frozenset(
        line.strip() for line in ref.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#"))


def _load_units() -> frozenset[str]:
    ref = resources.files("recipediv.data").joinpath("units.txt")
    return frozenset(
        line.strip() for line in ref.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#"))


_STOPWORDS = _load_stopwords()
_UNITS = _load_units()


@dataclass(frozen=True)
class NormalizedIngredient:
    phrase: str  # lowercase, space-joined content words, e.g. "salt taste"
    head_lemma: str


def normalize_ingredient(raw: str, tagger: PosTagger | None = None) -> NormalizedIngredient | None:
    """Normalize one raw ingredient line.

    Lowercases, drops parentheticals, quantities, measure words and
    stopwords, lemmatizes the remaining tokens noun-style and joins them
    with single spaces. The head lemma is the last noun of the phrase, or
    the last token when nothing is tagged as a noun. Lines that normalize
    to nothing return None.
    """
    tagger = tagger or default_tagger()
    text = _PAREN_RE.sub(" ", raw.lower())
    kept: list[str] = []
    for token in tokenize(text):
        if token.isnumeric():  # covers digit runs and fraction glyphs like ½
            continue
        lemma = noun_lemma(token)
        if token in _STOPWORDS or lemma in _STOPWORDS:
            continue
        if token in _UNITS or lemma in _UNITS:
            continue
        kept.append(lemma)
    if not kept:
        return None
    head = kept[-1]
    for lemma in reversed(kept):
        if tagger.tag_one(lemma).pos is Pos.NOUN:
            head = lemma
            break
    return NormalizedIngredient(phrase=" ".join(kept), head_lemma=head)


def normalized_phrases(r: Recipe, tagger: PosTagger | None = None) -> list[str]:
    out = []
    for raw in r.ingredients:
        norm = normalize_ingredient(raw, tagger)
        if norm is not None:
            out.append(norm.phrase)
    return out


# ---------------------------------------------------------------------------
# overlap / preservation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OverlapResult:
    overlap: float | None  # |ingr(r) & pool| / |ingr(r)|
    preservation: float | None  # |pool & ingr(r)| / |pool|
    undefined: bool


def reference_pool(dish: Dish, tagger: PosTagger | None = None) -> set[str]:
    """Union of normalized ingredient phrases over the dish's references."""
    pool: set[str] = set()
    for r in dish.references:
        pool.update(normalized_phrases(r, tagger))
    return pool


def overlap_and_preservation(dish: Dish, r: Recipe,
                             tagger: PosTagger | None = None) -> OverlapResult:
    pool = reference_pool(dish, tagger)
    own = set(normalized_phrases(r, tagger))
    if not own or not pool:
        return OverlapResult(None, None, True)
    inter = own & pool
    return OverlapResult(overlap=len(inter) / len(own),
                         preservation=len(inter) / len(pool),
                         undefined=False)


# ---------------------------------------------------------------------------
# TF-IDF profiles and attribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountryProfile:
    country: str
    tfidf: dict[str, float]  # L2-normalized when non-empty


@dataclass(frozen=True)
class ProfileSet:
    profiles: dict[str, CountryProfile]
    idf: dict[str, float]
    n_countries: int


def country_profiles(corpus: Corpus, tagger: PosTagger | None = None) -> ProfileSet:
    """TF-IDF profile per country from human recipes only.

    The country document is the concatenation of normalized ingredient
    phrases of all its human recipes; tf is the phrase count, idf is
    log2(#countries / document frequency), and vectors are L2-normalized.
    """
    docs: dict[str, list[str]] = {}
    for dish_id in sorted(corpus.dishes):
        dish = corpus.dishes[dish_id]
        for r in dish.references:
            docs.setdefault(r.country, []).extend(normalized_phrases(r, tagger))
        for country in sorted(dish.variations):
            for r in dish.variations[country]:
                if r.source is Source.MODEL_GENERATED:
                    continue
                docs.setdefault(r.country, []).extend(normalized_phrases(r, tagger))

    countries = sorted(docs)
    n = len(countries)
    df: dict[str, int] = {}
    for c in countries:
        for phrase in set(docs[c]):
            df[phrase] = df.get(phrase, 0) + 1
    idf = {phrase: math.log2(n / df[phrase]) for phrase in sorted(df)}

    profiles: dict[str, CountryProfile] = {}
    for c in countries:
        tf: dict[str, int] = {}
        for phrase in docs[c]:
            tf[phrase] = tf.get(phrase, 0) + 1
        vec = {p: tf[p] * idf[p] for p in sorted(tf) if tf[p] * idf[p] != 0.0}
        norm = math.sqrt(math.fsum(v * v for v in vec.values()))
        if norm > 0:
            vec = {p: v / norm for p, v in vec.items()}
        profiles[c] = CountryProfile(country=c, tfidf=vec)
    return ProfileSet(profiles=profiles, idf=idf, n_countries=n)


def recipe_vector(r: Recipe, profile_set: ProfileSet,
                  tagger: PosTagger | None = None) -> dict[str, float]:
    """TF-IDF vector of one recipe under the profile set's idf table.

    Phrases unseen in any country document have no idf and are skipped.
    """
    tf: dict[str, int] = {}
    for phrase in normalized_phrases(r, tagger):
        tf[phrase] = tf.get(phrase, 0) + 1
    vec = {}
    for phrase in sorted(tf):
        idf = profile_set.idf.get(phrase)
        if idf is None:
            continue
        w = tf[phrase] * idf
        if w != 0.0:
            vec[phrase] = w
    norm = math.sqrt(math.fsum(v * v for v in vec.values()))
    if norm > 0:
        vec = {p: v / norm for p, v in vec.items()}
    return vec


def cosine(u: dict[str, float], v: dict[str, float]) -> float:
    if not u or not v:
        return 0.0
    dot = math.fsum(u[k] * v[k] for k in sorted(u) if k in v)
    nu = math.sqrt(math.fsum(x * x for x in u.values()))
    nv = math.sqrt(math.fsum(x * x for x in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


class MatchClass(Enum):
    ORIGIN = "Origin"
    VARIATION = "Variation"
    NEITHER = "Neither"


@dataclass(frozen=True)
class AttributionRecord:
    recipe_id: str
    declared_country: str
    detected_country: str | None
    best_match_country: str | None  # None when the recipe vector is zero
    best_similarity: float
    match_class: MatchClass


def attribute(r: Recipe, profile_set: ProfileSet, dish: Dish,
              tagger: PosTagger | None = None,
              lexicon: CountryLexicon | None = None) -> AttributionRecord:
    """Assign the recipe to the country profile with the highest cosine.

    Ties break by ascending iso code. A zero recipe vector yields no best
    match and class Neither. When a lexicon is supplied the recipe title is
    also scanned for a country mention.
    """
    vec = recipe_vector(r, profile_set, tagger)
    detected = detect_title_country(r.title, lexicon) if lexicon is not None else None
    best_iso: str | None = None
    best_sim = 0.0
    if vec:
        for iso in sorted(profile_set.profiles):
            sim = cosine(vec, profile_set.profiles[iso].tfidf)
            if sim > best_sim:
                best_sim = sim
                best_iso = iso
    if best_iso is None:
        match_class = MatchClass.NEITHER
    elif best_iso == dish.origin_country:
        match_class = MatchClass.ORIGIN
    elif best_iso == r.country:
        match_class = MatchClass.VARIATION
    else:
        match_class = MatchClass.NEITHER
    return AttributionRecord(
        recipe_id=r.recipe_id, declared_country=r.country,
        detected_country=detected, best_match_country=best_iso,
        best_similarity=best_sim, match_class=match_class)


# ---------------------------------------------------------------------------
# title country detection and mismatch reporting
# ---------------------------------------------------------------------------

def _phrase_index(lexicon: CountryLexicon) -> list[tuple[tuple[str, ...], str]]:
    """(token tuple, iso) pairs for names and demonyms, longest first."""
    phrases: list[tuple[tuple[str, ...], str]] = []
    for country in lexicon:
        for text in (country.name, *country.demonyms):
            tokens = tuple(tokenize(text))
            if tokens:
                phrases.append((tokens, country.iso_code))
    phrases.sort(key=lambda item: (-len(item[0]), item[0], item[1]))
    return phrases


_INDEX_CACHE: dict[int, list[tuple[tuple[str, ...], str]]] = {}


def detect_title_country(title: str, lexicon: CountryLexicon) -> str | None:
    """Leftmost, longest token-boundary match of a country name or demonym
    in the title; None when nothing matches."""
    index = _INDEX_CACHE.get(id(lexicon))
    if index is None:
        index = _phrase_index(lexicon)
        _INDEX_CACHE[id(lexicon)] = index
    tokens = tokenize(title)
    for start in range(len(tokens)):
        for phrase, iso in index:
            if tokens[start:start + len(phrase)] == list(phrase):
                return iso
    return None


@dataclass
class MismatchStats:
    model_name: str
    n_checked: int = 0
    n_no_detection: int = 0
    n_mismatch: int = 0
    expected_counts: dict[str, int] = field(default_factory=dict)
    detected_counts: dict[str, int] = field(default_factory=dict)
    region_pairs: dict[tuple[str, str], int] = field(default_factory=dict)

    @property
    def mismatch_pct(self) -> float:
        detected = self.n_checked - self.n_no_detection
        return 100.0 * self.n_mismatch / detected if detected else 0.0

    def top_mismatched(self, k: int = 10) -> list[tuple[str, int]]:
        items = sorted(self.expected_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return items[:k]


@dataclass
class MismatchReport:
    per_model: dict[str, MismatchStats] = field(default_factory=dict)


def _expected_country(r: Recipe, dish: Dish) -> str:
    # Blend prompts carry no country, so the expectation is the dish origin;
    # every other prompt names the prompted country.
    if r.template_id == "Blend":
        return dish.origin_country
    return r.country


def mismatch_report(recipes: Iterable[Recipe], corpus: Corpus,
                    lexicon: CountryLexicon | None = None) -> MismatchReport:
    """Title country-attribution errors per model.

    Titles without any detected country are tallied separately; a mismatch
    is a detected country different from the expected one. Region pairs
    count (expected region, detected region) for mismatches only.
    """
    lexicon = lexicon or corpus.lexicon
    report = MismatchReport()
    for r in recipes:
        dish = corpus.dishes.get(r.dish_id)
        if dish is None:
            continue
        key = (r.model_name or "unknown-model"
               if r.source is Source.MODEL_GENERATED else "human")
        stats = report.per_model.setdefault(key, MismatchStats(model_name=key))
        stats.n_checked += 1
        detected = detect_title_country(r.title, lexicon)
        if detected is None:
            stats.n_no_detection += 1
            continue
        expected = _expected_country(r, dish)
        if detected != expected:
            stats.n_mismatch += 1
            stats.expected_counts[expected] = stats.expected_counts.get(expected, 0) + 1
            stats.detected_counts[detected] = stats.detected_counts.get(detected, 0) + 1
            exp_c = lexicon.get(expected)
            det_c = lexicon.get(detected)
            if exp_c is not None and det_c is not None:
                pair = (exp_c.region.value, det_c.region.value)
                stats.region_pairs[pair] = stats.region_pairs.get(pair, 0) + 1
    return report


# ---------------------------------------------------------------------------
# top ingredients
# ---------------------------------------------------------------------------

def top_ingredients(recipes: Iterable[Recipe], k: int,
                    tagger: PosTagger | None = None) -> list[tuple[str, int]]:
    """Phrases ranked by the number of recipes containing them, descending;
    ties break alphabetically. ``k`` larger than the vocabulary returns the
    full list."""
    counts: dict[str, int] = {}
    for r in recipes:
        for phrase in set(normalized_phrases(r, tagger)):
            counts[phrase] = counts.get(phrase, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]
