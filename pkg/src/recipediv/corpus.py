"""Data model and corpus ingestion.

A corpus file is UTF-8 line-delimited JSON, one recipe per line with fields
{recipe_id, dish_id, dish_name, country, source, model_name?, keyword?,
template_id?, title, ingredients: [string], instructions}. Country strings
may be ISO codes, display names, or demonyms; resolution goes through the
country lexicon and failures are collected into the load report instead of
being silently dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Iterator

from . import distrib, textproc
from .textproc import PosTagger, default_tagger


class CorpusError(Exception):
    pass


class CorpusFormatError(CorpusError):
    """Malformed file content; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class CorpusValidationError(CorpusError):
    pass


class Region(Enum):
    ASIA = "Asia"
    EUROPE = "Europe"
    NORTH_AMERICA = "NorthAmerica"
    OCEANIA = "Oceania"
    SOUTH_AMERICA = "SouthAmerica"
    CARIBBEAN = "Caribbean"
    MIDDLE_EAST = "MiddleEast"
    AFRICA = "Africa"


@dataclass(frozen=True)
class Country:
    iso_code: str
    name: str
    region: Region
    demonyms: tuple[str, ...]

    def __post_init__(self):
        if not self.demonyms:
            raise CorpusValidationError(f"country {self.iso_code} has no demonyms")


class CountryLexicon:
    """ISO/name/demonym resolution table, loadable from CSV.

    CSV format: ``iso,name,region,demonym1|demonym2|...`` with a header row.
    """

    def __init__(self, countries: Iterable[Country]):
        self._by_iso: dict[str, Country] = {}
        self._by_key: dict[str, Country] = {}
        for c in countries:
            if c.iso_code in self._by_iso:
                raise CorpusValidationError(f"duplicate iso code {c.iso_code}")
            self._by_iso[c.iso_code] = c
            self._by_key.setdefault(c.iso_code.casefold(), c)
            self._by_key.setdefault(c.name.casefold(), c)
            for d in c.demonyms:
                self._by_key.setdefault(d.casefold(), c)

    def __len__(self) -> int:
        return len(self._by_iso)

    def __iter__(self) -> Iterator[Country]:
        return iter(self._by_iso.values())

    def get(self, iso: str) -> Country | None:
        return self._by_iso.get(iso)

    def resolve(self, raw: str) -> Country | None:
        """Match a raw country string against iso codes, names and demonyms."""
        return self._by_key.get(raw.strip().casefold())

    @classmethod
    def from_csv(cls, path) -> "CountryLexicon":
        countries = []
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            if not header.lower().startswith("iso,"):
                raise CorpusFormatError(1, "lexicon header must start with 'iso,'")
            for i, line in enumerate(fh, start=2):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split(",")
                if len(parts) != 4:
                    raise CorpusFormatError(i, f"expected 4 fields, got {len(parts)}")
                iso, name, region, demonyms = parts
                try:
                    reg = Region(region)
                except ValueError:
                    raise CorpusFormatError(i, f"unknown region {region!r}") from None
                countries.append(Country(
                    iso_code=iso, name=name, region=reg,
                    demonyms=tuple(d for d in demonyms.split("|") if d)))
        return cls(countries)

    @classmethod
    def bundled(cls) -> "CountryLexicon":
        ref = resources.files("recipediv.data").joinpath("countries.csv")
        with resources.as_file(ref) as path:
            return cls.from_csv(path)


class Source(Enum):
    HUMAN_REFERENCE = "HumanReference"
    HUMAN_VARIATION = "HumanVariation"
    MODEL_GENERATED = "ModelGenerated"


@dataclass(frozen=True)
class Recipe:
    recipe_id: str
    dish_id: str
    country: str  # resolved iso code
    source: Source
    title: str = ""
    ingredients: tuple[str, ...] = ()
    instructions: str = ""
    model_name: str | None = None
    keyword: str | None = None
    template_id: str | None = None


@dataclass(frozen=True)
class Dish:
    dish_id: str
    name: str
    origin_country: str
    references: tuple[Recipe, ...]
    variations: dict[str, tuple[Recipe, ...]]

    @property
    def countries(self) -> set[str]:
        return {self.origin_country} | set(self.variations)


@dataclass(frozen=True)
class LoadIssue:
    line_no: int
    recipe_id: str
    kind: str
    detail: str


@dataclass
class LoadReport:
    issues: list[LoadIssue] = field(default_factory=list)
    n_lines: int = 0
    n_loaded: int = 0

    def add(self, line_no: int, recipe_id: str, kind: str, detail: str) -> None:
        self.issues.append(LoadIssue(line_no, recipe_id, kind, detail))

    @property
    def unresolved_countries(self) -> list[LoadIssue]:
        return [i for i in self.issues if i.kind == "unresolved country"]


@dataclass
class Corpus:
    dishes: dict[str, Dish]
    lexicon: CountryLexicon
    report: LoadReport

    def all_recipes(self) -> Iterator[Recipe]:
        for dish_id in sorted(self.dishes):
            dish = self.dishes[dish_id]
            yield from dish.references
            for country in sorted(dish.variations):
                yield from dish.variations[country]

    def __len__(self) -> int:
        return len(self.dishes)


_REQUIRED_FIELDS = ("recipe_id", "dish_id", "dish_name", "country", "source",
                    "title", "ingredients", "instructions")


def _recipe_from_obj(obj: dict, line_no: int, lexicon: CountryLexicon,
                     report: LoadReport) -> tuple[Recipe, str] | None:
    for f in _REQUIRED_FIELDS:
        if f not in obj:
            raise CorpusFormatError(line_no, f"missing field {f!r}")
    try:
        source = Source(obj["source"])
    except ValueError:
        raise CorpusFormatError(line_no, f"unknown source {obj['source']!r}") from None
    country = lexicon.resolve(str(obj["country"]))
    if country is None:
        report.add(line_no, str(obj["recipe_id"]), "unresolved country",
                   str(obj["country"]))
        return None
    ingredients = obj["ingredients"]
    if not isinstance(ingredients, list):
        raise CorpusFormatError(line_no, "ingredients must be a list of strings")
    if not ingredients and source is not Source.MODEL_GENERATED:
        report.add(line_no, str(obj["recipe_id"]), "empty ingredients",
                   "human recipe without ingredients")
    recipe = Recipe(
        recipe_id=str(obj["recipe_id"]),
        dish_id=str(obj["dish_id"]),
        country=country.iso_code,
        source=source,
        title=str(obj["title"]),
        ingredients=tuple(str(x) for x in ingredients),
        instructions=str(obj["instructions"]),
        model_name=obj.get("model_name"),
        keyword=obj.get("keyword"),
        template_id=obj.get("template_id"),
    )
    return recipe, str(obj["dish_name"])


def load_corpus(path, lexicon: CountryLexicon | None = None) -> Corpus:
    """Load a line-delimited JSON corpus file and index it by dish.

    Raises :class:`CorpusFormatError` on malformed lines and
    :class:`CorpusValidationError` for dishes without reference recipes.
    Country-resolution failures land in the load report.
    """
    lexicon = lexicon or CountryLexicon.bundled()
    report = LoadReport()
    by_dish: dict[str, list[Recipe]] = {}
    dish_names: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            report.n_lines += 1
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(line_no, f"invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise CorpusFormatError(line_no, "expected a JSON object")
            parsed = _recipe_from_obj(obj, line_no, lexicon, report)
            if parsed is None:
                continue
            recipe, dish_name = parsed
            by_dish.setdefault(recipe.dish_id, []).append(recipe)
            dish_names.setdefault(recipe.dish_id, dish_name)
            report.n_loaded += 1

    dishes: dict[str, Dish] = {}
    for dish_id in sorted(by_dish):
        recipes = by_dish[dish_id]
        references = tuple(r for r in recipes if r.source is Source.HUMAN_REFERENCE)
        if not references:
            raise CorpusValidationError(
                f"dish {dish_id!r} has no HumanReference recipes")
        origins = {r.country for r in references}
        if len(origins) > 1:
            raise CorpusValidationError(
                f"dish {dish_id!r} reference recipes disagree on origin country: "
                f"{sorted(origins)}")
        origin = references[0].country
        variations: dict[str, list[Recipe]] = {}
        for r in recipes:
            if r.source is Source.HUMAN_REFERENCE:
                continue
            variations.setdefault(r.country, []).append(r)
        dishes[dish_id] = Dish(
            dish_id=dish_id,
            name=dish_names[dish_id],
            origin_country=origin,
            references=references,
            variations={c: tuple(v) for c, v in sorted(variations.items())},
        )
    return Corpus(dishes=dishes, lexicon=lexicon, report=report)


def recipe_to_obj(recipe: Recipe, dish_name: str) -> dict:
    obj = {
        "recipe_id": recipe.recipe_id,
        "dish_id": recipe.dish_id,
        "dish_name": dish_name,
        "country": recipe.country,
        "source": recipe.source.value,
        "title": recipe.title,
        "ingredients": list(recipe.ingredients),
        "instructions": recipe.instructions,
    }
    if recipe.model_name is not None:
        obj["model_name"] = recipe.model_name
    if recipe.keyword is not None:
        obj["keyword"] = recipe.keyword
    if recipe.template_id is not None:
        obj["template_id"] = recipe.template_id
    return obj


def serialize_corpus(corpus: Corpus, path) -> None:
    """Write the corpus back out in the line-delimited JSON format."""
    with open(path, "w", encoding="utf-8") as fh:
        for dish_id in sorted(corpus.dishes):
            dish = corpus.dishes[dish_id]
            for r in dish.references:
                fh.write(json.dumps(recipe_to_obj(r, dish.name), sort_keys=True) + "\n")
            for country in sorted(dish.variations):
                for r in dish.variations[country]:
                    fh.write(json.dumps(recipe_to_obj(r, dish.name), sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# preprocessing and knowledge spaces
# ---------------------------------------------------------------------------

class Stage(Enum):
    RAW_TEXT = "RawText"
    FILTERED = "Filtered"


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[str, ...]
    source_recipe: str
    stage: Stage


def preprocess(text: str, tagger: PosTagger | None = None,
               source_recipe: str = "") -> TokenStream:
    """Lowercase, lemmatize and keep only noun/adjective/adverb/number/verb
    tokens, order preserved. Empty text yields an empty stream."""
    lemmas = textproc.content_lemmas(text, tagger)
    return TokenStream(tokens=tuple(lemmas), source_recipe=source_recipe,
                       stage=Stage.FILTERED)


class EmptyCommunityError(CorpusError):
    def __init__(self, dish_id: str, country: str):
        super().__init__(f"no usable recipes for dish {dish_id!r}, country {country!r}")
        self.dish_id = dish_id
        self.country = country


@dataclass(frozen=True)
class KnowledgeSpace:
    """Pooled reference material for one (dish, country) community."""

    dish_id: str
    country: str
    source: Source
    texts: tuple[TokenStream, ...]
    pooled_stream: TokenStream
    pooled: distrib.TokenDistribution
    per_text: tuple[distrib.TokenDistribution, ...]
    ppmi: distrib.PpmiMatrix

    @property
    def vocabulary(self) -> frozenset[str]:
        return self.ppmi.vocab_set


def knowledge_space(dish: Dish, country: str, source_filter: Source,
                    tagger: PosTagger | None = None,
                    window: int | None = None) -> KnowledgeSpace:
    """Build the community distributions for (dish, country, source).

    Recipes whose instructions preprocess to nothing are skipped; if nothing
    remains the community is empty and an error is raised.
    """
    tagger = tagger or default_tagger()
    if source_filter is Source.HUMAN_REFERENCE:
        candidates = [r for r in dish.references if r.country == country]
    else:
        candidates = [r for r in dish.variations.get(country, ())
                      if r.source is source_filter]
    streams = []
    for r in candidates:
        s = preprocess(r.instructions, tagger, source_recipe=r.recipe_id)
        if s.tokens:
            streams.append(s)
    if not streams:
        raise EmptyCommunityError(dish.dish_id, country)
    pooled_tokens = tuple(t for s in streams for t in s.tokens)
    pooled_stream = TokenStream(tokens=pooled_tokens, source_recipe="",
                                stage=Stage.FILTERED)
    return KnowledgeSpace(
        dish_id=dish.dish_id,
        country=country,
        source=source_filter,
        texts=tuple(streams),
        pooled_stream=pooled_stream,
        pooled=distrib.estimate_distribution(pooled_stream),
        per_text=tuple(distrib.estimate_distribution(s) for s in streams),
        ppmi=distrib.ppmi_matrix(streams, window=window),
    )
