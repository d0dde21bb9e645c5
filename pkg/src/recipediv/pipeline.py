"""Orchestration: prompt emission, batch scoring with resume, comparative
reports (increase rates, keyword gaps, layer gaps), and the record file
formats.

Scoring is parallel over dishes with results written in sorted dish order,
so output files are byte-identical for any worker count. The progress
manifest makes interrupted runs resumable at dish granularity.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .config import Config
from .corpus import (Corpus, CountryLexicon, Dish, KnowledgeSpace, Source,
                     Stage, TokenStream, EmptyCommunityError, knowledge_space,
                     preprocess)
from .distances import welch_t_test
from .novelty import (MetricRecord, Thresholds, ThresholdProvenance,
                      EmptyVariationError, loo_thresholds, score_variation)
from . import distrib, novelty

# ---------------------------------------------------------------------------
# prompt emission
# ---------------------------------------------------------------------------

#: Keyword slots: ten keywords plus the empty slot, times four templates = 44
#: prompts per (dish, country).
KEYWORDS = (
    "novel",
    "unique",
    "new",
    "different",
    "surprising",
    "creative, desirable and useful",
    "original",
    "authentic",
    "traditional",
    "prototypical",
)

TRADITIONAL_KEYWORDS = frozenset({"authentic", "traditional", "prototypical"})

KEYWORD_DEFINITIONS = {
    "novel": "new and not resembling something formerly known or used",
    "unique": "being the only one of its kind",
    "new": "recently created and not existing before",
    "different": "not the same as others in form or quality",
    "surprising": "unexpected and departing from what is usual",
    "creative, desirable and useful": "marked by imagination that is both appealing and practical",
    "original": "independent in thought and not derived from something else",
    "authentic": "true to the tradition from which it comes",
    "traditional": "following customs handed down within a community",
    "prototypical": "serving as the standard example of its kind",
}


class TemplateId(Enum):
    BASIC = "Basic"
    PERSONA = "Persona"
    BLEND = "Blend"
    DEFINITION = "Definition"


class CountryMode(Enum):
    ORIGIN = "Origin"
    VARIATION = "Variation"
    BLANK = "Blank"


_RETURN_BLOCK = (
    "\n\nPlease return, in English only, the following:"
    "\n1. A recipe title."
    "\n2. A list of ingredients."
    "\n3. A set of cooking instructions."
    "\n\nThe instructions must use only the ingredients listed above, be clear"
    " and concise, and maintain the structure and order described. Title:"
)


@dataclass(frozen=True)
class PromptSpec:
    prompt_id: str
    dish_id: str
    dish_name: str
    country: str  # the (dish, country) cell this prompt belongs to
    country_mode: CountryMode
    keyword: str  # "" for the empty slot
    template_id: TemplateId
    rendered_text: str


def _kw_phrase(keyword: str) -> str:
    return f"{keyword} " if keyword else ""


def render_prompt(dish: Dish, country_iso: str, keyword: str,
                  template: TemplateId, lexicon: CountryLexicon) -> str:
    country = lexicon.get(country_iso)
    if country is None:
        raise KeyError(f"country {country_iso!r} not in lexicon")
    demonym = country.demonyms[0]
    kw = _kw_phrase(keyword)
    if template is TemplateId.BASIC:
        head = f"Create a {kw}{demonym} version of this recipe: {dish.name}."
    elif template is TemplateId.BLEND:
        head = f"Create a {kw}version of this recipe: {dish.name}."
    elif template is TemplateId.PERSONA:
        head = (f"You are knowledgeable about {country.name}, including its"
                " culture, history, and nuances, providing insightful and"
                f" context-aware responses. Create a {kw}version of this"
                f" recipe: {dish.name}.")
    elif template is TemplateId.DEFINITION:
        if keyword:
            gloss = KEYWORD_DEFINITIONS[keyword]
            head = (f"Here, {keyword} means {gloss}."
                    f" Create a {kw}{demonym} version of this recipe: {dish.name}.")
        else:
            head = (f"Consider the culinary traditions of {country.name} when"
                    f" adapting dishes. Create a {demonym} version of this"
                    f" recipe: {dish.name}.")
    else:  # pragma: no cover
        raise ValueError(template)
    return head + _RETURN_BLOCK


def emit_prompts(corpus: Corpus, lexicon: CountryLexicon | None = None) -> list[PromptSpec]:
    """All prompts for the corpus: 11 keyword slots x 4 templates per
    (dish, country), deterministically ordered and injective on
    (dish, country, keyword, template)."""
    lexicon = lexicon or corpus.lexicon
    specs: list[PromptSpec] = []
    keyword_slots = ("",) + KEYWORDS
    for dish_id in sorted(corpus.dishes):
        dish = corpus.dishes[dish_id]
        for country in sorted(dish.countries):
            if lexicon.get(country) is None:
                continue
            for template in TemplateId:
                for slot, keyword in enumerate(keyword_slots):
                    if template is TemplateId.BLEND:
                        mode = CountryMode.BLANK
                    elif country == dish.origin_country:
                        mode = CountryMode.ORIGIN
                    else:
                        mode = CountryMode.VARIATION
                    specs.append(PromptSpec(
                        prompt_id=f"{dish_id}:{country}:{template.value}:kw{slot:02d}",
                        dish_id=dish_id,
                        dish_name=dish.name,
                        country=country,
                        country_mode=mode,
                        keyword=keyword,
                        template_id=template,
                        rendered_text=render_prompt(dish, country, keyword,
                                                    template, lexicon),
                    ))
    return specs


def write_prompts(specs: Iterable[PromptSpec], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in specs:
            fh.write(json.dumps({
                "prompt_id": s.prompt_id,
                "dish_id": s.dish_id,
                "dish_name": s.dish_name,
                "country": s.country,
                "country_mode": s.country_mode.value,
                "keyword": s.keyword,
                "template_id": s.template_id.value,
                "rendered_text": s.rendered_text,
            }, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# metric record files
# ---------------------------------------------------------------------------

METRIC_CSV_COLUMNS = (
    "recipe_id", "dish_id", "variation_country", "source", "model_name",
    "keyword", "template_id", "newness", "appearance", "disappearance",
    "uniqueness", "difference", "new_surprise", "divergent_surprise",
    "thresholds_degenerate",
)


def _record_row(r: MetricRecord) -> list[str]:
    return [
        r.recipe_id, r.dish_id, r.variation_country, r.source,
        r.model_name or "", r.keyword or "", r.template_id or "",
        repr(r.newness), repr(r.appearance), repr(r.disappearance),
        repr(r.uniqueness), repr(r.difference), repr(r.new_surprise),
        repr(r.divergent_surprise), "1" if r.thresholds_degenerate else "0",
    ]


def _record_from_row(row: dict[str, str]) -> MetricRecord:
    return MetricRecord(
        recipe_id=row["recipe_id"], dish_id=row["dish_id"],
        variation_country=row["variation_country"], source=row["source"],
        model_name=row["model_name"] or None, keyword=row["keyword"] or None,
        template_id=row["template_id"] or None,
        newness=float(row["newness"]), appearance=float(row["appearance"]),
        disappearance=float(row["disappearance"]),
        uniqueness=float(row["uniqueness"]), difference=float(row["difference"]),
        new_surprise=float(row["new_surprise"]),
        divergent_surprise=float(row["divergent_surprise"]),
        thresholds_degenerate=row["thresholds_degenerate"] == "1",
    )


def write_metric_records(records: Iterable[MetricRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRIC_CSV_COLUMNS)
        for r in records:
            writer.writerow(_record_row(r))


def read_metric_records(path) -> list[MetricRecord]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        return [_record_from_row(row) for row in csv.DictReader(fh)]


def write_metric_records_jsonl(records: Iterable[MetricRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            obj = {col: getattr(r, col if col != "variation_country" else "variation_country")
                   for col in ("recipe_id", "dish_id", "variation_country", "source")}
            obj.update({
                "model_name": r.model_name, "keyword": r.keyword,
                "template_id": r.template_id, "newness": r.newness,
                "appearance": r.appearance, "disappearance": r.disappearance,
                "uniqueness": r.uniqueness, "difference": r.difference,
                "new_surprise": r.new_surprise,
                "divergent_surprise": r.divergent_surprise,
                "thresholds_degenerate": r.thresholds_degenerate,
            })
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# batch scoring
# ---------------------------------------------------------------------------

@dataclass
class ScoreRunReport:
    n_records: int = 0
    n_dishes: int = 0
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (id, reason)


def score_dish(dish: Dish, config: Config) -> tuple[str, list[MetricRecord], list[tuple[str, str]]]:
    """Score every variation and generated recipe of one dish against its
    origin reference community."""
    skipped: list[tuple[str, str]] = []
    try:
        ks = knowledge_space(dish, dish.origin_country, Source.HUMAN_REFERENCE,
                             window=config.cooc_window)
    except EmptyCommunityError as exc:
        return dish.dish_id, [], [(dish.dish_id, f"empty community: {exc}")]
    th = loo_thresholds(ks)
    if config.newness_eps is not None or config.difference_eps is not None:
        th = Thresholds(
            newness_eps=(config.newness_eps if config.newness_eps is not None
                         else th.newness_eps),
            difference_eps=(config.difference_eps if config.difference_eps is not None
                            else th.difference_eps),
            provenance=ThresholdProvenance.MANUAL,
            degenerate=th.degenerate,
        )
    records: list[MetricRecord] = []
    for country in sorted(dish.variations):
        for recipe in dish.variations[country]:
            try:
                records.append(score_variation(
                    ks, recipe, thresholds=th, window=config.cooc_window,
                    disappearance_norm=config.disappearance_norm))
            except EmptyVariationError:
                skipped.append((recipe.recipe_id, "no content tokens"))
    return dish.dish_id, records, skipped


def _score_dish_star(args) -> tuple[str, list[MetricRecord], list[tuple[str, str]]]:
    return score_dish(*args)


def _read_manifest(path: Path, fingerprint: str) -> set[str]:
    done: set[str] = set()
    if not path.exists():
        return done
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if obj.get("kind") == "manifest":
                if obj.get("fingerprint") != fingerprint:
                    raise ValueError(
                        "manifest belongs to a run with a different configuration")
            elif obj.get("kind") == "dish":
                done.add(obj["dish_id"])
    return done


def score_corpus(corpus: Corpus, out_path, *, config: Config | None = None,
                 jobs: int = 1, manifest_path=None) -> ScoreRunReport:
    """Score the whole corpus to a CSV file, resumable and deterministic.

    Dishes are processed in sorted order; each dish's rows are flushed
    together and the manifest records completion, so a resumed run appends
    exactly the rows an uninterrupted run would have written.
    """
    config = config or Config()
    out_path = Path(out_path)
    fingerprint = config.fingerprint()
    report = ScoreRunReport()

    done: set[str] = set()
    manifest = Path(manifest_path) if manifest_path else None
    if manifest is not None:
        done = _read_manifest(manifest, fingerprint)

    dish_ids = sorted(corpus.dishes)
    pending = [d for d in dish_ids if d not in done]
    resuming = bool(done)

    out_fh = open(out_path, "a" if resuming else "w", newline="", encoding="utf-8")
    manifest_fh = None
    if manifest is not None:
        manifest_fh = open(manifest, "a" if resuming else "w", encoding="utf-8")
        if not resuming:
            manifest_fh.write(json.dumps(
                {"kind": "manifest", "fingerprint": fingerprint}) + "\n")
            manifest_fh.flush()
    try:
        writer = csv.writer(out_fh)
        if not resuming:
            writer.writerow(METRIC_CSV_COLUMNS)

        def consume(result):
            dish_id, records, skipped = result
            for rec in records:
                writer.writerow(_record_row(rec))
            out_fh.flush()
            report.n_records += len(records)
            report.n_dishes += 1
            report.skipped.extend(skipped)
            if manifest_fh is not None:
                manifest_fh.write(json.dumps({"kind": "dish", "dish_id": dish_id}) + "\n")
                manifest_fh.flush()

        tasks = [(corpus.dishes[d], config) for d in pending]
        if jobs > 1 and len(tasks) > 1:
            with multiprocessing.Pool(processes=jobs) as pool:
                for result in pool.imap(_score_dish_star, tasks, chunksize=8):
                    consume(result)
        else:
            for task in tasks:
                consume(_score_dish_star(task))
    finally:
        out_fh.close()
        if manifest_fh is not None:
            manifest_fh.close()
    return report


# ---------------------------------------------------------------------------
# increase rates (LLM vs human divergence)
# ---------------------------------------------------------------------------

class IncreaseMode(Enum):
    ORIGIN = "Origin"
    PAIRED_VARIATION = "PairedVariation"


@dataclass(frozen=True)
class IncreaseRate:
    model_name: str
    metric: str
    rate: float | None  # None when no usable cells
    n_cells: int
    n_zero_human: int


def _cell_means(records: Iterable[MetricRecord], metric: str) -> dict[tuple[str, str], float]:
    cells: dict[tuple[str, str], list[float]] = {}
    for r in records:
        cells.setdefault((r.dish_id, r.variation_country), []).append(
            getattr(r, metric))
    return {cell: math.fsum(v) / len(v) for cell, v in sorted(cells.items())}


def increase_rates(human_records: Sequence[MetricRecord],
                   model_records: Sequence[MetricRecord],
                   mode: IncreaseMode, corpus: Corpus,
                   metrics: Sequence[str] | None = None) -> list[IncreaseRate]:
    """Relative excess of model divergence over matched human cells.

    Cells are (dish, country) pairs present on both sides, restricted to
    origin-country cells or to paired variation cells. Cells whose human
    mean is zero are excluded from the mean and counted.
    """
    from .distances import METRIC_NAMES
    metrics = metrics or METRIC_NAMES

    def keep(record: MetricRecord) -> bool:
        dish = corpus.dishes.get(record.dish_id)
        if dish is None:
            return False
        is_origin = record.variation_country == dish.origin_country
        return is_origin if mode is IncreaseMode.ORIGIN else not is_origin

    humans = [r for r in human_records if keep(r)]
    by_model: dict[str, list[MetricRecord]] = {}
    for r in model_records:
        if keep(r):
            by_model.setdefault(r.model_name or "unknown-model", []).append(r)

    out: list[IncreaseRate] = []
    for model in sorted(by_model):
        for metric in metrics:
            h_cells = _cell_means(humans, metric)
            m_cells = _cell_means(by_model[model], metric)
            shared = sorted(set(h_cells) & set(m_cells))
            rates = []
            n_zero = 0
            for cell in shared:
                h = h_cells[cell]
                if h == 0.0:
                    n_zero += 1
                    continue
                rates.append((m_cells[cell] - h) / h)
            out.append(IncreaseRate(
                model_name=model, metric=metric,
                rate=math.fsum(rates) / len(rates) if rates else None,
                n_cells=len(shared), n_zero_human=n_zero))
    return out


# ---------------------------------------------------------------------------
# keyword analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KeywordGap:
    model_name: str
    metric: str
    gap: float | None  # mean(creative) - mean(traditional)
    t_stat: float | None
    p_value: float | None
    n_creative: int
    n_traditional: int


@dataclass(frozen=True)
class KeywordCell:
    model_name: str
    metric: str
    keyword: str
    mean: float | None
    n: int


def keyword_report(records: Iterable[MetricRecord],
                   metrics: Sequence[str] | None = None) -> list[KeywordGap]:
    """Traditional-vs-creative divergence gaps with Welch t-test p-values.

    Only keyworded model records participate; the traditional set is
    {authentic, traditional, prototypical} and the creative set the other
    seven keywords.
    """
    from .distances import METRIC_NAMES
    metrics = metrics or METRIC_NAMES
    by_model: dict[str, list[MetricRecord]] = {}
    for r in records:
        if r.keyword:
            by_model.setdefault(r.model_name or "unknown-model", []).append(r)
    out: list[KeywordGap] = []
    for model in sorted(by_model):
        group = by_model[model]
        for metric in metrics:
            creative = [getattr(r, metric) for r in group
                        if r.keyword not in TRADITIONAL_KEYWORDS]
            traditional = [getattr(r, metric) for r in group
                           if r.keyword in TRADITIONAL_KEYWORDS]
            if not creative or not traditional:
                out.append(KeywordGap(model, metric, None, None, None,
                                      len(creative), len(traditional)))
                continue
            gap = (math.fsum(creative) / len(creative)
                   - math.fsum(traditional) / len(traditional))
            t, p = welch_t_test(creative, traditional)
            out.append(KeywordGap(model, metric, gap, t, p,
                                  len(creative), len(traditional)))
    return out


def keyword_table(records: Iterable[MetricRecord],
                  metrics: Sequence[str] | None = None) -> list[KeywordCell]:
    """Per-keyword mean divergence per model and metric (detail table)."""
    from .distances import METRIC_NAMES
    metrics = metrics or METRIC_NAMES
    cells: dict[tuple[str, str, str], list[float]] = {}
    for r in records:
        if not r.keyword:
            continue
        model = r.model_name or "unknown-model"
        for metric in metrics:
            cells.setdefault((model, metric, r.keyword), []).append(
                getattr(r, metric))
    out = []
    for (model, metric, keyword) in sorted(cells):
        vals = cells[(model, metric, keyword)]
        out.append(KeywordCell(model, metric, keyword,
                               math.fsum(vals) / len(vals), len(vals)))
    return out


# ---------------------------------------------------------------------------
# layer-gap analysis over logit-lens token streams
# ---------------------------------------------------------------------------

class LayerTag(Enum):
    EMBEDDING = "Embedding"
    MIDDLE = "Middle"
    LM3 = "Lm3"
    LM2 = "Lm2"
    LM1 = "Lm1"


@dataclass(frozen=True)
class LayerRecord:
    model_name: str
    recipe_id: str
    layer_tag: LayerTag
    tokens: tuple[str, ...]


class LayerRecordError(ValueError):
    pass


def load_layer_records(path) -> list[LayerRecord]:
    """Line-delimited JSON {model_name, recipe_id, layer_tag, tokens};
    validated against the five layer tags."""
    out: list[LayerRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LayerRecordError(f"line {line_no}: invalid JSON ({exc.msg})") from None
            try:
                tag = LayerTag(obj["layer_tag"])
            except (KeyError, ValueError):
                raise LayerRecordError(
                    f"line {line_no}: bad or missing layer_tag") from None
            for fld in ("model_name", "recipe_id", "tokens"):
                if fld not in obj:
                    raise LayerRecordError(f"line {line_no}: missing field {fld!r}")
            if (not isinstance(obj["tokens"], list)
                    or not all(isinstance(t, str) for t in obj["tokens"])):
                raise LayerRecordError(f"line {line_no}: tokens must be a string list")
            out.append(LayerRecord(
                model_name=str(obj["model_name"]),
                recipe_id=str(obj["recipe_id"]),
                layer_tag=tag,
                tokens=tuple(obj["tokens"]),
            ))
    return out


@dataclass(frozen=True)
class LayerGapCell:
    model_name: str
    metric: str
    layer_tag: LayerTag
    derivation: str  # "human" | "model"
    gap: float | None  # mean(origin cells) - mean(variation cells)
    n_origin: int
    n_variation: int
    incomplete: bool


def _layer_stream(record: LayerRecord, pos_filter: bool) -> TokenStream:
    if pos_filter:
        return preprocess(" ".join(record.tokens), source_recipe=record.recipe_id)
    return TokenStream(tokens=tuple(t.lower() for t in record.tokens if t.strip()),
                       source_recipe=record.recipe_id, stage=Stage.FILTERED)


def layer_gap_report(layer_records: Sequence[LayerRecord], corpus: Corpus,
                     config: Config | None = None) -> list[LayerGapCell]:
    """Per (model, metric, layer) origin-vs-variation divergence gap.

    For each layer the reference community is rebuilt from the same-layer
    streams of the dish's reference recipes; every non-reference stream is
    scored against it. Layer streams bypass the POS filter by default
    (subword vocabularies break the lemmatizer); enable via config. Cells
    whose reference streams are missing are flagged incomplete.
    """
    config = config or Config()
    recipe_index: dict[str, tuple[Dish, Source, str]] = {}
    for dish_id in sorted(corpus.dishes):
        dish = corpus.dishes[dish_id]
        for r in dish.references:
            recipe_index[r.recipe_id] = (dish, r.source, r.country)
        for country in sorted(dish.variations):
            for r in dish.variations[country]:
                recipe_index[r.recipe_id] = (dish, r.source, r.country)

    from .distances import METRIC_NAMES
    out: list[LayerGapCell] = []
    models = sorted({lr.model_name for lr in layer_records})
    for model in models:
        for tag in LayerTag:
            cell_records = [lr for lr in layer_records
                            if lr.model_name == model and lr.layer_tag == tag
                            and lr.recipe_id in recipe_index]
            ref_streams: dict[str, list[TokenStream]] = {}
            scored: list[tuple[Dish, Source, str, TokenStream]] = []
            for lr in cell_records:
                dish, source, country = recipe_index[lr.recipe_id]
                stream = _layer_stream(lr, config.layer_pos_filter)
                if not stream.tokens:
                    continue
                if source is Source.HUMAN_REFERENCE:
                    ref_streams.setdefault(dish.dish_id, []).append(stream)
                else:
                    scored.append((dish, source, country, stream))

            counts = {"human": {"origin": 0, "variation": 0},
                      "model": {"origin": 0, "variation": 0}}
            gap_terms: dict[tuple[str, str], dict[str, list[float]]] = {}
            incomplete = False
            spaces: dict[str, tuple] = {}
            for dish, source, country, stream in scored:
                streams = ref_streams.get(dish.dish_id)
                if not streams:
                    incomplete = True
                    continue
                if dish.dish_id not in spaces:
                    pooled_tokens = tuple(t for s in streams for t in s.tokens)
                    pooled_stream = TokenStream(tokens=pooled_tokens,
                                                source_recipe="", stage=Stage.FILTERED)
                    ks = KnowledgeSpace(
                        dish_id=dish.dish_id, country=dish.origin_country,
                        source=Source.HUMAN_REFERENCE, texts=tuple(streams),
                        pooled_stream=pooled_stream,
                        pooled=distrib.estimate_distribution(pooled_stream),
                        per_text=tuple(distrib.estimate_distribution(s) for s in streams),
                        ppmi=distrib.ppmi_matrix(streams, window=config.cooc_window),
                    )
                    spaces[dish.dish_id] = (ks, loo_thresholds(ks))
                ks, th = spaces[dish.dish_id]
                nt = distrib.estimate_distribution(stream)
                newness_v, _, _ = novelty.newness(ks, nt, th,
                                                  config.disappearance_norm)
                metric_values = {
                    "newness": newness_v,
                    "uniqueness": novelty.uniqueness(ks, nt),
                    "difference": novelty.difference(ks, nt, th),
                    "new_surprise": novelty.new_surprise(ks, stream, config.cooc_window),
                    "divergent_surprise": novelty.divergent_surprise(
                        ks, stream, config.cooc_window),
                }
                derivation = "model" if source is Source.MODEL_GENERATED else "human"
                side = "origin" if country == dish.origin_country else "variation"
                counts[derivation][side] += 1
                for metric, value in metric_values.items():
                    gap_terms.setdefault((derivation, side), {}).setdefault(
                        metric, []).append(value)

            for derivation in ("human", "model"):
                origin_terms = gap_terms.get((derivation, "origin"), {})
                variation_terms = gap_terms.get((derivation, "variation"), {})
                for metric in METRIC_NAMES:
                    o = origin_terms.get(metric, [])
                    v = variation_terms.get(metric, [])
                    gap = None
                    if o and v:
                        gap = math.fsum(o) / len(o) - math.fsum(v) / len(v)
                    out.append(LayerGapCell(
                        model_name=model, metric=metric, layer_tag=tag,
                        derivation=derivation, gap=gap,
                        n_origin=counts[derivation]["origin"],
                        n_variation=counts[derivation]["variation"],
                        incomplete=incomplete,
                    ))
    return out
