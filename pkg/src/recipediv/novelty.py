"""The five cultural-divergence metrics and their leave-one-out thresholds.

Newness counts words whose divergence contribution crosses a community
threshold (0.8 * appearance + 0.2 * disappearance); uniqueness is the plain
JSD against the pooled community distribution; difference is the fraction of
individual reference texts at least the community's internal mean JSD away;
new surprise is the fraction of the variation's co-occurring word pairs that
are unseen in the reference PPMI; divergent surprise averages the row-wise
JSD of shared words' PPMI neighborhoods.

Threshold comparisons are inclusive (>=): a contribution or distance exactly
at the threshold counts as exceeding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import distrib
from .corpus import KnowledgeSpace, Recipe, TokenStream, preprocess
from .distrib import Direction, TokenDistribution
from .textproc import PosTagger

LAMBDA_APPEARANCE = 0.8
LAMBDA_DISAPPEARANCE = 0.2


class ThresholdProvenance(Enum):
    LEAVE_ONE_OUT = "LeaveOneOut"
    MANUAL = "Manual"


@dataclass(frozen=True)
class Thresholds:
    newness_eps: float
    difference_eps: float
    provenance: ThresholdProvenance
    degenerate: bool = False


def loo_thresholds(ks: KnowledgeSpace) -> Thresholds:
    """Leave-one-out thresholds for one community.

    newness_eps: mean over held-out texts of the mean positive per-word
    contribution of jsd_contributions(P_without_t, P_t) -- a new term must
    contribute more than in-community variation does.
    difference_eps: mean pairwise JSD between the reference-text
    distributions -- a different text must sit farther out than the
    community's own spread.

    A single-text community is degenerate: difference_eps becomes +inf and
    newness_eps 0.
    """
    n = len(ks.texts)
    if n < 2:
        return Thresholds(newness_eps=0.0, difference_eps=math.inf,
                          provenance=ThresholdProvenance.LEAVE_ONE_OUT,
                          degenerate=True)
    held_means = []
    for i in range(n):
        rest_tokens = tuple(t for j, s in enumerate(ks.texts) if j != i
                            for t in s.tokens)
        p_rest = distrib.estimate_distribution(rest_tokens)
        contribs = distrib.jsd_contributions(p_rest, ks.per_text[i])
        positives = [c.value for w, c in sorted(contribs.items()) if c.value > 0]
        held_means.append(math.fsum(positives) / len(positives) if positives else 0.0)
    newness_eps = math.fsum(held_means) / len(held_means)

    pair_jsds = []
    for i in range(n):
        for j in range(i + 1, n):
            pair_jsds.append(distrib.jsd(ks.per_text[i], ks.per_text[j]))
    difference_eps = math.fsum(pair_jsds) / len(pair_jsds)
    return Thresholds(newness_eps=newness_eps, difference_eps=difference_eps,
                      provenance=ThresholdProvenance.LEAVE_ONE_OUT)


def newness(ks: KnowledgeSpace, nt: TokenDistribution, th: Thresholds,
            disappearance_norm: str = "variation") -> tuple[float, float, float]:
    """(newness, appearance, disappearance) of a variation distribution.

    Appearance counts words of the variation's support whose contribution is
    APPEARING and >= threshold; disappearance counts words of the reference
    support moving the other way. Both are normalized by the variation's
    support size (``disappearance_norm="reference"`` switches the second
    denominator to the reference support, for sensitivity analysis).
    """
    if not nt.weights:
        raise distrib.DistributionError("empty variation distribution")
    contribs = distrib.jsd_contributions(ks.pooled, nt)
    eps = th.newness_eps
    appearing = sum(
        1 for w in nt.weights
        if contribs[w].direction is Direction.APPEARING and contribs[w].value >= eps)
    disappearing = sum(
        1 for w in ks.pooled.weights
        if contribs[w].direction is Direction.DISAPPEARING and contribs[w].value >= eps)
    appearance = appearing / nt.support_size
    if disappearance_norm == "reference":
        disappearance = disappearing / ks.pooled.support_size
    else:
        disappearance = disappearing / nt.support_size
    return (LAMBDA_APPEARANCE * appearance + LAMBDA_DISAPPEARANCE * disappearance,
            appearance, disappearance)


def uniqueness(ks: KnowledgeSpace, nt: TokenDistribution) -> float:
    """JSD between the pooled community distribution and the variation."""
    return distrib.jsd(ks.pooled, nt)


def difference(ks: KnowledgeSpace, nt: TokenDistribution, th: Thresholds) -> float:
    """Fraction of reference texts at JSD >= difference_eps from the
    variation; 0 by convention for a degenerate (single-text) community."""
    if th.degenerate or math.isinf(th.difference_eps):
        return 0.0
    hits = sum(1 for p_t in ks.per_text
               if distrib.jsd(p_t, nt) >= th.difference_eps)
    return hits / len(ks.per_text)


def new_surprise(ks: KnowledgeSpace, nt_stream: TokenStream,
                 window: int | None = None) -> float:
    """Fraction of the variation's co-occurring word pairs that the reference
    co-occurrence space does not license.

    A pair counts when either word is outside the reference vocabulary, or
    when the variation's PPMI for the pair is positive while the reference
    entry is absent or zero. Returns 0 when the variation has no pairs.
    """
    candidates = distrib.cooccurrence_pairs(nt_stream.tokens, window)
    if not candidates:
        return 0.0
    qpmi = distrib.ppmi_matrix([nt_stream], window=window)
    w_t = ks.vocabulary
    hits = 0
    for (a, b) in sorted(candidates):
        if a not in w_t or b not in w_t:
            hits += 1
        elif qpmi.value(a, b) > 0.0 and ks.ppmi.value(a, b) == 0.0:
            hits += 1
    return hits / len(candidates)


@dataclass(frozen=True)
class DivergentSurpriseDetail:
    value: float
    n_words: int
    no_shared_words: bool


def divergent_surprise_detail(ks: KnowledgeSpace, nt_stream: TokenStream,
                              window: int | None = None) -> DivergentSurpriseDetail:
    shared = sorted(ks.vocabulary & set(nt_stream.tokens))
    if not shared:
        return DivergentSurpriseDetail(0.0, 0, True)
    qpmi = distrib.ppmi_matrix([nt_stream], window=window)
    vals = []
    for w in shared:
        row_p = distrib.ppmi_row_distribution(ks.ppmi, w, shared)
        row_q = distrib.ppmi_row_distribution(qpmi, w, shared)
        if row_p.empty or row_q.empty:
            continue
        vals.append(distrib.jsd(row_p, row_q))
    if not vals:
        return DivergentSurpriseDetail(0.0, 0, False)
    return DivergentSurpriseDetail(math.fsum(vals) / len(vals), len(vals), False)


def divergent_surprise(ks: KnowledgeSpace, nt_stream: TokenStream,
                       window: int | None = None) -> float:
    """Mean row-wise JSD between shared words' PPMI neighborhoods, rows
    restricted to the shared vocabulary; words with an empty restricted row
    on either side are skipped."""
    return divergent_surprise_detail(ks, nt_stream, window).value


@dataclass(frozen=True)
class MetricRecord:
    """One scored variation cell.

    ``recipe_id`` and ``thresholds_degenerate`` travel with the record so
    rows stay unique and degenerate communities can be excluded downstream.
    """

    recipe_id: str
    dish_id: str
    variation_country: str
    source: str
    model_name: str | None
    keyword: str | None
    template_id: str | None
    newness: float
    appearance: float
    disappearance: float
    uniqueness: float
    difference: float
    new_surprise: float
    divergent_surprise: float
    thresholds_degenerate: bool


class EmptyVariationError(distrib.DistributionError):
    def __init__(self, recipe_id: str):
        super().__init__(f"recipe {recipe_id!r} has no content tokens after filtering")
        self.recipe_id = recipe_id


def score_variation(ks: KnowledgeSpace, recipe: Recipe,
                    tagger: PosTagger | None = None,
                    thresholds: Thresholds | None = None,
                    window: int | None = None,
                    disappearance_norm: str = "variation") -> MetricRecord:
    """Preprocess one recipe and run all five metrics against a community.

    ``thresholds`` defaults to the community's leave-one-out thresholds;
    pass them in when scoring many recipes against the same space.
    """
    nt_stream = preprocess(recipe.instructions, tagger,
                           source_recipe=recipe.recipe_id)
    if not nt_stream.tokens:
        raise EmptyVariationError(recipe.recipe_id)
    th = thresholds if thresholds is not None else loo_thresholds(ks)
    nt = distrib.estimate_distribution(nt_stream)
    newness_v, appearance_v, disappearance_v = newness(
        ks, nt, th, disappearance_norm=disappearance_norm)
    return MetricRecord(
        recipe_id=recipe.recipe_id,
        dish_id=recipe.dish_id,
        variation_country=recipe.country,
        source=recipe.source.value,
        model_name=recipe.model_name,
        keyword=recipe.keyword,
        template_id=recipe.template_id,
        newness=newness_v,
        appearance=appearance_v,
        disappearance=disappearance_v,
        uniqueness=uniqueness(ks, nt),
        difference=difference(ks, nt, th),
        new_surprise=new_surprise(ks, nt_stream, window=window),
        divergent_surprise=divergent_surprise(ks, nt_stream, window=window),
        thresholds_degenerate=th.degenerate,
    )
