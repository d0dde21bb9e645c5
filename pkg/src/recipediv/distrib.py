"""Token probability distributions, Jensen-Shannon divergence, co-occurrence
counting and PPMI matrices.

All logarithms are base 2, so the JSD lives in [0, 1] and saturates at 1 on
disjoint supports. No smoothing anywhere: absent tokens carry probability 0
and only strictly positive PMI values are stored. Everything is immutable
after construction and every accumulation iterates in sorted token order so
results are bit-identical across runs, hash seeds, and worker counts.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Mapping, Sequence


class DistributionError(ValueError):
    """Raised for empty streams or divergence of two empty distributions."""


@dataclass(frozen=True)
class TokenDistribution:
    """Sparse unigram distribution; all stored probabilities are > 0."""

    weights: Mapping[str, float]
    support_size: int

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "TokenDistribution":
        total = sum(counts.values())
        if total <= 0:
            raise DistributionError("cannot estimate a distribution from zero tokens")
        weights = {t: c / total for t, c in counts.items() if c > 0}
        return cls(weights=weights, support_size=len(weights))

    def __contains__(self, token: str) -> bool:
        return token in self.weights

    def get(self, token: str) -> float:
        return self.weights.get(token, 0.0)


def estimate_distribution(stream) -> TokenDistribution:
    """Maximum-likelihood unigram estimate (count / total), no smoothing.

    ``stream`` is anything with a ``tokens`` attribute or a plain token
    sequence.
    """
    tokens = getattr(stream, "tokens", stream)
    if not tokens:
        raise DistributionError("empty token stream")
    counts: dict[str, int] = {}
    for t in tokens:
        counts[t] = counts.get(t, 0) + 1
    return TokenDistribution.from_counts(counts)


def _weights_of(d) -> Mapping[str, float]:
    return d.weights if hasattr(d, "weights") else d


def jsd(p, q) -> float:
    """Base-2 Jensen-Shannon divergence over the union support.

    0 iff the distributions coincide, 1 iff their supports are disjoint.
    Accepts :class:`TokenDistribution`, :class:`PpmiRowDistribution`, or any
    token->probability mapping.
    """
    pw, qw = _weights_of(p), _weights_of(q)
    if not pw and not qw:
        raise DistributionError("JSD of two empty distributions is undefined")
    acc = 0.0
    for w in sorted(set(pw) | set(qw)):
        a = pw.get(w, 0.0)
        b = qw.get(w, 0.0)
        m = (a + b) / 2.0
        if a > 0.0:
            acc += 0.5 * a * math.log2(a / m)
        if b > 0.0:
            acc += 0.5 * b * math.log2(b / m)
    # guard float droop at the boundaries
    return min(1.0, max(0.0, acc))


class Direction(Enum):
    APPEARING = "appearing"
    DISAPPEARING = "disappearing"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class Contribution:
    value: float
    direction: Direction


def jsd_contributions(p, q) -> dict[str, Contribution]:
    """Per-token share of the divergence, tagged by direction of change.

    A token is APPEARING when q(w) > p(w) (gaining mass in the variation)
    and DISAPPEARING when p(w) > q(w). The values sum to ``jsd(p, q)``.
    """
    pw, qw = _weights_of(p), _weights_of(q)
    if not pw and not qw:
        raise DistributionError("JSD of two empty distributions is undefined")
    out: dict[str, Contribution] = {}
    for w in sorted(set(pw) | set(qw)):
        a = pw.get(w, 0.0)
        b = qw.get(w, 0.0)
        m = (a + b) / 2.0
        c = 0.0
        if a > 0.0:
            c += 0.5 * a * math.log2(a / m)
        if b > 0.0:
            c += 0.5 * b * math.log2(b / m)
        if b > a:
            direction = Direction.APPEARING
        elif a > b:
            direction = Direction.DISAPPEARING
        else:
            direction = Direction.NEUTRAL
        out[w] = Contribution(value=max(0.0, c), direction=direction)
    return out


# ---------------------------------------------------------------------------
# co-occurrence / PPMI
# ---------------------------------------------------------------------------

def cooccurrence_pairs(tokens: Sequence[str], window: int | None = None) -> set[tuple[str, str]]:
    """Unordered pairs of distinct token types co-occurring in one document.

    ``window=None`` is the document-level reading (every pair of distinct
    types in the document co-occurs once); an integer is a sliding window of
    that many positions. Self-pairs are never produced.
    """
    if window is None:
        uniq = sorted(set(tokens))
        return {(a, b) for a, b in combinations(uniq, 2)}
    pairs: set[tuple[str, str]] = set()
    n = len(tokens)
    for i in range(n):
        for j in range(i + 1, min(i + window + 1, n)):
            if tokens[i] != tokens[j]:
                a, b = tokens[i], tokens[j]
                pairs.add((a, b) if a < b else (b, a))
    return pairs


@dataclass(frozen=True)
class PpmiMatrix:
    """Sparse symmetric positive-PMI matrix.

    ``entries`` is keyed by lexicographically ordered token pairs and holds
    only strictly positive values; ``vocabulary`` covers every token of the
    source streams (not just tokens with surviving entries), preserving
    first-appearance order.
    """

    entries: Mapping[tuple[str, str], float]
    vocabulary: tuple[str, ...]
    vocab_set: frozenset[str] = field(repr=False, default=frozenset())

    def value(self, a: str, b: str) -> float:
        if a == b:
            return 0.0
        key = (a, b) if a < b else (b, a)
        return self.entries.get(key, 0.0)

    def row(self, word: str) -> dict[str, float]:
        out = {}
        for (a, b), v in self.entries.items():
            if a == word:
                out[b] = v
            elif b == word:
                out[a] = v
        return out

    def __contains__(self, token: str) -> bool:
        return token in self.vocab_set


def _counting_units(doc: Sequence[str], window: int | None) -> Iterable[Sequence[str]]:
    """The co-occurrence counting units of one document.

    Document mode: the document itself. Sliding mode: one span of up to
    window+1 tokens starting at every position, so two tokens share a unit
    iff they are within ``window`` positions of each other.
    """
    if window is None:
        yield doc
        return
    for i in range(len(doc)):
        yield doc[i:i + window + 1]


def ppmi_matrix(streams: Iterable, window: int | None = None) -> PpmiMatrix:
    """PPMI over counting units with unit-frequency marginals.

    PMI(a, b) = log2( p(a, b) / (p(a) p(b)) ) where p(.) is the fraction of
    counting units containing the token (resp. both tokens). The unit is the
    whole document by default and the k-token window under ``sliding(k)``,
    which is what gives single-document streams a usable matrix.
    Non-positive values are dropped.
    """
    docs: list[Sequence[str]] = [getattr(s, "tokens", s) for s in streams]
    if not docs:
        raise DistributionError("ppmi_matrix requires at least one stream")

    vocab: dict[str, None] = {}
    token_df: dict[str, int] = {}
    pair_df: dict[tuple[str, str], int] = {}
    n_units = 0
    for doc in docs:
        for t in dict.fromkeys(doc):
            vocab.setdefault(t, None)
        for unit in _counting_units(doc, window):
            n_units += 1
            uniq = sorted(set(unit))
            for t in uniq:
                token_df[t] = token_df.get(t, 0) + 1
            for a, b in combinations(uniq, 2):
                pair_df[(a, b)] = pair_df.get((a, b), 0) + 1

    entries: dict[tuple[str, str], float] = {}
    for (a, b) in sorted(pair_df):
        pmi = math.log2(pair_df[(a, b)] * n_units / (token_df[a] * token_df[b]))
        if pmi > 0.0:
            entries[(a, b)] = pmi
    return PpmiMatrix(entries=entries, vocabulary=tuple(vocab),
                      vocab_set=frozenset(vocab))


@dataclass(frozen=True)
class PpmiRowDistribution:
    """One word's PPMI row restricted to a shared vocabulary, L1-normalized."""

    word: str
    weights: Mapping[str, float]
    empty: bool


def ppmi_row_distribution(m: PpmiMatrix, word: str,
                          shared_vocab: Iterable[str]) -> PpmiRowDistribution:
    row: dict[str, float] = {}
    for other in sorted(shared_vocab):
        if other == word:
            continue
        v = m.value(word, other)
        if v > 0.0:
            row[other] = v
    total = math.fsum(row.values())
    if total <= 0.0:
        return PpmiRowDistribution(word=word, weights={}, empty=True)
    return PpmiRowDistribution(
        word=word, weights={w: v / total for w, v in row.items()}, empty=False)


def dump_ppmi_csv(m: PpmiMatrix, path) -> None:
    """Debug dump: token_a,token_b,ppmi, sorted by pair."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["token_a", "token_b", "ppmi"])
        for (a, b) in sorted(m.entries):
            writer.writerow([a, b, repr(m.entries[(a, b)])])
