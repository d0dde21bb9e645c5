import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"

sys.path.insert(0, str(TESTS_DIR))

from recipediv import distrib
from recipediv.corpus import KnowledgeSpace, Source, Stage, TokenStream


def make_stream(tokens, recipe_id=""):
    return TokenStream(tokens=tuple(tokens), source_recipe=recipe_id,
                       stage=Stage.FILTERED)


def make_ks(ref_token_lists, dish_id="dish", country="MA", window=None):
    """Knowledge space straight from token lists, bypassing text processing."""
    streams = tuple(make_stream(tokens, f"ref{i}")
                    for i, tokens in enumerate(ref_token_lists))
    pooled_tokens = tuple(t for s in streams for t in s.tokens)
    pooled_stream = make_stream(pooled_tokens)
    return KnowledgeSpace(
        dish_id=dish_id, country=country, source=Source.HUMAN_REFERENCE,
        texts=streams, pooled_stream=pooled_stream,
        pooled=distrib.estimate_distribution(pooled_stream),
        per_text=tuple(distrib.estimate_distribution(s) for s in streams),
        ppmi=distrib.ppmi_matrix(streams, window=window),
    )


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
