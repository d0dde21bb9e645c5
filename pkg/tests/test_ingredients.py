import random
from collections import Counter

import pytest

import oracles
from recipediv.corpus import (Corpus, CountryLexicon, Dish, LoadReport,
                              Recipe, Source)
from recipediv.ingredients import (MatchClass, attribute, cosine,
                                   country_profiles, detect_title_country,
                                   mismatch_report, normalize_ingredient,
                                   overlap_and_preservation, recipe_vector,
                                   reference_pool, top_ingredients)


@pytest.fixture(scope="module")
def lexicon():
    return CountryLexicon.bundled()


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def test_normalize_spec_examples():
    assert normalize_ingredient("2 tsp salt, to taste").phrase == "salt taste"
    assert normalize_ingredient("Salt").phrase == "salt"


def test_normalize_empty_lines_return_none():
    assert normalize_ingredient("2 cups") is None
    assert normalize_ingredient("   ") is None
    assert normalize_ingredient("1 (large)") is None


def test_normalize_phrase_invariants():
    for raw in ("2 tsp salt, to taste", "½ cup chopped parsley (fresh)",
                "3 cloves garlic"):
        norm = normalize_ingredient(raw)
        assert norm.phrase
        for token in norm.phrase.split(" "):
            assert not token.isnumeric()
            assert token == token.lower()


def test_normalize_gold_file(fixtures_dir):
    lines = (fixtures_dir / "ingredient_gold.tsv").read_text().splitlines()
    assert len(lines) == 30
    for line in lines:
        raw, phrase, head = line.split("\t")
        norm = normalize_ingredient(raw)
        assert norm is not None, raw
        assert norm.phrase == phrase, raw
        assert norm.head_lemma == head, raw


# ---------------------------------------------------------------------------
# overlap / preservation
# ---------------------------------------------------------------------------

def _recipe(rid, country, ingredients, source=Source.MODEL_GENERATED,
            dish_id="d1", title="T", model="m1", keyword=None, template=None):
    return Recipe(recipe_id=rid, dish_id=dish_id, country=country,
                  source=source, title=title,
                  ingredients=tuple(ingredients), instructions="Cook.",
                  model_name=model if source is Source.MODEL_GENERATED else None,
                  keyword=keyword, template_id=template)


def _dish(references, variations=(), dish_id="d1", name="Dish", origin="MA"):
    var_map = {}
    for r in variations:
        var_map.setdefault(r.country, []).append(r)
    return Dish(dish_id=dish_id, name=name, origin_country=origin,
                references=tuple(references),
                variations={c: tuple(v) for c, v in sorted(var_map.items())})


def test_overlap_exact_pool():
    refs = [_recipe("r1", "MA", ["salt", "olive oil", "couscous", "raisins"],
                    source=Source.HUMAN_REFERENCE)]
    dish = _dish(refs)
    pool = reference_pool(dish)
    r = _recipe("v1", "JM", sorted(pool))
    res = overlap_and_preservation(dish, r)
    assert (res.overlap, res.preservation) == (1.0, 1.0)


def test_overlap_disjoint():
    refs = [_recipe("r1", "MA", ["salt", "couscous"],
                    source=Source.HUMAN_REFERENCE)]
    dish = _dish(refs)
    r = _recipe("v1", "JM", ["mango", "rum"])
    res = overlap_and_preservation(dish, r)
    assert (res.overlap, res.preservation) == (0.0, 0.0)


def test_overlap_fixture_point_eight_point_five():
    # pool of 8 normalized phrases; recipe has 5, of which 4 are in the pool
    pool_ingredients = ["couscous", "salt", "butter", "raisins", "carrots",
                        "chickpeas", "onion", "cinnamon"]
    refs = [_recipe("r1", "MA", pool_ingredients[:4], source=Source.HUMAN_REFERENCE),
            _recipe("r2", "MA", pool_ingredients[4:], source=Source.HUMAN_REFERENCE)]
    dish = _dish(refs)
    assert len(reference_pool(dish)) == 8
    r = _recipe("v1", "JM", ["couscous", "salt", "butter", "onion", "mango"])
    res = overlap_and_preservation(dish, r)
    assert res.overlap == pytest.approx(0.8, abs=1e-12)
    assert res.preservation == pytest.approx(0.5, abs=1e-12)
    # direct set-arithmetic oracle
    own = {p for i in r.ingredients for p in [normalize_ingredient(i).phrase]}
    pool = reference_pool(dish)
    assert res.overlap == len(own & pool) / len(own)
    assert res.preservation == len(own & pool) / len(pool)


def test_overlap_undefined_for_unnormalizable():
    refs = [_recipe("r1", "MA", ["salt"], source=Source.HUMAN_REFERENCE)]
    dish = _dish(refs)
    r = _recipe("v1", "JM", ["2 cups", "1 tsp"])
    res = overlap_and_preservation(dish, r)
    assert res.undefined
    assert res.overlap is None and res.preservation is None


def test_overlap_scale_free_under_duplication():
    refs = [_recipe("r1", "MA", ["salt", "couscous", "butter"],
                    source=Source.HUMAN_REFERENCE)]
    r = _recipe("v1", "JM", ["salt", "mango"])
    single = overlap_and_preservation(_dish(refs), r)
    doubled = overlap_and_preservation(_dish(refs * 3), r)
    assert (single.overlap, single.preservation) == (doubled.overlap,
                                                     doubled.preservation)


# ---------------------------------------------------------------------------
# country profiles / attribution
# ---------------------------------------------------------------------------

COUNTRY_DOCS = {
    "BR": ["cassava", "lime", "black beans", "palm oil", "salt"],
    "IT": ["pasta", "parmesan", "basil", "olive oil", "salt"],
    "JM": ["allspice", "scotch bonnet", "thyme", "coconut milk", "salt"],
    "JP": ["miso", "dashi", "soy sauce", "rice", "salt"],
    "MA": ["couscous", "ras el hanout", "preserved lemon", "olive oil", "salt"],
}


def _profile_corpus(lexicon):
    dishes = {}
    for i, (iso, ingredients) in enumerate(sorted(COUNTRY_DOCS.items())):
        dish_id = f"pd{i}"
        ref = _recipe(f"ref-{iso}", iso, ingredients,
                      source=Source.HUMAN_REFERENCE, dish_id=dish_id)
        dishes[dish_id] = _dish([ref], dish_id=dish_id, origin=iso)
    return Corpus(dishes=dishes, lexicon=lexicon, report=LoadReport())


def test_profiles_l2_normalized_and_human_only(lexicon):
    corpus = _profile_corpus(lexicon)
    ps = country_profiles(corpus)
    assert ps.n_countries == 5
    expected = oracles.tfidf_oracle({
        iso: [normalize_ingredient(x).phrase for x in doc]
        for iso, doc in COUNTRY_DOCS.items()})
    for iso, profile in ps.profiles.items():
        norm = sum(v * v for v in profile.tfidf.values()) ** 0.5
        assert norm == pytest.approx(1.0, abs=1e-9)
        assert set(profile.tfidf) == set(expected[iso])
        for phrase, w in expected[iso].items():
            assert profile.tfidf[phrase] == pytest.approx(w, abs=1e-9)
    # ubiquitous "salt" carries idf 0 and drops out of every vector
    assert all("salt" not in p.tfidf for p in ps.profiles.values())


def test_attribute_profile_replicas_return_generating_country(lexicon):
    corpus = _profile_corpus(lexicon)
    ps = country_profiles(corpus)
    for i, iso in enumerate(sorted(COUNTRY_DOCS)):
        dish = corpus.dishes[f"pd{i}"]
        replica = _recipe(f"rep-{iso}", iso, COUNTRY_DOCS[iso], dish_id=dish.dish_id)
        rec = attribute(replica, ps, dish)
        assert rec.best_match_country == iso
        assert rec.match_class is MatchClass.ORIGIN
        assert rec.best_similarity == pytest.approx(1.0, abs=1e-9)
        # brute-force cosine argmax oracle
        vec = recipe_vector(replica, ps)
        sims = {c: oracles.cosine_oracle(vec, p.tfidf)
                for c, p in ps.profiles.items()}
        assert max(sorted(sims), key=lambda c: sims[c]) == iso


def test_attribute_zero_vector_is_neither(lexicon):
    corpus = _profile_corpus(lexicon)
    ps = country_profiles(corpus)
    dish = corpus.dishes["pd0"]
    r = _recipe("zz", "BR", ["salt"])  # idf 0 -> zero vector
    rec = attribute(r, ps, dish)
    assert rec.best_match_country is None
    assert rec.best_similarity == 0.0
    assert rec.match_class is MatchClass.NEITHER


def test_attribute_variation_class(lexicon):
    corpus = _profile_corpus(lexicon)
    ps = country_profiles(corpus)
    dish = corpus.dishes["pd0"]  # origin BR
    r = _recipe("vv", "JM", COUNTRY_DOCS["JM"], dish_id="pd0")
    rec = attribute(r, ps, dish)
    assert rec.best_match_country == "JM"
    assert rec.match_class is MatchClass.VARIATION


def test_cosine_properties():
    rng = random.Random(17)
    for _ in range(50):
        u = {f"p{i}": rng.random() for i in range(rng.randint(1, 6))}
        v = {f"p{i}": rng.random() for i in range(rng.randint(1, 6))}
        c = cosine(u, v)
        assert 0.0 <= c <= 1.0 + 1e-12
        assert c == pytest.approx(cosine(v, u), abs=1e-12)
        assert c == pytest.approx(oracles.cosine_oracle(u, v), abs=1e-12)


# ---------------------------------------------------------------------------
# title country detection
# ---------------------------------------------------------------------------

def test_detect_title_demonym(lexicon):
    assert detect_title_country("Moroccan Couscous", lexicon) == "MA"


def test_detect_title_no_country(lexicon):
    assert detect_title_country("Couscous Salad", lexicon) is None


def test_detect_title_multiword_longest_match(lexicon):
    assert detect_title_country("Trinidad and Tobago Stew", lexicon) == "TT"
    assert detect_title_country("South Korean Fried Chicken", lexicon) == "KR"


def test_detect_title_boundary_safe(lexicon):
    # no match inside larger words
    assert detect_title_country("Romanianska something", lexicon) is None
    assert detect_title_country("A romanians' favourite", lexicon) is None
    assert detect_title_country("Romanian stew", lexicon) == "RO"


def test_detect_title_case_insensitive(lexicon):
    assert detect_title_country("JAMAICAN JERK", lexicon) == "JM"
    assert detect_title_country("jamaica on a plate", lexicon) == "JM"


# ---------------------------------------------------------------------------
# mismatch report
# ---------------------------------------------------------------------------

def test_mismatch_report_blend_and_variation(lexicon):
    refs = [_recipe("r1", "MA", ["couscous"], source=Source.HUMAN_REFERENCE)]
    variations = [
        # Blend prompt (no country given): expectation is the dish origin
        _recipe("g1", "JM", ["x"], template="Blend", title="Italian Couscous"),
        _recipe("g2", "JM", ["x"], template="Blend", title="Moroccan Couscous"),
        # Variation prompt: expectation is the prompted country
        _recipe("g3", "JM", ["x"], template="Basic", title="Moroccan Couscous"),
        _recipe("g4", "JM", ["x"], template="Basic", title="Jamaican Couscous"),
        # no detectable country in the title
        _recipe("g5", "JM", ["x"], template="Basic", title="Couscous Supreme"),
    ]
    dish = _dish(refs, variations)
    corpus = Corpus(dishes={"d1": dish}, lexicon=lexicon, report=LoadReport())
    report = mismatch_report([r for v in dish.variations.values() for r in v],
                             corpus, lexicon)
    stats = report.per_model["m1"]
    assert stats.n_checked == 5
    assert stats.n_no_detection == 1
    # g1 (IT != MA) and g3 (MA != JM) are mismatches
    assert stats.n_mismatch == 2
    assert stats.mismatch_pct == pytest.approx(100.0 * 2 / 4, abs=1e-12)
    # region pairs count (expected region, detected region)
    assert stats.region_pairs == {("Africa", "Europe"): 1,
                                  ("Caribbean", "Africa"): 1}


# ---------------------------------------------------------------------------
# top ingredients
# ---------------------------------------------------------------------------

def test_top_ingredients_basic():
    recipes = [_recipe(f"r{i}", "MA", ["1 tsp salt", "onion"]) for i in range(3)]
    recipes.append(_recipe("r9", "MA", ["onion"]))
    ranked = top_ingredients(recipes, 2)
    assert ranked[0] == ("onion", 4)
    assert ranked[1] == ("salt", 3)


def test_top_ingredients_k_larger_than_vocabulary():
    recipes = [_recipe("r1", "MA", ["salt", "pepper"])]
    assert len(top_ingredients(recipes, 50)) == 2


def test_top_ingredients_fifty_recipe_fixture_matches_counter_oracle():
    rng = random.Random(23)
    vocab = ["salt", "onion", "garlic", "sugar", "butter", "flour", "pepper",
             "olive oil", "salt taste", "parsley"]
    recipes = []
    oracle = Counter()
    for i in range(50):
        ingredients = rng.sample(vocab, rng.randint(1, 5))
        recipes.append(_recipe(f"r{i}", "MA", ingredients))
        oracle.update({normalize_ingredient(x).phrase for x in ingredients})
    ranked = top_ingredients(recipes, len(vocab))
    expected = sorted(oracle.items(), key=lambda kv: (-kv[1], kv[0]))
    assert ranked == expected


def test_top_ingredients_counts_recipes_not_occurrences():
    recipes = [_recipe("r1", "MA", ["salt", "salt", "2 tsp salt"])]
    assert top_ingredients(recipes, 5) == [("salt", 1)]
