import math
import random

import pytest
import oracles
from recipediv.corpus import load_corpus
from recipediv.distances import (CountryCoordinates,
                                 Dimension, DistanceTable, DistanceTableError,
                                 correlate, cultural_distance,
                                 geographic_distance, haversine_km,
                                 load_coordinates, load_distance_table,
                                 pearson, student_t_sf, welch_t_test)
from recipediv.novelty import MetricRecord


def _record(dish_id, country, value, source="HumanVariation", model=None,
            degenerate=False, recipe_id=None):
    return MetricRecord(
        recipe_id=recipe_id or f"{dish_id}-{country}-{value}",
        dish_id=dish_id, variation_country=country, source=source,
        model_name=model, keyword=None, template_id=None,
        newness=value, appearance=value, disappearance=value,
        uniqueness=value, difference=value, new_surprise=value,
        divergent_surprise=value, thresholds_degenerate=degenerate)


# ---------------------------------------------------------------------------
# distance construction
# ---------------------------------------------------------------------------

def test_cultural_distance_trivial():
    coords = CountryCoordinates(points={"AA": (1.0, 2.0), "BB": (1.0, 2.0)},
                                kind="cultural")
    table = cultural_distance(coords)
    assert table.get("AA", "BB") == 0.0
    assert table.get("AA", "AA") == 0.0


def test_cultural_distance_345():
    coords = CountryCoordinates(points={"AA": (0.0, 0.0), "BB": (3.0, 4.0)},
                                kind="cultural")
    assert cultural_distance(coords).get("AA", "BB") == 5.0


def test_cultural_distance_ten_country_fixture():
    rng = random.Random(5)
    points = {f"C{i}": (rng.uniform(-2, 2), rng.uniform(-2, 2)) for i in range(10)}
    table = cultural_distance(CountryCoordinates(points=points, kind="cultural"))
    isos = sorted(points)
    for i, a in enumerate(isos):
        for b in isos[i + 1:]:
            assert table.get(a, b) == pytest.approx(
                oracles.euclid_oracle(points[a], points[b]), abs=1e-12)
            assert table.get(a, b) == table.get(b, a)


def test_geographic_distance_same_centroid():
    coords = CountryCoordinates(points={"AA": (10.0, 20.0), "BB": (10.0, 20.0)},
                                kind="geographic")
    assert geographic_distance(coords).get("AA", "BB") == 0.0


def test_geographic_distance_antipodal():
    assert haversine_km(0.0, 0.0, 0.0, 180.0) == pytest.approx(
        math.pi * 6371.0, abs=1e-6)


def test_haversine_five_pair_fixture():
    # frozen from the arbitrary-precision haversine oracle
    cases = [
        ((48.8566, 2.3522), (40.7128, -74.0060), 5837.240903825839),
        ((35.6762, 139.6503), (-33.8688, 151.2093), 7825.818616516157),
        ((0.0, 0.0), (0.0, 180.0), 20015.086796020572),
        ((55.7558, 37.6173), (19.4326, -99.1332), 10719.394260780999),
        ((-1.2921, 36.8219), (6.5244, 3.3792), 3812.1553753904973),
    ]
    for (a, b, expected) in cases:
        assert haversine_km(a[0], a[1], b[0], b[1]) == pytest.approx(
            expected, abs=1e-6)


def test_coordinate_validation():
    with pytest.raises(DistanceTableError):
        CountryCoordinates(points={"AA": (95.0, 0.0)}, kind="geographic")


def test_load_distance_table_symmetrizes(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("iso_a,iso_b,distance\nAA,BB,2.5\nBB,AA,2.5\nCC,AA,1.0\n")
    table = load_distance_table(path, Dimension.LINGUISTIC)
    assert table.get("AA", "BB") == 2.5
    assert table.get("AA", "CC") == 1.0


def test_load_distance_table_conflict(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("iso_a,iso_b,distance\nAA,BB,2.5\nBB,AA,3.0\n")
    with pytest.raises(DistanceTableError, match="AA-BB"):
        load_distance_table(path, Dimension.RELIGIOUS)


def test_load_coordinates(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("iso,x,y\nMA,1.5,-0.5\nJM,0.0,0.25\n")
    coords = load_coordinates(path, "cultural")
    assert coords.points == {"MA": (1.5, -0.5), "JM": (0.0, 0.25)}


# ---------------------------------------------------------------------------
# pearson / student-t / welch
# ---------------------------------------------------------------------------

def test_pearson_perfect_line():
    xs = [float(i) for i in range(10)]
    ys = [2.0 * x + 1.0 for x in xs]
    r, p, flag = pearson(xs, ys)
    assert flag == "ok"
    assert r == pytest.approx(1.0, abs=1e-12)
    assert p == pytest.approx(0.0, abs=1e-12)


def test_pearson_constant_y_flagged():
    xs = [1.0, 2.0, 3.0, 4.0]
    ys = [5.0, 5.0, 5.0, 5.0]
    r, p, flag = pearson(xs, ys)
    assert flag == "undefined_r"
    assert r is None and p is None


def test_pearson_ten_point_fixture_matches_integration_oracle():
    # frozen from the direct-formula + numeric t-CDF integration oracle
    xs = [6.394267984578837, 0.25010755222666936, 2.7502931836911926,
          2.2321073814882277, 7.364712141640124, 6.766994874229113,
          8.921795677048454, 0.8693883262941615, 4.2192181968527045,
          0.29797219438070344]
    ys = [4.940583063018628, 2.5021926597569544, 3.2384782421811726,
          1.7834895219294233, 3.678655294458445, 2.7075716769849443,
          6.737941364356322, 3.2307334828140095, 3.0367664656036606,
          -0.004066051475076132]
    r, p, flag = pearson(xs, ys)
    assert flag == "ok"
    assert r == pytest.approx(0.7535811941861392, abs=1e-12)
    assert p == pytest.approx(0.011833867674674967, abs=1e-9)


@pytest.mark.parametrize("n", [5, 10, 30])
def test_pearson_p_matches_integration_oracle(n):
    rng = random.Random(1000 + n)
    xs = [rng.uniform(0, 1) for _ in range(n)]
    ys = [0.4 * x + rng.gauss(0, 0.3) for x in xs]
    r, p, flag = pearson(xs, ys)
    r_o, p_o = oracles.pearson_oracle(xs, ys)
    assert flag == "ok"
    assert r == pytest.approx(r_o, abs=1e-12)
    assert p == pytest.approx(p_o, abs=1e-6)


def test_student_t_textbook_quantiles():
    # 97.5th percentile quantiles; CDF values recovered via the
    # numeric-integration oracle agree to the quantile's print precision
    for df, q in [(1, 12.706), (2, 4.303), (5, 2.571), (10, 2.228), (30, 2.042)]:
        cdf = 1.0 - student_t_sf(q, df)
        assert cdf == pytest.approx(0.975, abs=1e-4)
        assert cdf == pytest.approx(1.0 - oracles.student_t_sf_oracle(q, df),
                                    abs=1e-9)


def test_welch_identical_groups():
    xs = [0.1, 0.2, 0.3, 0.4]
    t, p = welch_t_test(xs, list(xs))
    assert t == 0.0
    assert p == pytest.approx(1.0, abs=1e-12)


def test_welch_thirty_sample_fixture():
    rng = random.Random(7)
    g1 = [rng.gauss(0.55, 0.08) for _ in range(30)]
    g2 = [rng.gauss(0.50, 0.10) for _ in range(30)]
    t, p = welch_t_test(g1, g2)
    # frozen from the direct-formula + integration oracle
    assert t == pytest.approx(3.1213227128250502, abs=1e-12)
    assert p == pytest.approx(0.002870726093340426, abs=1e-9)


# ---------------------------------------------------------------------------
# correlate
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def small_corpus(request):
    fixtures = request.config.rootpath / "tests" / "fixtures"
    return load_corpus(fixtures / "corpus_3x4x2.jsonl")


def _table_for(corpus, distance_fn):
    entries = {}
    for dish in corpus.dishes.values():
        for country in dish.variations:
            a, b = sorted((dish.origin_country, country))
            if a != b:
                entries[(a, b)] = distance_fn(a, b)
    return DistanceTable(dimension=Dimension.CULTURAL, entries=entries)


def test_correlate_perfect_linearity(small_corpus):
    # metric value = 2 * distance + 1 exactly, one record per cell
    dist_of = {}
    counter = iter(range(1, 100))
    table = _table_for(small_corpus, lambda a, b: float(next(counter)))
    records = []
    for dish in small_corpus.dishes.values():
        for country in dish.variations:
            d = table.get(dish.origin_country, country)
            records.append(_record(dish.dish_id, country, 2.0 * d + 1.0))
            dist_of[(dish.dish_id, country)] = d
    report = correlate(records, small_corpus, table, group_by="pooled")
    for res in report.results:
        assert res.flag == "ok"
        assert res.r == pytest.approx(1.0, abs=1e-12)
        assert res.p_value == pytest.approx(0.0, abs=1e-12)
        assert res.n == len(dist_of)


def test_correlate_constant_metric_flagged(small_corpus):
    table = _table_for(small_corpus, lambda a, b: 1.0 + (hash((a, b)) % 7))
    records = []
    for dish in small_corpus.dishes.values():
        for country in dish.variations:
            records.append(_record(dish.dish_id, country, 0.25))
    report = correlate(records, small_corpus, table, group_by="pooled")
    assert all(res.flag == "undefined_r" for res in report.results)


def test_correlate_excludes_degenerate_records(small_corpus):
    table = _table_for(small_corpus, lambda a, b: 1.0)
    records = [_record("d1", "JM", 0.5),
               _record("d1", "FR", 0.7, degenerate=True)]
    report = correlate(records, small_corpus, table, group_by="pooled")
    assert all(res.n == 1 for res in report.results)


def test_correlate_aggregates_cells_by_mean(small_corpus):
    table = _table_for(small_corpus, lambda a, b: 2.0)
    records = [_record("d1", "JM", 0.2, recipe_id="x1"),
               _record("d1", "JM", 0.4, recipe_id="x2"),
               _record("d1", "FR", 0.9, recipe_id="x3")]
    report = correlate(records, small_corpus, table, group_by="pooled",
                       metrics=("uniqueness",))
    res = report.results[0]
    assert res.n == 2  # two cells, the JM one averaged to 0.3


def test_correlate_drops_uncovered_pairs(small_corpus):
    table = DistanceTable(dimension=Dimension.CULTURAL,
                          entries={("JM", "MA"): 3.0})
    records = [_record("d1", "JM", 0.5), _record("d1", "FR", 0.7)]
    report = correlate(records, small_corpus, table, group_by="pooled",
                       metrics=("uniqueness",))
    assert report.n_dropped_cells == 1
    assert "FR" in report.uncovered_countries


def test_correlate_order_and_affine_invariance(small_corpus):
    rng = random.Random(3)
    table = _table_for(small_corpus, lambda a, b: rng.uniform(1, 9))
    records = []
    for dish in small_corpus.dishes.values():
        for country in dish.variations:
            d = table.get(dish.origin_country, country)
            records.append(_record(dish.dish_id, country,
                                   0.3 * d + rng.gauss(0, 0.2)))
    base = correlate(records, small_corpus, table, group_by="pooled")
    shuffled = list(records)
    rng.shuffle(shuffled)
    assert correlate(shuffled, small_corpus, table, group_by="pooled") \
        .results == base.results
    scaled = DistanceTable(dimension=Dimension.CULTURAL, entries={
        k: 4.0 * v + 7.0 for k, v in table.entries.items()})
    rescaled = correlate(records, small_corpus, scaled, group_by="pooled")
    for res_a, res_b in zip(base.results, rescaled.results):
        assert res_a.r == pytest.approx(res_b.r, abs=1e-12)


def test_correlate_group_by_model(small_corpus):
    table = _table_for(small_corpus, lambda a, b: 1.0 + len(a))
    records = [
        _record("d1", "JM", 0.5, source="ModelGenerated", model="m1",
                recipe_id="g1"),
        _record("d1", "FR", 0.6, source="ModelGenerated", model="m1",
                recipe_id="g2"),
        _record("d1", "JM", 0.7, recipe_id="h1"),
    ]
    report = correlate(records, small_corpus, table, group_by="model",
                       metrics=("uniqueness",))
    groups = {res.group for res in report.results}
    assert groups == {"human", "m1"}
