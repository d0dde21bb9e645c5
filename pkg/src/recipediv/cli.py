"""Command-line interface.

Subcommands: ingest, prompts, score, quality, correlate, ingredients,
attribution, mismatch, increase, keywords, layers, report. All outputs are
CSV or line-delimited JSON; schemas are documented in formats.md.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import distances, ingredients, pipeline, quality
from .config import Config
from .corpus import Corpus, CountryLexicon, Source, load_corpus, serialize_corpus
from .distances import Dimension


def _load_config(args) -> Config:
    if getattr(args, "config", None):
        cfg = Config.from_file(args.config)
    else:
        cfg = Config()
    if getattr(args, "jobs", None):
        from dataclasses import replace
        cfg = replace(cfg, jobs=args.jobs)
    return cfg


def _load(args) -> Corpus:
    lexicon = CountryLexicon.from_csv(args.lexicon) if args.lexicon else None
    return load_corpus(args.corpus, lexicon)


def _add_common(p: argparse.ArgumentParser, corpus: bool = True) -> None:
    if corpus:
        p.add_argument("corpus", help="corpus file (line-delimited JSON)")
        p.add_argument("--lexicon", help="country lexicon CSV (default: bundled)")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    p.add_argument("--seed", type=int, default=None,
                   help="reserved for fixture tooling; the pipeline itself is deterministic")


def cmd_ingest(args) -> int:
    corpus = _load(args)
    n_recipes = sum(1 for _ in corpus.all_recipes())
    print(f"dishes: {len(corpus)}")
    print(f"recipes: {n_recipes}")
    print(f"lines read: {corpus.report.n_lines}, loaded: {corpus.report.n_loaded}")
    for issue in corpus.report.issues:
        print(f"  line {issue.line_no} [{issue.kind}] {issue.recipe_id}: {issue.detail}")
    if args.out:
        serialize_corpus(corpus, args.out)
        print(f"normalized corpus written to {args.out}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump({
                "n_lines": corpus.report.n_lines,
                "n_loaded": corpus.report.n_loaded,
                "issues": [{"line_no": i.line_no, "recipe_id": i.recipe_id,
                            "kind": i.kind, "detail": i.detail}
                           for i in corpus.report.issues],
            }, fh, indent=2)
    return 0


def cmd_prompts(args) -> int:
    corpus = _load(args)
    specs = pipeline.emit_prompts(corpus)
    pipeline.write_prompts(specs, args.out)
    print(f"{len(specs)} prompts written to {args.out}")
    return 0


def cmd_score(args) -> int:
    cfg = _load_config(args)
    corpus = _load(args)
    report = pipeline.score_corpus(corpus, args.out, config=cfg,
                                   jobs=cfg.jobs, manifest_path=args.manifest)
    print(f"scored {report.n_records} recipes over {report.n_dishes} dishes")
    for rid, reason in report.skipped:
        print(f"  skipped {rid}: {reason}")
    return 0


def cmd_quality(args) -> int:
    cfg = _load_config(args)
    corpus = _load(args)
    qcfg = quality.QualityConfig(too_short_tokens=cfg.too_short_tokens,
                                 repetition_run=cfg.repetition_run,
                                 english_threshold=cfg.english_threshold)
    reports = quality.quality_stats(corpus.all_recipes(), qcfg)
    quality.write_quality_csv(reports, args.out)
    print(f"quality report ({len(reports)} groups) written to {args.out}")
    return 0


def _load_table(args) -> distances.DistanceTable:
    dim = Dimension(args.dimension)
    if args.distances:
        return distances.load_distance_table(args.distances, dim)
    if args.coordinates:
        kind = "geographic" if dim is Dimension.GEOGRAPHIC else "cultural"
        coords = distances.load_coordinates(args.coordinates, kind)
        if dim is Dimension.GEOGRAPHIC:
            return distances.geographic_distance(coords)
        return distances.cultural_distance(coords)
    raise SystemExit("correlate needs --distances or --coordinates")


def cmd_correlate(args) -> int:
    cfg = _load_config(args)
    corpus = _load(args)
    records = pipeline.read_metric_records(args.records)
    table = _load_table(args)
    report = distances.correlate(records, corpus, table,
                                 group_by=args.group_by or cfg.group_by,
                                 aggregate=cfg.aggregate)
    distances.write_correlation_csv(report, args.out)
    print(f"{len(report.results)} correlations written to {args.out}"
          f" ({report.n_dropped_cells}/{report.n_cells} cells dropped;"
          f" uncovered: {sorted(report.uncovered_countries) or 'none'})")
    return 0


def cmd_ingredients(args) -> int:
    corpus = _load(args)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model_name", "region", "n", "overlap_pct", "preservation_pct"])
        cells: dict[tuple[str, str], list[tuple[float, float]]] = {}
        for dish_id in sorted(corpus.dishes):
            dish = corpus.dishes[dish_id]
            for country in sorted(dish.variations):
                for r in dish.variations[country]:
                    res = ingredients.overlap_and_preservation(dish, r)
                    if res.undefined:
                        continue
                    model = (r.model_name or "unknown-model"
                             if r.source is Source.MODEL_GENERATED else "human")
                    c = corpus.lexicon.get(r.country)
                    region = c.region.value if c else "unknown"
                    cells.setdefault((model, region), []).append(
                        (res.overlap, res.preservation))
        import math
        for (model, region) in sorted(cells):
            vals = cells[(model, region)]
            writer.writerow([
                model, region, len(vals),
                repr(100.0 * math.fsum(v[0] for v in vals) / len(vals)),
                repr(100.0 * math.fsum(v[1] for v in vals) / len(vals)),
            ])
    if args.top_k:
        top = ingredients.top_ingredients(list(corpus.all_recipes()), args.top_k)
        top_path = Path(args.out).with_suffix(".top.csv")
        with open(top_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["ingredient", "recipe_count"])
            writer.writerows(top)
        print(f"top-{args.top_k} table written to {top_path}")
    print(f"overlap/preservation written to {args.out}")
    return 0


def cmd_attribution(args) -> int:
    corpus = _load(args)
    profiles = ingredients.country_profiles(corpus)
    counts: dict[tuple[str, str], int] = {}
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["recipe_id", "group", "declared_country",
                         "best_match_country", "best_similarity", "match_class"])
        for dish_id in sorted(corpus.dishes):
            dish = corpus.dishes[dish_id]
            for country in sorted(dish.variations):
                for r in dish.variations[country]:
                    rec = ingredients.attribute(r, profiles, dish,
                                                lexicon=corpus.lexicon)
                    group = (r.model_name or "unknown-model"
                             if r.source is Source.MODEL_GENERATED else "human")
                    counts[(group, rec.match_class.value)] = counts.get(
                        (group, rec.match_class.value), 0) + 1
                    writer.writerow([rec.recipe_id, group, rec.declared_country,
                                     rec.best_match_country or "",
                                     repr(rec.best_similarity),
                                     rec.match_class.value])
    summary = Path(args.out).with_suffix(".summary.csv")
    groups = sorted({g for g, _ in counts})
    with open(summary, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "origin_pct", "variation_pct", "neither_pct", "n"])
        for g in groups:
            n = sum(counts.get((g, c), 0) for c in ("Origin", "Variation", "Neither"))
            row = [g]
            for c in ("Origin", "Variation", "Neither"):
                row.append(repr(100.0 * counts.get((g, c), 0) / n) if n else "")
            row.append(n)
            writer.writerow(row)
    print(f"attribution written to {args.out} (summary: {summary})")
    return 0


def cmd_mismatch(args) -> int:
    corpus = _load(args)
    report = ingredients.mismatch_report(corpus.all_recipes(), corpus)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model_name", "n_checked", "n_no_detection",
                         "n_mismatch", "mismatch_pct", "top_mismatched",
                         "region_pairs"])
        for key in sorted(report.per_model):
            stats = report.per_model[key]
            top = ";".join(f"{iso}:{n}" for iso, n in stats.top_mismatched())
            pairs = ";".join(f"{a}->{b}:{n}" for (a, b), n
                             in sorted(stats.region_pairs.items()))
            writer.writerow([stats.model_name, stats.n_checked,
                             stats.n_no_detection, stats.n_mismatch,
                             repr(stats.mismatch_pct), top, pairs])
    print(f"mismatch report written to {args.out}")
    return 0


def cmd_increase(args) -> int:
    corpus = _load(args)
    records = pipeline.read_metric_records(args.records)
    humans = [r for r in records if r.source != "ModelGenerated"]
    models = [r for r in records if r.source == "ModelGenerated"]
    mode = pipeline.IncreaseMode(args.mode)
    rates = pipeline.increase_rates(humans, models, mode, corpus)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model_name", "metric", "mode", "rate", "n_cells",
                         "n_zero_human"])
        for rate in rates:
            writer.writerow([rate.model_name, rate.metric, mode.value,
                             "" if rate.rate is None else repr(rate.rate),
                             rate.n_cells, rate.n_zero_human])
    print(f"increase rates written to {args.out}")
    return 0


def cmd_keywords(args) -> int:
    records = pipeline.read_metric_records(args.records)
    if args.per_keyword:
        cells = pipeline.keyword_table(records)
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model_name", "metric", "keyword", "mean", "n"])
            for c in cells:
                writer.writerow([c.model_name, c.metric, c.keyword,
                                 "" if c.mean is None else repr(c.mean), c.n])
    else:
        gaps = pipeline.keyword_report(records)
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model_name", "metric", "gap", "t_stat", "p_value",
                             "n_creative", "n_traditional"])
            for g in gaps:
                writer.writerow([g.model_name, g.metric,
                                 "" if g.gap is None else repr(g.gap),
                                 "" if g.t_stat is None else repr(g.t_stat),
                                 "" if g.p_value is None else repr(g.p_value),
                                 g.n_creative, g.n_traditional])
    print(f"keyword report written to {args.out}")
    return 0


def cmd_layers(args) -> int:
    cfg = _load_config(args)
    corpus = _load(args)
    records = pipeline.load_layer_records(args.layers)
    cells = pipeline.layer_gap_report(records, corpus, cfg)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model_name", "metric", "layer_tag", "derivation",
                         "gap", "n_origin", "n_variation", "incomplete"])
        for c in cells:
            writer.writerow([c.model_name, c.metric, c.layer_tag.value,
                             c.derivation,
                             "" if c.gap is None else repr(c.gap),
                             c.n_origin, c.n_variation,
                             "1" if c.incomplete else "0"])
    print(f"layer gap report written to {args.out}")
    return 0


def cmd_report(args) -> int:
    """Run quality + ingredient + attribution + mismatch (and, given scored
    records, increase/keyword reports) into one output directory."""
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    ns = argparse.Namespace(**vars(args))
    ns.out = str(outdir / "quality.csv")
    cmd_quality(ns)
    ns.out = str(outdir / "ingredients.csv")
    ns.top_k = 20
    cmd_ingredients(ns)
    ns.out = str(outdir / "attribution.csv")
    cmd_attribution(ns)
    ns.out = str(outdir / "mismatch.csv")
    cmd_mismatch(ns)
    if args.records:
        ns.records = args.records
        ns.out = str(outdir / "increase_origin.csv")
        ns.mode = "Origin"
        cmd_increase(ns)
        ns.out = str(outdir / "increase_variation.csv")
        ns.mode = "PairedVariation"
        cmd_increase(ns)
        ns.out = str(outdir / "keywords.csv")
        ns.per_keyword = False
        cmd_keywords(ns)
        ns.out = str(outdir / "keywords_detail.csv")
        ns.per_keyword = True
        cmd_keywords(ns)
    print(f"reports written to {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recipediv",
        description="Divergence analytics for paired human/LLM recipe corpora")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate a corpus file")
    _add_common(p)
    p.add_argument("--out", help="write the normalized corpus here")
    p.add_argument("--report", help="write the load report JSON here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("prompts", help="emit generation prompts")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_prompts)

    p = sub.add_parser("score", help="score every variation recipe")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", help="progress manifest for resumable runs")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("quality", help="generation-quality statistics")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_quality)

    p = sub.add_parser("correlate", help="metric vs cultural-distance correlations")
    _add_common(p)
    p.add_argument("--records", required=True, help="metric record CSV from 'score'")
    p.add_argument("--dimension", required=True,
                   choices=[d.value for d in Dimension])
    p.add_argument("--distances", help="distance table CSV (iso_a,iso_b,distance)")
    p.add_argument("--coordinates", help="coordinate CSV (iso,x,y or iso,lat,lon)")
    p.add_argument("--group-by", choices=["model", "pooled"], default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("ingredients", help="overlap/preservation and top-k tables")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--top-k", type=int, default=20)
    p.set_defaults(func=cmd_ingredients)

    p = sub.add_parser("attribution", help="TF-IDF cosine country attribution")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_attribution)

    p = sub.add_parser("mismatch", help="title country-mismatch report")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mismatch)

    p = sub.add_parser("increase", help="LLM-vs-human divergence increase rates")
    _add_common(p)
    p.add_argument("--records", required=True)
    p.add_argument("--mode", choices=["Origin", "PairedVariation"],
                   default="Origin")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_increase)

    p = sub.add_parser("keywords", help="traditional-vs-creative keyword gaps")
    p.add_argument("--records", required=True)
    p.add_argument("--per-keyword", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_keywords)

    p = sub.add_parser("layers", help="layer-wise divergence gaps")
    _add_common(p)
    p.add_argument("--layers", required=True, help="LayerRecord JSONL file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_layers)

    p = sub.add_parser("report", help="run the standard report bundle")
    _add_common(p)
    p.add_argument("--records", help="metric record CSV (enables increase/keywords)")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
