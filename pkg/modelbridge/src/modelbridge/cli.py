"""Command-line entry points: generate, export-layers."""

from __future__ import annotations

import argparse
import sys

from .generate import GenerationJob, JobFailure, generate
from .layers import LAYER_TAGS, export_layers


def cmd_generate(args) -> int:
    job = GenerationJob(
        prompts_path=args.prompts,
        endpoint=args.endpoint,
        model_name=args.model,
        output_path=args.out,
        failures_path=args.failures,
        max_tokens=args.max_tokens,
        max_workers=args.max_workers,
        retries=args.retries,
        backoff=args.backoff,
    )
    try:
        report = generate(job)
    except JobFailure as exc:
        print(f"job failed: {exc}", file=sys.stderr)
        for prompt_id in exc.unprocessed:
            print(f"  unprocessed: {prompt_id}", file=sys.stderr)
        return 1
    print(f"{report.n_prompts} prompts -> {report.n_recipes} recipes, "
          f"{report.n_parse_failures} parse failures")
    return 0


def cmd_export_layers(args) -> int:
    n = export_layers(
        corpus_path=args.corpus,
        model_id=args.model,
        output_path=args.out,
        layer_tags=args.layers,
        instructions_only=args.instructions_only,
        device=args.device,
        max_positions=args.max_positions,
    )
    print(f"{n} layer records written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelbridge",
        description="Recipe generation driver and logit-lens layer exporter")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="run a prompt file against an endpoint")
    p.add_argument("--prompts", required=True, help="prompt JSONL file")
    p.add_argument("--endpoint", required=True,
                   help="base URL of an OpenAI-compatible server")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="recipe output (corpus format)")
    p.add_argument("--failures", help="parse-failure JSONL (default: <out>.failures.jsonl)")
    p.add_argument("--max-tokens", type=int, default=768)
    p.add_argument("--max-workers", type=int, default=4)
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--backoff", type=float, default=1.0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("export-layers",
                       help="logit-lens token streams for five layers")
    p.add_argument("--corpus", required=True, help="corpus-format recipe file")
    p.add_argument("--model", required=True, help="hub id or local model path")
    p.add_argument("--out", required=True, help="layer-record JSONL output")
    p.add_argument("--layers", nargs="+", default=list(LAYER_TAGS),
                   choices=list(LAYER_TAGS))
    p.add_argument("--instructions-only", action="store_true",
                   help="encode only the instructions span")
    p.add_argument("--device", default="cpu")
    p.add_argument("--max-positions", type=int, default=None)
    p.set_defaults(func=cmd_export_layers)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
