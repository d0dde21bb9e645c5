"""Batch recipe generation against an OpenAI-compatible completion API.

Reads a prompt file (line-delimited JSON, as emitted by the analysis
package), posts each rendered prompt to ``{endpoint}/v1/completions`` with
deterministic decoding (temperature 0, repetition penalty 1.4), and writes
corpus-format recipe records. Requests run on a bounded worker pool but
results are written in prompt order, so output files are reproducible.

Connection-level failures retry with exponential backoff and then abort the
job, listing every prompt that was not completed; per-completion parse
failures are isolated into a failures file and the run continues.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
import requests

from .parse import CompletionParseError, parse_completion

API_KEY_ENV = "MODELBRIDGE_API_KEY"

TEMPERATURE = 0.0
REPETITION_PENALTY = 1.4


@dataclass(frozen=True)
class GenerationJob:
    prompts_path: str
    endpoint: str  # base URL of an OpenAI-compatible server
    model_name: str
    output_path: str
    failures_path: str | None = None
    max_tokens: int = 768
    max_workers: int = 4
    retries: int = 3
    backoff: float = 1.0  # seconds, doubled per retry
    timeout: float = 120.0
    temperature: float = TEMPERATURE
    repetition_penalty: float = REPETITION_PENALTY


@dataclass
class GenerationReport:
    n_prompts: int = 0
    n_recipes: int = 0
    n_parse_failures: int = 0


class JobFailure(RuntimeError):
    """Endpoint gave up after retries; carries the unprocessed prompt ids."""

    def __init__(self, message: str, unprocessed: list[str]):
        super().__init__(f"{message}; {len(unprocessed)} prompts unprocessed")
        self.unprocessed = unprocessed


def read_prompts(path) -> list[dict]:
    prompts = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            for fld in ("prompt_id", "dish_id", "dish_name", "country",
                        "keyword", "template_id", "rendered_text"):
                if fld not in obj:
                    raise ValueError(f"prompt line {line_no} missing {fld!r}")
            prompts.append(obj)
    return prompts


def _complete(session: requests.Session, job: GenerationJob, prompt: dict,
              abort) -> str:
    url = job.endpoint.rstrip("/") + "/v1/completions"
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(API_KEY_ENV)
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    payload = {
        "model": job.model_name,
        "prompt": prompt["rendered_text"],
        "temperature": job.temperature,
        "repetition_penalty": job.repetition_penalty,
        "max_tokens": job.max_tokens,
    }
    delay = job.backoff
    last_error = None
    for attempt in range(job.retries + 1):
        if abort.is_set():
            raise ConnectionError("aborted: endpoint already reported dead")
        try:
            resp = session.post(url, json=payload, headers=headers,
                                timeout=job.timeout)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["text"]
        except (requests.ConnectionError, requests.Timeout,
                requests.HTTPError) as exc:
            last_error = exc
            if attempt < job.retries:
                time.sleep(delay)
                delay *= 2
    abort.set()
    raise ConnectionError(f"endpoint unreachable: {last_error}")


def _recipe_record(prompt: dict, parsed, model_name: str) -> dict:
    return {
        "recipe_id": f"{model_name}:{prompt['prompt_id']}",
        "dish_id": prompt["dish_id"],
        "dish_name": prompt["dish_name"],
        "country": prompt["country"],
        "source": "ModelGenerated",
        "model_name": model_name,
        "keyword": prompt.get("keyword", ""),
        "template_id": prompt.get("template_id", ""),
        "title": parsed.title,
        "ingredients": list(parsed.ingredients),
        "instructions": parsed.instructions,
    }


def generate(job: GenerationJob) -> GenerationReport:
    """Run the whole prompt file through the endpoint.

    Writes corpus-format records to ``output_path`` and parse failures (with
    the raw completion attached) to ``failures_path``. One output record per
    prompt, successes and failures combined.
    """
    prompts = read_prompts(job.prompts_path)
    report = GenerationReport(n_prompts=len(prompts))
    failures_path = job.failures_path or str(
        Path(job.output_path).with_suffix(".failures.jsonl"))

    session = requests.Session()
    abort = threading.Event()

    def work(index_prompt):
        index, prompt = index_prompt
        try:
            completion = _complete(session, job, prompt, abort)
            return index, prompt, completion, None
        except ConnectionError as exc:
            return index, prompt, None, exc

    with ThreadPoolExecutor(max_workers=job.max_workers) as pool:
        outcomes = list(pool.map(work, enumerate(prompts)))

    if abort.is_set():
        unprocessed = [prompt["prompt_id"]
                       for _, prompt, completion, exc in outcomes
                       if exc is not None]
        raise JobFailure("endpoint unreachable after retries",
                         sorted(unprocessed))

    with open(job.output_path, "w", encoding="utf-8") as out_fh, \
            open(failures_path, "w", encoding="utf-8") as fail_fh:
        for _, prompt, completion, _ in sorted(outcomes, key=lambda t: t[0]):
            try:
                parsed = parse_completion(completion)
            except CompletionParseError as exc:
                report.n_parse_failures += 1
                fail_fh.write(json.dumps({
                    "prompt_id": prompt["prompt_id"],
                    "error": exc.reason,
                    "raw_completion": completion,
                }, sort_keys=True) + "\n")
                continue
            record = _recipe_record(prompt, parsed, job.model_name)
            out_fh.write(json.dumps(record, sort_keys=True) + "\n")
            report.n_recipes += 1
    return report
