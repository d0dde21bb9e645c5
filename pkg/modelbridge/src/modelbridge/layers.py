"""Logit-lens layer export.

Re-encodes recipe texts with a causal LM, projects the hidden states of five
representative depths (embedding, middle, last three blocks) through the
model's output head, and emits the per-position argmax tokens as layer
records consumed by the analysis package's ``layers`` command.

torch/transformers are imported lazily so the generation half of this
package works without them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

LAYER_TAGS = ("Embedding", "Middle", "Lm3", "Lm2", "Lm1")


class UnsupportedModelError(RuntimeError):
    pass


@dataclass(frozen=True)
class RecipeText:
    recipe_id: str
    text: str


def read_corpus_texts(path, instructions_only: bool = False) -> list[RecipeText]:
    """Texts from a corpus-format recipe file (whole recipe by default)."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if instructions_only:
                text = obj["instructions"]
            else:
                parts = [obj.get("title", ""), *obj.get("ingredients", []),
                         obj.get("instructions", "")]
                text = "\n".join(p for p in parts if p)
            out.append(RecipeText(recipe_id=obj["recipe_id"], text=text))
    return out


def _layer_indices(n_layers: int) -> dict[str, int]:
    """Hidden-state indices for the five tags; index 0 is the embedding
    output, index n is the output of block n."""
    if n_layers < 3:
        raise UnsupportedModelError(
            f"need at least 3 transformer layers, model has {n_layers}")
    return {
        "Embedding": 0,
        "Middle": n_layers // 2,
        "Lm3": n_layers - 2,
        "Lm2": n_layers - 1,
        "Lm1": n_layers,
    }


def _final_norm(model):
    """Locate the pre-head normalization module across common architectures."""
    for path in ("transformer.ln_f", "model.norm", "gpt_neox.final_layer_norm",
                 "model.final_layernorm"):
        obj = model
        found = True
        for attr in path.split("."):
            if not hasattr(obj, attr):
                found = False
                break
            obj = getattr(obj, attr)
        if found:
            return obj
    return None


def export_layers(corpus_path, model_id: str, output_path,
                  layer_tags: Sequence[str] = LAYER_TAGS,
                  instructions_only: bool = False,
                  device: str = "cpu", max_positions: int | None = None) -> int:
    """Write layer records for every recipe in the corpus file.

    ``model_id`` is anything transformers can load (hub id or local path).
    Returns the number of records written.
    """
    try:
        import torch
        from transformers import AutoModelForCausalLM, AutoTokenizer
    except ImportError as exc:  # pragma: no cover
        raise UnsupportedModelError(
            "layer export needs the [layers] extra (torch + transformers)"
        ) from exc

    for tag in layer_tags:
        if tag not in LAYER_TAGS:
            raise ValueError(f"unknown layer tag {tag!r}")

    tokenizer = AutoTokenizer.from_pretrained(model_id)
    model = AutoModelForCausalLM.from_pretrained(model_id,
                                                 output_hidden_states=True)
    model.to(device)
    model.eval()
    head = model.get_output_embeddings()
    if head is None:
        raise UnsupportedModelError("model exposes no output head")
    norm = _final_norm(model)

    texts = read_corpus_texts(corpus_path, instructions_only)
    n_written = 0
    with open(output_path, "w", encoding="utf-8") as fh, torch.no_grad():
        for item in texts:
            encoded = tokenizer(item.text, return_tensors="pt",
                                truncation=max_positions is not None,
                                max_length=max_positions)
            input_ids = encoded["input_ids"].to(device)
            outputs = model(input_ids)
            hidden = outputs.hidden_states
            if hidden is None:
                raise UnsupportedModelError("model returned no hidden states")
            indices = _layer_indices(len(hidden) - 1)
            for tag in layer_tags:
                h = hidden[indices[tag]]
                if norm is not None:
                    h = norm(h)
                logits = head(h)
                ids = logits.argmax(dim=-1)[0].tolist()
                tokens = tokenizer.convert_ids_to_tokens(ids)
                fh.write(json.dumps({
                    "model_name": str(model_id),
                    "recipe_id": item.recipe_id,
                    "layer_tag": tag,
                    "tokens": tokens,
                }, sort_keys=True) + "\n")
                n_written += 1
    return n_written


def final_layer_overlap(corpus_path, layers_path, model_id: str,
                        tokenizer=None) -> float:
    """Token overlap between each text's own tokens and its final-layer
    decoded stream, averaged over recipes. Sanity metric for well-behaved
    models (expected > 0.5 under teacher forcing)."""
    try:
        from transformers import AutoTokenizer
    except ImportError as exc:  # pragma: no cover
        raise UnsupportedModelError(
            "overlap check needs the [layers] extra") from exc
    tokenizer = tokenizer or AutoTokenizer.from_pretrained(model_id)
    texts = {t.recipe_id: t.text for t in read_corpus_texts(corpus_path)}
    scores = []
    with open(layers_path, "r", encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            if obj["layer_tag"] != "Lm1" or obj["model_name"] != str(model_id):
                continue
            reference = tokenizer.convert_ids_to_tokens(
                tokenizer(texts[obj["recipe_id"]])["input_ids"])
            decoded = obj["tokens"]
            if not reference:
                continue
            hits = sum(1 for a, b in zip(reference, decoded) if a == b)
            scores.append(hits / len(reference))
    if not scores:
        raise ValueError("no final-layer records found")
    return sum(scores) / len(scores)
