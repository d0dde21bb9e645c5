import json

import pytest

torch = pytest.importorskip("torch")
transformers = pytest.importorskip("transformers")

from modelbridge.layers import (LAYER_TAGS, UnsupportedModelError,
                                export_layers, final_layer_overlap)

VOCAB_WORDS = [
    "[UNK]", "island", "couscous", "boil", "the", "water", "with", "allspice",
    "add", "and", "pepper", "then", "rest", "five", "minutes", "salt",
    "steam", "cup", "1", "2", ".", ",", "-", ":", "scotch", "bonnet",
    "jerk", "title", "ingredients", "instructions",
]


def _build_copier_model(tmp_path):
    """A tiny causal LM whose blocks contribute nothing to the residual
    stream, so the logit lens decodes the input token at every layer."""
    from tokenizers import Tokenizer, models, pre_tokenizers
    from transformers import GPT2Config, GPT2LMHeadModel, PreTrainedTokenizerFast

    vocab = {w: i for i, w in enumerate(VOCAB_WORDS)}
    tok = Tokenizer(models.WordLevel(vocab=vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    fast = PreTrainedTokenizerFast(tokenizer_object=tok, unk_token="[UNK]")

    torch.manual_seed(1234)
    config = GPT2Config(vocab_size=len(vocab), n_positions=128, n_embd=64,
                        n_layer=6, n_head=4)
    model = GPT2LMHeadModel(config)
    with torch.no_grad():
        model.transformer.wpe.weight.zero_()
        for block in model.transformer.h:
            block.attn.c_proj.weight.zero_()
            block.attn.c_proj.bias.zero_()
            block.mlp.c_proj.weight.zero_()
            block.mlp.c_proj.bias.zero_()

    model_dir = tmp_path / "tiny-copier"
    model.save_pretrained(model_dir)
    fast.save_pretrained(model_dir)
    return str(model_dir)


def _write_corpus(path):
    rows = [
        {"recipe_id": "g1", "dish_id": "d1", "dish_name": "Couscous",
         "country": "JM", "source": "ModelGenerated", "model_name": "m",
         "title": "island couscous",
         "ingredients": ["1 cup couscous", "2 allspice"],
         "instructions": "boil the water with allspice . add couscous and rest ."},
        {"recipe_id": "g2", "dish_id": "d1", "dish_name": "Couscous",
         "country": "JM", "source": "HumanReference", "model_name": None,
         "title": "couscous",
         "ingredients": ["couscous", "salt"],
         "instructions": "steam the couscous with salt and rest five minutes ."},
    ]
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return [r["recipe_id"] for r in rows]


def test_export_layers_schema_and_tags(tmp_path):
    model_dir = _build_copier_model(tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    recipe_ids = _write_corpus(corpus)
    out = tmp_path / "layers.jsonl"

    n = export_layers(corpus, model_dir, out)
    assert n == len(recipe_ids) * 5

    records = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(records) == n
    for rec in records:
        assert set(rec) == {"model_name", "recipe_id", "layer_tag", "tokens"}
        assert rec["layer_tag"] in LAYER_TAGS
        assert rec["model_name"] == model_dir
        assert rec["recipe_id"] in recipe_ids
        assert isinstance(rec["tokens"], list) and rec["tokens"]
        assert all(isinstance(t, str) for t in rec["tokens"])
    # all five depths present for every recipe
    for rid in recipe_ids:
        tags = {r["layer_tag"] for r in records if r["recipe_id"] == rid}
        assert tags == set(LAYER_TAGS)


def test_final_layer_overlap_smoke(tmp_path):
    model_dir = _build_copier_model(tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus)
    out = tmp_path / "layers.jsonl"
    export_layers(corpus, model_dir, out)
    overlap = final_layer_overlap(corpus, out, model_dir)
    assert overlap > 0.5


def test_export_layers_deterministic(tmp_path):
    model_dir = _build_copier_model(tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus)
    out1 = tmp_path / "a.jsonl"
    out2 = tmp_path / "b.jsonl"
    export_layers(corpus, model_dir, out1)
    export_layers(corpus, model_dir, out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_instructions_only_span(tmp_path):
    model_dir = _build_copier_model(tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus)
    full = tmp_path / "full.jsonl"
    span = tmp_path / "span.jsonl"
    export_layers(corpus, model_dir, full)
    export_layers(corpus, model_dir, span, instructions_only=True)
    full_first = json.loads(full.read_text().splitlines()[0])
    span_first = json.loads(span.read_text().splitlines()[0])
    assert len(span_first["tokens"]) < len(full_first["tokens"])


def test_too_shallow_model_rejected(tmp_path):
    from transformers import GPT2Config, GPT2LMHeadModel
    from tokenizers import Tokenizer, models, pre_tokenizers
    from transformers import PreTrainedTokenizerFast

    vocab = {w: i for i, w in enumerate(VOCAB_WORDS)}
    tok = Tokenizer(models.WordLevel(vocab=vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    fast = PreTrainedTokenizerFast(tokenizer_object=tok, unk_token="[UNK]")
    model = GPT2LMHeadModel(GPT2Config(vocab_size=len(vocab), n_positions=64,
                                       n_embd=32, n_layer=2, n_head=2))
    model_dir = tmp_path / "shallow"
    model.save_pretrained(model_dir)
    fast.save_pretrained(model_dir)
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus)
    with pytest.raises(UnsupportedModelError, match="layers"):
        export_layers(corpus, str(model_dir), tmp_path / "out.jsonl")


def test_hub_tiny_model_when_downloadable(tmp_path):
    """The public-hub path: runs only when the model can actually be fetched."""
    from transformers import AutoTokenizer
    model_id = "sshleifer/tiny-gpt2"
    try:
        AutoTokenizer.from_pretrained(model_id)
    except Exception:
        pytest.skip("model hub not reachable in this environment")
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus)
    out = tmp_path / "layers.jsonl"
    n = export_layers(corpus, model_id, out)
    assert n == 10
