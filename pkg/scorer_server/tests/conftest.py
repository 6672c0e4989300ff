import json
import shutil
from pathlib import Path

import pytest
import torch
from fastapi.testclient import TestClient
from transformers import BertConfig, BertForMaskedLM

from scorer_server import MaskedLm, create_app
from support import TINY_DIM, TINY_LAYERS, VOCAB_FILE


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory) -> Path:
    """A tiny randomly initialized masked LM sharing the client fixture vocab."""
    target = tmp_path_factory.mktemp("tiny-model")
    shutil.copy(VOCAB_FILE, target / "vocab.txt")
    (target / "tokenizer_config.json").write_text(
        json.dumps({"tokenizer_class": "BertTokenizer", "do_lower_case": False})
    )
    vocab_size = len([line for line in VOCAB_FILE.read_text().splitlines() if line])
    config = BertConfig(
        vocab_size=vocab_size,
        hidden_size=TINY_DIM,
        num_hidden_layers=TINY_LAYERS,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=32,
    )
    torch.manual_seed(20260808)
    BertForMaskedLM(config).save_pretrained(target)
    return target


@pytest.fixture(scope="session")
def model(model_dir) -> MaskedLm:
    return MaskedLm(str(model_dir))


@pytest.fixture(scope="session")
def client(model) -> TestClient:
    app = create_app(model, max_batch_size=4)
    with TestClient(app, raise_server_exceptions=False) as test_client:
        yield test_client
