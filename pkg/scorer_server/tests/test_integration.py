"""End-to-end wire check: a live server instance driven by the client CLI.

The client package is exercised purely through its external surfaces (the
`morphoprobe` console command and its output files); the server runs in a
real uvicorn instance on a loopback port.
"""

import json
import shutil
import subprocess
import threading
import time

import pytest
import uvicorn

from support import REPO_ROOT
from scorer_server import create_app

FIXTURES = REPO_ROOT / "src" / "morphoprobe" / "fixtures"

pytestmark = pytest.mark.skipif(
    shutil.which("morphoprobe") is None, reason="client CLI not installed"
)


@pytest.fixture(scope="module")
def live_server(model):
    app = create_app(model, max_batch_size=4)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10.0
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.05)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5.0)


def run_cli(*args):
    return subprocess.run(["morphoprobe", *args], capture_output=True, text=True)


class TestClientServerRoundTrip:
    def test_probe_over_the_wire(self, live_server, tmp_path):
        result = run_cli(
            "probe",
            "--vocab", str(FIXTURES / "vocab.txt"),
            "--lexicon", str(FIXTURES / "lexicon10.tsv"),
            "--scorer-url", live_server,
            "--out", str(tmp_path),
        )
        assert result.returncode == 0, result.stderr
        rows = (tmp_path / "probe_results.csv").read_text().splitlines()
        assert len(rows) == 2 + 54
        accuracy = json.loads((tmp_path / "accuracy.json").read_text())
        assert accuracy["morphemic/artificial"]["accuracy"] is None
        filled = [cell for cell in accuracy.values()
                  if isinstance(cell, dict) and cell.get("n")]
        assert len(filled) == 5

    def test_embed_and_lda_over_the_wire(self, live_server, tmp_path):
        result = run_cli(
            "embed",
            "--vocab", str(FIXTURES / "vocab.txt"),
            "--lexicon", str(FIXTURES / "lexicon10.tsv"),
            "--scorer-url", live_server,
            "--layers", "1,2",
            "--out", str(tmp_path),
        )
        assert result.returncode == 0, result.stderr
        report = json.loads((tmp_path / "embed_report.json").read_text())
        assert report["written"] == 23
        assert report["dimension"] == 32

        result = run_cli(
            "lda",
            "--store", str(tmp_path / "embeddings.bin"),
            "--classes", "singular,plural-single-token",
            "--out", str(tmp_path),
        )
        assert result.returncode == 0, result.stderr
        lines = (tmp_path / "projections.csv").read_text().splitlines()
        assert len(lines) == 2 + 23

    def test_vocab_mismatch_is_input_error(self, live_server, tmp_path):
        other_vocab = tmp_path / "other_vocab.txt"
        other_vocab.write_text("[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\nmujer\n")
        other_lexicon = tmp_path / "lex.tsv"
        other_lexicon.write_text("lemma\tplural\tgender\taffix\tlog_frequency\n")
        result = run_cli(
            "probe",
            "--vocab", str(other_vocab),
            "--lexicon", str(other_lexicon),
            "--scorer-url", live_server,
            "--out", str(tmp_path / "out"),
        )
        assert result.returncode == 2
        assert "VocabMismatch" in result.stderr
