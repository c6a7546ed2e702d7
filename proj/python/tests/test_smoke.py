import csv
import math
import os
from pathlib import Path

import pytest

import litpipe

FIXTURES = Path(os.environ.get("LITPIPE_FIXTURES", Path(__file__).resolve().parents[2] / "fixtures"))


def test_normalize_doi():
    assert litpipe.normalize_doi("https://doi.org/10.1000/ABC.123") == "10.1000/abc.123"
    assert litpipe.normalize_doi("no identifier here") is None


def test_apa_formatting():
    record = {
        "id": "r1",
        "title": "Automated screening",
        "year": 2021,
        "authors": [{"family": "Novak", "given": "Petra"}, {"family": "Ito", "given": "Ken"}],
    }
    assert litpipe.format_apa_intext(record) == "(Novak & Ito, 2021)"
    assert litpipe.format_apa(record).startswith("Novak, P., & Ito, K. (2021). Automated screening.")


def test_error_carries_code():
    with pytest.raises(litpipe.LitpipeError) as info:
        litpipe.format_apa({"id": "x"})
    assert info.value.code == "malformed-response"


def test_hash_embed_is_unit_length():
    v = litpipe.hash_embed("sampling rate of the sensor")
    assert len(v) == 256
    assert math.isclose(math.fsum(x * x for x in v), 1.0, rel_tol=1e-5)


def test_chunks_respect_limits():
    text = "Methods\n" + " ".join(f"word{i}" for i in range(800))
    chunks = litpipe.chunk_text(text, max_chunk_chars=500, overlap_chars=50)
    assert len(chunks) > 1
    assert all(len(c["text"].encode()) <= 500 for c in chunks)


def test_extractive_answer_quotes_passages():
    passages = ["The device sampled at 250 Hz.", "Participants were adults."]
    answer = litpipe.extractive_answer("What was the sampling rate?", passages)
    assert "250 Hz" in answer


def test_build_and_export_table(tmp_path):
    result = litpipe.build_table(FIXTURES / "corpus", FIXTURES)
    rows = result["rows"]
    assert len(rows) == 6
    assert {r["group"] for r in rows} == {"genomics", "imaging"}
    written = litpipe.export_table(rows, tmp_path)
    assert any(p.endswith("imaging.csv") for p in written)
    with open(tmp_path / "imaging.csv", newline="", encoding="utf-8") as f:
        parsed = list(csv.reader(f))
    assert parsed[0][0] == "citation"
    assert len(parsed) - 1 == sum(r["group"] == "imaging" for r in rows)


def test_run_pipeline(tmp_path):
    run = litpipe.run_pipeline(FIXTURES / "corpus", tmp_path, FIXTURES)
    assert run["status"] == "completed"
    assert (Path(run["run_dir"]) / "synthesize" / "synthesis.md").is_file()


def test_service_routes(tmp_path):
    service = litpipe.Service(tmp_path, FIXTURES)
    status, body = service.handle("GET", "/api/health")
    assert status == 200
    status, body = service.handle("GET", "/api/runs/run-000099")
    assert status == 404
    assert body["error"] == "unknown-run"
