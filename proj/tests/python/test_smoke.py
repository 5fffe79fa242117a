import json
import os
from pathlib import Path

import pytest

import atceval

GOLDEN = Path(os.environ.get("ATCEVAL_GOLDEN_DIR", Path(__file__).resolve().parents[1] / "golden"))


@pytest.fixture()
def corpus_file(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text(atceval.generate_corpus(seed=1, n=200))
    return path


def test_golden_matches_frozen_values():
    report = atceval.evaluate(str(GOLDEN / "corpus.jsonl"), str(GOLDEN / "predictions.jsonl"))
    want = json.loads((GOLDEN / "golden.json").read_text())["values"]
    assert report["metrics"]["risk_score"] == pytest.approx(want["risk_score"], abs=1e-12)
    assert report["metrics"]["rw_er"] == pytest.approx(want["rw_er"], abs=1e-12)
    assert report["metrics"]["risk_strict"] == pytest.approx(want["risk_strict"], abs=1e-12)
    assert report["unknown_prediction_ids"] == ["g99"]


def test_generate_validate_parse_evaluate(corpus_file, tmp_path):
    assert atceval.validate(str(corpus_file)) == []
    preds = tmp_path / "preds.jsonl"
    preds.write_text(atceval.parse(str(corpus_file), jobs=2))
    report = atceval.evaluate(str(corpus_file), str(preds))
    assert report["metrics"]["risk_score"] >= 0.95
    assert report["metrics"]["risk_strict"] >= 0.90
    text = atceval.format_report(report, "csv")
    assert text.startswith("metric,value\n")


def test_generate_is_seeded():
    assert atceval.generate_corpus(5, 30) == atceval.generate_corpus(5, 30)
    assert atceval.generate_corpus(5, 30) != atceval.generate_corpus(6, 30)
    with pytest.raises(atceval.ValidationError):
        atceval.generate_corpus(1, 10, mix=(0.5, 0.5, 0.5))


def test_parse_transcript():
    p = atceval.parse_transcript(
        "singapore three two one taxi via alpha bravo hold short of runway zero two left")
    assert p["action"]["type"] == "TAXI"
    assert p["action"]["slots"]["callsign"] == "singapore 321"


def test_score_utterance_examples():
    gt = {"id": "h", "transcript": "x", "speaker": "CONTROLLER", "intent": "INSTRUCTION",
          "action": {"type": "HOLD", "slots": {"callsign": "singapore 321", "boundary": "runway 02l"}},
          "entities": [], "risk_level": "HIGH"}
    pred = {"utterance_id": "h", "action": {"type": "HOLD", "slots": {"callsign": "singapore 321"}}}
    s = atceval.score_utterance(gt, pred)
    assert s["score"] == pytest.approx(1 / 1.95, abs=1e-12)
    assert not s["strict"]
    assert atceval.score_utterance(gt)["score"] == 0.0


def test_perturb_is_deterministic():
    a = atceval.perturb("thai four hold short runway zero two left", 0.3, seed=2, utterance_id="u")
    b = atceval.perturb("thai four hold short runway zero two left", 0.3, seed=2, utterance_id="u")
    assert a == b
    assert len(a["op_log"]) == 2
    assert atceval.perturb("thai four", 0.0)["perturbed"] == "thai four"


def test_sweep_rows(corpus_file):
    rows = atceval.sweep(str(corpus_file), [0.0, 0.3], [1, 2])
    means = [r for r in rows if r["seed"] == "mean"]
    assert [r["wer"] for r in means] == [0.0, 0.3]
    assert means[1]["risk_score"] < means[0]["risk_score"]


def test_parse_model_output_and_errors(tmp_path):
    out = atceval.parse_model_output("SPEAKER: PILOT\nACTION: TAXIING\n", "u1")
    assert out["prediction"]["speaker"] == "PILOT"
    assert "speaker" in out["populated"]
    assert any(field == "action" for field, _ in out["diagnostics"])
    with pytest.raises(atceval.IoError):
        atceval.validate(str(tmp_path / "missing.jsonl"))
    cfg = atceval.default_config()
    assert atceval.config_hash(cfg) == atceval.config_hash(atceval.default_config())
