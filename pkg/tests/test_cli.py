import hashlib
import json
from pathlib import Path

import pytest

from ynkit.cli import main


def _hash(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _run_pipeline(corpus_path: Path, workdir: Path, seed: int = 7) -> dict:
    """identify -> distill -> plan -> train -> predict -> evaluate."""
    workdir.mkdir(parents=True, exist_ok=True)
    matches = workdir / "matches.jsonl"
    distant = workdir / "distant.jsonl"
    plandir = workdir / "plan"
    model = workdir / "model.json"
    preds = workdir / "preds.jsonl"
    report = workdir / "report.json"
    steps = [
        ["identify", "--corpus", str(corpus_path), "--mode", "strict",
         "--sample", "5", "--seed", str(seed), "--out", str(matches)],
        ["distill", "--corpus", str(corpus_path), "--matches", str(matches),
         "--balance", "--seed", str(seed), "--out", str(distant)],
        ["plan", "--gold", str(distant), "--strategy", "merged", "--epochs", "2",
         "--seed", str(seed), "--out", str(plandir)],
        ["train", "--plan", str(plandir), "--out", str(model),
         "--buckets", str(2**14), "--seed", str(seed)],
        ["predict", "--model", str(model), "--in", str(distant), "--out", str(preds)],
        ["evaluate", "--gold", str(distant), "--pred", str(preds), "--out", str(report)],
    ]
    for argv in steps:
        assert main(argv) == 0, argv
    return {
        "matches": matches,
        "distant": distant,
        "plandir": plandir,
        "model": model,
        "preds": preds,
        "report": report,
    }


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--help"])
    assert excinfo.value.code == 0
    assert "identify" in capsys.readouterr().out


def test_unknown_subcommand_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 2


def test_missing_input_is_domain_error(tmp_path, capsys):
    rc = main(
        ["identify", "--corpus", str(tmp_path / "absent.jsonl"), "--out", str(tmp_path / "m.jsonl")]
    )
    assert rc == 1
    assert "absent.jsonl" in capsys.readouterr().err


def test_full_pipeline_smoke(fixture_corpus_path, tmp_path, capsys):
    outputs = _run_pipeline(fixture_corpus_path, tmp_path)
    report = json.loads(outputs["report"].read_text())
    assert report["n"] > 0
    assert 0.0 <= report["macro_f1"] <= 1.0
    assert (tmp_path / "plan" / "plan.json").exists()


def test_pipeline_outputs_deterministic(fixture_corpus_path, tmp_path):
    run_a = _run_pipeline(fixture_corpus_path, tmp_path / "a")
    run_b = _run_pipeline(fixture_corpus_path, tmp_path / "b")
    for key in ("matches", "distant", "model", "preds", "report"):
        assert _hash(run_a[key]) == _hash(run_b[key]), key
    for epoch in sorted(p.name for p in run_a["plandir"].iterdir()):
        assert _hash(run_a["plandir"] / epoch) == _hash(run_b["plandir"] / epoch)


def test_pipeline_does_not_mutate_inputs(fixture_corpus_path, tmp_path):
    before = _hash(fixture_corpus_path)
    _run_pipeline(fixture_corpus_path, tmp_path)
    assert _hash(fixture_corpus_path) == before


def test_config_file_sets_defaults_flags_win(fixture_corpus_path, tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("sample = 3\nseed = 99\n", encoding="utf-8")
    out = tmp_path / "m.jsonl"
    rc = main(
        ["identify", "--corpus", str(fixture_corpus_path), "--config", str(config),
         "--seed", "1", "--out", str(out)]
    )
    assert rc == 0
    err = capsys.readouterr().err
    assert "'sample': 3" in err  # from config file
    assert "'seed': 1" in err  # explicit flag beats config


def test_config_file_missing(tmp_path, capsys):
    rc = main(
        ["identify", "--corpus", "x.jsonl", "--config", str(tmp_path / "nope.conf"),
         "--out", "m.jsonl"]
    )
    assert rc == 1
    assert "config file not found" in capsys.readouterr().err


def test_evaluate_with_two_systems(fixture_corpus_path, tmp_path):
    outputs = _run_pipeline(fixture_corpus_path, tmp_path)
    report2 = tmp_path / "report2.json"
    rc = main(
        ["evaluate", "--gold", str(outputs["distant"]), "--pred", str(outputs["preds"]),
         "--pred2", str(outputs["preds"]), "--mcnemar", "exact", "--out", str(report2)]
    )
    assert rc == 0
    report = json.loads(report2.read_text())
    assert report["mcnemar"]["p_value"] == 1.0
    assert report["mcnemar"]["method"] == "exact_binomial"


def test_probe_replay_subcommand(data_dir, tmp_path, capsys):
    out = tmp_path / "probe_preds.jsonl"
    rc = main(
        ["probe", "--in", str(data_dir / "probe_demo.jsonl"), "--client", "replay",
         "--store", str(data_dir / "replay_store.json"), "--out", str(out)]
    )
    assert rc == 0
    labels = [json.loads(line)["label"] for line in out.read_text().splitlines()]
    assert labels == ["yes", "no", "middle"]
    manifest = json.loads(out.with_suffix(".manifest.json").read_text())
    assert manifest["unmapped"] == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary == {"probed": 3, "unmapped": 0}


def test_probe_with_shots_replay(data_dir, tmp_path):
    from ynkit.corpus import Label
    from ynkit.distant import QAInstance, read_instances, write_instances
    from ynkit.llm_probe import PromptTemplate, RecordingClient, probe_benchmark

    shots_path = tmp_path / "shots.jsonl"
    shots = [
        QAInstance(context=(), question="Was it sold out?", answer="Every seat was gone.",
                   label=Label.YES, source="gold", origin_ids=("s0", "s0q", "s0a")),
        QAInstance(context=(), question="Did the rain stop?", answer="We are still soaked.",
                   label=Label.NO, source="gold", origin_ids=("s1", "s1q", "s1a")),
    ]
    write_instances(shots, shots_path)

    class Stub:
        def send(self, prompt, params):
            return "Middle"

        def identity(self):
            return "stub"

    template = PromptTemplate(
        shot_examples=tuple((s.question, s.answer, s.label) for s in shots)
    )
    instances = read_instances(data_dir / "probe_demo.jsonl")
    recorder = RecordingClient(Stub())
    probe_benchmark(instances, template, 2, recorder)
    store = tmp_path / "store.json"
    recorder.save(store)

    out = tmp_path / "preds.jsonl"
    rc = main(
        ["probe", "--in", str(data_dir / "probe_demo.jsonl"), "--shots", "2",
         "--shot-examples", str(shots_path), "--client", "replay",
         "--store", str(store), "--out", str(out)]
    )
    assert rc == 0
    labels = [json.loads(line)["label"] for line in out.read_text().splitlines()]
    assert labels == ["middle", "middle", "middle"]


def test_probe_shots_require_examples(data_dir, tmp_path, capsys):
    rc = main(
        ["probe", "--in", str(data_dir / "probe_demo.jsonl"), "--shots", "2",
         "--client", "replay", "--store", str(data_dir / "replay_store.json"),
         "--out", str(tmp_path / "p.jsonl")]
    )
    assert rc == 1
    assert "--shot-examples" in capsys.readouterr().err


def test_probe_replay_miss_is_domain_error(data_dir, tmp_path, capsys):
    bad_store = tmp_path / "store.json"
    bad_store.write_text("{}")
    rc = main(
        ["probe", "--in", str(data_dir / "probe_demo.jsonl"), "--client", "replay",
         "--store", str(bad_store), "--out", str(tmp_path / "p.jsonl")]
    )
    assert rc == 1
    assert "no recording" in capsys.readouterr().err


def test_plan_blended_subcommand(fixture_corpus_path, tmp_path):
    outputs = _run_pipeline(fixture_corpus_path, tmp_path)
    plandir = tmp_path / "blended"
    rc = main(
        ["plan", "--gold", str(outputs["distant"]), "--distant", str(outputs["distant"]),
         "--strategy", "blended", "--alpha", "0.5", "--m", "2", "--n", "1",
         "--seed", "3", "--out", str(plandir)]
    )
    assert rc == 0
    manifest = json.loads((plandir / "plan.json").read_text())
    assert manifest["strategy"] == "blended"
    assert len(manifest["epoch_sizes"]) == 3
