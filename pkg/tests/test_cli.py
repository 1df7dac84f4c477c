"""Command-line interface: dispatch, exit codes, file outputs."""

import io
import json

import pytest

from piflab.cli import main

FAIR_JSON = '{"labels":["heads","tails"],"probs":[0.5,0.5]}'
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestMetrics:
    def test_actions_file(self, capsys, tmp_path):
        actions = tmp_path / "actions.txt"
        actions.write_text("heads\ntails\nheads\nheads\n")
        code, out, _ = run_cli(
            capsys, "metrics", "--target", FAIR_JSON, "--actions", str(actions)
        )
        assert code == 0
        data = json.loads(out)
        assert data["tv"] == pytest.approx(0.25)
        assert data["total"] == 4

    def test_empirical_file(self, capsys, tmp_path):
        emp = tmp_path / "emp.json"
        emp.write_text('{"labels":["heads","tails"],"counts":[7,3]}')
        code, out, _ = run_cli(
            capsys, "metrics", "--target", FAIR_JSON, "--empirical", str(emp)
        )
        assert code == 0
        assert json.loads(out)["tv"] == pytest.approx(0.2)

    def test_unknown_action_is_domain_error(self, capsys, tmp_path):
        actions = tmp_path / "actions.txt"
        actions.write_text("heads\nbanana\n")
        code, _, err = run_cli(
            capsys, "metrics", "--target", FAIR_JSON, "--actions", str(actions)
        )
        assert code == 1
        assert "error:" in err

    def test_missing_input_is_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "metrics", "--target", FAIR_JSON)
        assert code == 1


class TestExtract:
    def test_known_pipeline(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "extract",
            "--string", "aa",
            "--extractor", "rolling:256:100",
            "--mapper", "cdf:100",
            "--target", '{"labels":["heads","tails"],"probs":[0.3,0.7]}',
        )
        assert code == 0
        data = json.loads(out)
        assert data == {"value": 29, "range": 100, "label": "heads"}

    def test_value_only_without_target(self, capsys):
        code, out, _ = run_cli(
            capsys, "extract", "--string", "abc", "--extractor", "sum-mod:3"
        )
        assert code == 0
        assert json.loads(out) == {"value": 0, "range": 3}

    def test_stdin_input(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO("abc\n"))
        code, out, _ = run_cli(
            capsys, "extract", "--stdin", "--extractor", "sum-mod:3"
        )
        assert code == 0
        assert json.loads(out)["value"] == 0

    def test_bad_extractor_spec(self, capsys):
        code, _, err = run_cli(
            capsys, "extract", "--string", "x", "--extractor", "quantum:3"
        )
        assert code == 1
        assert "quantum" in err


class TestBounds:
    def test_thm2_reference_output(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "bounds", "thm2",
            "--M", "2", "--eta", "0.7,0.3", "--n", "3",
            "--K", "1000", "--delta-prime", "0.05",
        )
        assert code == 0
        data = json.loads(out)
        assert data["term_breakdown"]["first_term"] == pytest.approx(0.032, abs=1e-9)
        assert data["bound_value"] > 0.032

    def test_thm2_distribution_term_only(self, capsys):
        code, out, _ = run_cli(
            capsys, "bounds", "thm2", "--M", "2", "--eta", "0.7,0.3", "--n", "3"
        )
        assert code == 0
        data = json.loads(out)
        assert data["term_breakdown"]["finite_sample_term"] == 0.0
        assert data["bound_value"] == pytest.approx(0.032, abs=1e-9)

    def test_thm2_source_spec_file(self, capsys, tmp_path):
        spec = tmp_path / "source.json"
        spec.write_text(
            json.dumps({"kind": "independent", "etas": [[0.7, 0.3]] * 3})
        )
        code, out, _ = run_cli(
            capsys, "bounds", "thm2", "--M", "2", "--source-spec", str(spec)
        )
        assert code == 0
        assert json.loads(out)["bound_value"] == pytest.approx(0.032, abs=1e-9)

    def test_thm1(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "bounds", "thm1",
            "--A", "4", "--delta", "0.2", "--n", "32", "--M", "2", "--K", "100",
        )
        assert code == 0
        data = json.loads(out)
        assert data["term_breakdown"]["finite_sample_term"] == pytest.approx(
            0.13581015, abs=1e-6
        )

    def test_bad_eta_is_domain_error(self, capsys):
        code, _, err = run_cli(
            capsys, "bounds", "thm2", "--M", "2", "--eta", "0.7,0.7", "--n", "2"
        )
        assert code == 1

    def test_eta_without_n_is_domain_error(self, capsys):
        code, _, _ = run_cli(
            capsys, "bounds", "thm2", "--M", "2", "--eta", "0.7,0.3"
        )
        assert code == 1

    def test_out_file(self, capsys, tmp_path):
        out_file = tmp_path / "bound.json"
        code, out, _ = run_cli(
            capsys,
            "bounds", "thm2", "--M", "2", "--eta", "0.6,0.4", "--n", "2",
            "--out", str(out_file),
        )
        assert code == 0
        assert out == ""
        assert json.loads(out_file.read_text())["bound_value"] > 0


class TestVerify:
    def test_thm2_quick_pass(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "verify", "thm2",
            "--M", "2", "--eta", "0.7,0.3", "--n", "3",
            "--K", "500", "--reps", "20", "--seed", "3",
        )
        assert code == 0
        data = json.loads(out)
        assert data["passed"] is True
        assert data["repetitions"] == 20

    def test_thm1_quick_pass(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "verify", "thm1",
            "--A", "2", "--delta", "0.25", "--n", "16", "--M", "2",
            "--K", "100", "--reps", "15", "--seed", "2",
        )
        assert code == 0
        assert json.loads(out)["passed"] is True


class TestComplexity:
    def test_stdin_json(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO("0001101001000101"))
        code, out, _ = run_cli(capsys, "complexity", "--stdin")
        assert code == 0
        data = json.loads(out)
        assert data["items"][0]["phrase_count"] == 6

    def test_per_line_with_prefix(self, capsys, tmp_path):
        f = tmp_path / "seqs.txt"
        f.write_text("0101010101\n0010111010001\n")
        code, out, _ = run_cli(
            capsys, "complexity", str(f), "--per-line", "--prefix-chars", "10"
        )
        assert code == 0
        data = json.loads(out)
        assert len(data["items"]) == 2
        assert "aggregate" in data

    def test_out_dir_files(self, capsys, tmp_path):
        f = tmp_path / "seqs.txt"
        f.write_text("0101010101\n0010111010\n")
        out_dir = tmp_path / "cx"
        code, _, err = run_cli(
            capsys, "complexity", str(f), "--per-line", "--out-dir", str(out_dir)
        )
        assert code == 0
        assert (out_dir / "complexity.json").exists()
        assert (out_dir / "complexity.csv").read_text().startswith("item,")
        assert (out_dir / "complexity.png").read_bytes()[:8] == PNG_MAGIC

    def test_no_input_is_domain_error(self, capsys):
        code, _, _ = run_cli(capsys, "complexity")
        assert code == 1


class TestPrompts:
    def test_list(self, capsys):
        code, out, _ = run_cli(capsys, "prompts", "list")
        assert code == 0
        entries = json.loads(out)
        ids = {e["id"] for e in entries}
        assert "ssot_pif" in ids and "external_seed_user" in ids
        assert len(entries) == 15

    def test_render_system(self, capsys):
        code, out, _ = run_cli(capsys, "prompts", "render", "--id", "ssot_pif")
        assert code == 0
        assert "<random_string>" in out

    def test_render_with_params(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "prompts", "render", "--id", "pif_user",
            "--param", "choices=heads, tails",
            "--param", "num_choices=2",
            "--param", "prob_distribution=heads: 0.5, tails: 0.5",
        )
        assert code == 0
        assert "heads: 0.5, tails: 0.5" in out

    def test_missing_param_is_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "prompts", "render", "--id", "pif_user")
        assert code == 1
        assert "choices" in err

    def test_malformed_param(self, capsys):
        code, _, _ = run_cli(
            capsys, "prompts", "render", "--id", "pif_user", "--param", "oops"
        )
        assert code == 1


def write_pif_spec(tmp_path, **extra) -> str:
    spec = {
        "target": {"labels": ["heads", "tails"], "probs": [0.5, 0.5]},
        "method": "ssot",
        "trials_per_repetition": 30,
        "repetitions": 3,
        "seed": 5,
        "backend": {"kind": "mock", "mode": "sampling", "seed": 5},
    }
    spec.update(extra)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return str(path)


class TestPif:
    def test_run_to_stdout(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "pif", "run", "--spec", write_pif_spec(tmp_path))
        assert code == 0
        data = json.loads(out)
        assert set(data) == {"spec", "metrics", "failures", "repetitions"}

    def test_run_writes_report_bundle(self, capsys, tmp_path):
        out_dir = tmp_path / "out"
        code, _, err = run_cli(
            capsys,
            "pif", "run", "--spec", write_pif_spec(tmp_path), "--out", str(out_dir),
        )
        assert code == 0
        assert (out_dir / "trials.jsonl").exists()
        assert (out_dir / "report.json").exists()
        report_csv = (out_dir / "report.csv").read_text()
        assert report_csv.startswith("metric,scale,")
        assert (out_dir / "report.png").read_bytes()[:8] == PNG_MAGIC
        lines = (out_dir / "trials.jsonl").read_text().strip().split("\n")
        assert len(lines) == 90

    def test_run_external_seed_method(self, capsys, tmp_path):
        spec = write_pif_spec(tmp_path, method="external_seed_randomized")
        code, out, _ = run_cli(capsys, "pif", "run", "--spec", spec)
        assert code == 0

    def test_score_roundtrip(self, capsys, tmp_path):
        out_dir = tmp_path / "out"
        run_cli(
            capsys,
            "pif", "run", "--spec", write_pif_spec(tmp_path), "--out", str(out_dir),
        )
        code, out, _ = run_cli(
            capsys,
            "pif", "score",
            "--trials", str(out_dir / "trials.jsonl"),
            "--target", FAIR_JSON,
            "--format", "csv",
        )
        assert code == 0
        assert out.splitlines()[0] == "metric,scale,scaled_mean,scaled_std,raw_mean,raw_std"
        written = (out_dir / "report.csv").read_text()
        assert out.strip() == written.strip()

    def test_http_backend_without_endpoint_is_domain_error(self, capsys, tmp_path):
        spec = write_pif_spec(tmp_path, backend=None)
        code, _, err = run_cli(capsys, "pif", "run", "--spec", spec)
        assert code == 1
        assert "endpoint" in err

    def test_config_supplies_out_dir(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        out_dir = tmp_path / "cfg_out"
        cfg.write_text(f"out_dir = {out_dir}\n")
        code, _, _ = run_cli(
            capsys,
            "pif", "run", "--spec", write_pif_spec(tmp_path), "--config", str(cfg),
        )
        assert code == 0
        assert (out_dir / "report.json").exists()

    def test_missing_spec_file(self, capsys, tmp_path):
        code, _, _ = run_cli(
            capsys, "pif", "run", "--spec", str(tmp_path / "nope.json")
        )
        assert code == 1


class TestRps:
    def test_stdout_mode(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "rps", "--agent", "extractor", "--bot", "random",
            "--games", "20", "--seeds", "3",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "seed,score,wins,losses,ties,forfeits"
        summary = json.loads("\n".join(lines[4:]))
        assert summary["matches"] == 3
        assert summary["agent"] == "extractor"

    def test_out_dir_bundle(self, capsys, tmp_path):
        out_dir = tmp_path / "rps"
        code, _, _ = run_cli(
            capsys,
            "rps", "--agent", "uniform", "--bot", "frequency",
            "--games", "15", "--seeds", "4", "--out", str(out_dir),
        )
        assert code == 0
        csv = (out_dir / "scores.csv").read_text().strip().split("\n")
        assert len(csv) == 5
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["matches"] == 4
        assert (out_dir / "scores.png").read_bytes()[:8] == PNG_MAGIC

    def test_unknown_agent_is_domain_error(self, capsys):
        code, _, _ = run_cli(
            capsys, "rps", "--agent", "psychic", "--bot", "random", "--seeds", "1"
        )
        assert code == 1

    def test_llm_agent_without_endpoint(self, capsys):
        code, _, err = run_cli(
            capsys, "rps", "--agent", "llm", "--bot", "random", "--seeds", "1"
        )
        assert code == 1
        assert "endpoint" in err


class TestUsageErrors:
    def test_no_command(self, capsys):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["divine"])
        assert info.value.code == 2

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["bounds", "thm1", "--A", "2"])
        assert info.value.code == 2

    def test_bad_bot_choice(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["rps", "--agent", "uniform", "--bot", "psychic"])
        assert info.value.code == 2
