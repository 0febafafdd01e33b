import json
import re
import shutil

import pytest

from methodmover.cli import main

from conftest import fixture_root


def copy_fixture(tmp_path, name):
    dest = tmp_path / name
    shutil.copytree(fixture_root(name), dest)
    return dest


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def recommend_args(root, run_dir, host, *extra):
    return (
        "recommend",
        host,
        "--roots",
        str(root),
        "--run-dir",
        str(run_dir),
        "--mock-llm",
        "--local-embeddings",
        *extra,
    )


class TestUsage:
    def test_no_arguments_is_a_usage_error(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 2

    def test_unknown_command_is_a_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "frobnicate")
        assert code == 2

    def test_missing_required_flag_is_a_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "recommend", "a.B")
        assert code == 2

    def test_help_exits_clean(self, capsys):
        code, out, _ = run_cli(capsys, "--help")
        assert code == 0
        assert "recommend" in out


class TestIndex:
    def test_index_writes_file(self, tmp_path, capsys):
        out_file = tmp_path / "idx.json"
        code, out, _ = run_cli(
            capsys,
            "index",
            "--roots",
            str(fixture_root("esql")),
            "--out",
            str(out_file),
        )
        assert code == 0
        assert "6 classes" in out
        doc = json.loads(out_file.read_text())
        assert len(doc["classes"]) == 6

    def test_index_json_mode(self, tmp_path, capsys):
        out_file = tmp_path / "idx.json"
        code, out, _ = run_cli(
            capsys,
            "index",
            "--roots",
            str(fixture_root("esql")),
            "--out",
            str(out_file),
            "--json",
        )
        assert code == 0
        assert json.loads(out)["classes"] == 6


class TestRecommend:
    def test_human_output(self, tmp_path, capsys):
        root = copy_fixture(tmp_path, "esql")
        code, out, err = run_cli(
            capsys, *recommend_args(root, tmp_path / "runs", "esql.session.EsqlSession")
        )
        assert code == 0
        assert re.search(r"^run [0-9a-f]{12}$", err, re.M)
        assert (
            "1. move resolvePolicy(String) -> esql.enrich.EnrichPolicyResolver  [field]"
            in out
        )

    def test_json_output_is_canonical(self, tmp_path, capsys):
        root = copy_fixture(tmp_path, "esql")
        outputs = []
        for _ in range(2):
            code, out, _ = run_cli(
                capsys,
                *recommend_args(
                    root, tmp_path / "runs", "esql.session.EsqlSession", "--json"
                ),
            )
            assert code == 0
            outputs.append(out)
        assert outputs[0] == outputs[1]
        doc = json.loads(outputs[0])
        assert set(doc) == {"host", "recommendations"}
        assert doc["recommendations"][0]["target"] == "esql.enrich.EnrichPolicyResolver"

    def test_no_recommendation_message(self, tmp_path, capsys):
        root = copy_fixture(tmp_path, "library")
        code, out, _ = run_cli(
            capsys, *recommend_args(root, tmp_path / "runs", "library.Book")
        )
        assert code == 0
        assert "no move recommended" in out

    def test_unknown_class_is_a_pipeline_error(self, tmp_path, capsys):
        root = copy_fixture(tmp_path, "esql")
        code, _, err = run_cli(
            capsys, *recommend_args(root, tmp_path / "runs", "esql.Missing")
        )
        assert code == 1
        assert "error:" in err

    def test_run_artifacts_land_in_run_dir(self, tmp_path, capsys):
        root = copy_fixture(tmp_path, "esql")
        run_dir = tmp_path / "runs"
        _, _, err = run_cli(
            capsys, *recommend_args(root, run_dir, "esql.session.EsqlSession")
        )
        run_id = re.search(r"^run ([0-9a-f]{12})$", err, re.M).group(1)
        assert (run_dir / run_id / "plans.json").is_file()


class TestApply:
    def test_apply_then_reapply(self, tmp_path, capsys):
        root = copy_fixture(tmp_path, "esql")
        run_dir = tmp_path / "runs"
        _, _, err = run_cli(
            capsys, *recommend_args(root, run_dir, "esql.session.EsqlSession")
        )
        run_id = re.search(r"^run ([0-9a-f]{12})$", err, re.M).group(1)

        code, out, _ = run_cli(
            capsys,
            "apply",
            run_id,
            "0",
            "--run-dir",
            str(run_dir),
            "--roots",
            str(root),
        )
        assert code == 0
        assert "files changed" in out
        moved = (root / "esql" / "enrich" / "EnrichPolicyResolver.java").read_text()
        assert "resolvePolicy" in moved

        # the plan is spent: source files no longer hash-match
        code, _, err = run_cli(
            capsys,
            "apply",
            run_id,
            "0",
            "--run-dir",
            str(run_dir),
            "--roots",
            str(root),
        )
        assert code == 1
        assert "error:" in err

    def test_apply_missing_run(self, tmp_path, capsys):
        root = copy_fixture(tmp_path, "esql")
        code, _, err = run_cli(
            capsys,
            "apply",
            "feedbeef0000",
            "0",
            "--run-dir",
            str(tmp_path / "runs"),
            "--roots",
            str(root),
        )
        assert code == 1
        assert "error:" in err


class TestPerturbAndEval:
    def test_perturb_writes_corpus_and_gold(self, tmp_path, capsys):
        dest = tmp_path / "mutated"
        gold_file = tmp_path / "gold.jsonl"
        code, out, _ = run_cli(
            capsys,
            "perturb",
            "--roots",
            str(fixture_root("bank")),
            "-n",
            "2",
            "--seed",
            "7",
            "--dest",
            str(dest),
            "--gold-out",
            str(gold_file),
        )
        assert code == 0
        assert "perturbed 2 methods" in out
        lines = [l for l in gold_file.read_text().splitlines() if l.strip()]
        assert len(lines) == 2
        triplet = json.loads(lines[0])
        assert set(triplet) >= {"method", "host", "target"}
        assert dest.is_dir()

    def test_eval_prints_recall_table(self, tmp_path, capsys):
        root = copy_fixture(tmp_path, "bank")
        gold_file = tmp_path / "gold.jsonl"
        gold_file.write_text(
            json.dumps(
                {
                    "method": "computeInterest(RatePlan)",
                    "host": "bank.Account",
                    "target": "bank.RatePlan",
                    "is_static": False,
                }
            )
            + "\n"
        )
        code, out, _ = run_cli(
            capsys,
            "eval",
            "--gold",
            str(gold_file),
            "--roots",
            str(root),
            "--run-dir",
            str(tmp_path / "runs"),
            "--mock-llm",
            "--local-embeddings",
        )
        assert code == 0
        assert "Recall_M" in out and "Recall_MC" in out
        # the single gold move is recovered at rank 1
        assert re.search(r"^1\s+1\.000\s+1\.000\s+1\.000$", out, re.M)
        assert "SMALL" in out

    def test_eval_json_mode(self, tmp_path, capsys):
        root = copy_fixture(tmp_path, "bank")
        gold_file = tmp_path / "gold.jsonl"
        gold_file.write_text(
            json.dumps(
                {
                    "method": "computeInterest(RatePlan)",
                    "host": "bank.Account",
                    "target": "bank.RatePlan",
                    "is_static": False,
                }
            )
            + "\n"
        )
        code, out, _ = run_cli(
            capsys,
            "eval",
            "--gold",
            str(gold_file),
            "--roots",
            str(root),
            "--run-dir",
            str(tmp_path / "runs"),
            "--mock-llm",
            "--local-embeddings",
            "--json",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["1"]["recall_mc"] == 1.0
        assert doc["3"]["gold_size"] == 1
