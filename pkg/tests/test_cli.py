"""End-to-end command line checks over small temp corpora."""

import json

import pytest

from axsel.cli import main

KB_TEXT = """\
fof(dog_animal, axiom, ![X]: (dog(X) => animal(X))).
fof(cat_animal, axiom, ![X]: (cat(X) => animal(X))).
fof(car_vehicle, axiom, ![X]: (car(X) => vehicle(X))).
fof(rex, axiom, dog(rex)).
"""

GOAL_TEXT = "fof(goal, conjecture, animal(rex)).\n"

EMBEDDING_TEXT = """\
dog 10 1 0
cat 9 2 0
animal 7 5 1
car 0 1 10
vehicle 1 0 9
rex 8 2 1
"""


@pytest.fixture
def corpus(tmp_path):
    kb = tmp_path / "kb.p"
    kb.write_text(KB_TEXT)
    goal = tmp_path / "goal.p"
    goal.write_text(GOAL_TEXT)
    emb = tmp_path / "emb.txt"
    emb.write_text(EMBEDDING_TEXT)
    return tmp_path


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSelect:
    def test_sine_json(self, corpus, capsys):
        code, out, err = _run(
            capsys,
            "select",
            "--kb", str(corpus / "kb.p"),
            "--goal", str(corpus / "goal.p"),
            "--strategy", "sine",
            "--depth", "2",
        )
        assert code == 0, err
        payload = json.loads(out)
        assert payload["strategy"] == "sine"
        assert payload["params"]["depth"] == 2
        assert "rex" in payload["selected"]

    def test_json_is_deterministic(self, corpus, capsys):
        argv = (
            "select",
            "--kb", str(corpus / "kb.p"),
            "--goal", str(corpus / "goal.p"),
            "--strategy", "vector",
            "--k", "3",
            "--embedding", str(corpus / "emb.txt"),
        )
        _, first, _ = _run(capsys, *argv)
        _, second, _ = _run(capsys, *argv)
        assert first == second

    def test_tptp_output_reparses(self, corpus, capsys, tmp_path):
        code, out, err = _run(
            capsys,
            "select",
            "--kb", str(corpus / "kb.p"),
            "--goal", str(corpus / "goal.p"),
            "--strategy", "sine",
            "--depth", "1",
            "--format", "tptp",
        )
        assert code == 0, err
        from axsel.kb import parse_goal

        goal = parse_goal(out)
        assert goal.query is not None
        assert len(goal.premises) >= 1

    def test_output_file(self, corpus, capsys):
        out_file = corpus / "selection.json"
        code, out, _ = _run(
            capsys,
            "select",
            "--kb", str(corpus / "kb.p"),
            "--goal", str(corpus / "goal.p"),
            "--strategy", "sine",
            "--depth", "1",
            "--output", str(out_file),
        )
        assert code == 0
        assert out == ""
        assert json.loads(out_file.read_text())["strategy"] == "sine"

    def test_union_reports_origins(self, corpus, capsys):
        code, out, err = _run(
            capsys,
            "select",
            "--kb", str(corpus / "kb.p"),
            "--goal", str(corpus / "goal.p"),
            "--strategy", "vb-union",
            "--depth", "1",
            "--k", "2",
            "--embedding", str(corpus / "emb.txt"),
        )
        assert code == 0, err
        payload = json.loads(out)
        assert "origins" in payload
        assert set(payload["origins"]) <= {"sine", "vector", "both"}

    def test_missing_required_param_exits_2(self, corpus, capsys):
        code, _, err = _run(
            capsys,
            "select",
            "--kb", str(corpus / "kb.p"),
            "--goal", str(corpus / "goal.p"),
            "--strategy", "vector",
            "--k", "3",
        )
        assert code == 2
        assert "embedding" in err

    def test_missing_kb_exits_2(self, corpus, capsys):
        code, _, err = _run(
            capsys,
            "select",
            "--goal", str(corpus / "goal.p"),
            "--strategy", "sine",
            "--depth", "1",
        )
        assert code == 2
        assert err.startswith("error:")

    def test_unreadable_kb_exits_2(self, corpus, capsys):
        code, _, err = _run(
            capsys,
            "select",
            "--kb", str(corpus / "nope.p"),
            "--goal", str(corpus / "goal.p"),
            "--strategy", "sine",
            "--depth", "1",
        )
        assert code == 2
        assert err.startswith("error:")


class TestConfig:
    def test_config_file_supplies_options(self, corpus, capsys):
        config = corpus / "axsel.toml"
        config.write_text(
            f'kb = "{corpus / "kb.p"}"\n'
            'strategy = "sine"\n'
            "depth = 1\n"
        )
        code, out, err = _run(
            capsys,
            "select",
            "--config", str(config),
            "--goal", str(corpus / "goal.p"),
        )
        assert code == 0, err
        assert json.loads(out)["params"]["depth"] == 1

    def test_flags_override_config(self, corpus, capsys):
        config = corpus / "axsel.toml"
        config.write_text(
            f'kb = "{corpus / "kb.p"}"\n'
            'strategy = "sine"\n'
            "depth = 1\n"
        )
        code, out, _ = _run(
            capsys,
            "select",
            "--config", str(config),
            "--goal", str(corpus / "goal.p"),
            "--depth", "3",
        )
        assert code == 0
        assert json.loads(out)["params"]["depth"] == 3


class TestStatsAndMap:
    def test_stats_table(self, corpus, capsys):
        code, out, err = _run(capsys, "stats", "--kb", str(corpus / "kb.p"))
        assert code == 0, err
        lines = out.splitlines()
        assert lines[0] == "symbol\tocc\tidf"
        rows = {line.split("\t")[0]: line.split("\t") for line in lines[1:]}
        assert rows["animal"][1] == "2"
        assert rows["dog"][1] == "2"

    def test_map_build(self, corpus, capsys):
        code, out, err = _run(
            capsys,
            "map", "build",
            "--kb", str(corpus / "kb.p"),
            "--embedding", str(corpus / "emb.txt"),
        )
        assert code == 0, err
        lines = out.splitlines()
        assert lines[0] == "kb_symbol\ttoken\tsource"
        assert "dog\tdog\tbruteforce" in lines

    def test_map_build_with_lexical_table(self, corpus, capsys):
        table = corpus / "syn.tsv"
        table.write_text("rex\tdog\n")
        emb = corpus / "small.txt"
        emb.write_text("dog 1 0\ncat 0 1\n")
        code, out, err = _run(
            capsys,
            "map", "build",
            "--kb", str(corpus / "kb.p"),
            "--embedding", str(emb),
            "--lexical-table", f"synonym={table}",
        )
        assert code == 0, err
        assert "rex\tdog\tsynonym" in out.splitlines()

    def test_bad_lexical_table_spec_exits_2(self, corpus, capsys):
        code, _, err = _run(
            capsys,
            "map", "build",
            "--kb", str(corpus / "kb.p"),
            "--embedding", str(corpus / "emb.txt"),
            "--lexical-table", "no-equals-sign",
        )
        assert code == 2
        assert err.startswith("error:")


class TestEval:
    def _problems(self, corpus):
        problems = corpus / "problems"
        problems.mkdir()
        (problems / "q1.p").write_text("fof(goal, conjecture, animal(rex)).\n")
        (problems / "q2.p").write_text("fof(goal, conjecture, vehicle(rex)).\n")
        return problems

    def test_eval_prove_skipped(self, corpus, capsys):
        problems = self._problems(corpus)
        code, out, err = _run(
            capsys,
            "eval", "prove",
            "--kb", str(corpus / "kb.p"),
            "--problems", str(problems),
            "--out-dir", str(corpus / "out"),
            "--strategy", "sine",
            "--depth", "1",
        )
        assert code == 0, err
        payload = json.loads(out)
        assert payload["counts"]["skipped"] == 2
        assert (corpus / "out" / "q1.sel.p").exists()

    def test_eval_prove_tsv(self, corpus, capsys):
        problems = self._problems(corpus)
        code, out, err = _run(
            capsys,
            "eval", "prove",
            "--kb", str(corpus / "kb.p"),
            "--problems", str(problems),
            "--out-dir", str(corpus / "out"),
            "--strategy", "sine",
            "--depth", "1",
            "--format", "tsv",
        )
        assert code == 0, err
        lines = out.splitlines()
        assert lines[0].startswith("problem_id\t")
        assert len(lines) == 3

    def test_eval_frat_tsv(self, corpus, capsys):
        tasks = corpus / "tasks.csv"
        tasks.write_text("w1,w2,w3,target\ndog,cat,animal,vehicle\n")
        code, out, err = _run(
            capsys,
            "eval", "frat",
            "--kb", str(corpus / "kb.p"),
            "--tasks", str(tasks),
            "--strategy", "vector",
            "--embedding", str(corpus / "emb.txt"),
            "--k-values", "1,4",
            "--format", "tsv",
        )
        assert code == 0, err
        lines = out.splitlines()
        assert lines[0] == "k\thit_rate\tavg_target_position\tavg_selected\ttasks\thits"
        assert len(lines) == 3
        assert lines[1].split("\t")[0] == "1"

    def test_eval_frat_depth_sweep(self, corpus, capsys):
        tasks = corpus / "tasks.csv"
        tasks.write_text("dog,cat,animal,vehicle\n")
        code, out, err = _run(
            capsys,
            "eval", "frat",
            "--kb", str(corpus / "kb.p"),
            "--tasks", str(tasks),
            "--strategy", "sine",
            "--depths", "1,2",
            "--format", "json",
        )
        assert code == 0, err
        payload = json.loads(out)
        assert [row["k"] for row in payload["rows"]] == [1, 2]

    def test_eval_frat_wrong_sweep_exits_2(self, corpus, capsys):
        tasks = corpus / "tasks.csv"
        tasks.write_text("dog,cat,animal,vehicle\n")
        code, _, err = _run(
            capsys,
            "eval", "frat",
            "--kb", str(corpus / "kb.p"),
            "--tasks", str(tasks),
            "--strategy", "sine",
            "--k-values", "1,2",
        )
        assert code == 2
        assert err.startswith("error:")


class TestCache:
    def test_cache_file_created_and_reused(self, corpus, capsys):
        cache = corpus / "cache"
        argv = (
            "select",
            "--kb", str(corpus / "kb.p"),
            "--goal", str(corpus / "goal.p"),
            "--strategy", "vector",
            "--k", "2",
            "--embedding", str(corpus / "emb.txt"),
            "--cache-dir", str(cache),
        )
        code, first, err = _run(capsys, *argv)
        assert code == 0, err
        cached = list(cache.glob("vectors-*.npz"))
        assert len(cached) == 1
        mtime = cached[0].stat().st_mtime_ns
        code, second, _ = _run(capsys, *argv)
        assert code == 0
        assert second == first
        assert cached[0].stat().st_mtime_ns == mtime
