import json

from conftest import LOCALIZATION_ARGS, run_cli


class TestRun:
    def test_intro_projected(self, programs):
        code, out, err = run_cli(
            ["run", str(programs / "intro.rpl"), "--project", "x"]
        )
        assert code == 0 and err == ""
        assert out == "rank 0: x=10\nrank 1: x=20\nrank 2: x=30\n"

    def test_intro_unprojected_shows_all_bindings(self, programs):
        code, out, _ = run_cli(["run", str(programs / "intro.rpl")])
        assert code == 0
        assert out.splitlines()[0] == "rank 0: x=10, y=1"

    def test_records_format(self, programs):
        code, out, _ = run_cli(
            [
                "run",
                str(programs / "intro.rpl"),
                "--project",
                "x",
                "--format",
                "records",
            ]
        )
        assert code == 0
        records = [json.loads(line) for line in out.splitlines()]
        assert records == [
            {"rank": 0, "bindings": {"x": 10}},
            {"rank": 1, "bindings": {"x": 20}},
            {"rank": 2, "bindings": {"x": 30}},
        ]

    def test_top_limits_lines(self, programs):
        code, out, _ = run_cli(
            ["run", str(programs / "intro.rpl"), "--project", "x", "--top", "2"]
        )
        assert code == 0
        assert out == "rank 0: x=10\nrank 1: x=20\n"

    def test_max_rank_zero_equals_rank_zero_slice(self, programs):
        full_code, full, _ = run_cli(
            ["run", str(programs / "intro_observe.rpl"), "--project", "x"]
        )
        slice_code, sliced, _ = run_cli(
            [
                "run",
                str(programs / "intro_observe.rpl"),
                "--project",
                "x",
                "--max-rank",
                "0",
            ]
        )
        assert full_code == slice_code == 0
        rank0 = [line for line in full.splitlines() if line.startswith("rank 0:")]
        assert sliced.splitlines() == rank0

    def test_failure_exit_code(self, tmp_path):
        path = tmp_path / "fail.rpl"
        path.write_text("observe 1 == 2;\n")
        code, out, _ = run_cli(["run", str(path)])
        assert code == 1
        assert out == "failed (observation ruled out all possibilities)\n"

    def test_runtime_error_exit_code(self, tmp_path):
        path = tmp_path / "div.rpl"
        path.write_text("x := 1 / 0;\n")
        code, _, err = run_cli(["run", str(path)])
        assert code == 3
        assert "division-by-zero" in err and "line 1" in err

    def test_parse_error_exit_code(self, tmp_path):
        path = tmp_path / "bad.rpl"
        path.write_text("x := ;\n")
        code, _, err = run_cli(["run", str(path)])
        assert code == 2 and "parse error" in err

    def test_static_error_exit_code(self, tmp_path):
        path = tmp_path / "static.rpl"
        path.write_text("x := any_of(3 .. 1);\n")
        code, _, err = run_cli(["run", str(path)])
        assert code == 2 and "static error" in err

    def test_missing_file(self, tmp_path):
        code, _, err = run_cli(["run", str(tmp_path / "absent.rpl")])
        assert code == 4 and "cannot read" in err

    def test_bad_define(self, programs):
        code, _, err = run_cli(
            ["run", str(programs / "intro.rpl"), "--define", "k=[1,"]
        )
        assert code == 4 and "input error" in err
        code, _, err = run_cli(
            ["run", str(programs / "intro.rpl"), "--define", "k=E"]
        )
        assert code == 4 and "enum" in err

    def test_empty_projection_of_skip(self, tmp_path):
        path = tmp_path / "skip.rpl"
        path.write_text("skip;\n")
        code, out, _ = run_cli(["run", str(path)])
        assert code == 0
        assert out == "rank 0: (all variables 0)\n"

    def test_defines_bind_scalars_arrays_and_matrices(self, tmp_path):
        path = tmp_path / "defs.rpl"
        path.write_text("total := n + v[1] + m[1][0];\n")
        code, out, _ = run_cli(
            [
                "run",
                str(path),
                "--define",
                "n=5",
                "--define",
                "v=[1, 7]",
                "--define",
                "m=[[0, 0], [30, 0]]",
                "--project",
                "total",
            ]
        )
        assert code == 0
        assert out == "rank 0: total=42\n"

    def test_localization_k4(self, programs):
        code, out, _ = run_cli(
            [
                "run",
                str(programs / "localization.rpl"),
                *LOCALIZATION_ARGS,
                "--define",
                "k=4",
                "--project",
                "x,y",
                "--max-rank",
                "0",
            ]
        )
        assert code == 0
        assert out == "rank 0: x=4, y=5\n"


class TestCheck:
    def test_valid_corpus_files(self, programs):
        for name in (
            "intro.rpl",
            "intro_observe.rpl",
            "adder.rpl",
            "localization.rpl",
            "localization_strict.rpl",
        ):
            code, out, _ = run_cli(["check", str(programs / name)])
            assert code == 0, name
            assert out.endswith("ok\n")

    def test_unbalanced_brace(self, tmp_path):
        path = tmp_path / "broken.rpl"
        path.write_text("while x < 3 do { x := x + 1;\n")
        code, _, err = run_cli(["check", str(path)])
        assert code == 2 and "line 2" in err

    def test_empty_file_is_skip(self, tmp_path):
        path = tmp_path / "empty.rpl"
        path.write_text("")
        code, _, _ = run_cli(["check", str(path)])
        assert code == 0
