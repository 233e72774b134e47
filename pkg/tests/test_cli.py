import json
import shutil
import subprocess
from pathlib import Path

import pytest

from rotamert.cli import main
from rotamert.corpus import parse_nbest

DATA = Path(__file__).parent / "data"
PACKAGE_DATA = Path(__file__).parent.parent / "src" / "rotamert" / "data"


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def adversarial_files(tmp_path):
    nbest = tmp_path / "tune.nbest"
    ref = tmp_path / "tune.ref"
    shutil.copy(PACKAGE_DATA / "adversarial.nbest", nbest)
    shutil.copy(PACKAGE_DATA / "adversarial.ref", ref)
    return nbest, ref


class TestScore:
    def test_fixed_corpus_scores_65_68(self, capsys):
        code, out, _ = run(
            [
                "score",
                str(DATA / "score.hyp"),
                str(DATA / "score.ref0"),
                str(DATA / "score.ref1"),
            ],
            capsys,
        )
        assert code == 0
        assert out == "65.68\n"

    def test_perfect_translation_scores_100(self, tmp_path, capsys):
        hyp = tmp_path / "hyp.txt"
        hyp.write_text("the cat sat on the mat\n")
        code, out, _ = run(["score", str(hyp), str(hyp)], capsys)
        assert code == 0
        assert out == "100.00\n"

    def test_disjoint_translation_scores_0(self, tmp_path, capsys):
        hyp = tmp_path / "hyp.txt"
        ref = tmp_path / "ref.txt"
        hyp.write_text("aa bb cc dd\n")
        ref.write_text("xx yy zz ww\n")
        code, out, _ = run(["score", str(hyp), str(ref)], capsys)
        assert code == 0
        assert out == "0.00\n"

    def test_line_count_mismatch_exits_2(self, tmp_path, capsys):
        hyp = tmp_path / "hyp.txt"
        ref = tmp_path / "ref.txt"
        hyp.write_text("a b\nc d\n")
        ref.write_text("a b\n")
        code, _, err = run(["score", str(hyp), str(ref)], capsys)
        assert code == 2
        assert "error:" in err

    def test_missing_file_exits_2(self, tmp_path, capsys):
        code, _, err = run(
            ["score", str(tmp_path / "nope.txt"), str(tmp_path / "nope.ref")],
            capsys,
        )
        assert code == 2
        assert "error:" in err


class TestMert:
    def test_tunes_and_writes_outputs(self, adversarial_files, tmp_path, capsys):
        nbest, ref = adversarial_files
        out_dir = tmp_path / "run"
        code, out, _ = run(
            [
                "mert",
                "--nbest",
                str(nbest),
                "--refs",
                str(ref),
                "--init-weights",
                "1.0, 1.0",
                "--out",
                str(out_dir),
            ],
            capsys,
        )
        assert code == 0
        assert out == "51.49\n"
        weights = (out_dir / "weights.txt").read_text().split()
        assert len(weights) == 2
        float(weights[0]), float(weights[1])
        trace_rows = (out_dir / "trace.tsv").read_text().splitlines()
        assert trace_rows[0] == "iter\tdim\tgamma\terror\tbleu"
        assert len(trace_rows) > 1

    def test_init_weights_from_file(self, adversarial_files, tmp_path, capsys):
        nbest, ref = adversarial_files
        wfile = tmp_path / "w.txt"
        wfile.write_text("1.0\n1.0\n")
        code, out, _ = run(
            [
                "mert",
                "--nbest",
                str(nbest),
                "--refs",
                str(ref),
                "--init-weights",
                str(wfile),
                "--out",
                str(tmp_path / "run"),
            ],
            capsys,
        )
        assert code == 0
        assert out == "51.49\n"

    def test_config_file_supplies_settings(self, adversarial_files, tmp_path, capsys):
        nbest, ref = adversarial_files
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# tuning settings\n"
            f"nbest = {nbest}\n"
            f"refs = {ref}\n"
            "init_weights = 1.0, 1.0\n"
            f"out = {tmp_path / 'run'}\n"
        )
        code, out, _ = run(["mert", "--config", str(cfg)], capsys)
        assert code == 0
        assert out == "51.49\n"
        assert (tmp_path / "run" / "weights.txt").exists()

    def test_flag_overrides_config(self, adversarial_files, tmp_path, capsys):
        nbest, ref = adversarial_files
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"nbest = {nbest}\n"
            f"refs = {ref}\n"
            "init_weights = 1.0, 1.0\n"
            "max-iter = 1\n"
            f"out = {tmp_path / 'a'}\n"
        )
        code, _, _ = run(["mert", "--config", str(cfg)], capsys)
        assert code == 0
        rows_a = (tmp_path / "a" / "trace.tsv").read_text().splitlines()
        assert {r.split("\t")[0] for r in rows_a[1:]} == {"1"}

        code, _, _ = run(
            [
                "mert",
                "--config",
                str(cfg),
                "--max-iter",
                "5",
                "--out",
                str(tmp_path / "b"),
            ],
            capsys,
        )
        assert code == 0
        rows_b = (tmp_path / "b" / "trace.tsv").read_text().splitlines()
        assert "2" in {r.split("\t")[0] for r in rows_b[1:]}

    def test_unknown_config_key_exits_3(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("mystery = 1\n")
        code, _, err = run(["mert", "--config", str(cfg)], capsys)
        assert code == 3
        assert "unknown setting" in err

    def test_config_line_without_equals_exits_3(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("just some words\n")
        code, _, _ = run(["mert", "--config", str(cfg)], capsys)
        assert code == 3

    def test_missing_nbest_setting_exits_3(self, capsys):
        code, _, err = run(["mert"], capsys)
        assert code == 3
        assert "error:" in err

    def test_bad_inline_weights_exit_3(self, adversarial_files, tmp_path, capsys):
        nbest, ref = adversarial_files
        code, _, _ = run(
            [
                "mert",
                "--nbest",
                str(nbest),
                "--refs",
                str(ref),
                "--init-weights",
                "one, two",
            ],
            capsys,
        )
        assert code == 3

    def test_malformed_nbest_exits_2(self, tmp_path, capsys):
        nbest = tmp_path / "bad.nbest"
        ref = tmp_path / "ref.txt"
        nbest.write_text("0 ||| broken line\n")
        ref.write_text("a b\n")
        code, _, err = run(
            ["mert", "--nbest", str(nbest), "--refs", str(ref)], capsys
        )
        assert code == 2
        assert "error:" in err


class TestRss:
    def test_full_grid_run(self, adversarial_files, tmp_path, capsys):
        nbest, ref = adversarial_files
        out_dir = tmp_path / "run"
        code, out, _ = run(
            [
                "rss",
                "--nbest",
                str(nbest),
                "--refs",
                str(ref),
                "--open-nbest",
                str(nbest),
                "--open-refs",
                str(ref),
                "--init-weights",
                "1,1",
                "--rotate",
                "0:1",
                "--out",
                str(out_dir),
            ],
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "selected alpha: +0.2"
        assert lines[1] == "system\talpha\tclosed_bleu\topen_bleu"
        assert lines[2].startswith("baseline\t\t51.49")
        assert lines[3].startswith("best\t+0.2\t100.00")
        report = (out_dir / "report.tsv").read_text()
        block, _ = report.split("\n\n")
        assert len(block.splitlines()) == 22
        weights = (out_dir / "weights.txt").read_text().split()
        assert len(weights) == 2

    def test_custom_grid_flags(self, adversarial_files, tmp_path, capsys):
        nbest, ref = adversarial_files
        out_dir = tmp_path / "run"
        code, out, _ = run(
            [
                "rss",
                "--nbest",
                str(nbest),
                "--refs",
                str(ref),
                "--open-nbest",
                str(nbest),
                "--open-refs",
                str(ref),
                "--rotate",
                "0:1",
                "--grid-start",
                "-0.2",
                "--grid-end",
                "0.2",
                "--grid-step",
                "0.2",
                "--out",
                str(out_dir),
            ],
            capsys,
        )
        assert code == 0
        block, _ = (out_dir / "report.tsv").read_text().split("\n\n")
        assert len(block.splitlines()) == 4

    def test_rss_requires_a_rotation(self, adversarial_files, capsys):
        nbest, ref = adversarial_files
        code, _, err = run(
            [
                "rss",
                "--nbest",
                str(nbest),
                "--refs",
                str(ref),
                "--open-nbest",
                str(nbest),
                "--open-refs",
                str(ref),
            ],
            capsys,
        )
        assert code == 3
        assert "rotation" in err

    def test_bad_rotation_syntax_exits_3(self, adversarial_files, capsys):
        nbest, ref = adversarial_files
        code, _, _ = run(
            [
                "rss",
                "--nbest",
                str(nbest),
                "--refs",
                str(ref),
                "--open-nbest",
                str(nbest),
                "--open-refs",
                str(ref),
                "--rotate",
                "0-1",
            ],
            capsys,
        )
        assert code == 3

    def test_invalid_grid_exits_3(self, adversarial_files, capsys):
        nbest, ref = adversarial_files
        code, _, _ = run(
            [
                "rss",
                "--nbest",
                str(nbest),
                "--refs",
                str(ref),
                "--open-nbest",
                str(nbest),
                "--open-refs",
                str(ref),
                "--rotate",
                "0:1",
                "--grid-step",
                "-0.1",
            ],
            capsys,
        )
        assert code == 3


class TestSynth:
    def test_generates_corpus_pair(self, tmp_path, capsys):
        out_dir = tmp_path / "gen"
        code, _, _ = run(
            [
                "synth",
                "--sentences",
                "4",
                "--hyps",
                "3",
                "--features",
                "2",
                "--ref-count",
                "2",
                "--seed",
                "7",
                "--out",
                str(out_dir),
            ],
            capsys,
        )
        assert code == 0
        for name in ("closed.nbest", "closed.ref0", "closed.ref1", "open.nbest"):
            assert (out_dir / name).exists()
        by_id, _ = parse_nbest((out_dir / "closed.nbest").read_text().splitlines())
        assert len(by_id) == 4
        assert all(len(h) == 3 for h in by_id.values())
        header = json.loads((out_dir / "synth.json").read_text())
        assert header["sentences"] == 4
        assert header["seed"] == 7

    def test_same_seed_reproduces_bytes(self, tmp_path, capsys):
        args = ["synth", "--sentences", "3", "--hyps", "4", "--features", "2", "--seed", "3"]
        run(args + ["--out", str(tmp_path / "a")], capsys)
        run(args + ["--out", str(tmp_path / "b")], capsys)
        for name in ("closed.nbest", "open.nbest", "synth.json"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_correlated_pair_flag(self, tmp_path, capsys):
        code, _, _ = run(
            [
                "synth",
                "--sentences",
                "3",
                "--hyps",
                "4",
                "--features",
                "3",
                "--pair",
                "0:2:0.9",
                "--out",
                str(tmp_path),
            ],
            capsys,
        )
        assert code == 0
        header = json.loads((tmp_path / "synth.json").read_text())
        assert header["correlated_pairs"] == [[0, 2, 0.9]]

    def test_bad_pair_exits_3(self, tmp_path, capsys):
        code, _, _ = run(
            [
                "synth",
                "--sentences",
                "3",
                "--hyps",
                "4",
                "--features",
                "3",
                "--pair",
                "0:2",
                "--out",
                str(tmp_path),
            ],
            capsys,
        )
        assert code == 3

    def test_invalid_shape_exits_3(self, tmp_path, capsys):
        code, _, _ = run(
            [
                "synth",
                "--sentences",
                "0",
                "--hyps",
                "4",
                "--features",
                "3",
                "--out",
                str(tmp_path),
            ],
            capsys,
        )
        assert code == 3


class TestConsoleScript:
    def test_installed_entry_point_runs(self):
        exe = shutil.which("rotamert")
        if exe is None:
            pytest.skip("console script not on PATH")
        proc = subprocess.run(
            [
                exe,
                "score",
                str(DATA / "score.hyp"),
                str(DATA / "score.ref0"),
                str(DATA / "score.ref1"),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout == "65.68\n"
