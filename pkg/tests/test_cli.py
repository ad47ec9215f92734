"""CLI surface: flags, exit codes, and pipeline equivalence with library calls."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import IRIS, REPO_ROOT, make_dataset, write_csv
from slce.cli import build_parser, main
from slce.dataset import load_csv, split
from slce.harness import emit_embedding
from slce.serialize import load_model


EXPECTED_FLAGS = {
    "fit": ["--method", "--data", "--dim", "--out", "--shrinkage", "--bair-grid",
            "--cv-folds", "--seed", "--label-col", "--header", "--standardize"],
    "transform": ["--model", "--data", "--out", "--label-col", "--header"],
    "eval": ["--model", "--train", "--test", "--knn", "--label-col", "--header"],
    "bench": ["--config", "--out", "--curves", "--svg", "--jobs"],
    "spectrum": ["--data", "--out", "--top", "--label-col", "--header"],
    "embed": ["--model", "--train", "--test", "--dim", "--out", "--svg",
              "--label-col", "--header"],
}


class TestHelp:
    @pytest.mark.parametrize("command", sorted(EXPECTED_FLAGS))
    def test_help_documents_every_flag(self, command, capsys):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args([command, "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for flag in EXPECTED_FLAGS[command]:
            assert flag in text

    def test_top_level_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for command in EXPECTED_FLAGS:
            assert command in text


class TestExitCodes:
    def test_unknown_flag_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["fit", "--bogus"])
        assert exc.value.code == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_subcommand_exits_1(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_dim_zero_exits_1_naming_constraint(self, tmp_path, capsys):
        code = main(["fit", "--method", "slce", "--data", IRIS,
                     "--dim", "0", "--out", str(tmp_path / "m.json")])
        assert code == 1
        assert ">= 1" in capsys.readouterr().err

    def test_missing_file_exits_1(self, tmp_path, capsys):
        code = main(["fit", "--method", "slce", "--data", str(tmp_path / "no.csv"),
                     "--dim", "1", "--out", str(tmp_path / "m.json")])
        assert code == 1

    def test_numerical_failure_exits_2(self, tmp_path, capsys, monkeypatch):
        import slce.cli as cli_module

        def explode(*args, **kwargs):
            raise np.linalg.LinAlgError("eigensolver did not converge")

        monkeypatch.setattr(cli_module, "fit_slce", explode)
        code = main(["fit", "--method", "slce", "--data", IRIS,
                     "--dim", "2", "--out", str(tmp_path / "m.json")])
        assert code == 2
        assert "numerical failure" in capsys.readouterr().err


class TestPipelines:
    def test_fit_transform_matches_embedding_emitter(self, tmp_path):
        model_path = tmp_path / "model.json"
        emb_path = tmp_path / "emb.csv"
        assert main(["fit", "--method", "slce", "--data", IRIS,
                     "--dim", "2", "--out", str(model_path)]) == 0
        assert main(["transform", "--model", str(model_path),
                     "--data", IRIS, "--out", str(emb_path)]) == 0

        ds = load_csv(IRIS)
        model = load_model(model_path)
        table = emit_embedding(model, ds, ds.subset([]), 2, tmp_path / "ref.csv")

        rows = emb_path.read_text().strip().splitlines()[2:]
        assert len(rows) == ds.n
        coords = np.array([[float(v) for v in row.split(",")[:2]] for row in rows]).T
        assert np.array_equal(coords, table.coordinates)

    def test_cli_fit_equals_library_fit(self, tmp_path):
        model_path = tmp_path / "m.json"
        assert main(["fit", "--method", "pca", "--data", IRIS,
                     "--dim", "2", "--out", str(model_path)]) == 0
        cli_model = load_model(model_path)
        from slce.baselines import fit_pca
        lib_model = fit_pca(load_csv(IRIS), 2)
        assert np.array_equal(cli_model.basis, lib_model.basis)
        assert np.array_equal(cli_model.mean, lib_model.mean)

    def test_eval_prints_accuracy(self, tmp_path, capsys):
        ds = load_csv(IRIS)
        pair = split(ds, 0.8, seed=3)
        train_csv = write_csv(tmp_path / "train.csv", pair.train.data,
                              pair.train.labels, tokens=pair.train.label_tokens)
        test_csv = write_csv(tmp_path / "test.csv", pair.test.data,
                             pair.test.labels, tokens=pair.test.label_tokens)
        model_path = tmp_path / "m.json"
        assert main(["fit", "--method", "slce", "--data", str(train_csv),
                     "--dim", "2", "--out", str(model_path)]) == 0
        assert main(["eval", "--model", str(model_path), "--train", str(train_csv),
                     "--test", str(test_csv), "--knn", "5"]) == 0
        out = capsys.readouterr().out
        assert "accuracy" in out

    def test_spectrum_and_embed(self, tmp_path):
        assert main(["spectrum", "--data", IRIS, "--out", str(tmp_path / "s.csv")]) == 0
        lines = (tmp_path / "s.csv").read_text().strip().splitlines()
        assert lines[1] == "index,coupling_eigenvalue,system_eigenvalue,one_dim_cost"
        assert len(lines) > 2

        assert main(["spectrum", "--data", IRIS, "--top", "2",
                     "--out", str(tmp_path / "s2.csv")]) == 0
        assert len((tmp_path / "s2.csv").read_text().strip().splitlines()) == 2 + 2

        ds = make_dataset(0, 4, 40, 3)
        pair = split(ds, 0.75, seed=2)
        train_csv = write_csv(tmp_path / "tr.csv", pair.train.data, pair.train.labels)
        test_csv = write_csv(tmp_path / "te.csv", pair.test.data, pair.test.labels)
        model_path = tmp_path / "m.json"
        assert main(["fit", "--method", "slce", "--data", str(train_csv),
                     "--dim", "2", "--out", str(model_path)]) == 0
        assert main(["embed", "--model", str(model_path), "--train", str(train_csv),
                     "--test", str(test_csv), "--dim", "2",
                     "--out", str(tmp_path / "table.csv"),
                     "--svg", str(tmp_path / "plot.svg")]) == 0
        assert (tmp_path / "table.csv").exists()
        svg = (tmp_path / "plot.svg").read_text()
        assert svg.startswith("<svg")


class TestBench:
    def write_config(self, tmp_path, reps=2):
        path = tmp_path / "exp.toml"
        path.write_text(
            f'dataset = "{IRIS}"\n'
            'methods = ["slce", "pca"]\n'
            "dims = [2]\n"
            "split_ratio = 0.8\n"
            f"repetitions = {reps}\n"
            "base_seed = 11\n"
            "knn_k = 5\n"
        )
        return path

    def test_bench_runs_and_reports(self, tmp_path, capsys):
        config = self.write_config(tmp_path)
        out = tmp_path / "report.json"
        assert main(["bench", "--config", str(config), "--out", str(out),
                     "--curves", str(tmp_path / "curves.csv")]) == 0
        doc = json.loads(out.read_text())
        assert {r["method"] for r in doc["results"]} == {"slce", "pca"}
        assert (tmp_path / "curves.csv").exists()
        assert "slce dim 2" in capsys.readouterr().out

    def test_bench_byte_identical_across_runs(self, tmp_path):
        config = self.write_config(tmp_path)
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert main(["bench", "--config", str(config), "--out", str(out1)]) == 0
        assert main(["bench", "--config", str(config), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_bench_cli_matches_library(self, tmp_path):
        from slce.harness import config_from_file, report_to_json, run_experiment

        config_path = self.write_config(tmp_path)
        out = tmp_path / "cli.json"
        assert main(["bench", "--config", str(config_path), "--out", str(out)]) == 0
        library = report_to_json(run_experiment(config_from_file(config_path)))
        assert out.read_text() == library

    def test_module_entry_point_subprocess(self, tmp_path):
        config = self.write_config(tmp_path)
        out = tmp_path / "report.json"
        env = dict(os.environ)
        env["PYTHONPATH"] = os.pathsep.join(
            filter(None, [os.path.join(REPO_ROOT, "src"), env.get("PYTHONPATH", "")])
        )
        proc = subprocess.run(
            [sys.executable, "-m", "slce", "bench",
             "--config", str(config), "--out", str(out)],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()
        assert "benchmark on" in proc.stdout

    def test_bench_jobs_flag_preserves_output(self, tmp_path):
        config = self.write_config(tmp_path, reps=3)
        serial, threaded = tmp_path / "s.json", tmp_path / "t.json"
        assert main(["bench", "--config", str(config), "--out", str(serial)]) == 0
        assert main(["bench", "--config", str(config), "--out", str(threaded),
                     "--jobs", "3"]) == 0
        assert serial.read_bytes() == threaded.read_bytes()
