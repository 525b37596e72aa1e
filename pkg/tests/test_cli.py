"""Command-line interface: subcommands, config precedence, exit codes."""

import os
import warnings

import numpy as np
import pytest
from PIL import Image

from cfa1d.cli import main
from cfa1d.data import read_dataset_csv, read_synthetic_sidecar
from cfa1d.kernelcfa import KernelBank
from cfa1d.pipeline import load_model


def run(argv):
    return main(argv)


def synth_args(out, L=3, dim=6, per_class=4, seed=5):
    return [
        "synth", "--L", str(L), "--dim", str(dim), "--per-class", str(per_class),
        "--cluster-spread", "0.2", "--between-spread", "3.0",
        "--seed", str(seed), "--out", str(out),
    ]


@pytest.fixture()
def dataset_csv(tmp_path):
    out = tmp_path / "data.csv"
    assert run(synth_args(out)) == 0
    return out


class TestSynth:
    def test_writes_csv_and_sidecar(self, tmp_path, capsys):
        out = tmp_path / "toy.csv"
        assert run(synth_args(out)) == 0
        assert out.exists() and out.with_suffix(out.suffix + ".spec").exists()
        samples, manifest = read_dataset_csv(out)
        assert len(samples) == 12 and manifest.class_count == 3
        spec = read_synthetic_sidecar(str(out) + ".spec")
        assert spec.L == 3 and spec.dim == 6 and spec.rng_seed == 5
        assert "wrote 12 samples" in capsys.readouterr().out

    def test_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(synth_args(a)) == 0
        assert run(synth_args(b)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestTrain:
    def test_model_file_loads(self, tmp_path, dataset_csv, capsys):
        model = tmp_path / "model.cfa1d"
        assert run(["train", "--data", str(dataset_csv), "--filter", "uootf",
                    "--out", str(model)]) == 0
        bundle = load_model(model)
        assert bundle.bank.kind == "uootf"
        assert bundle.config["filter_kind"] == "uootf"
        assert "trained uootf on 12 samples" in capsys.readouterr().out

    def test_kernel_filter(self, tmp_path, dataset_csv):
        model = tmp_path / "model.cfa1d"
        assert run(["train", "--data", str(dataset_csv), "--filter", "kuootf",
                    "--delta", "2.0", "--out", str(model)]) == 0
        bundle = load_model(model)
        assert isinstance(bundle.bank, KernelBank)
        assert bundle.bank.kernel.delta == 2.0


class TestEvaluate:
    def test_csv_and_figures(self, tmp_path, dataset_csv, capsys):
        out = tmp_path / "report.csv"
        assert run(["evaluate", "--data", str(dataset_csv), "--m", "2",
                    "--reps", "3", "--out", str(out)]) == 0
        assert out.exists()
        assert (tmp_path / "report_accuracy.png").exists()
        assert (tmp_path / "report_confusion.png").exists()
        lines = out.read_text().splitlines()
        assert lines[0] == "rep,accuracy"
        assert sum(1 for ln in lines if not ln.startswith("#")) == 1 + 3
        assert "mean accuracy" in capsys.readouterr().out


class TestSweep:
    def test_csv_and_figure(self, tmp_path, dataset_csv, capsys):
        out = tmp_path / "sweep.csv"
        assert run(["sweep", "--data", str(dataset_csv), "--m", "2", "--reps", "2",
                    "--param", "omega-s", "--grid", "0.2,0.4,0.8",
                    "--out", str(out)]) == 0
        assert out.exists() and (tmp_path / "sweep_sweep.png").exists()
        lines = out.read_text().splitlines()
        assert lines[0] == "param_value,mean_accuracy,std_accuracy"
        assert len(lines) == 4
        assert [float(ln.split(",")[0]) for ln in lines[1:]] == [0.2, 0.4, 0.8]
        assert "best omega-s=" in capsys.readouterr().out


class TestOco:
    def test_csv_and_figure(self, tmp_path, dataset_csv, capsys):
        model = tmp_path / "model.cfa1d"
        assert run(["train", "--data", str(dataset_csv), "--out", str(model)]) == 0
        out = tmp_path / "oco.csv"
        assert run(["oco", "--model", str(model), "--probe", str(dataset_csv),
                    "--index", "4", "--out", str(out)]) == 0
        assert (tmp_path / "oco_oco.png").exists()
        lines = out.read_text().splitlines()
        assert lines[0] == "class_id,normalized_output"
        assert len(lines) == 1 + 3 + 1
        assert lines[-1].startswith("# degenerate,")
        assert "peak response at class" in capsys.readouterr().out


class TestConfigFile:
    def test_file_value_used_when_flag_absent(self, tmp_path, dataset_csv):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("omega_s=0.9\nfilter=uotf\n")
        model = tmp_path / "model.cfa1d"
        assert run(["train", "--config", str(cfg), "--data", str(dataset_csv),
                    "--out", str(model)]) == 0
        bundle = load_model(model)
        assert bundle.config["filter_kind"] == "uotf"
        assert bundle.config["resolved_omega_s"] == 0.9

    def test_cli_flag_wins_over_file(self, tmp_path, dataset_csv):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("omega_s=0.9\n")
        model = tmp_path / "model.cfa1d"
        assert run(["train", "--config", str(cfg), "--data", str(dataset_csv),
                    "--omega-s", "0.5", "--out", str(model)]) == 0
        assert load_model(model).config["resolved_omega_s"] == 0.5

    def test_missing_config_file_is_exit_2(self, tmp_path, dataset_csv):
        assert run(["train", "--config", str(tmp_path / "nope.cfg"),
                    "--data", str(dataset_csv), "--out", str(tmp_path / "m.cfa1d")]) == 2


class TestExitCodes:
    def test_missing_data_file(self, tmp_path, capsys):
        rc = run(["train", "--data", str(tmp_path / "absent.csv"),
                  "--out", str(tmp_path / "m.cfa1d")])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_sweep_grid(self, tmp_path, dataset_csv):
        assert run(["sweep", "--data", str(dataset_csv), "--param", "omega-s",
                    "--grid", "a,b", "--out", str(tmp_path / "s.csv")]) == 2

    def test_oco_index_out_of_range(self, tmp_path, dataset_csv):
        model = tmp_path / "model.cfa1d"
        assert run(["train", "--data", str(dataset_csv), "--out", str(model)]) == 0
        assert run(["oco", "--model", str(model), "--probe", str(dataset_csv),
                    "--index", "99", "--out", str(tmp_path / "o.csv")]) == 2

    def test_numerical_failure_is_exit_3(self, tmp_path, dataset_csv, capsys):
        """A huge rbf width collapses the Gram matrix to all-ones, and
        omega-s 1.0 zeroes the ridge, leaving nothing to regularize with."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rc = run(["train", "--data", str(dataset_csv), "--filter", "kuootf",
                      "--kernel", "rbf", "--delta", "1e9", "--omega-s", "1.0",
                      "--noise", "ridge", "--out", str(tmp_path / "m.cfa1d")])
        assert rc == 3
        assert "numerical failure:" in capsys.readouterr().err


class TestIngest:
    def write_gradient_png(self, path, seed):
        rng = np.random.default_rng(seed)
        px = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
        Image.fromarray(px, mode="L").save(path)

    def make_manifest(self, tmp_path):
        for i in range(4):
            self.write_gradient_png(tmp_path / f"img{i}.png", seed=i)
        manifest = tmp_path / "manifest.csv"
        rows = ["path,class_id,session"]
        for i in range(4):
            rows.append(f"img{i}.png,{i % 2},{i // 2}")
        manifest.write_text("\n".join(rows) + "\n")
        return manifest

    def test_pixel_features(self, tmp_path, capsys):
        manifest = self.make_manifest(tmp_path)
        out = tmp_path / "pixel.csv"
        assert run(["ingest", "--manifest", str(manifest), "--feature", "pixel",
                    "--side", "8", "--out", str(out)]) == 0
        samples, mf = read_dataset_csv(out)
        assert len(samples) == 4 and mf.class_count == 2
        assert all(s.vector.size == 64 for s in samples)
        assert "extracted pixel features for 4 images" in capsys.readouterr().out

    def test_gabor_features(self, tmp_path):
        manifest = self.make_manifest(tmp_path)
        out = tmp_path / "gabor.csv"
        assert run(["ingest", "--manifest", str(manifest), "--feature", "gabor",
                    "--side", "8", "--out", str(out)]) == 0
        samples, _ = read_dataset_csv(out)
        assert all(s.vector.size == 5 * 8 * (8 // 4) ** 2 for s in samples)

    def test_manifest_paths_resolve_relative_to_the_manifest(self, tmp_path):
        sub = tmp_path / "nested"
        sub.mkdir()
        manifest = self.make_manifest(sub)
        out = tmp_path / "out.csv"
        cwd = os.getcwd()
        assert cwd != str(sub)
        assert run(["ingest", "--manifest", str(manifest), "--feature", "pixel",
                    "--side", "8", "--out", str(out)]) == 0
        samples, _ = read_dataset_csv(out)
        assert len(samples) == 4
