import json
import subprocess
import sys

import numpy as np
import pytest

from altfs.cli import main, parse_tau
from altfs.data import Dataset, write_csv
from altfs.harness import read_records_csv
from altfs.quality import load_importance_scores
from altfs.synthetic import separable


def write_importance(path, values):
    lines = ["feature,score"] + [f"f{j + 1},{v}" for j, v in enumerate(values)]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def q6(tmp_path):
    return write_importance(tmp_path / "q6.csv", [9, 8, 7, 3, 2, 1])


@pytest.fixture
def sep_csv(tmp_path):
    path = tmp_path / "sep.csv"
    write_csv(separable(m=150, n=5, seed=0), path)
    return str(path)


def run_search(capsys, *argv):
    code = main(["search", *argv])
    return code, json.loads(capsys.readouterr().out) if code == 0 else None


class TestParseTau:
    def test_forms(self):
        assert parse_tau("0.5") == 0.5
        assert parse_tau("1/3") == pytest.approx(1 / 3)

    @pytest.mark.parametrize("text", ["0", "1.5", "a/b", "1/0"])
    def test_rejected(self, text):
        with pytest.raises(Exception):
            parse_tau(text)


class TestQualities:
    def test_informative_first(self, sep_csv, tmp_path, capsys):
        out = tmp_path / "q.csv"
        assert main(["qualities", "--data", sep_csv, "--out", str(out)]) == 0
        fq = load_importance_scores(out)
        assert fq.feature_names[int(np.argmax(fq.values))] == "f1"
        assert fq.values.sum() == pytest.approx(1.0)

    def test_abs_pearson_identity(self, tmp_path, capsys):
        x = np.r_[np.zeros(10), np.ones(10)]
        ds = Dataset(np.column_stack([x, np.arange(20.0)]), ["x", "ramp"], x.astype(int))
        path = tmp_path / "d.csv"
        write_csv(ds, path)
        assert main(["qualities", "--data", str(path), "--measure", "abs_pearson", "--normalize", "none"]) == 0
        rows = dict(line.split(",") for line in capsys.readouterr().out.split()[1:])
        assert float(rows["x"]) == pytest.approx(1.0)

    def test_bad_path(self, tmp_path, capsys):
        assert main(["qualities", "--data", str(tmp_path / "missing.csv")]) == 2
        assert "not found" in capsys.readouterr().err


class TestSearch:
    def test_sequential_example(self, q6, capsys):
        code, out = run_search(capsys, "--objective", "importance", "--importance-file", q6,
                               "--method", "seq", "--k", "3", "--num-alternatives", "2", "--tau", "0.5")
        assert code == 0
        assert [alt["objective"] for alt in out["alternatives"]] == [24, 14, 12]
        assert out["alternatives"][0]["features"] == ["f1", "f2", "f3"]
        assert all(alt["status"] == "Optimal" for alt in out["alternatives"])

    def test_simultaneous_sum_example(self, q6, capsys):
        code, out = run_search(capsys, "--objective", "importance", "--importance-file", q6,
                               "--method", "sim-sum", "--k", "3", "--num-alternatives", "2", "--tau", "0.5")
        assert sum(alt["objective"] for alt in out["alternatives"]) == 54

    def test_replacement_example(self, q6, capsys):
        code, out = run_search(capsys, "--objective", "importance", "--importance-file", q6,
                               "--method", "rep", "--k", "2", "--num-alternatives", "2", "--tau", "1/2")
        assert sum(alt["objective"] for alt in out["alternatives"]) == 45
        assert out["tau"] == 0.5

    def test_incompatible_pairing(self, sep_csv, capsys):
        assert main(["search", "--data", sep_csv, "--objective", "mrmr", "--method", "bal", "--k", "2"]) == 2
        assert main(["search", "--data", sep_csv, "--objective", "mi", "--method", "wrapper", "--k", "2"]) == 2

    def test_infeasible_is_success(self, q6, capsys):
        code, out = run_search(capsys, "--objective", "importance", "--importance-file", q6,
                               "--method", "seq", "--k", "3", "--num-alternatives", "2", "--tau", "1")
        assert code == 0
        assert [alt["status"] for alt in out["alternatives"]] == ["Optimal", "Optimal", "Infeasible"]
        assert out["alternatives"][2]["features"] == [] and out["alternatives"][2]["objective"] is None

    @pytest.mark.parametrize("objective", ["mi", "fcbf", "mrmr"])
    def test_dataset_objectives(self, sep_csv, objective, capsys):
        code, out = run_search(capsys, "--data", sep_csv, "--objective", objective, "--method", "seq",
                               "--k", "2", "--num-alternatives", "1")
        assert code == 0 and len(out["alternatives"]) == 2

    def test_wrapper(self, sep_csv, tmp_path, capsys):
        dest = tmp_path / "w.json"
        assert main(["search", "--data", sep_csv, "--objective", "wrapper", "--method", "wrapper",
                     "--k", "2", "--num-alternatives", "1", "--max-iters", "10", "--out", str(dest)]) == 0
        out = json.loads(dest.read_text())
        assert all(alt["status"] == "Feasible" for alt in out["alternatives"])

    def test_missing_importance_file(self, capsys):
        assert main(["search", "--objective", "importance", "--k", "2"]) == 2


def write_config(tmp_path, body):
    path = tmp_path / "grid.cfg"
    path.write_text(body)
    return str(path)


MINIMAL = """# one cell
data = synthetic:separable
objectives = mi
methods = seq
k = 2
a = 1
tau = 0.5
folds = 3
timing = off
out = records.csv
"""


class TestBenchmark:
    def test_minimal_row_count(self, tmp_path, capsys):
        assert main(["benchmark", "--config", write_config(tmp_path, MINIMAL)]) == 0
        records = read_records_csv(tmp_path / "records.csv")
        assert len(records) == (1 + 1) * 3
        assert "6 records written" in capsys.readouterr().out

    def test_two_methods(self, tmp_path, capsys):
        cfg = write_config(tmp_path, MINIMAL.replace("methods = seq", "methods = seq, rep"))
        assert main(["benchmark", "--config", cfg]) == 0
        methods = {r.method for r in read_records_csv(tmp_path / "records.csv")}
        assert methods == {"seq", "rep"}

    def test_rerun_byte_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path, MINIMAL.replace("methods = seq", "methods = seq, sim-min, depth"))
        first = tmp_path / "one.csv"
        second = tmp_path / "two.csv"
        assert main(["benchmark", "--config", cfg, "--out", str(first)]) == 0
        assert main(["benchmark", "--config", cfg, "--out", str(second), "--workers", "2"]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_dataset_file_relative_to_config(self, tmp_path, capsys):
        write_csv(separable(m=60, seed=2), tmp_path / "d.csv")
        cfg = write_config(tmp_path, MINIMAL.replace("synthetic:separable", "d.csv"))
        assert main(["benchmark", "--config", cfg]) == 0

    @pytest.mark.parametrize("bad, line", [("k = two", 5), ("colour = red", 11), ("methods = anneal", 4),
                                           ("tau = 0", 7)])
    def test_config_errors_name_line(self, tmp_path, capsys, bad, line):
        body = MINIMAL.splitlines()
        key = bad.split("=")[0].strip()
        idx = next((i for i, text in enumerate(body) if text.startswith(key + " ")), None)
        if idx is None:
            body.append(bad)
        else:
            body[idx] = bad
        assert main(["benchmark", "--config", write_config(tmp_path, "\n".join(body) + "\n")]) == 2
        assert f"grid.cfg:{line}:" in capsys.readouterr().err

    def test_missing_key(self, tmp_path, capsys):
        cfg = write_config(tmp_path, MINIMAL.replace("k = 2\n", ""))
        assert main(["benchmark", "--config", cfg]) == 2
        assert "'k'" in capsys.readouterr().err


def test_module_entry_point(q6):
    result = subprocess.run([sys.executable, "-m", "altfs", "search", "--objective", "importance",
                             "--importance-file", q6, "--k", "1"], capture_output=True, text=True)
    assert result.returncode == 0
    assert json.loads(result.stdout)["alternatives"][0]["features"] == ["f1"]
