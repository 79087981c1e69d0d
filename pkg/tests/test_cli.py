import json

import pytest

from bpfi.catalog import get_dataset
from bpfi.cli import main
from bpfi.dataset import read_csv
from bpfi.dependency import dep
from bpfi.harness import self_submission


@pytest.fixture
def xor_csv(tmp_path):
    path = tmp_path / "xor.csv"
    assert main(["dataset", "14", "-o", str(path)]) == 0
    return path


class TestCompute:
    def test_xor_round_trip(self, xor_csv, capsys):
        assert main(["compute", str(xor_csv), "--target", "Y", "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["importances"] == [0.5, 0.5]
        assert report["feature_names"] == ["X1", "X2"]

    def test_binary_system_total(self, tmp_path, capsys):
        path = tmp_path / "d1.csv"
        main(["dataset", "1", "-o", str(path)])
        main(["compute", str(path), "--target", "Y", "--format", "json"])
        report = json.loads(capsys.readouterr().out)
        assert report["total_dependency"] == pytest.approx(1.0, abs=1e-12)
        assert sum(report["importances"]) == pytest.approx(1.0, abs=1e-12)

    def test_json_keys_sorted(self, xor_csv, capsys):
        main(["compute", str(xor_csv), "--target", "Y", "--format", "json", "--best-k"])
        text = capsys.readouterr().out
        obj = json.loads(text)
        assert text == json.dumps(obj, sort_keys=True, indent=2) + "\n"

    def test_subsets_and_best_k(self, tmp_path, capsys):
        path = tmp_path / "d8.csv"
        main(["dataset", "8", "-o", str(path)])
        main(["compute", str(path), "--target", "Y", "--format", "json",
              "--emit-subsets", "--best-k"])
        report = json.loads(capsys.readouterr().out)
        assert len(report["subsets"]) == 8
        assert report["best_subsets"][0]["features"] == ["X3_bins1000_full"]
        assert report["best_subsets"][-1]["mask"] == 7

    def test_csv_round_trip_is_bitwise(self, tmp_path, capsys):
        ds = get_dataset(9)
        path = tmp_path / "d9.csv"
        main(["dataset", "9", "-o", str(path)])
        back = read_csv(path, "Y")
        for mask in range(1 << ds.n_features):
            assert dep(back, mask) == dep(ds, mask)
        main(["compute", str(path), "--target", "Y", "--format", "json"])
        report = json.loads(capsys.readouterr().out)
        assert report["importances"] == self_submission().get(9).tolist()

    def test_table_and_csv_formats(self, xor_csv, capsys):
        main(["compute", str(xor_csv), "--target", "Y"])
        assert "X1       0.500000" in capsys.readouterr().out
        main(["compute", str(xor_csv), "--target", "Y", "--format", "csv", "--emit-subsets"])
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "section,features,value"
        assert "subset,X1|X2,1.0" in lines

    def test_bins_option(self, tmp_path, capsys):
        path = tmp_path / "num.csv"
        path.write_text("x,Y\n0.1,a\n0.2,a\n0.8,b\n0.9,b\n")
        assert main(["compute", str(path), "--target", "Y", "--bins", "x:2",
                     "--format", "json"]) == 0
        assert json.loads(capsys.readouterr().out)["importances"] == [1.0]

    def test_output_file(self, xor_csv, tmp_path):
        out = tmp_path / "fi.json"
        assert main(["compute", str(xor_csv), "--target", "Y", "--format", "json",
                     "-o", str(out)]) == 0
        assert json.loads(out.read_text())["total_dependency"] == 1.0


class TestComputeErrors:
    def test_constant_target(self, tmp_path, capsys):
        path = tmp_path / "c.csv"
        path.write_text("a,Y\n1,2\n2,2\n")
        assert main(["compute", str(path), "--target", "Y"]) == 3
        assert "undefined" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["compute", str(tmp_path / "nope.csv"), "--target", "Y"]) == 2

    def test_unknown_target(self, xor_csv):
        assert main(["compute", str(xor_csv), "--target", "Z"]) == 2

    def test_ragged_csv(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("a,Y\n1,2\n3\n")
        assert main(["compute", str(path), "--target", "Y"]) == 2

    def test_no_features(self, tmp_path):
        path = tmp_path / "y.csv"
        path.write_text("Y\n1\n2\n")
        assert main(["compute", str(path), "--target", "Y"]) == 2

    def test_bad_bins(self, xor_csv):
        assert main(["compute", str(xor_csv), "--target", "Y", "--bins", "X1:0"]) == 2

    def test_too_many_features(self, tmp_path):
        path = tmp_path / "d4.csv"
        main(["dataset", "4", "-o", str(path)])
        assert main(["compute", str(path), "--target", "Y", "--max-features", "5"]) == 4

    def test_env_cap(self, xor_csv, monkeypatch):
        monkeypatch.setenv("BPFI_MAX_FEATURES", "1")
        assert main(["compute", str(xor_csv), "--target", "Y"]) == 4


class TestDataset:
    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["dataset", "10", "-o", str(a)])
        main(["dataset", "10", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_json(self, capsys):
        assert main(["dataset", "16", "--format", "json"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["golden_fi"] == [0.167, 0.167, 0.667]
        assert obj["n_samples"] == 1000

    def test_unknown(self):
        assert main(["dataset", "29"]) == 2


class TestVerify:
    def test_self(self, capsys):
        assert main(["verify", "--self"]) == 0
        assert capsys.readouterr().out.count("Pass") == 18

    def test_written_submission_passes(self, tmp_path, capsys):
        path = tmp_path / "bpfi.json"
        assert main(["verify", "--self", "--write-submission", str(path)]) == 0
        assert main(["verify", str(path), "--format", "json"]) == 0
        out = capsys.readouterr().out
        report = json.loads(out[out.index('{\n  "epsilon"'):])
        assert report["summary"]["Pass"] == 18

    def test_failing_submission(self, tmp_path):
        obj = self_submission().to_dict()
        obj["results"]["14"] = [0.55, 0.5]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(obj))
        assert main(["verify", str(path)]) == 1

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        assert main(["verify", str(path)]) == 2

    def test_missing_argument(self):
        assert main(["verify"]) == 2


def test_unwritable_output(xor_csv, tmp_path):
    out = tmp_path / "missing-dir" / "fi.json"
    assert main(["compute", str(xor_csv), "--target", "Y", "-o", str(out)]) == 2
    assert main(["verify", "--self", "-o", str(out)]) == 2
