import json
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from rankforge import Matrix
from rankforge.cli import COMMANDS
from rankforge.mmio import parse_matrix, write_matrix

from _corpus import rank_r_matrix
from _golden import BAD, DATA, GOOD, check_bad_file, check_good_file, cli, schema_problems


@pytest.mark.parametrize("name", sorted(GOOD))
def test_good_file_matches_golden(name):
    assert check_good_file(name) == []


@pytest.mark.parametrize("name", sorted(BAD))
def test_bad_file_matches_golden(name):
    assert check_bad_file(name) == []


def test_corpus_has_ten_files():
    files = sorted(p.name for p in DATA.iterdir() if p.is_file())
    assert files == sorted([*GOOD, *BAD])
    assert len(files) == 10


def write(tmp_path, a, name="a.mtx"):
    p = tmp_path / name
    write_matrix(a, p)
    return p


class TestExitCodes:
    def test_verify_identity(self, tmp_path):
        code, out, _ = cli("verify", write(tmp_path, Matrix.identity(3)), "--mode", "exact", "--json")
        doc = json.loads(out)
        assert code == 0 and doc["overall"] is True
        routes = {e["route"]: (e["row_rank"], e["col_rank"]) for e in doc["entries"]}
        assert routes == {"elementary": (3, 3), "ulv": (3, 3), "cr": (3, 3), "oracle": (3, 3)}

    def test_verification_failure(self, tmp_path):
        # numerically rank-ambiguous: the float routes disagree at the default tolerance
        hilbert = Matrix([[1.0 / (i + j + 1) for j in range(8)] for i in range(8)], exact=False)
        code, out, _ = cli("verify", write(tmp_path, hilbert), "--json")
        assert code == 1 and json.loads(out)["overall"] is False

    @pytest.mark.parametrize(
        "argv",
        [
            ["frobnicate", "x.csv"],
            ["verify"],
            ["verify", "x.csv", "--bogus"],
            ["verify", "x.csv", "--mode", "complex"],
            ["verify", "x.csv", "--format", "json"],
            ["verify", "x.csv", "--tol", "abc"],
        ],
    )
    def test_usage(self, argv):
        code, _, err = cli(*argv)
        assert code == 2 and "usage" in err

    def test_tol_in_exact_mode(self):
        code, _, err = cli("rank", DATA / "identity.csv", "--tol", "1e-8")
        assert code == 2 and "float mode" in err

    def test_nonpositive_tol(self):
        code, _, _ = cli("rank", DATA / "decimal.csv", "--tol", "-1")
        assert code == 2

    def test_split_needs_vector(self):
        assert cli("split", DATA / "identity.csv")[0] == 2
        assert cli("split", DATA / "identity.csv", "--vector", "1,2")[0] == 2
        assert cli("split", DATA / "identity.csv", "--vector", "1,a,2")[0] == 2

    def test_missing_file(self, tmp_path):
        code, out, err = cli("verify", tmp_path / "nope.csv")
        assert code == 3 and not out and "cannot read" in err

    def test_help(self):
        assert cli("--help")[0] == 0


class TestTolerance:
    SMALL = Matrix([[1.0, 0.0], [0.0, 1e-6]], exact=False)

    def rank_of(self, path, *extra):
        code, out, _ = cli("rank", path, "--json", *extra)
        assert code == 0
        return json.loads(out)["entries"][0]["row_rank"]

    def test_flag(self, tmp_path):
        p = write(tmp_path, self.SMALL)
        assert self.rank_of(p) == 2
        assert self.rank_of(p, "--tol", "1e-3") == 1

    def test_env_fallback(self, tmp_path, monkeypatch):
        p = write(tmp_path, self.SMALL)
        monkeypatch.setenv("RANKFORGE_TOL", "1e-3")
        assert self.rank_of(p) == 1
        assert self.rank_of(p, "--tol", "1e-12") == 2

    def test_env_ignored_in_exact_mode(self, monkeypatch):
        monkeypatch.setenv("RANKFORGE_TOL", "1e-3")
        assert self.rank_of(DATA / "identity.csv") == 3

    def test_bad_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RANKFORGE_TOL", "small")
        assert cli("rank", write(tmp_path, self.SMALL))[0] == 2


EXPECTED_FILES = {
    "rref": {"R0", "E"},
    "cr": {"C", "R"},
    "qr": {"Q", "R", "Qnorm2"},
    "lq": {"L", "Q", "Qnorm2"},
    "ulv": {"U", "T", "V", "Unorm2", "Vnorm2"},
    "urv": {"U", "T", "V", "Unorm2", "Vnorm2"},
    "rankdec": {"D", "F"},
    "cur": {"C", "Uc", "Rr"},
    "subspaces": {"col", "row", "null", "leftnull"},
}


class TestOutputs:
    @pytest.mark.parametrize("command", sorted(EXPECTED_FILES))
    def test_factor_files(self, tmp_path, command):
        src = DATA / ("outer.mtx" if command != "qr" else "coord.mtx")
        if command == "lq":
            src = DATA / "outer.mtx"
        code, out, _ = cli(command, src, "--out", tmp_path / "sub" / "f", "--json")
        assert code == 0
        assert schema_problems(json.loads(out)) == []
        written = {p.name[len("f_") : -len(".mtx")] for p in (tmp_path / "sub").iterdir()}
        assert written == EXPECTED_FILES[command]
        for p in (tmp_path / "sub").iterdir():
            parse_matrix(p)

    def test_float_mode_has_no_norm_files(self, tmp_path):
        code, _, _ = cli("qr", DATA / "decimal.csv", "--out", tmp_path / "f")
        assert code == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ["f_Q.mtx", "f_R.mtx"]

    def test_cur_on_invertible(self, tmp_path):
        a = Matrix([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
        code, _, _ = cli("cur", write(tmp_path, a), "--out", tmp_path / "f")
        assert code == 0
        for name in ("C", "Uc", "Rr"):
            assert parse_matrix(tmp_path / f"f_{name}.mtx") == a

    def test_exact_factors_multiply_back(self, tmp_path):
        cli("cr", DATA / "rational.csv", "--out", tmp_path / "f")
        c, r = (parse_matrix(tmp_path / f"f_{n}.mtx") for n in ("C", "R"))
        assert c @ r == parse_matrix(DATA / "rational.csv")

    def test_full_qr(self, tmp_path):
        cli("qr", DATA / "coord.mtx", "--full", "--out", tmp_path / "f")
        assert parse_matrix(tmp_path / "f_Q.mtx").shape == (4, 4)

    def test_rankdec_split(self, tmp_path):
        for split in ("DL_F", "D_LF"):
            assert cli("rankdec", DATA / "outer.mtx", "--split", split, "--out", tmp_path / split)[0] == 0
            d, f = (parse_matrix(tmp_path / f"{split}_{n}.mtx") for n in ("D", "F"))
            assert d @ f == parse_matrix(DATA / "outer.mtx")

    def test_split(self, tmp_path):
        a = Matrix([[1, 2], [2, 4]])
        code, out, _ = cli("split", write(tmp_path, a), "--vector", "1,0", "--out", tmp_path / "x", "--json")
        assert code == 0 and json.loads(out)["factor_checks"]["split"]["pass"]
        assert parse_matrix(tmp_path / "x_xr.mtx") == Matrix([[Fraction(1, 5)], [Fraction(2, 5)]])
        assert parse_matrix(tmp_path / "x_xn.mtx") == Matrix([[Fraction(4, 5)], [Fraction(-2, 5)]])

    def test_text_output(self):
        code, out, _ = cli("rref", DATA / "outer.mtx")
        assert code == 0
        assert out.splitlines()[0] == "R0 (3x4):" and out.rstrip().endswith("overall: pass")

    def test_text_verify(self):
        code, out, _ = cli("verify", DATA / "zero.mtx")
        lines = out.splitlines()
        assert code == 0 and lines[0].startswith("cr ") and "row_rank=0 col_rank=0 pass" in lines[0]

    def test_rank_random_5x7(self, tmp_path):
        a = rank_r_matrix(random.Random(109), 5, 7, 3)
        for mode in ("exact", "float"):
            p = write(tmp_path, a, f"{mode}.mtx")
            code, out, _ = cli("verify", p, "--mode", mode, "--json")
            doc = json.loads(out)
            assert code == 0 and doc["mode"] == mode
            assert all((e["row_rank"], e["col_rank"]) == (3, 3) for e in doc["entries"])
            if mode == "float":
                values = [v for e in doc["entries"] for v in e["residuals"].values()]
                values += [v for fc in doc["factor_checks"].values() for v in fc["residuals"].values()]
                assert values and max(values) < 1e-9

    @pytest.mark.parametrize("command", COMMANDS)
    def test_every_command_runs(self, command):
        extra = ["--vector", "1,2,3"] if command == "split" else []
        src = DATA / ("identity.csv")
        code, out, _ = cli(command, src, "--json", *extra)
        assert code == 0 and schema_problems(json.loads(out)) == []


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rankforge", "rank", str(DATA / "outer.mtx")], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "row_rank=1 col_rank=1 pass" in proc.stdout
