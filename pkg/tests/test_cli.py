import csv
import io
import json
from pathlib import Path

import pytest

from vsums.cli import run
from vsums.decomp import su3_problem
from vsums.verlinde import direct_verlinde

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def cfg(name):
    return str(CONFIGS / f"{name}.json")


def invoke(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, buf.getvalue()


def invoke_json(*argv):
    code, text = invoke(*argv)
    assert code == 0, text
    return json.loads(text)


def write_config(tmp_path, data):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(data))
    return str(path)


class TestCommands:
    def test_eval(self):
        assert invoke_json("eval", "--config", cfg("rank1-n2"), "--lambda", "7", "--ell", "3") == {"value": "1/3"}

    def test_eval_negative_lambda(self):
        out = invoke_json("eval", "--config", cfg("rank1-n1"), "--lambda=-5", "--ell", "2")
        assert out == invoke_json("eval", "--config", cfg("rank1-n1"), "--lambda", "1", "--ell", "2")

    def test_eval_su3_matches_oracle(self):
        out = invoke_json("eval", "--config", cfg("su3"), "--lambda=-4,2", "--ell", "2")
        assert out["value"] == "{0.numerator}/{0.denominator}".format(direct_verlinde(su3_problem(), (-4, 2), 2).to_rational())

    def test_germ(self):
        out = invoke_json("germ", "--config", cfg("rank1-n1"))
        assert out["modulus"] == 1
        (cls,) = out["classes"]
        terms = {json.dumps(t["monomial"], sort_keys=True): t["coeff"] for t in cls["poly"]}
        assert terms == {"{}": "-1/2", '{"ell": 1}': "1/2", '{"l1": 1}': "-1/1"}

    def test_germ_cache_round_trip(self, tmp_path):
        germ_file = tmp_path / "g.json"
        code, text = invoke("germ", "--config", cfg("su3"), "--out", str(germ_file))
        assert code == 0 and germ_file.exists()
        base = ("decompose", "--config", cfg("su3"), "--lambda=3,-3", "--ell", "2", "--oracle")
        cached = invoke_json(*base, "--germ-cache", str(germ_file))
        fresh = invoke_json(*base)
        assert cached == fresh
        assert cached["match"] is True

    def test_germ_cache_wrong_chamber(self, tmp_path, capsys):
        germ_file = tmp_path / "g.json"
        assert invoke("germ", "--config", cfg("su3"), "--chamber", "2/5,1/5", "--out", str(germ_file))[0] == 0
        code, _ = invoke("decompose", "--config", cfg("su3"), "--lambda", "0,0", "--ell", "1",
                         "--germ-cache", str(germ_file))
        assert code == 2
        assert "different chamber" in capsys.readouterr().err

    def test_decompose(self):
        out = invoke_json("decompose", "--config", cfg("rank1-n2"), "--lambda", "7", "--ell", "3", "--oracle")
        assert out["total"] == out["oracle"] == "1/3"
        assert sum(1 for t in out["terms"] if t["dim"] == 0) == 2

    def test_partition(self):
        # compositions of 3 into two parts
        assert invoke_json("partition", "--config", cfg("rank1-n2"), "--tau", "1", "--lambda", "3") == {"value": "4/1"}

    def test_equivariant(self):
        out = invoke_json("equivariant", "--config", cfg("rank1-n1"), "--lambda", "0", "--ell", "2", "--order", "2")
        assert out == {"order": 2, "terms": [{"exponents": [0], "value": "1/2"}, {"exponents": [1], "value": "1/4"}]}

    def test_su3_csv(self):
        code, text = invoke("su3", "--ell", "2", "--window", "1", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 9
        assert all(r["match"] == "true" and r["total"] == r["oracle"] for r in rows)
        origin = next(r for r in rows if (r["mu1"], r["mu2"]) == ("0", "0"))
        assert origin["germ"] == "6/1"

    def test_su3_json(self):
        out = invoke_json("su3", "--ell", "1", "--window", "1")
        assert out["all_match"] and out["anti_invariant"] and out["germ_matches_formula"]
        assert len(out["rows"]) == 9

    def test_verify_rank1(self):
        code, text = invoke("verify", "--suite", "rank1")
        assert code == 0
        report = json.loads(text)
        assert report["passed"]
        assert [c["criterion"] for c in report["criteria"]] == [1, 2, 3, 7, 8]


class TestErrors:
    def test_missing_alpha_entry(self, tmp_path, capsys):
        path = write_config(tmp_path, {"rank": 2, "weights": [{"alpha": [1]}]})
        code, _ = invoke("eval", "--config", path, "--lambda", "0,0", "--ell", "1")
        assert code == 2
        assert "/weights/0/alpha" in capsys.readouterr().err

    def test_bad_phase(self, tmp_path, capsys):
        path = write_config(tmp_path, {"rank": 1, "weights": [{"alpha": [1], "u": "1/x"}]})
        code, _ = invoke("eval", "--config", path, "--lambda", "0", "--ell", "1")
        assert code == 2
        assert "/weights/0/u" in capsys.readouterr().err

    def test_unreadable_file(self, tmp_path):
        code, _ = invoke("eval", "--config", str(tmp_path / "missing.json"), "--lambda", "0", "--ell", "1")
        assert code == 2

    def test_bad_ell(self):
        code, _ = invoke("eval", "--config", cfg("rank1-n1"), "--lambda", "0", "--ell", "0")
        assert code == 2

    def test_wall_point(self, capsys):
        code, _ = invoke("germ", "--config", cfg("rank1-n1"), "--chamber", "1")
        assert code == 3
        assert "WallPointError" in capsys.readouterr().err

    def test_nongeneric_gamma(self, capsys):
        code, _ = invoke("decompose", "--config", cfg("su3"), "--gamma", "1/2,1/2", "--lambda", "0,0", "--ell", "1")
        assert code == 3
        err = capsys.readouterr().err
        assert "NonGenericGammaError" in err or "WallPointError" in err

    def test_size_guard(self, monkeypatch, capsys):
        monkeypatch.setenv("VERLINDE_MAX_ORACLE", "3")
        code, _ = invoke("eval", "--config", cfg("rank1-n1"), "--lambda", "0", "--ell", "10")
        assert code == 3
        assert "SizeLimitError" in capsys.readouterr().err
        assert invoke("eval", "--config", cfg("rank1-n1"), "--lambda", "0", "--ell", "10", "--force")[0] == 0

    def test_auto_perturb(self):
        code, text = invoke("decompose", "--config", cfg("su3"), "--gamma", "1/2,1/2", "--lambda", "0,0",
                            "--ell", "1", "--auto-perturb", "7", "--oracle")
        assert code == 0
        assert json.loads(text)["match"] is True


@pytest.mark.parametrize("argv", [
    ("germ", "--config", cfg("su3"), "--symbolic"),
    ("decompose", "--config", cfg("rank2-mixed"), "--lambda=1,-1", "--ell", "2"),
    ("verify", "--suite", "rank1"),
])
def test_deterministic(argv):
    assert invoke(*argv) == invoke(*argv)
