import json

import pytest
from click.testing import CliRunner

from qteich import catalog, cli
from qteich.division import Verdict


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args):
    return runner.invoke(cli.main, list(args), catch_exceptions=False)


def reports(result):
    return json.loads(result.output)["reports"]


def stub(monkeypatch, outcome):
    """Replace the check table with one check recording ``outcome``."""
    def body(opts, t):
        if outcome == "failed":
            t.exact(False, "forced")
        elif outcome == "numeric":
            t.numeric_bound(1e-14, 1e-12, "forced")
        elif outcome == "exact":
            t.exact(True, "forced")
        elif outcome == "crash":
            raise RuntimeError("boom")

    monkeypatch.setattr(cli, "CHECKS", {"stub": cli.Check(body, "stub")})


class TestExitCodes:
    @pytest.mark.parametrize("outcome,code,status", [
        ("exact", 0, "exact"), ("numeric", 0, "numeric"), ("failed", 1, "failed"),
        ("inconclusive", 1, "inconclusive"), ("crash", 1, "failed"),
    ])
    def test_status_contract(self, runner, monkeypatch, outcome, code, status):
        stub(monkeypatch, outcome)
        res = run(runner, "verify", "stub", "--json")
        assert res.exit_code == code
        (r,) = reports(res)
        assert r["status"] == status and r["schema"] == cli.SCHEMA

    def test_require_exact(self, runner, monkeypatch):
        stub(monkeypatch, "numeric")
        assert run(runner, "verify", "stub", "--require-exact").exit_code == 1
        stub(monkeypatch, "exact")
        assert run(runner, "verify", "stub", "--require-exact").exit_code == 0

    def test_crash_is_reported(self, runner, monkeypatch):
        stub(monkeypatch, "crash")
        (r,) = reports(run(runner, "verify", "stub", "--json"))
        assert "RuntimeError: boom" in r["details"]["error"]

    @pytest.mark.parametrize("args", [
        ["verify", "nonsense"],
        ["verify", "weyl", "--surface", "klein-bottle"],
        ["verify", "weyl", "--curve", "zeta"],
        ["verify", "weyl", "-N", "1"],
        ["trace", "compute", "--curve", "alpha"],
        ["tri", "flip", "--surface", "torus-hole-1", "--edge", "5"],
    ])
    def test_usage_errors(self, runner, args):
        assert run(runner, *args).exit_code == 2

    def test_malformed_json(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(runner, "tri", "show", "--tri", str(bad)).exit_code == 2


class TestOutputs:
    def test_catalog_list(self, runner):
        data = json.loads(run(runner, "catalog", "list", "--json").output)
        assert [s["name"] for s in data["surfaces"]] == catalog.names()

    def test_tri_round_trip(self, runner, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(catalog.get("torus-1p").tri.dumps())
        data = json.loads(run(runner, "tri", "show", "--tri", str(path), "--json").output)
        assert data["topology"]["genus"] == 1 and data["flippable"] == [1, 2, 3]
        flipped = run(runner, "tri", "flip", "--tri", str(path), "--edge", "1", "--json")
        assert len(json.loads(flipped.output)["triangles"]) == 2

    def test_sigma(self, runner):
        data = json.loads(run(runner, "tri", "sigma", "--surface", "torus-1p", "--json").output)
        assert all(abs(x) == 2 for i, r in enumerate(data["sigma"]) for j, x in enumerate(r) if i != j)

    def test_trace_beta_alpha(self, runner):
        res = run(runner, "trace", "compute", "--surface", "torus-hole-1", "--curve", "beta-alpha")
        assert "10 monomials, 13 terms" in res.output
        data = json.loads(run(runner, "trace", "compute", "--surface", "torus-hole-1",
                              "--curve", "beta-alpha", "--json").output)
        assert data["method"] == "transport" and len(data["path"]) == 2

    def test_curve_file(self, runner, tmp_path):
        cfg = catalog.get("torus-hole-1")
        path = tmp_path / "loop.json"
        path.write_text(json.dumps(cfg.curve("alpha").to_json(cfg.tri)))
        res = run(runner, "trace", "compute", "--surface", "torus-hole-1", "--curve", str(path),
                  "--json")
        assert json.loads(res.output)["terms"] == 4


class TestVerify:
    def test_pentagon_exact(self, runner):
        res = run(runner, "verify", "pentagon", "--json")
        (r,) = reports(res)
        assert res.exit_code == 0 and r["status"] == "exact"

    def test_sphere_skein_sizes(self, runner):
        res = run(runner, "verify", "skein-sphere", "--surface", "sphere-4p", "-N", "5", "-N", "7",
                  "--json")
        (r,) = reports(res)
        assert r["status"] == "exact" and r["params"]["N"] == [5, 7]
        assert r["terms"]["sphere-4p"]["intermediate"] == 98

    def test_deterministic_across_jobs(self, runner):
        args = ["verify", "weyl", "phi", "blocks", "--mode", "exact", "--json"]
        a = reports(run(runner, *args))
        b = reports(run(runner, *args, "--jobs", "2"))
        for r in a + b:
            r.pop("ms")
        assert a == b

    def test_torus_skein_covers_both_tori(self, runner):
        (r,) = reports(run(runner, "verify", "skein-torus", "--mode", "exact", "--json"))
        assert r["status"] == "exact"
        assert set(r["terms"]) == {"torus-hole-1", "torus-hole-2"}

    def test_nothing_to_check_is_inconclusive(self, runner):
        res = run(runner, "verify", "skein-sphere", "--surface", "torus-1p", "--json")
        (r,) = reports(res)
        assert r["status"] == "inconclusive" and res.exit_code == 1


def test_tally_status_order():
    t = cli.Tally(cli.Options())
    assert t.status() == "inconclusive"
    t.numeric_bound(0.0, 1e-9, "x")
    assert t.status() == "numeric"
    t.exact(True, "y")
    assert t.status() == "exact"
    t.verdicts.append(Verdict.NOT_EQUAL)
    assert t.status() == "failed"
