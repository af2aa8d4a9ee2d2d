import csv
import io
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpl.cli import bracket_result, main
from qpl.demo import cotangent_demo, cotangent_limit, half_integer_sum, partial_sum
from qpl.report import Report, SuiteConfig, parse_tolerances, render, to_json
from qpl.suites import run_suite

names = st.text("abcdefghijklmnopqrstuvwxyz:_-", min_size=1, max_size=12)
configs = st.builds(
    SuiteConfig,
    suite=st.sampled_from(["qp-core", "fusion", "moduli"]),
    group=st.sampled_from(["su2", "su3", "so3", "torus3"]),
    seed=st.integers(0, 10**9),
    points=st.integers(1, 500),
    tol=st.dictionaries(names, st.floats(1e-16, 1.0), max_size=3),
    out=st.sampled_from(["", "report.json", "out/r.md"]),
    format=st.sampled_from(["json", "csv", "md"]),
)


@given(configs)
def test_config_round_trip(config):
    text = config.to_text()
    back = SuiteConfig.from_text(text)
    assert back == config
    assert back.to_text() == text


def test_config_errors():
    with pytest.raises(ValueError):
        SuiteConfig.from_text("group = su2\n")
    with pytest.raises(ValueError):
        SuiteConfig.from_text("suite = qp-core\ncolour = red\n")
    with pytest.raises(ValueError):
        parse_tolerances(["closed"])


def test_report_pass_flag_and_overrides():
    rep = Report("s", "su2", 1, 1)
    assert rep.add("a", "x = x", 1e-9)
    assert not rep.add("b", "y = y", 1e-9, overrides={"closed": 1e-10})
    assert rep.add("c", "z = z", 5e-7, "fd2")
    assert not rep.add("d", "w = w", float("nan"))
    assert not rep.passed and rep.summary()["failed"] == 2


def test_report_formats():
    rep = Report("s", "su2", 1, 1)
    rep.add("a", "x = x", 1e-12)
    rows = list(csv.DictReader(io.StringIO(render(rep, "csv"))))
    assert rows[0]["name"] == "a" and rows[0]["passed"] == "1"
    assert "| a |" in render(rep, "md")
    assert json.loads(render(rep, "json"))["summary"]["passed"]
    with pytest.raises(ValueError):
        render(rep, "xml")


def test_reports_are_deterministic():
    cfg = SuiteConfig("qp-core", "su2", 4, 5)
    assert to_json(run_suite(cfg), stable=True) == to_json(run_suite(cfg), stable=True)


def test_torus_core_is_exact():
    rep = run_suite(SuiteConfig("qp-core", "torus3", 1, 5))
    assert rep.passed and rep.summary()["max_residual"] < 1e-14


def test_unknown_suite_and_group():
    with pytest.raises(ValueError):
        run_suite(SuiteConfig("nope"))
    with pytest.raises(ValueError):
        run_suite(SuiteConfig("qp-core", "sp4"))


def test_verify_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "qp-core", "--group", "su2", "--points", "5", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["summary"]["passed"]
    # calibration run: tolerances below the finite-difference floor must fail
    assert main(["verify", "rmatrix", "--group", "su3", "--points", "3", "--tol", "all=1e-12",
                 "--out", str(out)]) == 1
    assert main(["verify", "nope"]) == 2
    assert main(["verify", "qp-core", "--group", "sp4"]) == 2


def test_verify_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "r.csv"
    cfg.write_text(f"# smoke run\nsuite = cohomology\ngroup = so3\npoints = 2\nformat = csv\n"
                   f"out = {out}\n", encoding="utf-8")
    assert main(["verify", "--config", str(cfg)]) == 0
    assert out.read_text().startswith("suite,group,seed,name")


def test_sample_dump(tmp_path):
    dump = tmp_path / "d.csv"
    assert main(["verify", "qp-core", "--points", "2", "--out", str(tmp_path / "r.json"),
                 "--dump", str(dump)]) == 0
    rows = list(csv.DictReader(io.StringIO(dump.read_text())))
    assert {r["field"] for r in rows} == {"P", "phi_M"}
    assert rows[0].keys() == {"suite", "point_seed", "field", "index", "value"}


def test_bracket_same_word_is_zero():
    res = bracket_result(1, 1, "su2", "a1", "a1", 7)
    assert abs(res["bracket"]) < 1e-12


def test_bracket_matches_fd_oracle():
    res = bracket_result(1, 1, "su2", "a1", "b1", 7)
    assert res["certificates"]["fd_oracle"] < 1e-8
    assert res["point"]["seed"] == 7 and res["point"]["solver_iterations"] >= 0


def test_bracket_parse_error(capsys):
    assert main(["bracket", "--w1", "a1''x", "--w2", "b1"]) == 2
    assert "offset 2" in capsys.readouterr().err


def test_cotangent_demo():
    res = cotangent_demo(0.25, 10**4)
    errs = [r["error"] for r in res["rows"]]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert -1.1 < res["rate"] < -0.9
    assert cotangent_limit(0.5) == 0.0
    for N in (1, 10, 1000):
        assert half_integer_sum(0.5, N) == math.fsum([1 / (2 * math.pi * (N + 0.5))])
        assert abs(partial_sum(0.5, N) - half_integer_sum(0.5, N)) < 1e-15
    with pytest.raises(ValueError):
        cotangent_demo(2.0, 10)
    assert main(["demo", "cotangent", "--x", "3"]) == 2


def test_crosssection_command(tmp_path):
    out = tmp_path / "grid.csv"
    assert main(["crosssection", "--group", "su2", "--base", "0.5", "--samples", "2",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 2 and "engine_h" in rows[0]
