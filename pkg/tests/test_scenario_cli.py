import os
import subprocess
import sys
from fractions import Fraction

import pytest

from endotransfer.scenario import (
    ScenarioError,
    build_scenario,
    builtin_scenario_path,
    load_builtin,
    parse_scenario,
)
from endotransfer.verify import (
    VerificationRefused,
    emit_report,
    parse_machine_report,
    run_verify,
)

GOLDEN = builtin_scenario_path("sl2_endoscopy").read_text(encoding="utf-8")


def test_parse_golden_file():
    cfg = parse_scenario(GOLDEN)
    assert cfg.name == "sl2_endoscopy"
    assert cfg.g_type == "A1"
    assert cfg.s_character == [-1]
    assert cfg.grading_g == [1]  # noncompact
    assert cfg.base_x_h == (Fraction(1),)


def test_parse_reports_line_numbers():
    bad = GOLDEN.replace("alpha1 = -1", "alpha1 == -1")
    # the mangled line parses as key 'alpha1 =' with value '-1'? ensure an error
    bad2 = GOLDEN + "\nstray line without equals\n"
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(bad2)
    assert any("stray line" in msg for _, msg in exc.value.problems)
    lineno = [n for n, _ in exc.value.problems][0]
    assert lineno == len(bad2.splitlines())


def test_parse_rejects_bad_grade_and_sign():
    bad = GOLDEN.replace("alpha1 = noncompact", "alpha1 = sideways")
    with pytest.raises(ScenarioError):
        parse_scenario(bad)
    bad = GOLDEN.replace("alpha1 = -1", "alpha1 = 2")
    with pytest.raises(ScenarioError):
        parse_scenario(bad)


def test_build_rejects_wall_base_point():
    text = GOLDEN.replace("x_h = 1", "x_h = 0").replace("x_g = 1", "x_g = 0")
    with pytest.raises(ScenarioError) as exc:
        build_scenario(parse_scenario(text))
    assert any("regularity" in msg for _, msg in exc.value.problems)


def test_build_rejects_mismatched_base_point():
    text = GOLDEN.replace("x_g = 1", "x_g = 2")
    with pytest.raises(ScenarioError) as exc:
        build_scenario(parse_scenario(text))
    assert any("base diagram" in msg for _, msg in exc.value.problems)


def test_build_rejects_wrong_h_grading_count():
    text = GOLDEN.replace("[base_point]", "[grading_h]\nalpha1 = compact\n\n[base_point]")
    with pytest.raises(ScenarioError) as exc:
        build_scenario(parse_scenario(text))
    assert any("grading_h" in msg for _, msg in exc.value.problems)


def test_non_elliptic_scenario_refused():
    text = """
name = not_elliptic
g_type = A2
form_scale = 1

[grading_g]
alpha1 = noncompact
alpha2 = noncompact

[s_character]
alpha1 = 1
alpha2 = 1

[grading_h]
alpha1 = noncompact
alpha2 = noncompact

[base_point]
x_h = 1, 1/3
x_g = 1, 1/3
"""
    with pytest.raises(ScenarioError) as exc:
        build_scenario(parse_scenario(text))
    assert any("elliptic" in msg for _, msg in exc.value.problems)


def test_run_verify_zero_samples_vacuous_pass():
    sc = load_builtin("sl2_endoscopy")
    report = run_verify(sc, 0, 1)
    assert report.all_passed and report.pass_count == 0
    text = emit_report(report, "machine")
    parsed = parse_machine_report(text)
    assert parsed["status"] == "PASS"
    assert parsed["records"] == []


def test_reports_deterministic_and_roundtrip():
    sc = load_builtin("sl2_endoscopy")
    r1 = run_verify(sc, 7, 42)
    sc2 = load_builtin("sl2_endoscopy")
    r2 = run_verify(sc2, 7, 42)
    t1 = emit_report(r1, "machine")
    t2 = emit_report(r2, "machine")
    assert t1 == t2  # byte identical
    parsed = parse_machine_report(t1)
    for rec, orig in zip(parsed["records"], r1.records):
        assert rec.x_h == orig.x_h
        assert rec.x_g == orig.x_g
        assert rec.lhs == orig.report.lhs
        assert rec.rhs == orig.report.rhs
        assert rec.abs_error == orig.report.abs_error
        assert rec.termwise_max == orig.report.termwise_max
    assert parsed["conventions"]["duality_sign"]
    different = emit_report(run_verify(load_builtin("sl2_endoscopy"), 7, 43), "machine")
    assert different != t1


def test_human_report_contains_summary():
    sc = load_builtin("sl2_endoscopy")
    text = emit_report(run_verify(sc, 3, 1), "human")
    assert "summary:" in text and "PASS" in text


def _run_cli(*args, env=None):
    cmd = [sys.executable, "-m", "endotransfer.cli", *args]
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(cmd, capture_output=True, text=True, env=full_env)


def test_cli_verify_pass_and_exit_codes(tmp_path):
    scn = str(builtin_scenario_path("sl2_endoscopy"))
    res = _run_cli("verify", scn, "--samples", "5", "--seed", "3", "--format", "machine")
    assert res.returncode == 0
    assert "status = PASS" in res.stdout

    bad = tmp_path / "broken.scn"
    bad.write_text(GOLDEN + "\nnonsense\n", encoding="utf-8")
    res = _run_cli("verify", str(bad))
    assert res.returncode == 2


def test_cli_factors_and_orbits():
    scn = str(builtin_scenario_path("sl2_endoscopy"))
    res = _run_cli("factors", scn, "--xh", "3/2", "--xg=-3/2")
    assert res.returncode == 0
    assert "transfer factor = -1" in res.stdout
    res = _run_cli("factors", scn, "--xh", "3/2", "--xg", "5")
    assert "transfer factor = 0" in res.stdout

    res = _run_cli("orbits", scn, "--xg", "1")
    assert res.returncode == 0
    assert "splits into 2 rational classes" in res.stdout


def test_cli_h1_command(tmp_path):
    lat = tmp_path / "circle.lat"
    lat.write_text("-1\n", encoding="utf-8")
    res = _run_cli("h1", str(lat))
    assert res.returncode == 0
    assert "Z/2" in res.stdout


def test_cli_env_tolerance(tmp_path):
    scn = str(builtin_scenario_path("sl2_endoscopy"))
    res = _run_cli(
        "verify", scn, "--samples", "2", "--seed", "1", "--format", "machine",
        env={"ENDOTRANSFER_TOL": "1e-3"},
    )
    assert res.returncode == 0
    assert "tolerance = 0.001" in res.stdout


def test_run_verify_refuses_non_elliptic_datum():
    import dataclasses

    sc = load_builtin("sl2_endoscopy")
    sc.engine.datum = dataclasses.replace(sc.engine.datum, elliptic=False)
    with pytest.raises(VerificationRefused):
        run_verify(sc, 1, 0)


def test_scenario_with_identity_extras():
    text = GOLDEN.replace(
        "[base_point]", "[real_weyl_extras]\ng = 1 1\n\n[base_point]"
    )
    sc = build_scenario(parse_scenario(text))
    assert len(sc.engine.real_weyl_g) == 1  # s1 s1 = identity adds nothing


def test_console_entry_point_help():
    import shutil
    import subprocess

    exe = shutil.which("endotransfer")
    if exe is None:
        pytest.skip("console script not on PATH")
    res = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify" in res.stdout
