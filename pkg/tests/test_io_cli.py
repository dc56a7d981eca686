import json
import os
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from toricscore.cli import main
from toricscore.errors import ProblemParseError
from toricscore.io import (
    dump_problem,
    exit_code,
    parse_problem,
    parse_problem_text,
    problem_from_dict,
    report_json,
    report_text,
    run_queries,
)
from toricscore.score import H1_WARNING, COMPLETENESS_WARNING, codimension_warning

PROBLEMS = Path(__file__).resolve().parents[1] / "problems"

P2_FAN = {"rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]]}


def p2(**extra):
    d = {"fan": P2_FAN, "deformation": "euler"}
    d.update(extra)
    return d


def test_minimal_file_parses():
    pf = problem_from_dict(p2(queries=[{"kind": "intersect", "classes": [[1], [1]]}]))
    assert pf.deformation == "euler" and len(pf.queries) == 1
    rep = run_queries(pf)
    assert rep["results"][0]["value"] == "1" and exit_code(rep) == 0


def test_rational_strings_are_normalized():
    pf = problem_from_dict(p2(queries=[{"kind": "product", "sigmas": [["3/6"], [[2, 4]]]}]))
    assert pf.queries[0].classes == ((Fraction(1, 2),), (Fraction(1, 2),))
    assert run_queries(pf)["results"][0]["value"] == "1/4"


def test_decimal_rejected_with_location():
    with pytest.raises(ProblemParseError) as info:
        problem_from_dict(p2(queries=[{"kind": "product", "sigmas": [["0.5"], [1]]}]))
    assert info.value.location == "queries[0].sigmas[0][0]"


def test_wrong_class_J_rejected_with_field_path():
    hyp = {"label": "C", "f": [[[1, 1, 0], 1], [[0, 0, 2], 1]],
           "J": {"0": [[[0, 1, 0], 1]], "2": [[[0, 0, 2], 2]]}}
    with pytest.raises(ProblemParseError) as info:
        problem_from_dict(p2(hypersurfaces=[hyp]))
    assert info.value.location == "hypersurfaces[0].J.2"
    assert "hypersurfaces[0].J.2" in str(info.value)


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d["fan"]["rays"].__setitem__(0, [2, 0]), "fan"),
    (lambda d: d.__setitem__("deformation", [{"row_ray": 9, "col_ray": 0, "w": [1]}]), "deformation[0].row_ray"),
    (lambda d: d.__setitem__("hypersurfaces", [{"f": [[[1, 1], 1]]}]), "hypersurfaces[0].f[0]"),
    (lambda d: d.__setitem__("hypersurfaces", [{"f": [[[1, 0, 0], 1], [[0, 0, 2], 1]]}]), "hypersurfaces[0].f"),
    (lambda d: d.__setitem__("queries", [{"kind": "bogus"}]), "queries[0].kind"),
    (lambda d: d.__setitem__("queries", [{"kind": "intersect", "classes": [[1]]}]), "queries[0].classes"),
    (lambda d: d.__setitem__("queries", [{"kind": "intersect", "classes": ["D7", [1]]}]), "queries[0].classes[0]"),
])
def test_located_errors(mutate, where):
    d = json.loads(json.dumps(p2()))
    mutate(d)
    with pytest.raises(ProblemParseError) as info:
        problem_from_dict(d)
    assert info.value.location == where


def test_json_syntax_error_has_line():
    with pytest.raises(ProblemParseError) as info:
        parse_problem_text('{\n  "fan": [1,\n}')
    assert info.value.location.startswith("line 3")


@pytest.mark.parametrize("path", sorted(PROBLEMS.glob("*.json")), ids=lambda p: p.stem)
def test_round_trip(path):
    pf = parse_problem(path)
    again = problem_from_dict(json.loads(json.dumps(dump_problem(pf))))
    assert again == pf
    assert dump_problem(again) == dump_problem(pf)


def test_p4_quadric_score_and_p2_ring():
    rep = run_queries(parse_problem(PROBLEMS / "p4_hypersurfaces.json"))
    scores = {tuple(r["hypersurfaces"]): r for r in rep["results"] if r["kind"] == "score"}
    assert scores[("Q",)]["value"] == "2" and scores[("Q",)]["gammas"] == {"Q": ["2"]}
    ring = next(r for r in run_queries(parse_problem(PROBLEMS / "p2.json"))["results"] if r["kind"] == "ring")
    assert [g["text"] for g in ring["generators"]] == ["psi1^3"] and ring["dims"] == [1, 1, 1]


def test_broken_fan_validate_fails():
    rep = run_queries(parse_problem(PROBLEMS / "broken_fan.json"))
    assert rep["results"][0]["status"] == "failed: wall condition"
    assert exit_code(rep) == 2


def test_query_errors_are_isolated():
    hyp = {"label": "C", "f": [[[1, 1, 0], 1], [[0, 0, 2], 1]], "J": {"0": [[[0, 1, 0], 1]], "1": [[[1, 0, 0], 1]],
                                                                       "2": [[[0, 0, 1], 1]]}}
    pf = problem_from_dict(p2(hypersurfaces=[hyp], queries=[
        {"kind": "score", "sigmas": [[1]]}, {"kind": "intersect", "classes": [[1], [1]]}]))
    rep = run_queries(pf)
    assert rep["results"][0]["status"].startswith("error: DivisibilityError")
    assert rep["results"][1]["status"] == "ok"
    assert exit_code(rep) == 3


def test_warnings_appear_verbatim():
    rep = run_queries(parse_problem(PROBLEMS / "p2.json"))
    score = next(r for r in rep["results"] if r["kind"] == "score")
    assert codimension_warning(1, 2) in score["warnings"] and H1_WARNING in score["warnings"]
    rep = run_queries(parse_problem(PROBLEMS / "p5_deformed_ci.json"))
    score = next(r for r in rep["results"] if r["kind"] == "score")
    assert score["warnings"] == [H1_WARNING]
    assert COMPLETENESS_WARNING == "fan completeness unverified"


def test_strict_hypotheses_turns_violation_into_error():
    rep = run_queries(parse_problem(PROBLEMS / "p2.json"), allow_hypothesis_violations=False)
    score = next(r for r in rep["results"] if r["kind"] == "score")
    assert score["status"].startswith("error: HypothesisError")


def test_report_text_projection():
    rep = run_queries(parse_problem(PROBLEMS / "p5_two_quadrics.json"))
    text = report_text(rep)
    assert "value = 4" in text and rep["input_digest"] in text


@pytest.mark.parametrize("path", sorted(PROBLEMS.glob("*.json")), ids=lambda p: p.stem)
def test_report_is_stable(path):
    a = report_json(run_queries(parse_problem(path)))
    b = report_json(run_queries(parse_problem(path)))
    assert a == b


def test_cli_in_process(capsys):
    assert main(["run", str(PROBLEMS / "p4_hypersurfaces.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [r["value"] for r in out["results"] if r["kind"] == "score"] == ["1", "2", "3", "1"]
    assert main(["validate", str(PROBLEMS / "broken_fan.json")]) == 2
    capsys.readouterr()
    assert main(["intersect", str(PROBLEMS / "f1.json"), "--class", "D1", "--class", "D1"]) == 0
    assert json.loads(capsys.readouterr().out)["results"][0]["value"] == "-1"
    assert main(["score", str(PROBLEMS / "p4_hypersurfaces.json"), "--hypersurface", "K",
                 "--sigma", "1", "--sigma", "1", "--sigma", "1", "--output", "text"]) == 0
    assert "value = 3" in capsys.readouterr().out
    assert main(["product", str(PROBLEMS / "p1xp1_deformed.json"), "--sigma", "1,0", "--sigma", "1/2,1"]) == 0
    capsys.readouterr()


def test_cli_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"fan": 3}')
    assert main(["run", str(bad)]) == 2
    assert "parse error: fan:" in capsys.readouterr().err
    assert main(["intersect", str(PROBLEMS / "p2.json"), "--class", "1"]) == 2


def test_cli_subprocess():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "toricscore", "run", str(PROBLEMS / "p5_two_quadrics.json")],
                          capture_output=True, text=True, env=env, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]
