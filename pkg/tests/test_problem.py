import json

import numpy as np
import pytest

from quartop.catalog import example
from quartop.numgrid import Grid
from quartop.problem import ProblemSpec, SpecError, build_problem, evaluate, load_problem

EX1 = {
    "grid": {"x_min": -25, "x_max": 25, "n": 1001},
    "u": {"kind": "closed_form", "expr": {"sum": [-5, {"product": [12, {"sech": {"power": 2}}]}]}},
    "v": {"kind": "closed_form", "expr": {"product": [-6, {"sech": {"power": 2}}]}},
}


def test_closed_form_matches_catalog():
    pp = build_problem(ProblemSpec.model_validate(EX1))
    ref = example(1, Grid(-25.0, 25.0, 1001))
    assert (pp.u - ref.pp.u).sup() < 1e-13
    assert (pp.v - ref.pp.v).sup() < 1e-13
    assert pp.u_limit_left == -5.0 and pp.v_limit_right == 0.0
    assert pp.u.order >= 4


def test_expression_vocabulary():
    g = Grid(-3.0, 3.0, 61)
    x = g.coordinate(2)
    t = g.x
    cases = [
        (2.5, np.full_like(t, 2.5)),
        ({"x": 2}, 2 * t),
        ({"cosh": 2}, np.cosh(2 * t)),
        ({"cos": 1}, np.cos(t)),
        ({"tanh": 1}, np.tanh(t)),
        ({"chi": 1}, 1 / (np.sqrt(2) + np.cosh(t))),
        ({"sech": 0.5}, 1 / np.cosh(0.5 * t)),
        ({"power": [{"cosh": 1}, -2]}, np.cosh(t) ** -2),
    ]
    for node, want in cases:
        assert np.allclose(evaluate(node, x).values, want)


@pytest.mark.parametrize("bad", [
    {"nope": 1},
    {"sum": []},
    {"sech": {"scale": 1, "width": 2}},
    {"power": [1]},
    True,
    {"a": 1, "b": 2},
])
def test_bad_expressions(bad):
    with pytest.raises(SpecError):
        evaluate(bad, Grid(0.0, 1.0, 32).coordinate(1))


def test_samples_and_validation(tmp_path):
    g = Grid(-10.0, 10.0, 101)
    spec = {
        "grid": {"x_min": -10, "x_max": 10, "n": 101},
        "u": {"kind": "samples", "values": [0.0] * 101},
        "v": {"kind": "samples", "values": list(-np.exp(-g.x**2))},
    }
    pp = build_problem(ProblemSpec.model_validate(spec))
    assert pp.decaying and pp.v.order == 0
    spec["v"]["values"] = [0.0] * 5
    with pytest.raises(SpecError):
        build_problem(ProblemSpec.model_validate(spec))


def test_load_problem_errors(tmp_path):
    with pytest.raises(SpecError):
        load_problem(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecError):
        load_problem(bad)
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({**EX1, "colour": "red"}))
    with pytest.raises(SpecError):
        load_problem(extra)
    nokind = tmp_path / "nokind.json"
    nokind.write_text(json.dumps({**EX1, "u": {"kind": "closed_form"}}))
    with pytest.raises(SpecError):
        load_problem(nokind)
