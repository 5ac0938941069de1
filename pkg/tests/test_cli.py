import json

import pytest

from vchoquet.cli import main

CUBE_DUAL = {"dim": 3, "ball": {"type": "polytope", "vertices": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]]}}
SQUARE_DUAL = {"dim": 2, "ball": {"type": "polytope", "vertices": [[1, 0], [0, 1], [-1, 0], [0, -1]]}}


def write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(p)


def scenario(commands, space=SQUARE_DUAL, **sections):
    base = {
        "schema": 1,
        "space": space,
        "vector_measures": {"mu1": {"entries": {"t": [1, 0]}}},
        "atomic_measures": {
            "k": {"atoms": [{"t": "t", "xstar": [1, 0], "w": 1}]},
            "edge": {"atoms": [{"t": "t", "xstar": [1, 1], "w": 0.5}, {"t": "t", "xstar": [1, -1], "w": 0.5}]},
        },
        "dfunctions": {"absy": {"pieces": {"t": [[0, 1], [0, -1]]}}},
        "commands": commands,
    }
    base.update(sections)
    return base


def run(tmp_path, sc, *flags):
    path = write(tmp_path, "scenario.json", sc)
    out = tmp_path / "report.json"
    code = main(["run", path, "--json", str(out), *flags])
    return code, json.loads(out.read_text()) if out.exists() else None


def test_transfer_reports_atoms_and_roundtrip(tmp_path):
    code, rep = run(tmp_path, scenario([{"op": "transfer", "measure": "mu1"}]))
    assert code == 0
    e = rep["results"][0]
    assert e["value"]["atoms"] == [{"t": "t", "w": 1.0, "xstar": [1.0, 0.0]}]
    assert e["roundtrip"]["holds"] is True
    assert e["anchor"]


def test_every_operation_runs(tmp_path):
    p = {"atoms": [{"xstar": [1, 0], "w": 1}]}
    q = {"atoms": [{"xstar": [1, 1], "w": 0.5}, {"xstar": [1, -1], "w": 0.5}]}
    cmds = [
        {"op": "primal_norm", "x": [2, 0], "expect": 2},
        {"op": "dual_norm", "xstar": [1, 0.5], "expect": 1},
        {"op": "dual_ball_extreme_points"},
        {"op": "facets"},
        {"op": "minimal_face", "xstar": [1, 0]},
        {"op": "is_strictly_convex_dual", "expect": False},
        {"op": "is_simplexoid_dual", "expect": True},
        {"op": "total_variation", "measure": "mu1", "expect": 1},
        {"op": "pair", "measure": "mu1", "f": {"t": [2, 5]}, "expect": 2},
        {"op": "mass", "measure": "edge", "expect": 1},
        {"op": "integrate", "measure": "edge", "f": "absy", "expect": -1},
        {"op": "disintegrate", "measure": "edge"},
        {"op": "barycenter", "p": q, "expect": [1, 0]},
        {"op": "hustad", "measure": "edge"},
        {"op": "density_h", "measure": "edge"},
        {"op": "variation_density", "measure": "edge"},
        {"op": "tilde", "measure": "edge"},
        {"op": "is_in_N", "nu": "edge", "mu": "mu1", "expect": True},
        {"op": "eval_pf", "f": "absy", "mu": "mu1", "expect": 0},
        {"op": "choquet_leq", "p": p, "q": q, "expect": True},
        {"op": "is_maximal", "p": q, "expect": True},
        {"op": "upper_envelope_at", "f": {"pieces": [{"a": [0, 1]}, {"a": [0, -1]}]}, "xstar": [1, 0], "expect": 1},
        {"op": "mokobodzki_maximal", "p": p, "expect": False},
        {"op": "maximalize", "p": p},
        {"op": "precD", "nu1": "edge", "nu2": "k", "expect": True},
        {"op": "precD", "nu1": "k", "nu2": "edge", "expect": False},
        {"op": "is_minimal", "nu": "edge", "mu": "mu1", "expect": True},
        {"op": "minimalize", "nu": "k", "mu": "mu1"},
        {"op": "enumerate_minimal", "measure": "mu1", "expect": 1},
        {"op": "sublinear_order_test", "p": p, "q": q, "expect": True},
        {"op": "precB", "mu1": "mu1", "mu2": "mu1", "expect": True},
        {"op": "solve", "lp": {"c": [1, 1], "A_ub": [[1, 2], [3, 1]], "b_ub": [4, 6], "sense": "max"}, "expect": "optimal"},
        {"op": "verify", "suite": "hustad_roundtrip", "trials": 5},
    ]
    code, rep = run(tmp_path, scenario(cmds))
    bad = [e for e in rep["results"] if e["status"] != "ok"]
    assert bad == [] and code == 0
    assert rep["results"][24]["fibers"]["t"]["matrix"] == [[0.5, 0.5]]


def test_failed_expectation_exits_1(tmp_path):
    code, rep = run(tmp_path, scenario([{"op": "dual_norm", "xstar": [1, 0], "expect": 3}]))
    assert code == 1 and rep["results"][0]["status"] == "fail"


def test_verify_simplexoid_on_cube(tmp_path):
    sc = scenario([{"op": "verify", "suite": "simplexoid", "trials": 5}], space=CUBE_DUAL, vector_measures={}, atomic_measures={}, dfunctions={})
    code, rep = run(tmp_path, sc)
    assert code == 0
    r = rep["results"][0]["report"]
    assert r["status"] == "pass"
    assert any("not simplexoid; minimal measures non-unique; witness pair emitted" in n for n in r["notes"])
    assert len(r["witnesses"][0]["minimal_measures"]) == 2


def test_malformed_json_exits_2(tmp_path, capsys):
    path = write(tmp_path, "bad.json", '{"schema": 1,\n "space": [}')
    assert main(["run", path]) == 2
    assert "line 2" in capsys.readouterr().err


@pytest.mark.parametrize(
    "mutate",
    [
        lambda s: s.update(schema=2),
        lambda s: s.update(space={"dim": 2, "ball": {"type": "blob"}}),
        lambda s: s["vector_measures"].update(bad={"entries": {"t": [1, 2, 3]}}),
        lambda s: s.update(commands=[{"nop": 1}]),
    ],
)
def test_invalid_scenarios_exit_2(tmp_path, mutate):
    sc = scenario([])
    mutate(sc)
    assert main(["run", write(tmp_path, "s.json", sc)]) == 2


def test_unresolved_reference_exits_2(tmp_path):
    code, rep = run(tmp_path, scenario([{"op": "transfer", "measure": "nope"}]))
    assert code == 2 and "unresolved" in rep["results"][0]["error"]


def test_hypothesis_violation_exits_2(tmp_path):
    heavy = {"heavy": {"atoms": [{"t": "t", "xstar": [0.5, 0], "w": 2}]}}
    sc = scenario([{"op": "precD", "nu1": "heavy", "nu2": "heavy"}])
    sc["atomic_measures"].update(heavy)
    code, rep = run(tmp_path, sc)
    assert code == 2 and "N(mu)" in rep["results"][0]["error"]


def test_unknown_op_exits_2(tmp_path):
    code, _ = run(tmp_path, scenario([{"op": "frobnicate"}]))
    assert code == 2


def test_json_report_is_deterministic(tmp_path):
    sc = scenario([{"op": "verify", "suite": "choquet_oracle", "trials": 10}, {"op": "mokobodzki_maximal", "p": {"atoms": [{"xstar": [0.5, 0], "w": 1}]}}])
    path = write(tmp_path, "s.json", sc)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", path, "--json", str(a), "--seed", "3"]) == 0
    assert main(["run", path, "--json", str(b), "--seed", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_subcommand(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "hustad_roundtrip", "--seed", "7", "--trials", "50", "--json", str(out)]) == 0
    rep = json.loads(out.read_text())["report"]
    assert rep["status"] == "pass" and rep["trials"] == 50 and rep["max_violation"] < 1e-9
    text = capsys.readouterr().out
    assert "trials=50" in text and "tolerance=1.0e-09" in text


def test_verify_unknown_suite_exits_2():
    assert main(["verify", "unknown"]) == 2


def test_verify_strict_convexity_skipped_on_polytope(tmp_path, capsys):
    space = write(tmp_path, "space.json", SQUARE_DUAL)
    assert main(["verify", "strict_convexity", "--space", space]) == 0
    assert "SKIPPED" in capsys.readouterr().out


def test_tol_and_cap_flags(tmp_path):
    sc = scenario([{"op": "enumerate_minimal", "measure": "m"}], space=CUBE_DUAL, atomic_measures={}, dfunctions={},
                  vector_measures={"m": {"entries": {"a": [1, 0, 0], "b": [0, 1, 0]}}})
    code, rep = run(tmp_path, sc, "--cap", "2", "--tol", "1e-8")
    assert code == 0
    assert rep["results"][0]["truncated"] is True and rep["tolerance"] == 1e-8


def test_bad_flag_exits_2():
    assert main(["verify", "hustad_roundtrip", "--trials", "many"]) == 2
