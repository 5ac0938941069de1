"""Acceptance suite: the ten headline properties at their full trial counts.

Each test prints one ``PASS``/``FAIL`` line.  Run directly with
``python tests/test_acceptance.py`` for the summary alone.
"""
import sys

import numpy as np
import pytest

from vchoquet.geometry import Space
from vchoquet.measures import AtomicMeasure, barycenter, disintegrate
from vchoquet.suites import verify

SEED = 7


def _line(number: int, title: str, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"


def _emit(capsys, text: str) -> None:
    if capsys is None:
        print(text)
        return
    with capsys.disabled():
        print("\n" + text)


def criterion_1():
    r = verify("hustad_roundtrip", SEED, 500)
    ok = r["status"] == "pass" and r["trials"] == 500 and r["counts"]["spaces"] == 10 and r["max_violation"] < 1e-9
    return ok, f"500 measures over 10 spaces, max residual {r['max_violation']:.2e} < 1e-9"


def criterion_2():
    r = verify("sphere_carried", SEED, 500)
    ok = r["status"] == "pass" and r["counts"]["hypothesis_met"] == 500 and r["max_violation"] < 1e-9
    return ok, f"500 minimal-norm measures, max | ||x*|| - 1 | = {r['max_violation']:.2e} < 1e-9"


def criterion_3():
    r = verify("transfer_maximality", SEED, 200)
    ok = r["status"] == "pass" and r["counts"]["precD_failures"] == 0 and r["max_violation"] < 1e-9
    return ok, f"200 trials, precD failures {r['counts']['precD_failures']}, max |tilde(nu) - K mu| {r['max_violation']:.2e}"


def criterion_4():
    r = verify("strict_convexity", SEED, 100)
    c = r["counts"]
    ok = (
        r["status"] == "pass"
        and c["split_lp_infeasible"] == 100
        and c["generated_not_K_mu"] == 0
        and c["non_minimal_accepted"] == 0
        and c["square_split_exhibited"] == 1
    )
    # the square witness satisfies x* = (x1 + x2)/2 with distinct sphere points
    w = r["witnesses"][0]
    x, x1, x2 = (np.array(w[k]) for k in ("x", "x1", "x2"))
    ok &= bool(np.allclose((x1 + x2) / 2, x, atol=1e-12) and np.max(np.abs(x1 - x2)) > 0.5)
    ok &= bool(np.allclose([np.max(np.abs(x1)), np.max(np.abs(x2))], 1.0))
    return ok, f"Euclidean splits infeasible {c['split_lp_infeasible']}/100; square split x1={x1.tolist()}, x2={x2.tolist()}"


def criterion_5():
    r = verify("simplexoid", SEED, 20)
    c = r["counts"]
    ok = r["status"] == "pass"
    unique = [k for k in c if k != "cube dual ball"]
    ok &= all(c[k]["simplexoid"] and c[k]["max_minimal"] == 1 for k in unique)
    ok &= sum(k.startswith("random polygon") for k in unique) == 5
    ok &= (not c["cube dual ball"]["simplexoid"]) and c["cube dual ball"]["max_minimal"] >= 2
    # both explicit decompositions of (1,0,0) appear in the witness
    cube = Space.cross_polytope(3)
    wit = next(w for w in r["witnesses"] if w["space"] == "cube dual ball")
    found = [AtomicMeasure.from_json(cube, m) for m in wit["minimal_measures"]]
    expected = [
        AtomicMeasure(cube, [("t", [1, 1, 1], 0.5), ("t", [1, -1, -1], 0.5)]),
        AtomicMeasure(cube, [("t", [1, 1, -1], 0.5), ("t", [1, -1, 1], 0.5)]),
    ]
    ok &= wit["mu"] == {"t": [1.0, 0.0, 0.0]}
    ok &= all(any(f.allclose(e) for f in found) for e in expected)
    for f in found:
        ok &= bool(np.allclose(barycenter(disintegrate(f).kernels["t"]), [1, 0, 0], atol=1e-12))
    note = next(n for n in r["notes"] if n.startswith("cube dual ball"))
    return ok, f"unique on {len(unique)} simplexoid balls; {note}"


def criterion_6():
    r = verify("choquet_oracle", SEED, 500)
    c = r["counts"]
    explained = c["lp_false_barycenter_mismatch"] + c["lp_false_sample_falsified"] + c["lp_false_witness_falsified"]
    ok = (
        r["status"] == "pass"
        and c["samples_per_pair"] == 2000
        and c["lp_true_contradicted"] == 0
        and c["lp_false_unexplained"] == 0
        and explained == c["lp_false"]
        and c["lp_true"] + c["lp_false"] == 500
    )
    return ok, f"LP-true {c['lp_true']} (0 contradicted), LP-false {c['lp_false']} all explained"


def criterion_7():
    r = verify("mokobodzki", SEED, 300)
    ok = r["status"] == "pass" and r["counts"]["disagreements"] == 0 and r["tolerance"] == 1e-7
    return ok, f"300 fibers ({r['counts']['maximal']} maximal), disagreements {r['counts']['disagreements']}"


def criterion_8():
    r = verify("sublinear_sphere", SEED, 200)
    ok = r["status"] == "pass" and r["counts"]["violations"] == 0
    return ok, f"200 pairs, sublinear-true {r['counts']['sublinear_true']}, violations {r['counts']['violations']}"


def criterion_9():
    r = verify("disintegration", SEED, 100)
    c = r["counts"]
    ok = r["status"] == "pass" and c["roundtrip_failures"] == 0 and c["formula_failures"] == 0 and c["functions_per_trial"] == 100
    return ok, f"100 rational measures x 100 bounded g, exact mismatches {c['roundtrip_failures'] + c['formula_failures']}"


def criterion_10():
    r = verify("lp_engine", SEED, 1000)
    c = r["counts"]
    ok = r["status"] == "pass" and c["status_mismatches"] == 0 and r["max_violation"] <= 1e-7
    return ok, f"1000 LPs, status agreement 100%, max value gap {r['max_violation']:.2e}"


CRITERIA = [
    (1, "transfer roundtrip", criterion_1),
    (2, "sphere-carried", criterion_2),
    (3, "transfer maximality", criterion_3),
    (4, "strict convexity and uniqueness", criterion_4),
    (5, "simplexoid and unique minimal", criterion_5),
    (6, "Choquet-order oracle", criterion_6),
    (7, "Mokobodzki agreement", criterion_7),
    (8, "sublinear sphere order", criterion_8),
    (9, "disintegration exactness", criterion_9),
    (10, "LP engine vs brute force", criterion_10),
]


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, detail = check()
    _emit(capsys, _line(number, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for number, title, check in CRITERIA:
        ok, detail = check()
        results.append(ok)
        _emit(None, _line(number, title, ok, detail))
    sys.exit(0 if all(results) else 1)
