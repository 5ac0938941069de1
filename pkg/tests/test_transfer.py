import numpy as np
import pytest

from vchoquet.geometry import Space, dual_norm
from vchoquet.measures import AtomicMeasure, MeasureError, VectorMeasure, integrate, mass, pair, total_variation
from vchoquet.sampling import random_N_element, random_space, random_vector_measure
from vchoquet.transfer import (
    DFunction,
    density_h,
    eval_pf,
    hustad,
    is_in_N,
    tilde,
    transfer_K,
    variation_density,
)

E1, E2 = [1.0, 0.0], [0.0, 1.0]


def test_hustad_examples(square_dual):
    nu = AtomicMeasure(square_dual, [("t", [1, 1], 0.5), ("t", [1, -1], 0.5)])
    assert hustad(nu).allclose(VectorMeasure(square_dual, {"t": E1}))
    assert hustad(AtomicMeasure.dirac(square_dual, "t", [0.3, -0.2])).allclose(VectorMeasure(square_dual, {"t": [0.3, -0.2]}))
    assert hustad(AtomicMeasure(square_dual, [("t", [0.5, 0], 2.0)])).allclose(VectorMeasure(square_dual, {"t": E1}))


def test_hustad_signed_atoms(square_dual):
    nu = AtomicMeasure(square_dual, [("t", [1, 1], 1.0), ("t", [0, 1], 1.0, -1)])
    assert hustad(nu).allclose(VectorMeasure(square_dual, {"t": E1}))


def test_hustad_is_adjoint_of_embedding():
    rng = np.random.default_rng(4)
    for _ in range(30):
        sp = random_space(rng)
        nu = random_N_element(rng, random_vector_measure(rng, sp))
        f = {t: rng.normal(size=sp.dim) for t in nu.labels}
        assert pair(hustad(nu), f) == pytest.approx(integrate(nu, lambda t, x: float(x @ f[t])), abs=1e-9)


def test_density_examples(square_dual):
    nu = AtomicMeasure(square_dual, [("t", [1, 1], 0.5), ("t", [1, -1], 0.5)])
    assert density_h(nu)["t"] == pytest.approx(E1)
    assert density_h(AtomicMeasure(square_dual, [("t", [0.2, 0.4], 3.0)]))["t"] == pytest.approx([0.2, 0.4])
    corners = [("t", c, 0.25) for c in ([1, 1], [1, -1], [-1, 1], [-1, -1])]
    assert density_h(AtomicMeasure(square_dual, corners))["t"] == pytest.approx([0, 0])


def test_variation_density_examples(square_primal):
    # square primal ball: the dual norm is l1
    assert variation_density(AtomicMeasure(square_primal, [("t", E1, 1.0)]))["t"] == pytest.approx(1)
    zero = AtomicMeasure(square_primal, [("t", E1, 1.0), ("t", [-1, 0], 1.0)])
    assert variation_density(zero)["t"] == pytest.approx(0)
    half = AtomicMeasure(square_primal, [("t", [0.5, 0.5], 1.0)])
    assert variation_density(half)["t"] == pytest.approx(1)


def test_tilde_examples(square_dual):
    nu = AtomicMeasure(square_dual, [("t", [1, 1], 0.5), ("t", [1, -1], 0.5)])
    assert tilde(nu).allclose(AtomicMeasure(square_dual, [("t", E1, 1.0)]))
    nu = AtomicMeasure(square_dual, [("t", [0.5, 0], 2.0)])
    assert tilde(nu).allclose(AtomicMeasure(square_dual, [("t", E1, 1.0)]))
    nu = AtomicMeasure(square_dual, [("s", [1, 1], 1.0), ("s", [-1, -1], 1.0), ("t", E2, 1.0)])
    assert tilde(nu).labels == ["t"]


def test_transfer_examples(square_dual):
    mu = VectorMeasure(square_dual, {"t1": [3, 0], "t2": [0, 0]})
    assert transfer_K(mu).allclose(AtomicMeasure(square_dual, [("t1", E1, 3.0)]))
    assert transfer_K(VectorMeasure.dirac(square_dual, "t", [1, 0.5])).allclose(AtomicMeasure(square_dual, [("t", [1, 0.5], 1.0)]))
    mu = VectorMeasure(square_dual, {"t1": [1, 1], "t2": [-2, 0]})
    expected = AtomicMeasure(square_dual, [("t1", [1, 1], 1.0), ("t2", [-1, 0], 2.0)])
    assert transfer_K(mu).allclose(expected)
    assert hustad(expected).allclose(mu)


def test_transfer_properties():
    rng = np.random.default_rng(10)
    for _ in range(100):
        sp = random_space(rng)
        mu = random_vector_measure(rng, sp)
        k = transfer_K(mu)
        assert hustad(k).allclose(mu)
        assert float(mass(k)) == pytest.approx(total_variation(mu), abs=1e-9)
        assert all(abs(dual_norm(sp, a.xstar) - 1) < 1e-9 for a in k.atoms)
        assert sorted(k.labels) == sorted(mu.support())
        assert tilde(k).allclose(k)
        nu = random_N_element(rng, mu)
        assert tilde(nu).allclose(k)


def test_is_in_N_examples(square_dual):
    mu = VectorMeasure(square_dual, {"t": E1})
    assert is_in_N(AtomicMeasure(square_dual, [("t", E1, 1.0)]), mu)
    assert not is_in_N(AtomicMeasure(square_dual, [("t", [0.5, 0], 2.0)]), mu)
    assert is_in_N(AtomicMeasure(square_dual, [("t", [1, 1], 0.5), ("t", [1, -1], 0.5)]), mu)


def test_is_in_N_rejects_signed(square_dual):
    mu = VectorMeasure(square_dual, {"t": E1})
    nu = AtomicMeasure(square_dual, [("t", [1, 1], 1.0), ("t", E2, 1.0, -1)])
    assert not is_in_N(nu, mu)


def test_eval_pf_examples(square_primal, square_dual):
    # -||x*|| on the l1 dual norm, mu of norm 3
    mu = VectorMeasure(square_primal, {"t": [2, -1]})
    f = DFunction.neg_norm(square_primal, ["t"])
    assert eval_pf(f, mu) == pytest.approx(-3)
    g = {"t": [0.7, -1.3]}
    assert eval_pf(DFunction.linear(g), mu) == pytest.approx(pair(mu, g))
    f = DFunction({"t": [E1, [-1, 0]]})
    assert eval_pf(f, VectorMeasure(square_dual, {"t": E1})) == pytest.approx(-1)


def test_eval_pf_missing_pieces(square_dual):
    mu = VectorMeasure(square_dual, {"t": E1, "s": E2})
    with pytest.raises(MeasureError):
        eval_pf(DFunction({"t": [E1]}), mu)
    # labels off the support need no pieces
    assert eval_pf(DFunction({"t": [E1]}), VectorMeasure(square_dual, {"t": E1, "s": [0, 0]})) == pytest.approx(1)


def test_eval_pf_additive_on_disjoint_supports():
    rng = np.random.default_rng(11)
    for _ in range(40):
        sp = random_space(rng)
        a = VectorMeasure(sp, {f"a{i}": rng.normal(size=sp.dim) for i in range(3)})
        b = VectorMeasure(sp, {f"b{i}": rng.normal(size=sp.dim) for i in range(3)})
        f = DFunction({t: rng.normal(size=(int(rng.integers(1, 4)), sp.dim)) for t in a.labels + b.labels})
        assert eval_pf(f, a + b) == pytest.approx(eval_pf(f, a) + eval_pf(f, b), abs=1e-9)


def test_dfunction_json():
    f = DFunction({"t": [[1, 0], [0, 1]]})
    assert DFunction.from_json(f.to_json()).pieces["t"] == pytest.approx(f.pieces["t"])
    with pytest.raises(MeasureError):
        DFunction.from_json({"wrong": 1})


def test_neg_norm_requires_polytope():
    with pytest.raises(MeasureError):
        DFunction.neg_norm(Space.euclidean(2), ["t"])
