from fractions import Fraction

import numpy as np
import pytest

from vchoquet.geometry import DimensionError, Space
from vchoquet.measures import (
    AtomicMeasure,
    DisintegrationKernel,
    MeasureError,
    PositivityError,
    ProbabilityAtoms,
    VectorMeasure,
    barycenter,
    disintegrate,
    integrate,
    mass,
    pair,
    recompose,
    total_variation,
)
from vchoquet.sampling import random_ball_point, random_space, random_vector_measure
from vchoquet.transfer import density_h, hustad


def test_total_variation_examples(square_primal):
    mu = VectorMeasure(square_primal, {"t1": [1, 0], "t2": [0, -2]})
    assert total_variation(mu) == pytest.approx(3)
    assert total_variation(VectorMeasure(square_primal, {})) == 0
    assert total_variation(VectorMeasure.dirac(square_primal, "t", [1, 0])) == pytest.approx(1)


def test_pair_examples(square_primal):
    assert pair(VectorMeasure(square_primal, {"t": [1, 0]}), {"t": [2, 5]}) == pytest.approx(2)
    xs = np.array([0.3, -0.7])
    assert pair(VectorMeasure.dirac(square_primal, "t", xs), {"t": [4, 1]}) == pytest.approx(xs @ [4, 1])
    mu = VectorMeasure(square_primal, {"t1": [1, 0], "t2": [0, 1]})
    assert pair(mu, {"t1": [1, 1], "t2": [1, 1]}) == pytest.approx(2)
    with pytest.raises(DimensionError):
        pair(mu, {"t1": [1, 1, 1], "t2": [1, 1]})


def test_vector_measure_dimension_check(square_primal):
    with pytest.raises(DimensionError):
        VectorMeasure(square_primal, {"t": [1, 2, 3]})


def test_total_variation_is_a_norm():
    rng = np.random.default_rng(1)
    for _ in range(50):
        sp = random_space(rng)
        a = random_vector_measure(rng, sp, n_labels=4)
        b = random_vector_measure(rng, sp, n_labels=4)
        c = float(rng.uniform(-3, 3))
        assert total_variation(a + b) <= total_variation(a) + total_variation(b) + 1e-9
        assert total_variation(a * c) == pytest.approx(abs(c) * total_variation(a), abs=1e-9)
        assert (a + b - b).allclose(a)


def test_mass_examples(square_dual):
    nu = AtomicMeasure(square_dual, [("t", [1, 0], 0.5), ("t", [0, 1], 0.5)])
    assert mass(nu) == pytest.approx(1)
    assert mass(AtomicMeasure(square_dual, [])) == 0
    nu = AtomicMeasure(square_dual, [("t1", [1, 1], 2), ("t2", [0, -1], 3)])
    assert mass(nu) == pytest.approx(5)


def test_mass_rejects_signed(square_dual):
    nu = AtomicMeasure(square_dual, [("t", [1, 0], 1.0, -1)])
    with pytest.raises(PositivityError):
        mass(nu)


def test_atoms_outside_ball_rejected(square_dual):
    with pytest.raises(MeasureError):
        AtomicMeasure(square_dual, [("t", [2, 0], 1.0)])


def test_integrate_examples(square_dual):
    nu = AtomicMeasure(square_dual, [("t1", [1, 1], 1.0), ("t2", [0, 0.5], 2.0)])
    assert integrate(nu, lambda t, x: 1.0) == pytest.approx(3)
    p = AtomicMeasure(square_dual, [("t", [1, 1], 0.25), ("t", [1, -0.5], 0.75)])
    assert integrate(p, lambda t, x: -np.max(np.abs(x))) == pytest.approx(-1)
    assert integrate(nu, lambda t, x: float(t == "t2")) == pytest.approx(2)


def test_disintegrate_examples(square_dual):
    a, b, c = [1, 1], [1, -1], [0, 1]
    kern = disintegrate(AtomicMeasure(square_dual, [("t1", a, 0.5), ("t1", b, 0.5), ("t2", c, 1.0)]))
    assert kern.sigma == {"t1": 1.0, "t2": 1.0}
    assert kern.kernels["t1"].allclose(ProbabilityAtoms([a, b], [0.5, 0.5]))
    assert kern.kernels["t2"].allclose(ProbabilityAtoms.dirac(c))
    kern = disintegrate(AtomicMeasure(square_dual, [("t", [0.5, 0.2], 3.0)]))
    assert kern.sigma == {"t": 3.0} and len(kern.kernels["t"]) == 1
    merged = AtomicMeasure(square_dual, [("t", [0.5, 0.2], 1.0), ("t", [0.5, 0.2], 2.0)])
    assert len(disintegrate(merged).kernels["t"]) == 1


def test_recompose_examples(square_dual):
    x = np.array([1.0, 0.0])
    nu = recompose(DisintegrationKernel({"t": 2.0}, {"t": ProbabilityAtoms.dirac(x)}), square_dual)
    assert nu.same_atoms(AtomicMeasure(square_dual, [("t", x, 2.0)]))
    assert len(recompose(DisintegrationKernel({}, {}), square_dual)) == 0


def test_barycenter_examples():
    assert barycenter(ProbabilityAtoms([[1, 1], [1, -1]], [0.5, 0.5])) == pytest.approx([1, 0])
    assert barycenter(ProbabilityAtoms.dirac([0.3, 0.4])) == pytest.approx([0.3, 0.4])
    corners = [[1, 1], [1, -1], [-1, 1], [-1, -1]]
    assert barycenter(ProbabilityAtoms(corners, [0.25] * 4)) == pytest.approx([0, 0])


def test_probability_validation():
    with pytest.raises(MeasureError):
        ProbabilityAtoms([[0, 1]], [0.5])
    with pytest.raises(MeasureError):
        ProbabilityAtoms([[0, 1], [1, 0]], [1.5, -0.5])


def _rational_measure(rng, sp, n_labels=4):
    atoms = []
    for k in range(n_labels):
        for _ in range(int(rng.integers(1, 6))):
            atoms.append((f"t{k}", random_ball_point(rng, sp), Fraction(int(rng.integers(1, 30)), int(rng.integers(1, 17)))))
    return AtomicMeasure(sp, atoms)


def test_disintegration_exact_with_rational_weights():
    rng = np.random.default_rng(8)
    for _ in range(30):
        sp = random_space(rng)
        nu = _rational_measure(rng, sp)
        kern = disintegrate(nu)
        assert recompose(kern, sp).same_atoms(nu)
        assert sum(kern.sigma.values()) == mass(nu)
        assert all(isinstance(s, Fraction) for s in kern.sigma.values())
        vals = {(a.t, a.xstar.tobytes()): Fraction(int(rng.integers(-9, 10)), 7) for a in nu.atoms}
        g = lambda t, x: vals[(t, np.asarray(x).tobytes())]
        lhs = integrate(nu, g)
        rhs = sum(s * sum((w * g(t, x) for x, w in zip(kern.kernels[t].points, kern.kernels[t].weights)), Fraction(0)) for t, s in kern.sigma.items())
        assert lhs == rhs


def test_sigma_times_barycenter_is_hustad_image():
    rng = np.random.default_rng(9)
    for _ in range(30):
        sp = random_space(rng)
        nu = _rational_measure(rng, sp)
        mu = hustad(nu)
        h = density_h(nu)
        for t in nu.labels:
            assert h[t] * h.sigma[t] == pytest.approx(mu[t], abs=1e-12)


def test_json_roundtrips(square_dual):
    mu = VectorMeasure(square_dual, {"a": [1, 2], "b": [0, -1]})
    assert VectorMeasure.from_json(square_dual, mu.to_json()).allclose(mu)
    nu = AtomicMeasure(square_dual, [("a", [1, 0], 2.0), ("b", [0.5, 0.5], 1.0, -1)])
    assert AtomicMeasure.from_json(square_dual, nu.to_json()).same_atoms(nu)
    p = ProbabilityAtoms([[1, 1], [0, 0]], [0.25, 0.75])
    assert ProbabilityAtoms.from_json(p.to_json()).allclose(p)
    with pytest.raises(MeasureError):
        AtomicMeasure.from_json(square_dual, {"atoms": [{"t": "a"}]})


def test_atom_matching_is_robust_to_rounding_boundaries():
    sp = Space.euclidean(2)
    x = np.array([0.6, 0.8])
    # two nearly equal dual vectors on opposite sides of a rounding boundary
    a = AtomicMeasure(sp, [("t", x + [0.5e-12 - 1e-15, 0], 1.0)])
    b = AtomicMeasure(sp, [("t", x + [0.5e-12 + 1e-15, 0], 1.0)])
    assert a.max_abs_diff(b) < 1e-12
    assert a.allclose(b)
    c = AtomicMeasure(sp, [("t", -x, 1.0)])
    assert a.max_abs_diff(c) == pytest.approx(1.0)
