"""Randomized verification suites, one per acceptance property.

Every suite is deterministic for a given seed: trial ``i`` draws from its own
generator ``default_rng([seed, i])``.  A suite returns a plain dict report
with the trial count, the largest observed violation, the tolerance it was
judged against, a status (``pass``, ``fail`` or ``skipped``) and free-form
counts, notes and witnesses.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .geometry import Space, dual_norm, dual_norms, is_simplexoid_dual, is_strictly_convex_dual
from .lp import Status, solve
from .measures import (
    AtomicMeasure,
    ProbabilityAtoms,
    VectorMeasure,
    barycenter,
    disintegrate,
    integrate,
    mass,
    recompose,
    total_variation,
)
from .oracles import brute_force_solve, random_lp
from .ordering import (
    choquet_leq,
    enumerate_minimal,
    fiber_split,
    is_maximal,
    maximalize,
    midpoint_split,
    mokobodzki_maximal,
    prec_d,
    separating_function,
    sublinear_order_test,
)
from .sampling import (
    random_ball_point,
    random_dilation,
    random_face_decomposition,
    random_fiber,
    random_N_element,
    random_polygon_space,
    random_polytope_space,
    random_probability,
    random_space,
    random_sphere_point,
    random_vector_measure,
)
from .transfer import hustad, is_in_N, tilde, transfer_K

ANCHORS = {
    "hustad_roundtrip": "Hustad map inverts the transfer operator; mass(K mu) = |mu|",
    "sphere_carried": "minimal-norm representing measures are carried by K x S_{E*}",
    "transfer_maximality": "nu <_D K mu and tilde(nu) = K mu for nu in N(mu)",
    "strict_convexity": "strictly convex dual ball iff N(mu) is a singleton",
    "simplexoid": "simplexoid dual ball iff a unique <_D-minimal measure",
    "choquet_oracle": "Choquet order = dilation order (Cartier-Fell-Meyer)",
    "mokobodzki": "maximal iff int f = int f* for convex continuous f (Mokobodzki)",
    "sublinear_sphere": "sublinear domination with sphere barycenter implies Choquet order",
    "disintegration": "disintegration kernel reconstructs nu and integrals",
    "lp_engine": "simplex engine agrees with brute-force vertex enumeration",
}

DEFAULT_TRIALS = {
    "hustad_roundtrip": 500,
    "sphere_carried": 500,
    "transfer_maximality": 200,
    "strict_convexity": 100,
    "simplexoid": 20,
    "choquet_oracle": 500,
    "mokobodzki": 300,
    "sublinear_sphere": 200,
    "disintegration": 100,
    "lp_engine": 1000,
}


class UnknownSuiteError(KeyError):
    pass


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng([seed, *key])


def _report(name: str, trials: int, max_violation: float, tolerance: float, ok: bool, **extra) -> dict:
    rep = {
        "suite": name,
        "anchor": ANCHORS[name],
        "status": "pass" if ok else "fail",
        "trials": int(trials),
        "max_violation": float(max_violation),
        "tolerance": float(tolerance),
        "counts": {},
        "notes": [],
        "witnesses": [],
    }
    rep.update(extra)
    return rep


def _skipped(name: str, notice: str) -> dict:
    rep = _report(name, 0, 0.0, 0.0, True, notes=[notice])
    rep["status"] = "skipped"
    return rep


def _prob_json(p: ProbabilityAtoms) -> dict:
    return {"points": p.points.tolist(), "weights": [float(w) for w in p.weights]}


# ---------------------------------------------------------------------------


def hustad_roundtrip(seed: int, trials: int, space: Optional[Space] = None) -> dict:
    tol = 1e-9
    spaces = [space] if space is not None else [random_space(_rng(seed, 10_000 + i)) for i in range(10)]
    worst = 0.0
    for i in range(trials):
        rng = _rng(seed, i)
        sp = spaces[i % len(spaces)]
        mu = random_vector_measure(rng, sp)
        kmu = transfer_K(mu)
        tv = total_variation(mu)
        res = max(hustad(kmu).max_abs_diff(mu), abs(float(mass(kmu)) - tv) / max(1.0, tv))
        worst = max(worst, res)
    return _report("hustad_roundtrip", trials, worst, tol, worst < tol, counts={"spaces": len(spaces)})


def sphere_carried(seed: int, trials: int, space: Optional[Space] = None) -> dict:
    tol = 1e-9
    worst, met = 0.0, 0
    for i in range(trials):
        rng = _rng(seed, i)
        sp = space if space is not None else random_space(rng)
        nu = random_N_element(rng, random_vector_measure(rng, sp))
        tv = total_variation(hustad(nu))
        if abs(float(mass(nu)) - tv) > tol * max(1.0, tv):
            continue
        met += 1
        for a in nu.atoms:
            worst = max(worst, abs(dual_norm(sp, a.xstar) - 1.0))
    ok = worst < tol and met == trials
    return _report("sphere_carried", trials, worst, tol, ok, counts={"hypothesis_met": met})


def transfer_maximality(seed: int, trials: int, space: Optional[Space] = None) -> dict:
    tol = 1e-9
    worst, failures = 0.0, 0
    for i in range(trials):
        rng = _rng(seed, i)
        sp = space if space is not None else random_space(rng)
        mu = random_vector_measure(rng, sp, zero_prob=0.0)
        nu = random_N_element(rng, mu)
        kmu = transfer_K(mu)
        if not prec_d(nu, kmu):
            failures += 1
        worst = max(worst, tilde(nu).max_abs_diff(kmu))
    ok = failures == 0 and worst < tol
    return _report("transfer_maximality", trials, worst, tol, ok, counts={"precD_failures": failures})


def _split_candidates(rng: np.random.Generator, space: Space, x: np.ndarray) -> np.ndarray:
    """Ball points that would split ``x`` if it were not extreme: interior, sphere and near-``x`` points."""
    pts = [random_ball_point(rng, space) for _ in range(20)]
    pts += [random_sphere_point(rng, space) for _ in range(20)]
    for _ in range(20):
        y = x + rng.normal(scale=10 ** rng.uniform(-4, -1), size=space.dim)
        pts.append(y / max(1.0, dual_norm(space, y)))
    return np.array(pts)


def strict_convexity(seed: int, trials: int, space: Optional[Space] = None) -> dict:
    tol = 1e-9
    if space is not None and not is_strictly_convex_dual(space):
        return _skipped(
            "strict_convexity",
            "hypothesis not met: dual ball is not strictly convex; suite is vacuous on this space",
        )
    splits, foreign_accepted, generated_other = 0, 0, 0
    for i in range(trials):
        rng = _rng(seed, i)
        sp = space if space is not None else Space.euclidean(1 + i % 4)
        mu = random_vector_measure(rng, sp, zero_prob=0.0)
        kmu = transfer_K(mu)
        for a in kmu.atoms:
            if fiber_split(sp, a.xstar, _split_candidates(rng, sp, a.xstar)) is not None:
                splits += 1
                break
        if not random_N_element(rng, mu).allclose(kmu):
            generated_other += 1
        # same Hustad image but larger mass: never in N(mu)
        y = random_sphere_point(rng, sp)
        t = kmu.atoms[0].t if kmu.atoms else "t1"
        s = float(rng.uniform(0.01, 1.0))
        padded = kmu + AtomicMeasure(sp, [(t, y, s), (t, -y, s)])
        if is_in_N(padded, mu):
            foreign_accepted += 1
    counts = {
        "split_lp_feasible": splits,
        "split_lp_infeasible": trials - splits,
        "generated_not_K_mu": generated_other,
        "non_minimal_accepted": foreign_accepted,
    }
    ok = splits == 0 and generated_other == 0 and foreign_accepted == 0
    rep = _report("strict_convexity", trials, float(splits + generated_other + foreign_accepted), 0.0, ok, counts=counts)
    if space is None:
        # contrast: the square dual ball splits an edge midpoint, so N(mu) has two members
        sq = Space.cross_polytope(2)
        x = np.array([1.0, 0.0])
        mu = VectorMeasure(sq, {"t": 2.0 * x})
        x1, x2 = midpoint_split(sq, x)
        nu1 = transfer_K(mu)
        nu2 = AtomicMeasure(sq, [("t", x1, 1.0), ("t", x2, 1.0)])
        exhibited = is_in_N(nu1, mu) and is_in_N(nu2, mu) and not nu1.allclose(nu2)
        rep["counts"]["square_split_exhibited"] = int(exhibited)
        rep["witnesses"].append({"space": "square dual ball", "x": x.tolist(), "x1": x1.tolist(), "x2": x2.tolist()})
        rep["notes"].append("square dual ball: x* = (x1 + x2)/2 gives two distinct members of N(mu)")
        if not exhibited:
            rep["status"] = "fail"
    return rep


def _simplexoid_corpus(seed: int) -> list[tuple[str, Space]]:
    corpus = [
        ("square dual ball", Space.cross_polytope(2)),
        ("octahedron dual ball", Space.cube(3)),
        ("cube dual ball", Space.cross_polytope(3)),
        ("euclidean dim 2", Space.euclidean(2)),
        ("euclidean dim 3", Space.euclidean(3)),
    ]
    for k in range(5):
        corpus.append((f"random polygon {k}", random_polygon_space(_rng(seed, 20_000 + k))))
    return corpus


def _check_simplexoid_space(seed: int, trials: int, label: str, sp: Space) -> tuple[bool, dict, list, list]:
    simplexoid = is_simplexoid_dual(sp)
    probes = []
    if sp.dim == 3 and sp == Space.cross_polytope(3):
        probes.append(np.array([1.0, 0.0, 0.0]))
    for i in range(trials):
        rng = _rng(seed, 30_000 + i)
        probes.append(random_sphere_point(rng, sp, low_dim_face=bool(i % 2)))
    counts = []
    witness = None
    for x in probes:
        enum = enumerate_minimal(VectorMeasure(sp, {"t": x}))
        counts.append(len(enum.measures))
        if witness is None and len(enum.measures) >= 2:
            witness = {"space": label, "mu": {"t": x.tolist()}, "minimal_measures": [m.to_json() for m in enum.measures[:2]]}
    if simplexoid:
        ok = all(c == 1 for c in counts)
        notes = [f"{label}: simplexoid; unique minimal measure in {len(counts)}/{len(counts)} probes"] if ok else [
            f"{label}: simplexoid but a probe has {max(counts)} minimal measures"
        ]
    else:
        ok = witness is not None
        notes = [f"{label}: not simplexoid; minimal measures non-unique; witness pair emitted"] if ok else [
            f"{label}: not simplexoid but no probe exposed two minimal measures"
        ]
    return ok, {"simplexoid": simplexoid, "max_minimal": max(counts), "probes": len(counts)}, notes, [witness] if witness else []


def simplexoid(seed: int, trials: int, space: Optional[Space] = None) -> dict:
    corpus = [("given space", space)] if space is not None else _simplexoid_corpus(seed)
    ok_all, per_space, notes, witnesses, bad = True, {}, [], [], 0
    for label, sp in corpus:
        ok, info, n, w = _check_simplexoid_space(seed, trials, label, sp)
        ok_all &= ok
        bad += int(not ok)
        per_space[label] = info
        notes += n
        witnesses += w
    return _report("simplexoid", trials, float(bad), 0.0, ok_all, counts=per_space, notes=notes, witnesses=witnesses)


def _pl_batch(rng: np.random.Generator, dim: int, n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """``n`` random convex PL functions grouped by piece count, as (slopes, offsets) arrays."""
    out = []
    for k, m in zip(range(1, 6), np.diff(np.linspace(0, n, 6).astype(int))):
        out.append((rng.normal(size=(m, k, dim)), rng.normal(scale=0.5, size=(m, k))))
    return out


def _integrals(batch, p: ProbabilityAtoms) -> np.ndarray:
    vals = []
    for A, c in batch:
        v = np.einsum("fkd,nd->fkn", A, p.points) + c[..., None]
        vals.append(v.max(axis=1) @ p.float_weights)
    return np.concatenate(vals)


def _random_pair(rng: np.random.Generator, sp: Space) -> tuple[ProbabilityAtoms, ProbabilityAtoms]:
    p = random_probability(rng, sp)
    kind = int(rng.integers(0, 5))
    if kind == 0:
        return p, random_dilation(rng, sp, p, splits=int(rng.integers(1, 4)))
    if kind == 1:
        return random_dilation(rng, sp, p, splits=int(rng.integers(1, 4))), p
    if kind == 2:
        return random_dilation(rng, sp, p), random_dilation(rng, sp, p)
    if kind == 3:
        return p, p
    return p, random_probability(rng, sp)


def choquet_oracle(seed: int, trials: int, space: Optional[Space] = None, samples: int = 2000) -> dict:
    tol = 1e-9
    lp_true = contradictions = lp_false = mismatch = by_sample = by_witness = unexplained = 0
    worst = 0.0
    for i in range(trials):
        rng = _rng(seed, i)
        sp = space if space is not None else random_space(rng)
        p, q = _random_pair(rng, sp)
        verdict, wit = choquet_leq(p, q, sp)
        batch = _pl_batch(rng, sp.dim, samples)
        gap = float(np.max(_integrals(batch, p) - _integrals(batch, q)))
        if verdict:
            lp_true += 1
            worst = max(worst, gap)
            if gap > tol:
                contradictions += 1
            continue
        lp_false += 1
        if np.max(np.abs(barycenter(p) - barycenter(q))) > tol:
            mismatch += 1
        elif gap > tol:
            by_sample += 1
        else:
            phi = separating_function(p, q)
            if phi is not None and float(p.float_weights @ phi(p.points) - q.float_weights @ phi(q.points)) > tol:
                by_witness += 1
            else:
                unexplained += 1
    counts = {
        "lp_true": lp_true,
        "lp_true_contradicted": contradictions,
        "lp_false": lp_false,
        "lp_false_barycenter_mismatch": mismatch,
        "lp_false_sample_falsified": by_sample,
        "lp_false_witness_falsified": by_witness,
        "lp_false_unexplained": unexplained,
        "samples_per_pair": samples,
    }
    ok = contradictions == 0 and unexplained == 0
    return _report("choquet_oracle", trials, worst, tol, ok, counts=counts)


def mokobodzki(seed: int, trials: int, space: Optional[Space] = None) -> dict:
    tol = 1e-7
    disagree = maximal = 0
    for i in range(trials):
        rng = _rng(seed, i)
        sp = space if space is not None else random_space(rng)
        p = random_fiber(rng, sp)
        a = is_maximal(p, sp)
        b = mokobodzki_maximal(p, sp, rng=rng, tol=tol)
        maximal += int(a)
        disagree += int(a != b)
    counts = {"maximal": maximal, "not_maximal": trials - maximal, "disagreements": disagree}
    return _report("mokobodzki", trials, float(disagree), tol, disagree == 0, counts=counts)


def _sphere_pair(rng: np.random.Generator, sp: Space) -> tuple[ProbabilityAtoms, ProbabilityAtoms]:
    x = random_sphere_point(rng, sp, low_dim_face=rng.random() < 0.3)
    p = random_face_decomposition(rng, sp, x)
    kind = int(rng.integers(0, 3))
    if kind == 2:
        return p, random_face_decomposition(rng, sp, x)
    theta = float(rng.choice([0.0, rng.uniform(0.1, 0.9)]))
    m = maximalize(p, sp, order=rng.permutation(len(sp.dual_vertices)) if sp.is_polytope else None)
    pairs = [(y, theta * w) for y, w in zip(p.points, p.float_weights)]
    pairs += [(y, (1 - theta) * w) for y, w in zip(m.points, m.float_weights)]
    q = ProbabilityAtoms.from_pairs((y, w) for y, w in pairs if w > 0).merged()
    return (p, q) if kind == 0 else (q, p)


def sublinear_sphere(seed: int, trials: int, space: Optional[Space] = None) -> dict:
    test_true = lp_true = violations = 0
    for i in range(trials):
        rng = _rng(seed, i)
        if space is not None:
            sp = space
        else:
            k = int(rng.integers(0, 4))
            sp = [Space.cross_polytope(3), random_polygon_space(rng), random_polytope_space(rng, 3), Space.cube(3)][k]
        p, q = _sphere_pair(rng, sp)
        t = sublinear_order_test(p, q, sp, samples=200, rng=rng)
        lp, _ = choquet_leq(p, q, sp)
        test_true += int(t)
        lp_true += int(lp)
        violations += int(t and not lp)
    counts = {"sublinear_true": test_true, "choquet_true": lp_true, "violations": violations}
    return _report("sublinear_sphere", trials, float(violations), 0.0, violations == 0, counts=counts)


def _random_fraction(rng: np.random.Generator) -> Fraction:
    return Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 30)))


def disintegration(seed: int, trials: int, space: Optional[Space] = None, functions: int = 100) -> dict:
    """Exact check with rational weights and rational-valued test functions."""
    roundtrip_fail = formula_fail = 0
    for i in range(trials):
        rng = _rng(seed, i)
        sp = space if space is not None else random_space(rng)
        atoms = []
        for t in [f"t{k}" for k in range(int(rng.integers(1, 5)))]:
            for _ in range(int(rng.integers(1, 5))):
                atoms.append((t, random_ball_point(rng, sp), Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 12)))))
        nu = AtomicMeasure(sp, atoms)
        kern = disintegrate(nu)
        if not recompose(kern, sp).same_atoms(nu):
            roundtrip_fail += 1
        for _ in range(functions):
            table = {(a.t, a.xstar.tobytes()): _random_fraction(rng) for a in nu.atoms}
            g: Callable = lambda t, x, table=table: table[(t, np.asarray(x, dtype=float).tobytes())]
            lhs = integrate(nu, g)
            rhs = sum(
                (kern.sigma[t] * sum((w * g(t, x) for x, w in zip(p.points, p.weights)), Fraction(0)) for t, p in kern.kernels.items()),
                Fraction(0),
            )
            formula_fail += int(lhs != rhs)
    counts = {"roundtrip_failures": roundtrip_fail, "formula_failures": formula_fail, "functions_per_trial": functions}
    bad = roundtrip_fail + formula_fail
    return _report("disintegration", trials, float(bad), 0.0, bad == 0, counts=counts)


def lp_engine(seed: int, trials: int, space: Optional[Space] = None) -> dict:
    tol = 1e-7
    status_mismatch, worst = 0, 0.0
    seen = {s.value: 0 for s in Status}
    for i in range(trials):
        lp = random_lp(_rng(seed, i))
        a, b = solve(lp), brute_force_solve(lp)
        seen[b.status.value] += 1
        if a.status != b.status:
            status_mismatch += 1
        elif a.optimal:
            worst = max(worst, abs(a.value - b.value) / max(1.0, abs(b.value)))
    counts = {"status_mismatches": status_mismatch, **{f"oracle_{k}": v for k, v in seen.items()}}
    ok = status_mismatch == 0 and worst <= tol
    return _report("lp_engine", trials, worst, tol, ok, counts=counts)


SUITES: dict[str, Callable[..., dict]] = {
    "hustad_roundtrip": hustad_roundtrip,
    "sphere_carried": sphere_carried,
    "transfer_maximality": transfer_maximality,
    "strict_convexity": strict_convexity,
    "simplexoid": simplexoid,
    "choquet_oracle": choquet_oracle,
    "mokobodzki": mokobodzki,
    "sublinear_sphere": sublinear_sphere,
    "disintegration": disintegration,
    "lp_engine": lp_engine,
}


def verify(suite: str, seed: int = 0, trials: Optional[int] = None, space: Optional[Space] = None) -> dict:
    """Run one suite; ``trials`` defaults to the acceptance count for that suite."""
    if suite not in SUITES:
        raise UnknownSuiteError(suite)
    n = DEFAULT_TRIALS[suite] if trials is None else int(trials)
    if n < 0:
        raise ValueError("trials must be nonnegative")
    return SUITES[suite](int(seed), n, space)
