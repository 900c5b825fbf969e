"""Acceptance suite: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion. The quartic proximal run (criterion 4) iterates a few million
times by design: its fixed point 2 is a degenerate stationary point, so the
tail converges like 1/k.
"""

import dataclasses
import time

import numpy as np
import pytest

from hadamard_iter import (
    Ball,
    DomainError,
    Euclidean,
    Hyperboloid,
    OperatorSpec,
    RunConfig,
    Segment,
    Spider,
    WholeSpace,
    bifunction_fixture,
    build_scheme,
    catalog_operator,
    check_fejer,
    check_nested_fixed_sets,
    check_quasi_firm,
    check_space_axioms,
    check_sqn_inequality,
    convex_resolvent,
    equilibrium_resolvent,
    equilibrium_resolvent_operator,
    halpern_schedule,
    ishikawa_operator,
    iterate_sequence,
    lipschitz_resolvent,
    lipschitz_resolvent_detailed,
    lipschitz_resolvent_operator,
    mann_constant,
    objective_fixture,
    resolvent_constant,
    resolvent_sequence,
    vanishing_schedule,
)
from hadamard_iter.cli import main as cli_main

E1 = Euclidean(1)
E2 = Euclidean(2)
H2 = Hyperboloid(2)
S3 = Spider(3)


def _report(name: str, ok: bool, detail: str = ""):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{name}: {detail}"


def test_c1_geometry_axioms():
    t0 = time.time()
    worst = {}
    for space in (E2, H2, S3):
        rep = check_space_axioms(space, samples=10_000, seed=20260809)
        worst[space.space_id] = (rep.passed, rep.max_violation)
    elapsed = time.time() - t0
    ok = all(p for p, _ in worst.values()) and elapsed < 5.0
    detail = (f"elapsed {elapsed:.2f}s; worst margins "
              + ", ".join(f"{k}={v:.2e}" for k, (_, v) in worst.items()))
    _report("C1 geometry axioms (3 x 10^4 samples)", ok, detail)


def test_c2_closed_form_oracle_equivalence():
    rng = np.random.default_rng(2)
    a = E2.point([0.7, -0.3])
    f_e = dataclasses.replace(objective_fixture(E2, "quadratic", center=a),
                              closed_form_resolvent=None)
    worst_e = 0.0
    for _ in range(1000):
        x = E2.sample_point(rng, 2.0)
        lam = float(rng.uniform(0.1, 10.0))
        got = convex_resolvent(f_e, lam, x).coords
        want = (x.coords + lam * a.coords) / (1.0 + lam)
        worst_e = max(worst_e, float(np.linalg.norm(got - want)))

    ah = H2.from_spatial([0.4, 0.1])
    f_h = dataclasses.replace(objective_fixture(H2, "quadratic", center=ah),
                              closed_form_resolvent=None)
    worst_h = 0.0
    for _ in range(1000):
        x = H2.sample_point(rng, 1.5)
        lam = float(rng.uniform(0.1, 10.0))
        got = convex_resolvent(f_h, lam, x)
        want = H2.combine(x, ah, lam / (1.0 + lam))
        worst_h = max(worst_h, H2.distance(got, want))

    ok = worst_e <= 1e-9 and worst_h <= 1e-9
    _report("C2 prox closed-form equivalence (2 x 10^3 pairs)", ok,
            f"worst euclidean {worst_e:.2e}, worst hyperboloid {worst_h:.2e}")


def test_c3_halpern_ppa_strong_convergence():
    # Euclidean plane, K a segment, anchored off axis
    K = Segment(E2.point([0, 0]), E2.point([1, 0]))
    f = objective_fixture(E2, "dist2_to_set", cset=K)
    u = E2.point([0.3, 2.0])
    target = E2.project(K, u)  # (0.3, 0)
    built = build_scheme("halpern_ppa", f, {"anchor": halpern_schedule(),
                                            "lambda": resolvent_constant(1.0)})
    t0 = time.time()
    tr = built.run(RunConfig(space=E2, start=E2.point([2.0, 1.5]), anchor=u,
                             max_iterations=20_000, tolerance=1e-12, reference=target))
    elapsed = time.time() - t0
    d_e = tr.summary.target_distance

    # hyperboloid variant, K a geodesic ball
    Kh = Ball(H2.from_spatial([0.3, 0.2]), 0.4)
    fh = objective_fixture(H2, "dist2_to_set", cset=Kh)
    uh = H2.from_spatial([1.2, -0.8])
    th = H2.project(Kh, uh)
    built_h = build_scheme("halpern_ppa", fh, {"anchor": halpern_schedule(),
                                               "lambda": resolvent_constant(1.0)})
    tr_h = built_h.run(RunConfig(space=H2, start=H2.from_spatial([-0.5, 1.0]), anchor=uh,
                                 max_iterations=20_000, tolerance=1e-12, reference=th))
    d_h = tr_h.summary.target_distance

    ok = d_e <= 5e-3 and elapsed < 2.0 and d_h <= 1e-2
    _report("C3 Halpern-PPA anchor projection", ok,
            f"euclidean d={d_e:.2e} in {elapsed:.2f}s; hyperboloid d={d_h:.2e}")


def test_c4_quartic_nonminimizer_fixed_point():
    quart = objective_fixture(E1, "plateau_quartic")
    seq = resolvent_sequence(quart, resolvent_constant(0.01))

    tr5 = iterate_sequence(seq, RunConfig(space=E1, start=E1.point([5.0]),
                                          max_iterations=8_000_000, tolerance=1.5e-13))
    x5 = float(tr5.summary.final_point.coords[0])

    tr1 = iterate_sequence(seq, RunConfig(space=E1, start=E1.point([1.0]),
                                          max_iterations=100_000, tolerance=1e-10))
    x1 = float(tr1.summary.final_point.coords[0])

    # derived oracle: iterates from 5 decrease monotonically and stay above 2
    pts = [float(s.point.coords[0]) for s in tr5.steps]
    monotone = all(b < a for a, b in zip(pts, pts[1:])) and all(p > 2.0 for p in pts)

    ok = abs(x5 - 2.0) <= 1e-6 and abs(x1) <= 1e-6 and monotone
    _report("C4 quartic PPA (argmin strictly inside the fixed set)", ok,
            f"from 5 -> {x5!r} ({tr5.summary.iterations_run} iters), from 1 -> {x1!r}")


def test_c5_ishikawa_rotation():
    rot = catalog_operator(E2, "rotation", angle=2 * np.pi / 3)
    zero = E2.point([0, 0])
    built = build_scheme("ishikawa", rot, {"alpha": mann_constant(0.5),
                                           "beta": vanishing_schedule()})
    tr = built.run(RunConfig(space=E2, start=E2.point([3.0, 1.0]),
                             max_iterations=10_000, tolerance=1e-12, reference=zero))
    fejer = check_fejer(E2, tr, zero)
    d_seq = tr.summary.target_distance

    built_h = build_scheme("halpern_ishikawa", rot,
                           {"anchor": halpern_schedule(), "alpha": mann_constant(0.5),
                            "beta": vanishing_schedule()})
    tr_h = built_h.run(RunConfig(space=E2, start=E2.point([3.0, 1.0]),
                                 anchor=E2.point([1.0, 1.0]),
                                 max_iterations=20_000, tolerance=1e-12, reference=zero))
    d_hal = tr_h.summary.target_distance

    ok = (fejer.passed and d_seq <= 1e-6
          and tr.summary.iterations_run <= 10_000 and d_hal <= 5e-3)
    _report("C5 Ishikawa / Halpern-Ishikawa on the rotation", ok,
            f"fejer={fejer.passed}, seq d={d_seq:.2e} in {tr.summary.iterations_run} "
            f"iters, halpern d={d_hal:.2e}")


def test_c6_lipschitz_resolvent_contraction():
    rng = np.random.default_rng(6)
    worst_excess = -np.inf
    for _ in range(1000):
        alpha = float(rng.uniform(1.0 + 1e-6, 3.0))
        lam = float(rng.uniform(0.05, 0.9)) / (alpha - 1.0)
        th = float(rng.uniform(0, 2 * np.pi))
        A = alpha * np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        b = rng.normal(size=2)
        T = OperatorSpec(space=E2, apply=lambda p, A=A, b=b: E2.point(A @ p.coords + b),
                         domain=WholeSpace(E2.space_id), lipschitz_const=alpha)
        x = E2.sample_point(rng, 2.0)
        _, _, ratio = lipschitz_resolvent_detailed(T, lam, x)
        worst_excess = max(worst_excess, ratio - alpha * lam / (1.0 + lam))

    witnesses_ok = True
    catalog = [
        catalog_operator(E2, "rotation", angle=1.1),
        catalog_operator(E2, "scaled_reflection", factor=0.7),
        catalog_operator(E2, "constant", point=E2.point([1.0, 0.0])),
        catalog_operator(E2, "projection", cset=Ball(E2.point([0.5, 0.5]), 1.0)),
        catalog_operator(H2, "hyperbolic_projection", cset=Ball(H2.base_point(), 0.5)),
    ]
    for op in catalog:
        p = op.fixed_point_witness
        for lam in (0.3, 1.0, 5.0):
            if op.space.distance(lipschitz_resolvent(op, lam, p), p) > 1e-9:
                witnesses_ok = False

    T2 = OperatorSpec(space=E1, apply=lambda p: E1.point(2.0 * p.coords),
                      domain=WholeSpace(E1.space_id), lipschitz_const=2.0)
    with pytest.raises(DomainError):
        lipschitz_resolvent(T2, 1.0, E1.point([1.0]))  # lam >= 1/(alpha-1)

    ok = worst_excess <= 1e-6 and witnesses_ok
    _report("C6 Lipschitz resolvent contraction window", ok,
            f"worst ratio excess {worst_excess:.2e} over 10^3 instances; "
            f"witnesses fixed: {witnesses_ok}")


def test_c7_equilibrium_ppa():
    vi = bifunction_fixture(E2, "rotation_vi")
    zero = E2.point([0, 0])

    built = build_scheme("ppa_equilibrium", vi, {"lambda": resolvent_constant(1.0)})
    tr = built.run(RunConfig(space=E2, start=E2.point([0.9, 0.2]),
                             max_iterations=10_000, tolerance=1e-9, reference=zero))
    d_seq = tr.summary.target_distance

    built_h = build_scheme("halpern_ppa_equilibrium", vi,
                           {"anchor": halpern_schedule(), "lambda": resolvent_constant(1.0)})
    tr_h = built_h.run(RunConfig(space=E2, start=E2.point([0.9, 0.2]),
                                 anchor=E2.point([0.9, 0.0]),
                                 max_iterations=4_000, tolerance=1e-12, reference=zero))
    d_hal = tr_h.summary.target_distance

    z = equilibrium_resolvent(vi, 1.0, E2.point([1.0, 0.0]))
    # 2x2 oracle: interior stationarity (A + I) z = x
    d_single = float(np.linalg.norm(z.coords - np.linalg.solve(
        np.array([[1.0, 1.0], [-1.0, 1.0]]), np.array([1.0, 0.0]))))

    ok = (d_seq <= 1e-6 and tr.summary.iterations_run <= 10_000
          and d_hal <= 5e-3 and d_single <= 1e-8)
    _report("C7 equilibrium PPA on the rotation VI", ok,
            f"seq d={d_seq:.2e} in {tr.summary.iterations_run} iters, "
            f"halpern d={d_hal:.2e}, resolvent vs oracle {d_single:.2e}")


def test_c8_lemma_inequality_suite():
    results = {}

    q2 = objective_fixture(E2, "quadratic")
    results["quasi_firm euclidean"] = check_quasi_firm(q2, 1.0, q2.known_argmin,
                                                       samples=500, seed=80)
    qh = objective_fixture(H2, "quadratic", center=H2.from_spatial([0.3, -0.1]))
    results["quasi_firm hyperboloid"] = check_quasi_firm(qh, 1.0, qh.known_argmin,
                                                         samples=500, seed=81, scale=1.0)

    rot = catalog_operator(E2, "rotation", angle=2.1)
    results["sqn ishikawa"] = check_sqn_inequality(
        ishikawa_operator(rot, 0.5, 0.25), samples=500, seed=82)
    refl = catalog_operator(E1, "scaled_reflection", factor=1.0)
    results["sqn lipschitz"] = check_sqn_inequality(
        lipschitz_resolvent_operator(refl, 1.0), samples=500, seed=83)
    vi = bifunction_fixture(E2, "rotation_vi")
    results["sqn equilibrium"] = check_sqn_inequality(
        equilibrium_resolvent_operator(vi, 1.0), samples=500, seed=84)

    quart = objective_fixture(E1, "plateau_quartic")
    results["nested fixed sets"] = check_nested_fixed_sets(
        quart, 0.01, 0.005, [E1.point([2.0]), E1.point([0.0])])

    qseq = resolvent_sequence(q2, resolvent_constant(1.0))
    trace = iterate_sequence(qseq, RunConfig(space=E2, start=E2.point([6, 3]),
                                             max_iterations=500, tolerance=1e-12))
    results["fejer"] = check_fejer(E2, trace, q2.known_argmin)

    all_pass = all(r.passed and not r.violations for r in results.values())

    # negative controls: every checker must reject its violating fixture
    neg_ok = True
    bad = objective_fixture(E2, "expanding_quadratic")
    neg_ok &= not check_quasi_firm(bad, 1.0, bad.known_argmin, samples=50, seed=85).passed
    neg_ok &= not check_sqn_inequality(lipschitz_resolvent_operator(refl, 1.0),
                                       witness=E1.point([1.0]), samples=100, seed=86).passed
    fake = dataclasses.replace(
        objective_fixture(E1, "quadratic"), gradient=None,
        closed_form_resolvent=lambda lam, x: x if lam >= 0.5 else E1.point(0.5 * x.coords))
    neg_ok &= not check_nested_fixed_sets(fake, 1.0, 0.1, [E1.point([1.0])]).passed
    neg_ok &= not check_fejer(E2, dataclasses.replace(
        trace, steps=list(reversed(trace.steps))), q2.known_argmin).passed

    ok = all_pass and neg_ok
    detail = ("; ".join(f"{k}:{'ok' if r.passed else 'VIOLATED'}"
                        for k, r in results.items())
              + f"; negative controls rejected: {neg_ok}")
    _report("C8 lemma inequality suite (500-sample fixtures)", ok, detail)


def test_c9_cli_determinism(tmp_path):
    import json
    cfg = {
        "space": {"kind": "euclidean", "dim": 2},
        "scheme": "halpern_ppa",
        "source": {"objective": {"name": "quadratic", "center": [1.0, 0.0]}},
        "schedules": {"anchor": {"kind": "power"},
                      "lambda": {"kind": "constant", "value": 1.0}},
        "start": [5.0, 5.0],
        "anchor": [5.0, 5.0],
        "reference": [1.0, 0.0],
        "max_iterations": 5000,
        "tolerance": 1e-07,
        "seed": 9,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    code1 = cli_main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "a")])
    code2 = cli_main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "b")])
    same = (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()
    ok = code1 == code2 and same
    _report("C9 byte-identical reruns", ok, f"exit codes {code1}/{code2}, identical={same}")
