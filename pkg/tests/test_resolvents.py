import dataclasses

import numpy as np
import pytest
from scipy.optimize import brentq

from hadamard_iter import (
    Ball,
    ConfigError,
    CustomSolver,
    DomainError,
    Euclidean,
    Hyperboloid,
    ObjectiveFunction,
    OperatorSpec,
    Segment,
    SolverError,
    Spider,
    UnsupportedOperationError,
    WholeSpace,
    bifunction_fixture,
    catalog_operator,
    convex_resolvent,
    equilibrium_resolvent,
    lipschitz_resolvent,
    lipschitz_resolvent_detailed,
    objective_fixture,
    resolvent_constant,
    resolvent_schedule,
    resolvent_sequence,
    vanishing_schedule,
)

E1 = Euclidean(1)
E2 = Euclidean(2)
H2 = Hyperboloid(2)
S3 = Spider(3)


# ---------------------------------------------------------------------------
# convex resolvent
# ---------------------------------------------------------------------------

def test_quadratic_prox_formula():
    # stationarity (y - a) + (y - x)/lam = 0  =>  y = (x + lam a)/(1 + lam)
    q = objective_fixture(E1, "quadratic")
    assert convex_resolvent(q, 1.0, E1.point([2])).coords[0] == pytest.approx(1.0)
    qa = objective_fixture(E1, "quadratic", center=[3.0])
    got = convex_resolvent(qa, 0.5, E1.point([0])).coords[0]
    assert got == pytest.approx((0 + 0.5 * 3.0) / 1.5)


def test_prox_fixes_argmin():
    q = objective_fixture(E2, "quadratic", center=[1.0, -2.0])
    x = q.known_argmin
    for lam in (0.1, 1.0, 7.0):
        assert E2.distance(convex_resolvent(q, lam, x), x) <= 1e-12


def test_prox_gradient_descent_matches_closed_form_euclidean():
    rng = np.random.default_rng(0)
    a = E2.point([0.7, -0.3])
    solver_route = dataclasses.replace(
        objective_fixture(E2, "quadratic", center=a), closed_form_resolvent=None
    )
    for _ in range(50):
        x = E2.sample_point(rng, 2.0)
        lam = float(rng.uniform(0.1, 10.0))
        got = convex_resolvent(solver_route, lam, x).coords
        want = (x.coords + lam * a.coords) / (1.0 + lam)
        assert np.linalg.norm(got - want) <= 1e-9


def test_prox_gradient_descent_matches_geodesic_formula_hyperboloid():
    rng = np.random.default_rng(1)
    a = H2.from_spatial([0.4, 0.1])
    f = objective_fixture(H2, "quadratic", center=a)
    solver_route = dataclasses.replace(f, closed_form_resolvent=None)
    for _ in range(50):
        x = H2.sample_point(rng, 1.5)
        lam = float(rng.uniform(0.1, 10.0))
        got = convex_resolvent(solver_route, lam, x)
        want = H2.combine(x, a, lam / (1.0 + lam))
        assert H2.distance(got, want) <= 1e-9


def test_prox_rejects_bad_lambda():
    q = objective_fixture(E1, "quadratic")
    with pytest.raises(DomainError):
        convex_resolvent(q, 0.0, E1.point([1]))
    quart = objective_fixture(E1, "plateau_quartic")
    with pytest.raises(DomainError):
        convex_resolvent(quart, 1.0 / 16.0, E1.point([1]))  # needs lam < 1/(2*8)


def test_prox_spider_needs_closed_form():
    q = objective_fixture(S3, "quadratic", center=S3.point((1, 2.0)))
    out = convex_resolvent(q, 1.0, S3.point((2, 2.0)))  # closed form works on trees
    assert S3.distance(out, S3.combine(S3.point((2, 2.0)), S3.point((1, 2.0)), 0.5)) <= 1e-12
    bare = dataclasses.replace(q, closed_form_resolvent=None, gradient=None)
    with pytest.raises(UnsupportedOperationError):
        convex_resolvent(bare, 1.0, S3.point((2, 2.0)))


def test_prox_without_gradient_or_closed_form():
    f = ObjectiveFunction(space=E1, eval=lambda p: abs(float(p.coords[0])), convex=True)
    with pytest.raises(UnsupportedOperationError):
        convex_resolvent(f, 1.0, E1.point([1]))


def test_recheck_catches_wrong_closed_form():
    q = objective_fixture(E1, "quadratic")
    broken = dataclasses.replace(
        q, closed_form_resolvent=lambda lam, x: E1.point([float(x.coords[0])])
    )
    with pytest.raises(SolverError):
        convex_resolvent(broken, 1.0, E1.point([2]))


# ---------------------------------------------------------------------------
# the quartic with a non-minimizing resolvent fixed point
# ---------------------------------------------------------------------------

def _quartic_prox_oracle(lam, x):
    # independent route: bracketed root of the stationarity equation
    g = lambda y: y + lam * 12.0 * y * (y - 2.0) ** 2 - x
    lo, hi = (0.0, x) if x >= 0 else (x, 0.0)
    if g(lo) == 0.0:
        return lo
    return brentq(g, lo - 1e-12, hi + 1e-12, xtol=1e-15)


def test_quartic_prox_matches_brentq_oracle():
    rng = np.random.default_rng(2)
    quart = objective_fixture(E1, "plateau_quartic")
    for _ in range(200):
        lam = float(rng.uniform(1e-3, 0.06))
        x = float(rng.uniform(-3.0, 6.0))
        got = convex_resolvent(quart, lam, E1.point([x])).coords[0]
        assert got == pytest.approx(_quartic_prox_oracle(lam, x), abs=1e-12)


def test_quartic_fixes_stationary_nonminimizer():
    # f'(2) = 0, and for lam < 1/16 the subproblem at x = 2 has no other
    # stationary point, so 2 is a resolvent fixed point despite f(2) = 16 > 0
    quart = objective_fixture(E1, "plateau_quartic")
    for lam in (0.01, 0.05):
        assert convex_resolvent(quart, lam, E1.point([2.0])).coords[0] == pytest.approx(2.0, abs=1e-14)
    assert quart.eval(E1.point([2.0])) == pytest.approx(16.0)
    assert quart.eval(E1.point([0.0])) == 0.0


def test_quartic_prox_iterates_decrease_monotonically():
    quart = objective_fixture(E1, "plateau_quartic")
    x = 5.0
    for _ in range(100):
        nxt = float(convex_resolvent(quart, 0.01, E1.point([x])).coords[0])
        assert 2.0 < nxt < x
        x = nxt


# ---------------------------------------------------------------------------
# Lipschitz-map resolvent
# ---------------------------------------------------------------------------

def test_lipschitz_resolvent_identity_map():
    ident = catalog_operator(E2, "projection", cset=Ball(E2.point([0, 0]), 1e9))
    x = E2.point([0.3, 0.4])
    for lam in (0.5, 1.0, 3.0):
        assert E2.distance(lipschitz_resolvent(ident, lam, x), x) <= 1e-11


def test_lipschitz_resolvent_constant_map():
    c1 = catalog_operator(E1, "constant", point=E1.point([1.0]))
    got = lipschitz_resolvent(c1, 1.0, E1.point([0.0])).coords[0]
    assert got == pytest.approx(0.5, abs=1e-11)  # (1/(1+lam)) x + (lam/(1+lam)) c


def test_lipschitz_resolvent_reflection():
    # y = x/(1+lam) - (lam/(1+lam)) y  =>  y = x/(1+2 lam)
    refl = catalog_operator(E1, "scaled_reflection", factor=1.0)
    got = lipschitz_resolvent(refl, 1.0, E1.point([3.0])).coords[0]
    assert got == pytest.approx(1.0, abs=1e-11)


def test_lipschitz_resolvent_domain_errors():
    refl = catalog_operator(E1, "scaled_reflection", factor=1.0)
    with pytest.raises(DomainError):
        lipschitz_resolvent(refl, -1.0, E1.point([1]))
    T = OperatorSpec(space=E1, apply=lambda p: E1.point(2.0 * p.coords),
                     domain=WholeSpace(E1.space_id), lipschitz_const=2.0)
    with pytest.raises(DomainError):
        lipschitz_resolvent(T, 1.0, E1.point([1]))  # needs lam < 1/(2-1)
    bare = OperatorSpec(space=E1, apply=lambda p: p, domain=WholeSpace(E1.space_id))
    with pytest.raises(DomainError):
        lipschitz_resolvent(bare, 1.0, E1.point([1]))


def test_lipschitz_resolvent_contraction_ratio_reported():
    E = Euclidean(2)
    A = 1.8 * np.array([[0.0, -1.0], [1.0, 0.0]])
    T = OperatorSpec(space=E, apply=lambda p: E.point(A @ p.coords),
                     domain=WholeSpace(E.space_id), lipschitz_const=1.8)
    lam = 0.5 / 0.8
    y, iters, ratio = lipschitz_resolvent_detailed(T, lam, E.point([2.0, 1.0]))
    factor = 1.8 * lam / (1.0 + lam)
    assert ratio <= factor + 1e-6
    t = lam / (1.0 + lam)
    want = np.linalg.solve(np.eye(2) - t * A, (1 - t) * np.array([2.0, 1.0]))
    assert np.linalg.norm(y.coords - want) <= 1e-9


def test_lipschitz_resolvent_fixes_witnesses():
    ops = [
        catalog_operator(E2, "rotation", angle=1.1),
        catalog_operator(E2, "scaled_reflection", factor=0.7),
        catalog_operator(E2, "projection", cset=Ball(E2.point([0.5, 0.5]), 1.0)),
        catalog_operator(E2, "constant", point=E2.point([1.0, 0.0])),
    ]
    for op in ops:
        p = op.fixed_point_witness
        for lam in (0.3, 1.0, 5.0):
            assert E2.distance(lipschitz_resolvent(op, lam, p), p) <= 1e-9


def test_lipschitz_resolvent_fixed_points_are_fixed_by_T():
    rot = catalog_operator(E2, "rotation", angle=2.0)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = E2.sample_point(rng, 2.0)
        j = lipschitz_resolvent(rot, 1.0, x)
        if E2.distance(j, x) <= 1e-10:  # a fixed point of J is fixed by T
            assert E2.distance(rot.apply(j), j) <= 1e-7


# ---------------------------------------------------------------------------
# equilibrium resolvent
# ---------------------------------------------------------------------------

def test_equilibrium_rotation_vi_oracle():
    # interior stationarity (A + lam I) z = lam x solved exactly in 2x2
    vi = bifunction_fixture(E2, "rotation_vi")
    z = equilibrium_resolvent(vi, 1.0, E2.point([1.0, 0.0]))
    assert np.linalg.norm(z.coords - [0.5, 0.5]) <= 1e-8


def test_equilibrium_fixes_witness():
    vi = bifunction_fixture(E2, "rotation_vi")
    z = equilibrium_resolvent(vi, 1.0, vi.equilibrium_witness)
    assert E2.distance(z, vi.equilibrium_witness) <= 1e-9


def test_equilibrium_requires_lambda_above_theta():
    vi = bifunction_fixture(E2, "rotation_vi")
    shifted = dataclasses.replace(vi, theta=0.5)
    with pytest.raises(DomainError):
        equilibrium_resolvent(shifted, 0.5, E2.point([0.1, 0.0]))


def test_minimization_path_matches_convex_resolvent():
    # parameter correspondence: the pairing parameter lam corresponds to the
    # prox parameter 1/lam on minimization bifunctions
    bif = bifunction_fixture(E2, "min_quadratic", center=[1.0, 1.0])
    g = objective_fixture(E2, "quadratic", center=[1.0, 1.0])
    rng = np.random.default_rng(4)
    for _ in range(25):
        x = E2.sample_point(rng, 2.0)
        lam = float(rng.uniform(0.3, 5.0))
        via_bif = equilibrium_resolvent(bif, lam, x)
        via_prox = convex_resolvent(g, 1.0 / lam, x)
        assert E2.distance(via_bif, via_prox) <= 1e-9


def test_minimization_over_ball():
    K = Ball(E2.point([0, 0]), 1.0)
    bif = bifunction_fixture(E2, "min_quadratic", center=[3.0, 0.0], cset=K)
    # equilibrium point = projection of the center onto K
    assert np.allclose(bif.equilibrium_witness.coords, [1.0, 0.0])
    z = equilibrium_resolvent(bif, 1.0, E2.point([1.0, 0.0]))
    # resolvent output stays in K and moves toward the constrained minimizer
    assert E2.contains(K, z, 1e-9)
    assert E2.distance(z, bif.equilibrium_witness) < 1.0


def test_equilibrium_verification_catches_broken_solver():
    vi = bifunction_fixture(E2, "rotation_vi")
    broken = dataclasses.replace(
        vi, structure=CustomSolver(solve=lambda lam, x: E2.point([0.0, -0.9]))
    )
    with pytest.raises(SolverError):
        equilibrium_resolvent(broken, 1.0, E2.point([0.9, 0.0]))


def test_bifunction_sampled_axioms():
    rng = np.random.default_rng(5)
    vi = bifunction_fixture(E2, "rotation_vi")
    for _ in range(200):
        x = E2.sample_in(vi.feasible_set, rng)
        y = E2.sample_in(vi.feasible_set, rng)
        assert vi.eval(x, x) == 0.0
        # theta-under monotone with theta = 0, and pseudo-monotone
        s = vi.eval(x, y) + vi.eval(y, x)
        assert s <= vi.theta * E2.distance(x, y) ** 2 + 1e-8
        if vi.eval(x, y) >= 0.0:
            assert vi.eval(y, x) <= 1e-8


# ---------------------------------------------------------------------------
# resolvent sequences
# ---------------------------------------------------------------------------

def test_sequence_constant_lambda_valid():
    q = objective_fixture(E1, "quadratic")
    seq = resolvent_sequence(q, resolvent_constant(1.0))
    assert seq.factory(10).apply(E1.point([4])).coords[0] == pytest.approx(2.0)
    assert seq.common_fixed_point_witness is not None


def test_sequence_rejects_vanishing_lambda():
    q = objective_fixture(E1, "quadratic")
    with pytest.raises(ConfigError):
        resolvent_sequence(q, resolvent_schedule(lambda k: 1.0 / k, lower=0.0))
    with pytest.raises(ConfigError):
        resolvent_sequence(q, vanishing_schedule())  # wrong class entirely


def test_sequence_weakly_convex_needs_certified_cap():
    quart = objective_fixture(E1, "plateau_quartic")
    with pytest.raises(ConfigError):
        resolvent_sequence(quart, resolvent_constant(0.1))  # cap is 1/16
    seq = resolvent_sequence(quart, resolvent_constant(0.01))
    assert seq.factory(1).apply(E1.point([2.0])).coords[0] == pytest.approx(2.0)


def test_sequence_lipschitz_needs_cap_below_window():
    T = OperatorSpec(space=E1, apply=lambda p: E1.point(-2.0 * p.coords),
                     domain=WholeSpace(E1.space_id), lipschitz_const=2.0,
                     quasi_nonexpansive=False)
    with pytest.raises(ConfigError):
        resolvent_sequence(T, resolvent_constant(1.0))  # needs lam < 1
    seq = resolvent_sequence(T, resolvent_constant(0.5))
    # oracle: y = x/(1+lam) - (c lam/(1+lam)) y  =>  y = x/(1 + (1+c) lam)
    assert seq.factory(1).apply(E1.point([3.0])).coords[0] == pytest.approx(1.2, abs=1e-10)


def test_sequence_equilibrium_margin_rules():
    vi = bifunction_fixture(E2, "rotation_vi")
    shifted = dataclasses.replace(vi, theta=0.5)
    # lower bound equal to theta: no positive margin, rejected
    with pytest.raises(ConfigError):
        resolvent_sequence(shifted, resolvent_schedule(
            lambda k: 0.5 + 1.0 / k, lower=0.5, upper=1.5))
    # no upper bound: rejected
    with pytest.raises(ConfigError):
        resolvent_sequence(vi, resolvent_schedule(lambda k: 1.0, lower=1.0))
    seq = resolvent_sequence(shifted, resolvent_schedule(
        lambda k: 0.6 + 1.0 / k, lower=0.6, upper=1.6))
    assert seq.common_fixed_point_witness is vi.equilibrium_witness


def test_dist2_to_set_closed_form_matches_descent():
    # dual route for the set-distance objective: the closed form moves x a
    # fraction lam/(1+lam) toward its projection; descent must agree
    rng = np.random.default_rng(6)
    cases = [
        (E2, Ball(E2.point([0.2, -0.1]), 0.7)),
        (E2, Segment(E2.point([0, 0]), E2.point([1, 0]))),
        (H2, Ball(H2.from_spatial([0.3, 0.2]), 0.4)),
    ]
    for space, cset in cases:
        f = objective_fixture(space, "dist2_to_set", cset=cset)
        solver_route = dataclasses.replace(f, closed_form_resolvent=None)
        for _ in range(10):
            x = space.sample_point(rng, 1.0)
            lam = float(rng.uniform(0.2, 4.0))
            got = convex_resolvent(solver_route, lam, x)
            want = f.closed_form_resolvent(lam, x)
            assert space.distance(got, want) <= 1e-7
