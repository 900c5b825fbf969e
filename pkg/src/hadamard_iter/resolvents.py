"""Three resolvent constructions, each yielding quasi-nonexpansive operators.

Convex-function resolvent
    J_lam(x) = argmin_y  f(y) + d^2(y, x) / (2 lam)
    Solved by a closed form when the objective carries one, otherwise by
    Riemannian gradient descent in the tangent chart (log/exp maps) with
    Armijo backtracking. For an a-weakly convex f the subproblem is
    (1/(2 lam) - a)-strongly convex, so lam < 1/(2a) is required.

Lipschitz-map resolvent
    J_lam(x) = the unique fixed point of y -> (1/(1+lam)) x (+) (lam/(1+lam)) T y,
    which is a contraction with factor c = a lam / (1 + lam) whenever
    lam < 1/(a-1) (no restriction for a <= 1). Solved by fixed-point
    iteration from y0 = x; observed per-step contraction ratios are
    monitored against c.

Equilibrium resolvent
    For a bifunction f on a feasible set K and lam > theta, the point z in K
    with  f(z, y) + lam <xz, zy> >= 0  for all y in K. Constructive cases:
    minimization bifunctions reduce to the convex resolvent with parameter
    1/lam, and variational inequalities z = P_K(z - g (F(z) + lam (z - x)))
    are solved by projected fixed-point iteration with g = 1/(L + lam).
    The defining inequality is re-verified on a deterministic sample grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError, SolverError, UnsupportedOperationError
from .geometry import (
    ConvexSubset,
    Euclidean,
    Hyperboloid,
    ModelSpace,
    SpacePoint,
    Spider,
    WholeSpace,
    canonical_point,
)
from .operators import OperatorSequence, OperatorSpec
from .schedules import Schedule, ScheduleClass, require_class

PROX_GRAD_TOL = 1e-10
PROX_MAX_ITERS = 10_000
FIXED_POINT_TOL = 1e-12
FIXED_POINT_BUDGET = 1_000_000
VI_TOL = 1e-10
VI_BUDGET = 1_000_000
EQ_INEQUALITY_SLACK = 1e-7


@dataclass(frozen=True, eq=False)
class ObjectiveFunction:
    """An extended-real function on a model space with optional structure.

    ``gradient`` returns the Riemannian gradient as an ambient tangent
    vector at the query point. ``weak_convexity_alpha`` is the weak
    convexity modulus (0 means convex). ``known_argmin`` may be a point or a
    convex set. A ``closed_form_resolvent`` (lam, x) -> point short-circuits
    the inner solver.
    """

    space: ModelSpace
    eval: Callable[[SpacePoint], float]
    gradient: Callable[[SpacePoint], np.ndarray] | None = None
    gradient_lipschitz: float | None = None
    weak_convexity_alpha: float | None = None
    convex: bool = False
    quasi_convex: bool = False
    weakly_convex: bool = False
    pseudo_convex: bool = False
    known_argmin: SpacePoint | ConvexSubset | None = None
    closed_form_resolvent: Callable[[float, SpacePoint], SpacePoint] | None = None
    name: str = ""


@dataclass(frozen=True, eq=False)
class Minimization:
    """Bifunction structure f(x, y) = g(y) - g(x)."""

    objective: ObjectiveFunction


@dataclass(frozen=True, eq=False)
class VariationalInequality:
    """Bifunction structure f(x, y) = <F(x), y - x> for an L-Lipschitz field."""

    field: Callable[[SpacePoint], np.ndarray]
    lipschitz: float


@dataclass(frozen=True, eq=False)
class CustomSolver:
    """User-supplied resolvent; output is still verified on samples."""

    solve: Callable[[float, SpacePoint], SpacePoint]


@dataclass(frozen=True, eq=False)
class Bifunction:
    """f : K x K -> R with f(x, x) = 0, theta-under monotone."""

    space: ModelSpace
    eval: Callable[[SpacePoint, SpacePoint], float]
    theta: float
    structure: Minimization | VariationalInequality | CustomSolver
    feasible_set: ConvexSubset
    equilibrium_witness: SpacePoint | None = None
    name: str = ""


# ---------------------------------------------------------------------------
# convex-function resolvent
# ---------------------------------------------------------------------------

def convex_resolvent(f: ObjectiveFunction, lam: float, x: SpacePoint) -> SpacePoint:
    """Minimizer of y -> f(y) + d^2(y, x) / (2 lam)."""
    if not (lam > 0.0):
        raise DomainError(f"resolvent parameter lam={lam} must be positive")
    alpha = f.weak_convexity_alpha
    if alpha is not None and alpha > 0.0 and not (lam < 1.0 / (2.0 * alpha)):
        raise DomainError(
            f"lam={lam} too large for weak-convexity modulus {alpha}: "
            f"the subproblem is strongly convex only for lam < {1.0 / (2.0 * alpha)}"
        )
    space = f.space
    space.check_point(x)
    if f.closed_form_resolvent is not None:
        y = f.closed_form_resolvent(lam, x)
    elif f.gradient is not None and not isinstance(space, Spider):
        y = _prox_by_descent(f, lam, x)
    elif isinstance(space, Spider):
        raise UnsupportedOperationError(
            "the spider tree has no tangent chart; provide a closed-form resolvent"
        )
    else:
        raise UnsupportedOperationError(
            f"objective {f.name or '<anonymous>'} has neither a closed-form "
            "resolvent nor a gradient"
        )
    _recheck_first_order(f, lam, x, y)
    return y


def _subproblem_grad(f: ObjectiveFunction, lam: float, x: SpacePoint, y: SpacePoint) -> np.ndarray:
    # grad of d^2(y, x)/(2 lam) is -log_y(x)/lam
    return f.gradient(y) - f.space.log_map(y, x) / lam


def _recheck_first_order(f: ObjectiveFunction, lam: float, x: SpacePoint, y: SpacePoint) -> None:
    if f.gradient is None:
        return
    space = f.space
    back = space.log_map(y, x)  # |back| = d(x, y), reused for the scale
    g = f.gradient(y) - back / lam
    norm = space.tangent_norm(y, g)
    scale = 1.0 + space.tangent_norm(y, back) / lam
    if norm > 1e-8 * scale:
        raise SolverError(
            f"resolvent output fails first-order optimality: |grad| = {norm:.3e} "
            f"(lam={lam})"
        )


def _prox_by_descent(f: ObjectiveFunction, lam: float, x: SpacePoint) -> SpacePoint:
    """Armijo gradient descent on the prox subproblem in the tangent chart.

    Near the optimum the Armijo decrease falls below the resolution of the
    objective values themselves; from that point on the method keeps the
    last certified step size and trusts the gradients alone, which stay
    accurate long after function differences drown in rounding.
    """
    space = f.space

    def value(p: SpacePoint) -> float:
        d = space.distance(p, x)
        return f.eval(p) + d * d / (2.0 * lam)

    y = x
    fy = value(y)
    step = lam / (1.0 + lam)
    noise_mode = False
    prev_gnorm = math.inf
    for _ in range(PROX_MAX_ITERS):
        g = _subproblem_grad(f, lam, x, y)
        gnorm = space.tangent_norm(y, g)
        if gnorm <= PROX_GRAD_TOL:
            return y
        if noise_mode:
            # function values can no longer resolve progress; do plain
            # gradient steps and shrink whenever the gradient norm grows
            if gnorm > prev_gnorm:
                step *= 0.5
                if step < 1e-20:
                    raise SolverError(
                        f"gradient steps stalled at |grad| = {gnorm:.3e} (lam = {lam})"
                    )
            prev_gnorm = gnorm
            y = space.exp_map(y, -step * g)
            continue
        # backtracking with sufficient-decrease check; persistent failure
        # while the required decrease is still resolvable means the
        # subproblem is not convex at this lam, and is reported
        step = min(step * 2.0, 1e6)
        while True:
            cand = space.exp_map(y, -step * g)
            fc = value(cand)
            need = 1e-4 * step * gnorm * gnorm
            if fc <= fy - need:
                break
            if need <= 1e-13 * (abs(fy) + abs(fc) + 1e-300):
                noise_mode = True
                step *= 0.5
                prev_gnorm = gnorm
                cand, fc = y, fy  # switch modes without moving
                break
            step *= 0.5
            if step < 1e-20:
                raise SolverError(
                    "Armijo backtracking stalled; sufficient decrease unattainable "
                    f"(|grad| = {gnorm:.3e}, lam = {lam})"
                )
        y, fy = cand, fc
    g = _subproblem_grad(f, lam, x, y)
    raise SolverError(
        f"prox subproblem did not reach |grad| <= {PROX_GRAD_TOL} within "
        f"{PROX_MAX_ITERS} steps (residual {space.tangent_norm(y, g):.3e})"
    )


def convex_resolvent_operator(f: ObjectiveFunction, lam: float) -> OperatorSpec:
    witness = _argmin_witness(f)
    return OperatorSpec(
        space=f.space,
        apply=lambda x: convex_resolvent(f, lam, x),
        domain=WholeSpace(f.space.space_id),
        fixed_point_witness=witness,
        quasi_nonexpansive=True, demiclosed_assumed=True,
        tag="convex_resolvent", params={"lam": lam},
    )


def _argmin_witness(f: ObjectiveFunction) -> SpacePoint | None:
    if isinstance(f.known_argmin, SpacePoint):
        return f.known_argmin
    if f.known_argmin is not None:
        return canonical_point(f.space, f.known_argmin)
    return None


# ---------------------------------------------------------------------------
# Lipschitz-map resolvent
# ---------------------------------------------------------------------------

def lipschitz_resolvent(T: OperatorSpec, lam: float, x: SpacePoint) -> SpacePoint:
    return lipschitz_resolvent_detailed(T, lam, x)[0]


def lipschitz_resolvent_detailed(
    T: OperatorSpec, lam: float, x: SpacePoint
) -> tuple[SpacePoint, int, float]:
    """Returns (point, inner iterations, worst observed contraction ratio).

    Ratios are recorded only while the step length is well above the noise
    floor of the metric, so the reported maximum is meaningful against the
    analytic factor a lam / (1 + lam).
    """
    if not (lam > 0.0):
        raise DomainError(f"resolvent parameter lam={lam} must be positive")
    if T.lipschitz_const is None:
        raise DomainError("lipschitz_resolvent needs an operator with a declared Lipschitz constant")
    a = T.lipschitz_const
    if a > 1.0 and not (lam < 1.0 / (a - 1.0)):
        raise DomainError(
            f"lam={lam} outside the contraction window: a Lipschitz constant "
            f"{a} > 1 requires lam < {1.0 / (a - 1.0)}"
        )
    space = T.space
    space.check_point(x)
    t = lam / (1.0 + lam)
    factor = a * t
    y = x
    prev_step = None
    max_ratio = 0.0
    noise_floor = 0.0
    for j in range(FIXED_POINT_BUDGET):
        y_next = space.combine(x, T.apply(y), t)
        step = space.distance(y_next, y)
        if not math.isfinite(step):
            raise SolverError(f"resolvent iteration diverged at inner step {j + 1}")
        if j == 0:
            noise_floor = 1e-8 * (1.0 + step)
        elif prev_step > noise_floor and step > noise_floor:
            ratio = step / prev_step
            if ratio > max_ratio:
                max_ratio = ratio
            if ratio > factor + 1e-6:
                raise SolverError(
                    f"observed contraction ratio {ratio:.9f} exceeds the analytic "
                    f"factor {factor:.9f} at inner step {j + 1}"
                )
        y = y_next
        if step <= FIXED_POINT_TOL:
            return y, j + 1, max_ratio
        prev_step = step
    raise SolverError(
        f"fixed-point iteration did not contract to {FIXED_POINT_TOL} within "
        f"{FIXED_POINT_BUDGET} steps (last step {step:.3e}, factor {factor:.6f})"
    )


def lipschitz_resolvent_operator(T: OperatorSpec, lam: float) -> OperatorSpec:
    return OperatorSpec(
        space=T.space,
        apply=lambda x: lipschitz_resolvent(T, lam, x),
        domain=T.domain,
        fixed_point_witness=T.fixed_point_witness,
        quasi_nonexpansive=True, demiclosed_assumed=T.demiclosed_assumed,
        tag="lipschitz_resolvent", params={"lam": lam},
    )


# ---------------------------------------------------------------------------
# equilibrium resolvent
# ---------------------------------------------------------------------------

def equilibrium_resolvent(
    f: Bifunction,
    lam: float,
    x: SpacePoint,
    gamma: float | None = None,
    verify_directions: int = 64,
    verify_radii: int = 8,
) -> SpacePoint:
    """The point z in K with f(z, y) + lam <xz, zy> >= 0 for all y in K.

    ``gamma`` overrides the inner projected-iteration step size (default
    1/(L + lam)). Verification sampling can be thinned (or disabled with
    verify_directions=0) by callers that evaluate the resolvent inside long
    iteration loops.
    """
    if not (lam > f.theta):
        raise DomainError(
            f"lam={lam} must exceed the under-monotonicity modulus theta={f.theta}"
        )
    space = f.space
    space.check_point(x)
    K = f.feasible_set

    if isinstance(f.structure, Minimization):
        z = _solve_min_structure(f.structure.objective, K, lam, x, gamma)
    elif isinstance(f.structure, VariationalInequality):
        z = _solve_vi_structure(f.structure, K, lam, x, gamma)
    else:
        z = f.structure.solve(lam, x)
        space.check_point(z)
        z = space.project(K, z)

    if verify_directions > 0:
        _verify_equilibrium(f, lam, x, z, verify_directions, verify_radii)
    return z


def _solve_min_structure(
    g: ObjectiveFunction, K: ConvexSubset, lam: float, x: SpacePoint, gamma: float | None
) -> SpacePoint:
    # f(z, y) = g(y) - g(z): the resolvent inequality is the optimality
    # condition of argmin_{y in K} g(y) + (lam/2) d^2(y, x), i.e. the prox of
    # g with parameter 1/lam restricted to K.
    if K.kind == "whole_space":
        return convex_resolvent(g, 1.0 / lam, x)
    if not isinstance(g.space, Euclidean):
        raise UnsupportedOperationError(
            "constrained minimization bifunctions are solved in Euclidean spaces only"
        )
    if g.gradient is None or g.gradient_lipschitz is None:
        raise UnsupportedOperationError(
            "constrained minimization needs gradient and gradient_lipschitz"
        )
    vi = VariationalInequality(field=g.gradient, lipschitz=g.gradient_lipschitz)
    return _solve_vi_structure(vi, K, lam, x, gamma)


def _solve_vi_structure(
    vi: VariationalInequality, K: ConvexSubset, lam: float, x: SpacePoint, gamma: float | None
) -> SpacePoint:
    space = _vi_space(vi, K, x)
    g = gamma if gamma is not None else 1.0 / (vi.lipschitz + lam)
    z = space.project(K, x)
    xc = x.coords
    for j in range(VI_BUDGET):
        drift = vi.field(z) + lam * (z.coords - xc)
        z_next = space.project(K, space.point(z.coords - g * drift))
        move = space.distance(z_next, z)
        if not math.isfinite(move):
            raise SolverError(f"projected iteration diverged at inner step {j + 1}")
        z = z_next
        if move <= VI_TOL:
            return z
    raise SolverError(
        f"projected iteration did not reach movement <= {VI_TOL} within "
        f"{VI_BUDGET} steps (last movement {move:.3e}); the step size "
        f"gamma={g} contracts only when lam is not too small relative to L"
    )


def _vi_space(vi: VariationalInequality, K: ConvexSubset, x: SpacePoint) -> Euclidean:
    dim = x.coords.shape[0]
    space = Euclidean(dim)
    if x.space_id != space.space_id:
        raise UnsupportedOperationError(
            "variational-inequality resolvents are solved in Euclidean spaces only"
        )
    return space


def _verify_equilibrium(
    f: Bifunction, lam: float, x: SpacePoint, z: SpacePoint, n_dir: int, n_rad: int
) -> None:
    for y in _verification_points(f.space, f.feasible_set, x, z, n_dir, n_rad):
        margin = f.eval(z, y) + lam * f.space.quasilin(x, z, z, y)
        if margin < -EQ_INEQUALITY_SLACK:
            raise SolverError(
                f"equilibrium inequality violated by {-margin:.3e} at sample "
                f"y={np.array2string(y.coords, precision=6)}"
            )


def _verification_points(
    space: ModelSpace, K: ConvexSubset, x: SpacePoint, z: SpacePoint, n_dir: int, n_rad: int
):
    """Deterministic grid in K: directions x radii around the set anchor,
    boundary/extreme points included, every candidate projected into K."""
    pts: list[SpacePoint] = []
    if K.kind == "segment":
        n = max(2, n_dir * n_rad)
        for i in range(n + 1):
            pts.append(space.combine(K.a, K.b, i / n))
        return pts
    anchor = canonical_point(space, K)
    if K.kind == "ball":
        radius = K.radius
    else:
        radius = 1.0 + 2.0 * (space.distance(anchor, x) + space.distance(anchor, z))
    rng = np.random.default_rng(271828)  # fixed: verification must be reproducible
    if isinstance(space, Spider):
        for leg in range(space.num_legs):
            for i in range(1, n_rad + 1):
                cand = space.point((leg, radius * i / n_rad))
                pts.append(space.project(K, cand))
        pts.append(space.base_point() if K.kind != "ball" else space.project(K, space.base_point()))
        return pts
    dim = anchor.coords.shape[0] - (1 if isinstance(space, Hyperboloid) else 0)
    for _ in range(n_dir):
        d = rng.normal(size=dim)
        d /= math.sqrt(float(d @ d))
        for i in range(1, n_rad + 1):
            r = radius * i / n_rad
            if isinstance(space, Hyperboloid):
                cand = space.exp_map(anchor, np.concatenate(([0.0], d * r)))
            else:
                cand = space.point(anchor.coords + d * r)
            pts.append(space.project(K, cand))
    pts.append(anchor)
    return pts


def equilibrium_resolvent_operator(
    f: Bifunction, lam: float, verify_directions: int = 8, verify_radii: int = 2
) -> OperatorSpec:
    """Resolvent as an operator. Verification is thinned by default because
    the operator form is meant for iteration loops; pass larger counts for
    one-shot audited evaluations."""
    return OperatorSpec(
        space=f.space,
        apply=lambda x: equilibrium_resolvent(
            f, lam, x, verify_directions=verify_directions, verify_radii=verify_radii
        ),
        domain=f.feasible_set,
        fixed_point_witness=f.equilibrium_witness,
        quasi_nonexpansive=True, demiclosed_assumed=True,
        tag="equilibrium_resolvent", params={"lam": lam},
    )


# ---------------------------------------------------------------------------
# resolvent sequences
# ---------------------------------------------------------------------------

def resolvent_sequence(
    source: ObjectiveFunction | OperatorSpec | Bifunction, lambdas: Schedule
) -> OperatorSequence:
    """The operator family k -> resolvent of ``source`` at lam_k.

    Schedule requirements: a certified positive lower bound (liminf > 0) in
    all cases; for a Lipschitz map with constant a > 1 additionally a
    certified upper bound below 1/(a-1); for a bifunction a lower bound
    strictly above theta and a finite upper bound.
    """
    require_class(lambdas, ScheduleClass.RESOLVENT_PARAM, "lambda")
    if isinstance(source, ObjectiveFunction):
        alpha = source.weak_convexity_alpha
        if alpha is not None and alpha > 0.0:
            cap = 1.0 / (2.0 * alpha)
            if lambdas.upper_bound is None or not (lambdas.upper_bound < cap):
                raise ConfigError(
                    f"weakly convex objective (modulus {alpha}) needs lam_k "
                    f"certified below {cap}"
                )
        return OperatorSequence(
            space=source.space,
            factory=_cached_factory(lambdas, lambda lam: convex_resolvent_operator(source, lam)),
            common_fixed_point_witness=_argmin_witness(source),
        )
    if isinstance(source, OperatorSpec):
        a = source.lipschitz_const
        if a is None:
            raise ConfigError("resolvent_sequence over an operator needs its Lipschitz constant")
        if a > 1.0:
            cap = 1.0 / (a - 1.0)
            if lambdas.upper_bound is None or not (lambdas.upper_bound < cap):
                raise ConfigError(
                    f"Lipschitz constant {a} > 1 needs lam_k certified below {cap}"
                )
        return OperatorSequence(
            space=source.space,
            factory=_cached_factory(lambdas, lambda lam: lipschitz_resolvent_operator(source, lam)),
            common_fixed_point_witness=source.fixed_point_witness,
        )
    if isinstance(source, Bifunction):
        if not (lambdas.lower_bound > source.theta):
            raise ConfigError(
                f"equilibrium parameters need a certified lower bound strictly above "
                f"theta={source.theta} (a positive margin), got {lambdas.lower_bound}"
            )
        if lambdas.upper_bound is None:
            raise ConfigError("equilibrium parameters need a finite upper bound")
        return OperatorSequence(
            space=source.space,
            factory=_cached_factory(
                lambdas, lambda lam: equilibrium_resolvent_operator(source, lam)
            ),
            common_fixed_point_witness=source.equilibrium_witness,
        )
    raise ConfigError(f"cannot build resolvents from {type(source).__name__}")


def _cached_factory(
    lambdas: Schedule, build: Callable[[float], OperatorSpec]
) -> Callable[[int], OperatorSpec]:
    if lambdas.lower_bound is not None and lambdas.lower_bound == lambdas.upper_bound:
        op = build(lambdas.lower_bound)  # constant schedule: one shared operator
        return lambda k: op
    return lambda k: build(lambdas(k))
