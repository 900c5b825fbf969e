"""Checkers that turn the convergence theory's inequalities into reports.

Every checker samples a universally quantified inequality, so a passing
report certifies the stated sample count, never the full claim. Reports are
deterministic given the seed. Slack constants are centralized below; the
hyperboloid loses roughly two digits over chained geodesic computations,
which sets the looser 1e-7/1e-8 values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .geometry import ConvexSubset, ModelSpace, SpacePoint
from .operators import OperatorSpec
from .resolvents import ObjectiveFunction, convex_resolvent
from .schemes import IterationTrace

SLACK = {
    "fejer": 1e-9,
    "quasi_firm": 1e-7,
    "sqn": 1e-7,
    "nested_fixed_sets": 1e-7,
    "cat0_comparison": 1e-8,
    "cauchy_schwarz": 1e-8,
    "quasilin_identity": 1e-9,
    "geodesic_consistency": 1e-9,
    "halpern_bound": 1e-8,
}


@dataclass(frozen=True, eq=False)
class Violation:
    descriptor: str
    lhs: float
    rhs: float
    slack: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs - self.slack


@dataclass(frozen=True, eq=False)
class CheckReport:
    check_name: str
    samples_tested: int
    violations: list[Violation]
    max_violation: float  # worst lhs - rhs - slack over all samples; <= 0 iff passed

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "samples_tested": self.samples_tested,
            "passed": self.passed,
            "max_violation": self.max_violation,
            "violations": [
                {"descriptor": v.descriptor, "lhs": v.lhs, "rhs": v.rhs, "slack": v.slack}
                for v in self.violations
            ],
        }


class _Collector:
    def __init__(self, name: str):
        self.name = name
        self.samples = 0
        self.violations: list[Violation] = []
        self.worst = -math.inf

    def check(self, descriptor: str, lhs: float, rhs: float, slack: float) -> None:
        self.samples += 1
        margin = lhs - rhs - slack
        if margin > self.worst:
            self.worst = margin
        if margin > 0.0 or not math.isfinite(margin):
            self.violations.append(Violation(descriptor, lhs, rhs, slack))

    def report(self, samples: int | None = None) -> CheckReport:
        return CheckReport(
            check_name=self.name,
            samples_tested=self.samples if samples is None else samples,
            violations=self.violations,
            max_violation=self.worst if self.samples else 0.0,
        )


def check_fejer(space: ModelSpace, trace: IterationTrace, p: SpacePoint) -> CheckReport:
    """Distances to p along the trace must be nonincreasing (Fejer
    monotonicity with respect to a common fixed point)."""
    space.check_point(p)
    if not trace.steps:
        raise DomainError("empty trace")
    col = _Collector("fejer")
    pts = [s.point for s in trace.steps] + [trace.summary.final_point]
    ks = [s.k for s in trace.steps] + [trace.summary.iterations_run + 1]
    prev = space.distance(pts[0], p)
    for i in range(1, len(pts)):
        cur = space.distance(pts[i], p)
        col.check(f"k={ks[i - 1]} -> k={ks[i]}", cur, prev, SLACK["fejer"])
        prev = cur
    return col.report()


def check_quasi_firm(
    f: ObjectiveFunction,
    lam: float,
    witness: SpacePoint,
    samples: int = 500,
    seed: int = 0,
    scale: float = 2.0,
) -> CheckReport:
    """d^2(J x, w) <= <(J x) w, x w> at an argmin witness w, the quasi-firm
    inequality of the prox operator."""
    space = f.space
    space.check_point(witness)
    alpha = f.weak_convexity_alpha
    if alpha is not None and alpha > 0.0 and not (lam < 1.0 / (2.0 * alpha)):
        raise DomainError(f"lam={lam} is not below 1/(2*{alpha})")
    rng = np.random.default_rng(seed)
    col = _Collector("quasi_firm")
    for i in range(samples):
        x = space.sample_point(rng, scale)
        jx = convex_resolvent(f, lam, x)
        d = space.distance(jx, witness)
        col.check(f"sample {i}", d * d, space.quasilin(jx, witness, x, witness),
                  SLACK["quasi_firm"])
    return col.report()


def check_sqn_inequality(
    op: OperatorSpec,
    witness: SpacePoint | None = None,
    samples: int = 500,
    seed: int = 0,
    scale: float = 2.0,
) -> CheckReport:
    """The residual bound matching how the operator was built:

    mann/ishikawa        ((1-a)/a) d^2(x, Sx) <= d^2(x,p) - d^2(Sx,p)
    lipschitz_resolvent  d^2(x, Jx) <= (lam/(1+lam)) (d^2(x,p) - d^2(Jx,p))
    equilibrium/convex   d^2(x, Jx) <= d^2(x,p) - d^2(Jx,p)
    """
    p = witness if witness is not None else op.fixed_point_witness
    if p is None:
        raise ConfigError("check_sqn_inequality needs a fixed-point witness")
    space = op.space
    space.check_point(p)
    tag = op.tag
    if tag in ("mann", "ishikawa"):
        a = op.params["alpha"]
        coef_lhs, coef_rhs = (1.0 - a) / a, 1.0
    elif tag == "lipschitz_resolvent":
        lam = op.params["lam"]
        coef_lhs, coef_rhs = 1.0, lam / (1.0 + lam)
    elif tag in ("equilibrium_resolvent", "convex_resolvent"):
        coef_lhs, coef_rhs = 1.0, 1.0
    else:
        raise ConfigError(
            f"no residual inequality is defined for operators tagged {tag!r}"
        )
    rng = np.random.default_rng(seed)
    col = _Collector(f"sqn_inequality[{tag}]")
    for i in range(samples):
        x = space.project(op.domain, space.sample_point(rng, scale))
        sx = op.apply(x)
        dxs = space.distance(x, sx)
        dxp = space.distance(x, p)
        dsp = space.distance(sx, p)
        col.check(f"sample {i}", coef_lhs * dxs * dxs,
                  coef_rhs * (dxp * dxp - dsp * dsp), SLACK["sqn"])
    return col.report()


def check_nested_fixed_sets(
    f: ObjectiveFunction,
    lam: float,
    mu: float,
    candidates: list[SpacePoint],
) -> CheckReport:
    """Fixed points of the prox at parameter lam stay fixed at any smaller
    parameter mu. Candidates must actually be fixed at lam (checked)."""
    if not (0.0 < mu < lam):
        raise DomainError(f"need 0 < mu < lam, got mu={mu}, lam={lam}")
    space = f.space
    col = _Collector("nested_fixed_sets")
    for i, p in enumerate(candidates):
        r = space.distance(convex_resolvent(f, lam, p), p)
        if r > 1e-10:
            raise DomainError(
                f"candidate {i} is not a fixed point at lam={lam} (residual {r:.3e})"
            )
        col.check(f"candidate {i}", space.distance(convex_resolvent(f, mu, p), p),
                  0.0, SLACK["nested_fixed_sets"])
    return col.report()


def check_space_axioms(
    space: ModelSpace,
    samples: int = 1000,
    seed: int = 0,
    scale: float = 2.0,
) -> CheckReport:
    """Bundle of the geometry invariants: comparison inequality,
    Cauchy-Schwarz for the pairing, the pairing identities, and geodesic
    consistency, each on fresh random tuples."""
    rng = np.random.default_rng(seed)
    col = _Collector("space_axioms")
    dist = space.distance
    for i in range(samples):
        x, y, z = (space.sample_point(rng, scale) for _ in range(3))
        t = float(rng.uniform())
        m = space.combine(x, y, t)
        dmz = dist(m, z)
        dxz = dist(x, z)
        dyz = dist(y, z)
        dxy = dist(x, y)
        col.check(
            f"cat0 {i}", dmz * dmz,
            (1 - t) * dxz * dxz + t * dyz * dyz - t * (1 - t) * dxy * dxy,
            SLACK["cat0_comparison"],
        )

        # one squared-distance table over the 5 points makes every pairing
        # value cheap arithmetic; the pairing itself is defined from it
        a, b, c, d = (space.sample_point(rng, scale) for _ in range(4))
        pts = (a, b, c, d, x)
        sq = {}
        for j in range(5):
            for k in range(j + 1, 5):
                v = dist(pts[j], pts[k])
                sq[j, k] = sq[k, j] = v * v
        for j in range(5):
            sq[j, j] = 0.0

        def ql(p, q, r, s):
            return 0.5 * (sq[p, s] + sq[q, r] - sq[p, r] - sq[q, s])

        A, B, C, D, X = range(5)
        col.check(f"cauchy_schwarz {i}", ql(A, B, C, D),
                  math.sqrt(sq[A, B] * sq[C, D]), SLACK["cauchy_schwarz"])
        col.check(f"pairing_self {i}", abs(ql(A, B, A, B) - sq[A, B]), 0.0,
                  SLACK["quasilin_identity"])
        col.check(f"pairing_symmetry {i}", abs(ql(A, B, C, D) - ql(C, D, A, B)), 0.0,
                  SLACK["quasilin_identity"])
        col.check(f"pairing_antisymmetry {i}", abs(ql(A, B, C, D) + ql(B, A, C, D)), 0.0,
                  SLACK["quasilin_identity"])
        col.check(
            f"pairing_split {i}",
            abs(ql(A, X, C, D) + ql(X, B, C, D) - ql(A, B, C, D)), 0.0,
            SLACK["quasilin_identity"],
        )

        s = float(rng.uniform())
        col.check(
            f"geodesic {i}",
            abs(dist(space.combine(x, y, t), space.combine(x, y, s))
                - abs(t - s) * dxy),
            0.0, SLACK["geodesic_consistency"],
        )
    return col.report(samples)


def check_halpern_target(
    space: ModelSpace,
    trace: IterationTrace,
    u: SpacePoint,
    fixed_set: ConvexSubset,
    tolerance: float,
) -> CheckReport:
    """The run must end within ``tolerance`` of the projection of the anchor
    onto the fixed set, and stay inside the a-priori bound
    max(d(x*, u), d(x*, x_1)) along the way."""
    space.check_point(u)
    if not trace.steps:
        raise DomainError("empty trace")
    target = space.project(fixed_set, u)
    col = _Collector("halpern_target")
    col.check("final distance to projection",
              space.distance(trace.summary.final_point, target), 0.0, tolerance)
    bound = max(space.distance(target, u), space.distance(target, trace.steps[0].point))
    for s in trace.steps:
        col.check(f"boundedness k={s.k}", space.distance(s.point, target), bound,
                  SLACK["halpern_bound"])
    return col.report()
