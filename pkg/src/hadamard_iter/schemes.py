"""Iteration engines and named scheme wiring.

Two engines cover every scheme in the package:

    iterate_sequence:  x_{k+1} = T_k x_k
    halpern_iterate:   x_{k+1} = a_k u (+) (1 - a_k) T_k x_k

where u is the anchor and the anchor weights a_k tend to 0 with divergent
sum. Runs are indexed from k = 1; the start point is x_1. The sequence
engine stops when the residual d(x_k, T_k x_k) drops below the tolerance;
the Halpern engine stops on step movement instead, because its residual
need not vanish monotonically. Both stop at the iteration budget.

All built-in schemes are Fejer monotone toward the common fixed set in the
sequence engine, and the Halpern engine keeps d(x_k, x*) bounded by
max(d(x*, u), d(x*, x_1)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConfigError, SolverError
from .geometry import ModelSpace, SpacePoint
from .operators import OperatorSequence, OperatorSpec, ishikawa_sequence, mann_sequence
from .resolvents import Bifunction, ObjectiveFunction, resolvent_sequence
from .schedules import Schedule, ScheduleClass, require_class


class StopReason(enum.Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget_exhausted"
    SOLVER_ERROR = "solver_error"


@dataclass(frozen=True, eq=False, slots=True)
class TraceStep:
    k: int
    point: SpacePoint
    residual: float
    dist_to_reference: float | None
    fejer_gap: float | None


@dataclass(frozen=True, eq=False)
class RunSummary:
    scheme: str
    guarantee: str
    iterations_run: int
    final_residual: float
    final_point: SpacePoint
    stop_reason: StopReason
    error_step: int | None = None
    error_message: str | None = None
    target_distance: float | None = None


@dataclass(frozen=True, eq=False)
class IterationTrace:
    steps: list[TraceStep]
    summary: RunSummary


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Everything an engine needs besides the operator sequence itself.

    ``reference`` is an optional known target; when present the trace
    records distances to it and the Fejer gaps d(x_k, ref) - d(x_{k+1}, ref).
    ``trace_stride`` None means: record every step up to 1000, then thin
    logarithmically. The final step is always recorded.
    """

    space: ModelSpace
    start: SpacePoint
    anchor: SpacePoint | None = None
    max_iterations: int = 100_000
    tolerance: float = 1e-10
    reference: SpacePoint | None = None
    trace_stride: int | None = None
    seed: int = 0


class _Recorder:
    __slots__ = ("stride", "next_log")

    def __init__(self, stride: int | None):
        self.stride = stride
        self.next_log = 1000

    def want(self, k: int) -> bool:
        if self.stride is not None:
            return k == 1 or k % self.stride == 0
        if k <= 1000:
            return True
        if k >= self.next_log:
            self.next_log = max(self.next_log + 1, int(self.next_log * 1.1))
            return True
        return False


def iterate_sequence(
    seq: OperatorSequence,
    cfg: RunConfig,
    scheme: str = "sequence",
    guarantee: str = "",
) -> IterationTrace:
    """Run x_{k+1} = T_k x_k until the residual meets the tolerance."""
    if cfg.anchor is not None:
        raise ConfigError("anchor point given, but the plain sequence iteration has no anchor")
    space = cfg.space
    space.check_point(cfg.start)
    ref = cfg.reference
    if ref is not None:
        space.check_point(ref)
    rec = _Recorder(cfg.trace_stride)
    steps: list[TraceStep] = []
    x = cfg.start
    k = 1
    while True:
        try:
            w = seq.factory(k).apply(x)
        except SolverError as err:
            return _finish(steps, scheme, guarantee, space, cfg, x, float("nan"),
                           k - 1, StopReason.SOLVER_ERROR, k, str(err))
        res = space.distance(x, w)
        if not math.isfinite(res):
            return _finish(steps, scheme, guarantee, space, cfg, x, res,
                           k - 1, StopReason.SOLVER_ERROR, k,
                           f"non-finite residual at step {k}")
        done = res <= cfg.tolerance or k >= cfg.max_iterations
        if done or rec.want(k):
            if ref is None:
                steps.append(TraceStep(k, x, res, None, None))
            else:
                dx = space.distance(x, ref)
                steps.append(TraceStep(k, x, res, dx, dx - space.distance(w, ref)))
        if res <= cfg.tolerance:
            return _finish(steps, scheme, guarantee, space, cfg, w, res, k,
                           StopReason.CONVERGED)
        if k >= cfg.max_iterations:
            return _finish(steps, scheme, guarantee, space, cfg, w, res, k,
                           StopReason.BUDGET_EXHAUSTED)
        x = w
        k += 1


def halpern_iterate(
    seq: OperatorSequence,
    anchors: Schedule,
    cfg: RunConfig,
    scheme: str = "halpern",
    guarantee: str = "",
) -> IterationTrace:
    """Run x_{k+1} = a_k u (+) (1 - a_k) T_k x_k; stop on step movement."""
    require_class(anchors, ScheduleClass.HALPERN_ANCHOR, "anchor")
    if cfg.anchor is None:
        raise ConfigError("Halpern iteration needs an anchor point u")
    space = cfg.space
    space.check_point(cfg.start)
    space.check_point(cfg.anchor)
    u = cfg.anchor
    ref = cfg.reference
    if ref is not None:
        space.check_point(ref)
    rec = _Recorder(cfg.trace_stride)
    steps: list[TraceStep] = []
    x = cfg.start
    k = 1
    while True:
        try:
            w = seq.factory(k).apply(x)
        except SolverError as err:
            return _finish(steps, scheme, guarantee, space, cfg, x, float("nan"),
                           k - 1, StopReason.SOLVER_ERROR, k, str(err))
        x_next = space.combine(u, w, 1.0 - anchors(k))
        res = space.distance(x, w)
        move = space.distance(x, x_next)
        if not (math.isfinite(res) and math.isfinite(move)):
            return _finish(steps, scheme, guarantee, space, cfg, x, res,
                           k - 1, StopReason.SOLVER_ERROR, k,
                           f"non-finite residual at step {k}")
        done = move <= cfg.tolerance or k >= cfg.max_iterations
        if done or rec.want(k):
            if ref is None:
                steps.append(TraceStep(k, x, res, None, None))
            else:
                dx = space.distance(x, ref)
                steps.append(TraceStep(k, x, res, dx, dx - space.distance(x_next, ref)))
        if move <= cfg.tolerance:
            return _finish(steps, scheme, guarantee, space, cfg, x_next, res, k,
                           StopReason.CONVERGED)
        if k >= cfg.max_iterations:
            return _finish(steps, scheme, guarantee, space, cfg, x_next, res, k,
                           StopReason.BUDGET_EXHAUSTED)
        x = x_next
        k += 1


def _finish(steps, scheme, guarantee, space, cfg, final, res, iterations, reason,
            error_step=None, error_message=None) -> IterationTrace:
    target = space.distance(final, cfg.reference) if cfg.reference is not None else None
    return IterationTrace(
        steps=steps,
        summary=RunSummary(
            scheme=scheme, guarantee=guarantee, iterations_run=iterations,
            final_residual=res, final_point=final, stop_reason=reason,
            error_step=error_step, error_message=error_message,
            target_distance=target,
        ),
    )


# ---------------------------------------------------------------------------
# named schemes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BuiltScheme:
    name: str
    engine: str  # "sequence" | "halpern"
    sequence: OperatorSequence
    anchor_schedule: Schedule | None
    guarantee: str

    def run(self, cfg: RunConfig) -> IterationTrace:
        if self.engine == "halpern":
            return halpern_iterate(self.sequence, self.anchor_schedule, cfg,
                                   scheme=self.name, guarantee=self.guarantee)
        return iterate_sequence(self.sequence, cfg,
                                scheme=self.name, guarantee=self.guarantee)


_ROLE_CLASSES = {
    "anchor": (ScheduleClass.HALPERN_ANCHOR,
               "anchor weights with limit 0 and divergent sum"),
    "alpha": (ScheduleClass.MANN_PARAM,
              "averaging weights with limsup < 1"),
    "beta": (ScheduleClass.VANISHING_PARAM,
             "inner weights tending to 0"),
    "lambda": (ScheduleClass.RESOLVENT_PARAM,
               "regularization parameters bounded away from 0"),
}

# scheme -> (engine, schedule roles, source kind, convergence guarantee)
_SCHEMES: dict[str, tuple[str, tuple[str, ...], type, str]] = {
    "ishikawa": (
        "sequence", ("alpha", "beta"), OperatorSpec,
        "Delta-convergence of the two-level averaged iteration to a fixed "
        "point of the demiclosed quasi-nonexpansive base map",
    ),
    "halpern_ishikawa": (
        "halpern", ("anchor", "alpha", "beta"), OperatorSpec,
        "strong convergence to the projection of the anchor onto the fixed "
        "set of the base map",
    ),
    "mann": (
        "sequence", ("alpha",), OperatorSpec,
        "Delta-convergence of the averaged iteration to a fixed point of "
        "the demiclosed quasi-nonexpansive base map",
    ),
    "halpern_mann": (
        "halpern", ("anchor", "alpha"), OperatorSpec,
        "strong convergence to the projection of the anchor onto the fixed "
        "set of the base map",
    ),
    "ppa": (
        "sequence", ("lambda",), ObjectiveFunction,
        "convergence of the proximal point algorithm to a resolvent fixed "
        "point (a minimizer when the objective is pseudo-convex)",
    ),
    "halpern_ppa": (
        "halpern", ("anchor", "lambda"), ObjectiveFunction,
        "strong convergence to the projection of the anchor onto the "
        "minimizer set of the convex objective",
    ),
    "ppa_lipschitz": (
        "sequence", ("lambda",), OperatorSpec,
        "Delta-convergence of the resolvent iteration to a fixed point of "
        "the Lipschitz quasi-nonexpansive map",
    ),
    "halpern_ppa_lipschitz": (
        "halpern", ("anchor", "lambda"), OperatorSpec,
        "strong convergence to the projection of the anchor onto the fixed "
        "set of the Lipschitz map",
    ),
    "ppa_equilibrium": (
        "sequence", ("lambda",), Bifunction,
        "Delta-convergence of the resolvent iteration to an equilibrium "
        "point of the pseudo-monotone bifunction",
    ),
    "halpern_ppa_equilibrium": (
        "halpern", ("anchor", "lambda"), Bifunction,
        "strong convergence to the projection of the anchor onto the "
        "equilibrium set",
    ),
}


def scheme_names() -> list[str]:
    return sorted(_SCHEMES)


def build_scheme(
    name: str,
    source: OperatorSpec | ObjectiveFunction | Bifunction,
    schedules: dict[str, Schedule],
) -> BuiltScheme:
    """Wire a named scheme: validates schedule roles and classes against the
    scheme's hypotheses and dispatches to the operator or resolvent family.
    Pure wiring; all mathematics lives in the operator and resolvent modules.
    """
    if name not in _SCHEMES:
        raise ConfigError(f"unknown scheme {name!r}; known: {scheme_names()}")
    engine, roles, source_type, guarantee = _SCHEMES[name]
    if not isinstance(source, source_type):
        raise ConfigError(
            f"scheme {name!r} drives a {source_type.__name__}, "
            f"got {type(source).__name__}"
        )
    for role in roles:
        cls, hypothesis = _ROLE_CLASSES[role]
        if role not in schedules:
            raise ConfigError(f"scheme {name!r} needs schedule {role!r} ({hypothesis})")
        require_class(schedules[role], cls, role)
    extra = set(schedules) - set(roles)
    if extra:
        raise ConfigError(f"scheme {name!r} does not use schedules {sorted(extra)}")

    if name in ("ishikawa", "halpern_ishikawa"):
        seq = ishikawa_sequence(source, schedules["alpha"], schedules["beta"])
    elif name in ("mann", "halpern_mann"):
        seq = mann_sequence(source, schedules["alpha"])
    else:
        seq = resolvent_sequence(source, schedules["lambda"])

    return BuiltScheme(
        name=name, engine=engine, sequence=seq,
        anchor_schedule=schedules.get("anchor"), guarantee=guarantee,
    )
