import pytest

from hadamard_iter import (
    ConfigError,
    Schedule,
    ScheduleClass,
    halpern_schedule,
    mann_constant,
    resolvent_constant,
    resolvent_schedule,
    vanishing_schedule,
)


def test_halpern_default_is_one_over_k_plus_one():
    s = halpern_schedule()
    assert s(1) == 0.5
    assert s(9) == 0.1


def test_halpern_rejects_summable_weights():
    with pytest.raises(ConfigError):
        halpern_schedule(power=2.0)  # finite sum
    with pytest.raises(ConfigError):
        halpern_schedule(power=0.0)


def test_mann_constant_range():
    assert mann_constant(0.5)(123) == 0.5
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(ConfigError):
            mann_constant(bad)


def test_mann_class_requires_bound_below_one():
    # limsup = 1: a schedule increasing toward 1 cannot be certified
    with pytest.raises(ConfigError):
        Schedule(lambda k: 1.0 - 1.0 / k, ScheduleClass.MANN_PARAM, upper_bound=1.0)
    with pytest.raises(ConfigError):
        Schedule(lambda k: 1.0 - 1.0 / k, ScheduleClass.MANN_PARAM)


def test_vanishing_inverse_k_starts_at_one():
    s = vanishing_schedule()
    assert s(1) == 1.0 and s(4) == 0.25


def test_resolvent_constant():
    s = resolvent_constant(0.01)
    assert s.lower_bound == s.upper_bound == 0.01
    with pytest.raises(ConfigError):
        resolvent_constant(0.0)


def test_resolvent_schedule_needs_positive_floor():
    with pytest.raises(ConfigError):
        resolvent_schedule(lambda k: 1.0 / k, lower=0.0)
    s = resolvent_schedule(lambda k: 1.0 + 1.0 / k, lower=1.0, upper=2.0)
    assert s(2) == 1.5


def test_spot_check_catches_range_violation():
    with pytest.raises(ConfigError):
        Schedule(lambda k: 1.5, ScheduleClass.HALPERN_ANCHOR)
    with pytest.raises(ConfigError):
        # dips below the certified floor by k = 1000
        Schedule(lambda k: 2.0 / k, ScheduleClass.RESOLVENT_PARAM, lower_bound=0.5)
