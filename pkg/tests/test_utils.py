import logging
import os
import random
import time

import pytest

from pointer_shift.errors import ConvergenceError
from pointer_shift.utils.context_manager import get_context_snapshot, scenario_name_var, set_context
from pointer_shift.utils.convergence import check_truncation_convergence
from pointer_shift.utils.event_logger import ScanEventLogger
from pointer_shift.utils.executor import ordered_map
from pointer_shift.utils.settings import THREADS_ENV, get_thread_limit


@pytest.mark.parametrize("raw, expected", [("3", 3), ("1", 1)])
def test_thread_limit_from_env(monkeypatch, raw, expected):
    monkeypatch.setenv(THREADS_ENV, raw)
    assert get_thread_limit() == expected


@pytest.mark.parametrize("raw", ["zero", "0", "-2"])
def test_thread_limit_ignores_bad_values(monkeypatch, raw):
    monkeypatch.setenv(THREADS_ENV, raw)
    assert get_thread_limit() == min(8, os.cpu_count() or 1)


def test_ordered_map_keeps_input_order(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "4")

    def slow_square(x: int) -> int:
        time.sleep(random.uniform(0, 0.01))
        return x * x

    assert ordered_map(slow_square, range(20), name="test") == [x * x for x in range(20)]


def test_ordered_map_propagates_context(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    set_context(scenario_name="ctx-test", displacement_perturbation=1e-4)
    seen = ordered_map(lambda _: get_context_snapshot(), range(6), name="ctx")
    assert all(s["scenario_name"] == "ctx-test" for s in seen)
    assert all(s["displacement_perturbation"] == 1e-4 for s in seen)


def test_ordered_map_worker_changes_do_not_leak(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "2")

    def rename(x: int) -> int:
        scenario_name_var.set(f"worker-{x}")
        return x

    ordered_map(rename, range(4), name="leak")
    assert scenario_name_var.get() is None


def test_convergence_passes_for_stable_quantity():
    values, drift = check_truncation_convergence(lambda dim: [1.0, 2.0], 64, name="stable")
    assert list(values) == [1.0, 2.0]
    assert drift == 0.0


def test_convergence_failure_raises():
    with pytest.raises(ConvergenceError):
        check_truncation_convergence(lambda dim: [1.0 / dim], 10, name="drifting")


def test_convergence_ignores_nan_entries():
    _, drift = check_truncation_convergence(lambda dim: [float("nan"), 3.0], 8, name="nan")
    assert drift == 0.0


def test_event_logger_summary(caplog):
    events = ScanEventLogger()
    events.on_event("point_started", gamma=1.0, theta=0.2)
    events.on_event("point_completed", gamma=1.0, theta=0.2)
    events.on_event("mystery", gamma=1.0)
    with caplog.at_level(logging.WARNING):
        events.on_event("point_failed", gamma=0.0, theta=float("nan"), error="VanishingPostselectionError")
    assert events.summary() == {"completed": 1, "failed": 1}
    assert events.failures[0]["error"] == "VanishingPostselectionError"
    assert "theta=nan" in caplog.text


def test_event_logger_counts_under_threads(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "8")
    events = ScanEventLogger()

    def report(k: int) -> int:
        events.on_event("point_completed", gamma=1.0, theta=k * 1e-3)
        if k % 10 == 0:
            events.on_event("point_failed", gamma=1.0, theta=k * 1e-3, error="TruncationError")
        return k

    ordered_map(report, range(2000), name="events")
    assert events.summary() == {"completed": 2000, "failed": 200}
