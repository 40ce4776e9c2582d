"""Benchmark scenarios 1-7, their execution model and trace checks."""

from .checks import audit_report, count_operations, replay_concurrency, replay_consistency
from .clock import RealClock, VirtualClock, virtual_clock
from .context import BenchmarkContext, prepare_context
from .exceptions import ClockConfigException, ScenarioAbortedException, ScenarioPreconditionException
from .executor import Observation, PlannedOperation, RealtimeExecutor, VirtualExecutor, Worker
from .models import ClockMode, OperationRecord, ScenarioConfig, ScenarioCounters, ScenarioReport
from .runner import (
    run_all,
    run_scenario,
    run_scenario_1,
    run_scenario_2,
    run_scenario_3,
    run_scenario_4,
    run_scenario_5,
    run_scenario_6,
    run_scenario_7,
)

__all__ = [
    "BenchmarkContext",
    "ClockConfigException",
    "ClockMode",
    "Observation",
    "OperationRecord",
    "PlannedOperation",
    "RealClock",
    "RealtimeExecutor",
    "ScenarioAbortedException",
    "ScenarioConfig",
    "ScenarioCounters",
    "ScenarioPreconditionException",
    "ScenarioReport",
    "VirtualClock",
    "VirtualExecutor",
    "Worker",
    "audit_report",
    "count_operations",
    "prepare_context",
    "replay_concurrency",
    "replay_consistency",
    "run_all",
    "run_scenario",
    "run_scenario_1",
    "run_scenario_2",
    "run_scenario_3",
    "run_scenario_4",
    "run_scenario_5",
    "run_scenario_6",
    "run_scenario_7",
    "virtual_clock",
]
