"""Exceptions raised by the scenario runner."""

from typing import Optional

from ..exceptions import ConfigurationException, InternalException, PreconditionException


class ScenarioPreconditionException(PreconditionException):
    """The backend or corpus is not in the state a scenario starts from."""

    def __init__(self, scenario_id: int, message: str):
        super().__init__(f"scenario {scenario_id}: {message}", scenario_id=scenario_id)
        self.scenario_id = scenario_id


class ScenarioAbortedException(InternalException):
    """A worker failed with an unexpected error; the partial trace is attached."""

    error_class = "scenario-aborted"

    def __init__(self, worker: str, message: str, records: Optional[list] = None):
        super().__init__(f"worker {worker} aborted: {message}", worker=worker)
        self.worker = worker
        self.records = records or []


class ClockConfigException(ConfigurationException):
    """A clock cannot run with the requested pacing."""

    def __init__(self, speedup: float):
        super().__init__(f"speedup must be at least 1, got {speedup}", speedup=speedup)
        self.speedup = speedup
