"""Exceptions raised while computing metrics and pricing."""

from typing import Optional

from ..exceptions import ConfigurationException, PreconditionException, UsageException


class ReportStateException(PreconditionException):
    """A report is not in a state metrics can be computed from."""

    error_class = "report-state"

    def __init__(self, message: str, scenario_id: Optional[int] = None):
        super().__init__(message, scenario_id=scenario_id)
        self.scenario_id = scenario_id


class MetricDomainException(PreconditionException):
    """A metric's formula is undefined for the given inputs (division by zero)."""

    error_class = "metric-domain"

    def __init__(self, metric: str, reason: str):
        super().__init__(f"{metric} is undefined: {reason}", metric=metric)
        self.metric = metric


class MetricNotApplicableException(UsageException):
    """The metric does not apply to the report's scenario."""

    error_class = "metric-not-applicable"

    def __init__(self, metric: str, scenario_id: int, expected: str):
        super().__init__(
            f"{metric} needs a scenario {expected} report, got scenario {scenario_id}",
            metric=metric,
            scenario_id=scenario_id,
        )
        self.metric = metric
        self.scenario_id = scenario_id


class PricingConfigException(ConfigurationException):
    """A pricing file cannot be read or validated."""

    def __init__(self, message: str, path: Optional[str] = None):
        if path:
            message = f"{message} (path: {path})"
        super().__init__(message, path=path)
        self.path = path
