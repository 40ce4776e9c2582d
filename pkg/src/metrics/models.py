"""Metric values, pricing and the property table."""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .exceptions import PricingConfigException

GIB = 2 ** 30
HOURS_PER_MONTH = 730.0
RESPONSE_TIME_BOUND_S = 0.2


class MetricValue(BaseModel):
    """A ratio; ``vacuous`` marks the 0/0 case reported as 1.0."""

    model_config = ConfigDict(frozen=True)

    value: float
    vacuous: bool = False
    numerator: int = 0
    denominator: int = 0


class PricingModel(BaseModel):
    """Rates of one provider; every rate is in USD."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    provider_name: str = "unspecified"
    per_node_hour_usd: float = Field(default=0.0, ge=0.0)
    per_gb_month_storage_usd: float = Field(default=0.0, ge=0.0)
    per_gb_egress_usd: float = Field(default=0.0, ge=0.0)
    fixed_platform_usd: float = Field(default=0.0, ge=0.0)

    def scaled(self, factor: float) -> "PricingModel":
        """Every rate multiplied by ``factor``."""
        return self.model_copy(update={
            "per_node_hour_usd": self.per_node_hour_usd * factor,
            "per_gb_month_storage_usd": self.per_gb_month_storage_usd * factor,
            "per_gb_egress_usd": self.per_gb_egress_usd * factor,
            "fixed_platform_usd": self.fixed_platform_usd * factor,
        })

    @classmethod
    def from_toml(cls, path: Union[str, Path]) -> "PricingModel":
        """Read a pricing file; rates may sit at the top level or under ``[pricing]``."""
        path = Path(path)
        try:
            with path.open("rb") as handle:
                data = tomllib.load(handle)
        except (OSError, tomllib.TOMLDecodeError) as e:
            raise PricingConfigException(f"cannot read pricing file: {e}", path=str(path)) from e
        try:
            return cls.model_validate(data.get("pricing", data))
        except ValidationError as e:
            raise PricingConfigException(f"invalid pricing: {e.errors()[0]['msg']}", path=str(path)) from e


class LatencySummary(BaseModel):
    count: int = 0
    mean_s: float = 0.0
    p50_s: float = 0.0
    p95_s: float = 0.0
    p99_s: float = 0.0
    max_s: float = 0.0
    within_bound_share: Optional[float] = Field(
        default=None, description=f"Share of operations finishing within {RESPONSE_TIME_BOUND_S}s"
    )


class MetricSet(BaseModel):
    """Every metric that applies to one report."""

    scenario_id: int
    throughput: float = Field(..., description="Total scenario time in seconds")
    completion_time_seconds: float
    price_usd: Optional[float] = None
    price_performance: Optional[float] = None
    throughput_increase_ratio: Optional[float] = None
    durability_ratio: Optional[MetricValue] = None
    consistency_ratio: Optional[MetricValue] = None
    concurrency_ratio: Optional[MetricValue] = None
    latency: LatencySummary = Field(default_factory=LatencySummary)


class PropertyStatus(str, Enum):
    OK = "ok"
    INSUFFICIENT = "insufficient data"


class PropertyDefinition(NamedTuple):
    """What a cloud property is measured on and how."""

    name: str
    display_name: str
    metric: str
    unit: str
    scenarios: Tuple[int, ...]
    query_kinds: Tuple[str, ...]
    measurement: str


class PropertyRow(BaseModel):
    """One line of the property table."""

    property: str
    display_name: str
    metric: str
    value: Optional[float] = None
    unit: str = ""
    status: PropertyStatus = PropertyStatus.OK
    evidence: List[str] = Field(default_factory=list)
    missing: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

    @property
    def sufficient(self) -> bool:
        return self.status is PropertyStatus.OK
