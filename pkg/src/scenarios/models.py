"""Scenario configuration, per-operation records and reports."""

import datetime as dt
import hashlib
import json
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..backend.meter import CostModel
from ..backend.models import ClusterConfig
from ..generator.models import DEFAULT_EVENT_DATES, GeneratorConfig
from ..metadata.pipeline import PipelineConfig

REPORT_SCHEMA_VERSION = 1
SCENARIO_IDS = tuple(range(1, 8))


class ClockMode(str, Enum):
    REALTIME = "realtime"
    VIRTUAL = "virtual"


class ScenarioConfig(BaseModel):
    """Everything one scenario run needs: data, cluster, clock and workload knobs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario_id: int = Field(default=1, ge=1, le=7)
    seed: int = Field(default=42, ge=0)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    corpus_multiplier: int = Field(default=2, ge=1, description="Corpus size over the initially loaded size")
    cluster: ClusterConfig = Field(default_factory=ClusterConfig)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)
    cost_model: CostModel = Field(default_factory=CostModel)
    clock_mode: ClockMode = ClockMode.VIRTUAL
    speedup: Optional[float] = Field(default=None, ge=1.0, description="Virtual clock pacing; None runs unpaced")

    # scenario 1
    durability_dates: Tuple[dt.date, dt.date] = DEFAULT_EVENT_DATES
    birth_year_offset: int = Field(default=40, ge=0, description="Q14 year is the first date's year minus this")

    # scenario 2
    read_rate: float = Field(default=100.0, gt=0.0, description="Reads per second")
    update_interval_s: float = Field(default=5.0, gt=0.0)
    consistency_duration_s: float = Field(default=120.0, gt=0.0)
    target_article: Optional[str] = None

    # scenario 3
    removal_orders_checked: int = Field(default=120, ge=1, description="Orders enumerated for the oracle bounds")

    # scenario 4
    repetitions: int = Field(default=300, ge=1)
    query_workers: int = Field(default=10, ge=1)
    mutation_workers: int = Field(default=5, ge=1)
    mutation_rate: float = Field(default=10.0, gt=0.0, description="Per stream, operations per second")
    mutation_duration_s: float = Field(default=1.0, gt=0.0, description="Mutation window per repetition")
    point_reads_per_set: int = Field(default=5, ge=0)

    # scenario 5
    analytic_executions: int = Field(default=100, ge=0)

    # scenario 7
    delta_fraction: Optional[float] = Field(default=None, ge=0.0, le=1.0, description="Defaults to the loaded fraction")

    @property
    def initial_fraction(self) -> float:
        return 1.0 / self.corpus_multiplier

    def with_scenario(self, scenario_id: int) -> "ScenarioConfig":
        return self.model_copy(update={"scenario_id": scenario_id})


class OperationRecord(BaseModel):
    """One executed operation as seen by the worker that issued it."""

    model_config = ConfigDict(frozen=True)

    worker: str
    sequence: int
    kind: str = Field(..., description="read, update, insert, delete, query:<kind>, load, index, kill, ...")
    key: Optional[str] = None
    start: float
    end: float
    outcome: str = "ok"
    success: bool = True
    version: Optional[int] = None
    served_sequence: Optional[int] = Field(default=None, description="Commit sequence read or written")
    committed_at: Optional[float] = None
    bytes: int = 0
    repetition: int = 0
    rows: Optional[int] = None
    flags: Tuple[str, ...] = Field(default=(), description="regression, stale, expected-not-found")

    @property
    def latency(self) -> float:
        return self.end - self.start

    @property
    def is_read(self) -> bool:
        return self.kind == "read"

    @property
    def is_write(self) -> bool:
        return self.kind in ("update", "insert", "delete", "write")


class ScenarioCounters(BaseModel):
    total_reads: int = 0
    correct_reads: int = 0
    consistent_reads: int = 0
    regressions: int = 0
    stale_reads: int = 0
    total_ops: int = 0
    successful_ops: int = 0
    unreachable_keys: int = 0


class ResourceUsage(BaseModel):
    """Inputs of the pricing model."""

    node_count: int = 0
    stored_bytes: int = 0
    egress_bytes: int = 0


class ScenarioReport(BaseModel):
    """Sealed outcome of one scenario run."""

    schema_version: int = REPORT_SCHEMA_VERSION
    scenario_id: int
    clock_mode: ClockMode
    speedup: Optional[float] = None
    started_at: float = 0.0
    ended_at: float = 0.0
    wall_seconds: float = Field(default=0.0, description="Measured host time; not part of the fingerprint")
    counters: ScenarioCounters = Field(default_factory=ScenarioCounters)
    resources: ResourceUsage = Field(default_factory=ResourceUsage)
    records: List[OperationRecord] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)
    config: Dict[str, Any] = Field(default_factory=dict)
    sealed: bool = False
    valid: bool = True
    abort_reason: Optional[str] = None

    @property
    def duration(self) -> float:
        return self.ended_at - self.started_at

    def records_of(self, kind: str) -> List[OperationRecord]:
        return [r for r in self.records if r.kind == kind]

    def fingerprint(self) -> str:
        """SHA-256 of the report without host-dependent fields."""
        payload = self.model_dump(mode="json", exclude={"wall_seconds"})
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioReport":
        return cls.model_validate_json(text)
