"""Run configuration files (``run.toml``).

::

    seed = 42
    pricing_file = "pricing.toml"

    [generator]
    scale_factor_gb = 0.01

    [cluster]
    nodes = 5
    replication_factor = 3
    consistency = "eventual"
    staleness_window_ms = 500

    [scenario]
    clock_mode = "virtual"
    repetitions = 300

    [output]
    report_dir = "reports"

Relative paths are resolved against the file's directory. Values given on
the command line override the file.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .backend.meter import CostModel
from .backend.models import ClusterConfig
from .exceptions import ConfigurationException
from .generator.models import GeneratorConfig
from .logging_config import get_logger
from .metadata.pipeline import PipelineConfig
from .metrics.models import PricingModel
from .scenarios.models import ScenarioConfig

logger = get_logger(__name__)


class RunConfigException(ConfigurationException):
    """The run configuration cannot be read or is invalid."""

    def __init__(self, message: str, path: Optional[str] = None):
        if path:
            message = f"{message} (config: {path})"
        super().__init__(message, path=path)


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    report_dir: Path = Path("reports")
    corpus_dir: Optional[Path] = None
    cluster_dir: Optional[Path] = None
    metadata_dir: Optional[Path] = None


class RunConfigFile(BaseModel):
    """Parsed ``run.toml``."""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=42, ge=0)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    cluster: ClusterConfig = Field(default_factory=ClusterConfig)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)
    cost_model: CostModel = Field(default_factory=CostModel)
    scenario: Dict[str, Any] = Field(default_factory=dict, description="ScenarioConfig knobs")
    pricing: Optional[PricingModel] = None
    pricing_file: Optional[Path] = None
    output: OutputConfig = Field(default_factory=OutputConfig)
    source: Optional[Path] = Field(default=None, exclude=True)

    def _resolve(self, path: Optional[Path]) -> Optional[Path]:
        if path is None or path.is_absolute() or self.source is None:
            return path
        return self.source.parent / path

    def with_overrides(self, seed: Optional[int] = None, **sections: Dict[str, Any]) -> "RunConfigFile":
        """Copy with the seed and section values replaced (for command-line flags)."""
        data = self.model_dump(exclude={"source"}, exclude_unset=True)
        if seed is not None:
            data["seed"] = seed
        for section, values in sections.items():
            data[section] = {**(data.get(section) or {}), **{k: v for k, v in values.items() if v is not None}}
        try:
            updated = RunConfigFile.model_validate(data)
        except ValidationError as e:
            raise RunConfigException(_first_error(e), path=str(self.source) if self.source else None) from e
        updated.source = self.source
        return updated

    def pricing_model(self) -> Optional[PricingModel]:
        """Inline pricing, else the referenced pricing file, else None."""
        if self.pricing is not None:
            return self.pricing
        path = self._resolve(self.pricing_file)
        if path is None:
            return None
        return PricingModel.from_toml(path)

    def report_dir(self) -> Path:
        return self._resolve(self.output.report_dir)

    def output_path(self, name: str) -> Optional[Path]:
        return self._resolve(getattr(self.output, name))

    def scenario_config(self, scenario_id: int = 1, **overrides: Any) -> ScenarioConfig:
        cluster = self.cluster
        if "seed" not in cluster.model_fields_set:
            cluster = cluster.model_copy(update={"seed": self.seed})
        values = {**self.scenario, **{k: v for k, v in overrides.items() if v is not None}}
        try:
            return ScenarioConfig(
                scenario_id=scenario_id,
                seed=self.seed,
                generator=self.generator,
                cluster=cluster,
                pipeline=self.pipeline,
                cost_model=self.cost_model,
                **values,
            )
        except (ValidationError, TypeError) as e:
            message = _first_error(e) if isinstance(e, ValidationError) else str(e)
            raise RunConfigException(f"[scenario] {message}", path=str(self.source) if self.source else None) from e


def _first_error(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfigFile:
    """Parse ``path``; no path gives the defaults."""
    if path is None:
        return RunConfigFile()
    path = Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except OSError as e:
        raise RunConfigException(f"cannot read run config: {e.strerror or e}", path=str(path)) from e
    except tomllib.TOMLDecodeError as e:
        raise RunConfigException(f"malformed TOML: {e}", path=str(path)) from e
    try:
        config = RunConfigFile.model_validate(data)
    except ValidationError as e:
        raise RunConfigException(_first_error(e), path=str(path)) from e
    config.source = path
    pricing_path = config._resolve(config.pricing_file)
    if pricing_path is not None and not pricing_path.is_file():
        raise RunConfigException(f"pricing file {pricing_path} does not exist", path=str(path))
    logger.debug("Loaded run config %s", path)
    return config
