"""Command-line interface for the PRIMEBALL harness.

Run as ``python -m src.cli``. Failures print one ``error=<class> message=<text>``
line on stderr and exit with 2 (usage), 3 (config), 4 (precondition) or
5 (internal).
"""

import json
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Sequence

import click
import pandas as pd
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

from .backend.cluster import SimulatedCluster
from .backend.persistence import CLUSTER_FILE
from .config import get_settings
from .exceptions import InternalException, PrimeballException, UsageException
from .generator.corpus_generator import generate_corpus
from .generator.corpus_store import open_corpus, write_corpus
from .generator.slicing import take_slice
from .logging_config import configure_logging, get_logger
from .metadata.pipeline import MetadataPipeline, install, load_metadata, persist_metadata
from .metrics.export import ExportFormat, export_table, load_reports, metric_sets, write_report
from .metrics.models import PricingModel
from .metrics.properties import property_report
from .queries.engine import QueryEngine
from .queries.models import QueryKind, QuerySpec
from .run_config import RunConfigFile, load_run_config
from .scenarios.exceptions import ScenarioAbortedException, ScenarioPreconditionException
from .scenarios.models import SCENARIO_IDS, ScenarioReport
from .scenarios.runner import run_all, run_scenario
from .verification import require_passing, verify_corpus, verify_reports

logger = get_logger(__name__)

console = Console()

METADATA_DIR = "metadata"
DATE = click.DateTime(formats=["%Y-%m-%d"])


class PrimeballGroup(click.Group):
    """Maps harness exceptions to the documented exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (click.exceptions.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except PrimeballException as e:
            logger.debug("Command failed", exc_info=True)
            click.echo(e.to_line(), err=True)
            ctx.exit(e.exit_code)
        except Exception as e:
            logger.exception("Unhandled failure")
            error = InternalException(f"{type(e).__name__}: {e}")
            click.echo(error.to_line(), err=True)
            ctx.exit(error.exit_code)


def _run_config(ctx: click.Context, config_path: Optional[Path] = None) -> RunConfigFile:
    if config_path is not None:
        return load_run_config(config_path)
    return ctx.obj["run_config"]


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    )


def _format_bytes(size: int) -> str:
    for unit in ("B", "KB", "MB", "GB"):
        if size < 1024 or unit == "GB":
            return f"{size:.0f} {unit}" if unit == "B" else f"{size:.2f} {unit}"
        size /= 1024
    return f"{size} B"


def _validated(model, **values):
    try:
        return model(**{k: v for k, v in values.items() if v is not None})
    except ValidationError as e:
        first = e.errors()[0]
        raise UsageException(f"{'.'.join(str(p) for p in first['loc'])}: {first['msg']}") from e


@click.group(cls=PrimeballGroup)
@click.option("--debug", is_flag=True, help="Enable debug logging on the console")
@click.option(
    "--config", "config_path", type=click.Path(dir_okay=False, path_type=Path),
    help="Run configuration (TOML)",
)
@click.pass_context
def cli(ctx: click.Context, debug: bool, config_path: Optional[Path]):
    """PRIMEBALL benchmark harness: corpus generation, simulated cluster, scenarios and metrics."""
    configure_logging(console_level="DEBUG" if debug else None)
    ctx.ensure_object(dict)
    ctx.obj["debug"] = debug
    ctx.obj["run_config"] = load_run_config(config_path)


# -- generate ---------------------------------------------------------------------------


@cli.command()
@click.option("--seed", type=int, help="Generator seed (overrides the config)")
@click.option("--sf", "scale_factor", type=float, help="Scale factor in GB")
@click.option("--articles-per-day", type=float, help="Publication rate on an ordinary day (default 0.1)")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), help="Corpus directory")
@click.pass_context
def generate(ctx, seed: Optional[int], scale_factor: Optional[float], articles_per_day: Optional[float],
             out_dir: Optional[Path]):
    """Generate a deterministic synthetic corpus."""
    config = _run_config(ctx).with_overrides(
        seed=seed, generator={"scale_factor_gb": scale_factor, "articles_per_day": articles_per_day}
    )
    out_dir = out_dir or config.output_path("corpus_dir") or get_settings().data_dir / "corpus"
    generator_config = config.generator.model_copy(update={"seed": config.seed})

    with console.status("[bold yellow]Generating corpus..."):
        corpus = generate_corpus(generator_config)
        write_corpus(corpus, out_dir)

    manifest = corpus.manifest
    table = Table(title="Corpus")
    table.add_column("Field", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("Seed", str(generator_config.seed))
    table.add_row("Scale factor", f"{generator_config.scale_factor_gb:g} GB")
    table.add_row("Articles", str(manifest.article_count))
    table.add_row("Size", _format_bytes(manifest.total_bytes))
    table.add_row("Slices", str(len(manifest.slice_boundaries)))
    table.add_row("Manifest digest", manifest.digest())
    console.print(table)
    console.print(f"[green]Corpus written to {out_dir}[/green]")


# -- init / index -----------------------------------------------------------------------


@cli.command()
@click.option("--data-dir", type=click.Path(file_okay=False, path_type=Path), help="Corpus directory")
@click.option("--cluster-dir", type=click.Path(file_okay=False, path_type=Path), help="Where to save the cluster")
@click.option("--fraction", type=click.FloatRange(0.0, 1.0, min_open=True), default=1.0, show_default=True,
              help="Share of the corpus to load")
@click.option("--nodes", type=int, help="Cluster size")
@click.option("--replication", type=int, help="Replication factor")
@click.option("--consistency", type=click.Choice(["strong", "eventual"]), help="Consistency mode")
@click.option("--staleness-ms", type=float, help="Eventual-mode staleness window")
@click.option("--seed", type=int, help="Cluster seed")
@click.pass_context
def init(ctx, data_dir, cluster_dir, fraction, nodes, replication, consistency, staleness_ms, seed):
    """Initialize an empty cluster: bulk-load the corpus and build the metadata."""
    config = _run_config(ctx).with_overrides(
        seed=seed,
        cluster={"nodes": nodes, "replication_factor": replication, "consistency": consistency,
                 "staleness_window_ms": staleness_ms},
    )
    data_dir = data_dir or config.output_path("corpus_dir") or get_settings().data_dir / "corpus"
    cluster_dir = cluster_dir or config.output_path("cluster_dir") or get_settings().data_dir / "cluster"
    if (cluster_dir / CLUSTER_FILE).exists():
        raise ScenarioPreconditionException(6, f"{cluster_dir} already holds a cluster; initialization needs empty storage")

    corpus = open_corpus(data_dir)
    cluster = SimulatedCluster(config.scenario_config(6).cluster)
    with _progress() as progress:
        task = progress.add_task("Loading corpus", total=3)
        load = cluster.bulk_load(take_slice(corpus, 0.0, fraction))
        progress.update(task, advance=1, description="Building metadata")
        store = MetadataPipeline(config.pipeline).build(cluster)
        install(cluster, store)
        progress.update(task, advance=1, description="Saving cluster")
        cluster.save(cluster_dir)
        persist_metadata(store, cluster_dir / METADATA_DIR)
        progress.update(task, advance=1)

    console.print(Panel(
        f"Articles: {load.articles} | Entities: {load.entities} | Size: {_format_bytes(load.bytes)}\n"
        f"Documents indexed: {store.document_count} | Nodes: {cluster.config.nodes} "
        f"(R={cluster.config.replication_factor}, {cluster.config.consistency.value})",
        title="Initialized",
        border_style="green",
    ))


@cli.command()
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True,
              help="Saved cluster directory")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path),
              help="Metadata directory (default: <data-dir>/metadata)")
@click.option("--seed", type=int, help="Topic model seed (overrides [pipeline] seed)")
@click.pass_context
def index(ctx, data_dir: Path, out_dir: Optional[Path], seed: Optional[int]):
    """Run the metadata pipeline over a saved cluster and persist the records."""
    config = _run_config(ctx).with_overrides(pipeline={"seed": seed})
    cluster = SimulatedCluster.open(data_dir)
    with console.status("[bold yellow]Extracting metadata..."):
        store = MetadataPipeline(config.pipeline).build(cluster)
        paths = persist_metadata(store, out_dir or data_dir / METADATA_DIR)
    console.print(f"[green]{len(paths)} metadata records written[/green] (digest {store.digest()[:16]})")


# -- query ------------------------------------------------------------------------------


@cli.command()
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True,
              help="Saved cluster directory")
@click.option("--kind", type=click.Choice([k.value for k in QueryKind]), required=True, help="Query kind")
@click.option("--date", "on_date", type=DATE, help="D for Q4, Q7")
@click.option("--from", "date_from", type=DATE, help="Interval start")
@click.option("--to", "date_to", type=DATE, help="Interval end")
@click.option("--interval-days", type=int, help="Q8 look-back in days")
@click.option("--journalist", "journalist_id", help="Journalist id (Q3)")
@click.option("--topic", "topic_id", help="Topic id (Q8)")
@click.option("--month", type=int, help="Month (Q5)")
@click.option("--year", type=int, help="Year (Q5, Q14)")
@click.option("--year1", type=int, help="First year (Q6)")
@click.option("--year2", type=int, help="Second year (Q6)")
@click.option("--day-of-year", type=int, help="Day of year (Q6)")
@click.option("--min-journalists", type=int, help="X in Q10")
@click.option("--min-common-topics", type=int, help="Y in Q10")
@click.option("--author", "author_id", help="Author id (Q12)")
@click.option("--country", "country_id", help="Country id (Q12)")
@click.option("--term", help="Search term (Q12, FT)")
@click.option("--document", "document_id", help="Document id (Q13)")
@click.option("--limit", type=click.IntRange(min=0), default=20, show_default=True, help="Top-k; 0 returns every row")
@click.option("--today", type=DATE, help="Current date for Q8 and A3 (default: newest publish date)")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def query(data_dir: Path, kind: str, today: Optional[datetime], fmt: str, limit: int, **parameters):
    """Execute one query against a saved cluster."""
    for name in ("on_date", "date_from", "date_to"):
        if parameters[name] is not None:
            parameters[name] = parameters[name].date()
    spec = _validated(QuerySpec, kind=kind, **parameters).model_copy(update={"limit": limit or None})

    cluster = SimulatedCluster.open(data_dir)
    metadata_dir = data_dir / METADATA_DIR
    if metadata_dir.is_dir():
        install(cluster, load_metadata(metadata_dir))
    result = QueryEngine(cluster, current_date=today.date() if today else None).execute(spec)
    logger.info("%s matched %d rows", kind, result.total_matched)

    if fmt == "csv":
        click.echo(pd.DataFrame(result.rows).to_csv(index=False), nl=False)
    else:
        click.echo(json.dumps(result.model_dump(mode="json"), indent=2))


# -- run --------------------------------------------------------------------------------


def _scenario_ids(value: str) -> List[int]:
    return list(SCENARIO_IDS) if value == "all" else [int(value)]


def _report_table(reports: Sequence[ScenarioReport]) -> Table:
    table = Table(title="Scenario reports")
    table.add_column("Scenario", style="cyan")
    table.add_column("Valid")
    table.add_column("Throughput (s)", justify="right")
    table.add_column("Operations", justify="right")
    table.add_column("Successful", justify="right")
    table.add_column("Fingerprint", style="dim")
    for report in reports:
        valid = "[green]yes[/green]" if report.valid else "[red]no[/red]"
        table.add_row(
            str(report.scenario_id), valid, f"{report.duration:.3f}", str(report.counters.total_ops),
            str(report.counters.successful_ops), report.fingerprint()[:12],
        )
    return table


@cli.command()
@click.option("--scenario", type=click.Choice([str(i) for i in SCENARIO_IDS] + ["all"]), required=True,
              help="Scenario to run")
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), help="Run configuration")
@click.option("--out", "out_path", type=click.Path(path_type=Path),
              help="Report file (one scenario) or directory (all)")
@click.option("--seed", type=int, help="Seed for corpus, cluster and workloads")
@click.option("--clock", "clock_mode", type=click.Choice(["virtual", "realtime"]), help="Clock mode")
@click.option("--speedup", type=float, help="Virtual clock pacing factor")
@click.option("--sf", "scale_factor", type=float, help="Scale factor in GB")
@click.option("--nodes", type=int, help="Cluster size")
@click.option("--replication", type=int, help="Replication factor")
@click.option("--consistency", type=click.Choice(["strong", "eventual"]), help="Consistency mode")
@click.option("--staleness-ms", type=float, help="Eventual-mode staleness window")
@click.option("--repetitions", type=int, help="Scenario 4 repetitions")
@click.pass_context
def run(ctx, scenario, config_path, out_path, seed, clock_mode, speedup, scale_factor, nodes, replication,
        consistency, staleness_ms, repetitions):
    """Run one scenario (or all seven) and write the sealed reports."""
    config = _run_config(ctx, config_path).with_overrides(
        seed=seed,
        generator={"scale_factor_gb": scale_factor},
        cluster={"nodes": nodes, "replication_factor": replication, "consistency": consistency,
                 "staleness_window_ms": staleness_ms},
    )
    ids = _scenario_ids(scenario)
    scenario_config = config.scenario_config(
        ids[0], clock_mode=clock_mode, speedup=speedup, repetitions=repetitions
    )

    with _progress() as progress:
        task = progress.add_task("Preparing", total=None)

        def on_progress(step: int, total: int, message: str) -> None:
            progress.update(task, completed=step, total=total, description=message)

        if len(ids) == 1:
            reports = [run_scenario(scenario_config, on_progress=on_progress)]
        else:
            reports = run_all(scenario_config, ids, on_progress=on_progress)

    if len(ids) == 1 and out_path is not None and out_path.suffix == ".json":
        targets = [out_path]
    else:
        directory = out_path or config.report_dir()
        targets = [directory / f"scenario-{r.scenario_id}.json" for r in reports]
    for report, target in zip(reports, targets):
        write_report(report, target)
        logger.info("Report for scenario %d written to %s", report.scenario_id, target)

    console.print(_report_table(reports))
    console.print(f"[green]Reports written to {targets[0].parent}[/green]")
    invalid = [r for r in reports if not r.valid]
    if invalid:
        raise ScenarioAbortedException("runner", invalid[0].abort_reason or "report flagged invalid")


# -- report / verify --------------------------------------------------------------------


@cli.command()
@click.option("--in", "inputs", type=click.Path(exists=True, path_type=Path), multiple=True, required=True,
              help="Report file or directory (repeatable)")
@click.option("--pricing", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Pricing TOML")
@click.option("--baseline", type=click.Path(exists=True, path_type=Path), multiple=True,
              help="Baseline reports for the scaling properties (repeatable)")
@click.option("--format", "fmt", type=click.Choice([f.value for f in ExportFormat]), default="json",
              show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), help="Write here, not stdout")
@click.pass_context
def report(ctx, inputs, pricing, baseline, fmt, out_path):
    """Emit the generic cloud property table for a set of reports."""
    reports = [r for source in inputs for r in load_reports(source)]
    baseline_reports = [r for source in baseline for r in load_reports(source)]
    pricing_model = PricingModel.from_toml(pricing) if pricing else _run_config(ctx).pricing_model()

    rows = property_report(reports, baseline_reports)
    text = export_table(rows, fmt, metric_sets(reports, pricing_model))
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8")
        console.print(f"[green]Property table written to {out_path}[/green]")
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False, path_type=Path), help="Corpus directory")
@click.option("--in", "inputs", type=click.Path(exists=True, path_type=Path), multiple=True,
              help="Report file or directory (repeatable)")
def verify(data_dir: Optional[Path], inputs):
    """Audit a corpus and reports: round-trips, closure, counters and trace replays."""
    if data_dir is None and not inputs:
        raise UsageException("nothing to verify: pass --data-dir and/or --in")
    checks = []
    if data_dir is not None:
        with console.status("[bold yellow]Checking corpus..."):
            checks += verify_corpus(open_corpus(data_dir))
    if inputs:
        checks += verify_reports(r for source in inputs for r in load_reports(source))

    table = Table(title="Verification")
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Detail", style="dim")
    for check in checks:
        table.add_row(check.name, "[green]pass[/green]" if check.ok else "[red]FAIL[/red]", check.detail)
    console.print(table)
    require_passing(checks)


def main() -> None:
    cli(obj={})


if __name__ == "__main__":
    main()
