"""Tests for the command-line interface."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from src.backend.persistence import CLUSTER_FILE
from src.cli import cli
from src.config import reset_settings
from src.generator.corpus_store import MANIFEST_FILE
from src.metrics.export import write_report
from src.scenarios.models import ScenarioCounters, ScenarioReport

RUN_TOML = """
seed = 7

[generator]
scale_factor_gb = 0.0005

[cluster]
nodes = 3
replication_factor = 2

[pipeline]
topic_count = 4
gibbs_iterations = 10
max_tokens_per_document = 32
"""


def _isolate(monkeypatch, root):
    monkeypatch.setenv("PRIMEBALL_ENVIRONMENT", "production")
    monkeypatch.setenv("PRIMEBALL_LOGS_DIR", str(root / "logs"))
    monkeypatch.setenv("PRIMEBALL_DATA_DIR", str(root / "data"))
    monkeypatch.setenv("PRIMEBALL_REPORTS_DIR", str(root / "reports"))
    reset_settings()


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    _isolate(monkeypatch, tmp_path)
    yield
    reset_settings()


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A generated corpus and an initialized cluster, built once through the CLI."""
    root = tmp_path_factory.mktemp("cli")
    (root / "run.toml").write_text(RUN_TOML)
    with pytest.MonkeyPatch.context() as monkeypatch:
        _isolate(monkeypatch, root)
        runner = CliRunner()
        generated = runner.invoke(cli, ["--config", str(root / "run.toml"), "generate", "--out", str(root / "corpus")])
        initialized = runner.invoke(cli, [
            "--config", str(root / "run.toml"), "init",
            "--data-dir", str(root / "corpus"), "--cluster-dir", str(root / "cluster"),
        ])
    reset_settings()
    return root, generated, initialized


def sealed_report(scenario_id: int, **fields) -> ScenarioReport:
    return ScenarioReport(scenario_id=scenario_id, clock_mode="virtual", ended_at=4.0, sealed=True, **fields)


class TestGenerateAndInit:
    """Corpus generation and cluster initialization."""

    def test_generate_writes_a_corpus(self, workspace):
        root, generated, _ = workspace

        assert generated.exit_code == 0, generated.output
        assert (root / "corpus" / MANIFEST_FILE).is_file()

    def test_init_saves_cluster_and_metadata(self, workspace):
        root, _, initialized = workspace

        assert initialized.exit_code == 0, initialized.output
        assert (root / "cluster" / CLUSTER_FILE).is_file()
        assert any((root / "cluster" / "metadata").iterdir())

    def test_init_refuses_existing_cluster(self, workspace, runner):
        root, _, _ = workspace

        result = runner.invoke(cli, ["init", "--data-dir", str(root / "corpus"), "--cluster-dir", str(root / "cluster")])

        assert result.exit_code == 4
        assert "error=precondition" in result.output

    def test_verify_generated_corpus(self, workspace, runner):
        root, _, _ = workspace

        result = runner.invoke(cli, ["verify", "--data-dir", str(root / "corpus")])

        assert result.exit_code == 0, result.output


class TestQueryCommand:
    def test_json_output(self, workspace, runner):
        root, _, _ = workspace

        result = runner.invoke(cli, ["query", "--data-dir", str(root / "cluster"), "--kind", "Q11", "--limit", "0"])

        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["kind"] == "Q11"
        assert payload["total_matched"] == len(payload["rows"])

    def test_csv_output(self, workspace, runner):
        root, _, _ = workspace

        result = runner.invoke(cli, [
            "query", "--data-dir", str(root / "cluster"), "--kind", "Q11", "--format", "csv",
        ])

        assert result.exit_code == 0, result.output
        assert result.output.splitlines()[0] == "language_id,language,articles"

    def test_missing_parameter_is_a_usage_error(self, workspace, runner):
        root, _, _ = workspace

        result = runner.invoke(cli, ["query", "--data-dir", str(root / "cluster"), "--kind", "Q4"])

        assert result.exit_code == 2
        assert "error=usage" in result.output
        assert "on_date" in result.output


class TestIndexCommand:
    """Re-running the metadata pipeline over a saved cluster."""

    @staticmethod
    def index(runner, root: Path, out: str, seed: int):
        return runner.invoke(cli, [
            "--config", str(root / "run.toml"), "index",
            "--data-dir", str(root / "cluster"), "--out", str(root / out), "--seed", str(seed),
        ])

    @staticmethod
    def topic_files(directory: Path) -> dict:
        return {path.name: path.read_bytes() for path in sorted(directory.glob("*.xml"))}

    def test_same_seed_writes_identical_topic_files(self, workspace, runner):
        root, _, _ = workspace

        first = self.index(runner, root, "index-a", 3)
        second = self.index(runner, root, "index-b", 3)

        assert first.exit_code == 0, first.output
        assert second.exit_code == 0, second.output
        assert self.topic_files(root / "index-a")
        assert self.topic_files(root / "index-a") == self.topic_files(root / "index-b")

    def test_seed_reaches_the_topic_model(self, workspace, runner):
        root, _, _ = workspace

        self.index(runner, root, "index-c", 3)
        other = self.index(runner, root, "index-d", 4)

        assert other.exit_code == 0, other.output
        assert self.topic_files(root / "index-c") != self.topic_files(root / "index-d")


class TestArgumentErrors:
    """Bad invocations exit with 2 or 3 before any work starts."""

    def test_unknown_scenario(self, runner):
        result = runner.invoke(cli, ["run", "--scenario", "9"])

        assert result.exit_code == 2

    def test_verify_needs_something_to_check(self, runner):
        result = runner.invoke(cli, ["verify"])

        assert result.exit_code == 2
        assert "error=usage" in result.output

    def test_broken_config_file(self, runner, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("[cluster]\nnodes = 1\nreplication_factor = 2\n")

        result = runner.invoke(cli, ["--config", str(path), "verify"])

        assert result.exit_code == 3
        assert "error=config" in result.output


class TestReportAndVerify:
    """Commands that read sealed reports."""

    @pytest.fixture
    def reports_dir(self, tmp_path):
        write_report(sealed_report(1), tmp_path / "reports" / "scenario-1.json")
        write_report(sealed_report(5), tmp_path / "reports" / "scenario-5.json")
        return tmp_path / "reports"

    def test_csv_property_table(self, runner, reports_dir):
        result = runner.invoke(cli, ["report", "--in", str(reports_dir), "--format", "csv"])

        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert lines[0].startswith("property,")
        assert len(lines) == 14

    def test_report_to_file(self, runner, reports_dir, tmp_path):
        out = tmp_path / "table" / "properties.md"

        result = runner.invoke(cli, ["report", "--in", str(reports_dir), "--format", "markdown", "--out", str(out)])

        assert result.exit_code == 0, result.output
        assert "| Durability |" in out.read_text()

    def test_verify_passes_untouched_reports(self, runner, reports_dir):
        result = runner.invoke(cli, ["verify", "--in", str(reports_dir)])

        assert result.exit_code == 0, result.output

    def test_verify_fails_on_tampered_counters(self, runner, tmp_path):
        path = write_report(sealed_report(2, counters=ScenarioCounters(total_reads=5)), tmp_path / "s2.json")

        result = runner.invoke(cli, ["verify", "--in", str(path)])

        assert result.exit_code == 4
        assert "error=verification-failed" in result.output


@pytest.mark.slow
class TestRunCommand:
    def test_initialization_scenario_writes_a_report(self, runner, tmp_path):
        (tmp_path / "run.toml").write_text(RUN_TOML)
        out = tmp_path / "reports" / "s6.json"

        result = runner.invoke(cli, ["run", "--scenario", "6", "--config", str(tmp_path / "run.toml"), "--out", str(out)])

        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())["scenario_id"] == 6
        assert runner.invoke(cli, ["verify", "--in", str(out)]).exit_code == 0


class TestReferencePage:
    """docs/CLI.md lists every flag the commands accept."""

    @pytest.fixture(scope="class")
    def reference(self):
        return (Path(__file__).resolve().parent.parent / "docs" / "CLI.md").read_text(encoding="utf-8")

    def test_every_command_has_a_section(self, reference):
        for name in cli.commands:
            assert f"## `{name}`" in reference

    def test_every_flag_is_documented(self, reference):
        commands = [cli, *cli.commands.values()]
        flags = {opt for command in commands for param in command.params for opt in getattr(param, "opts", [])}

        undocumented = sorted(flag for flag in flags if flag.startswith("--") and f"`{flag}" not in reference)

        assert undocumented == []
