"""Tests for the practice-bus command line."""

import pandas as pd
import pytest
import yaml

from practice_bus.cli import (
    EXIT_ERROR,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    build_parser,
    main,
    parse_behavior,
)
from practice_bus.config import dump_scenario, standard_scenario
from practice_bus.core.bus import PracticeBus
from practice_bus.errors import ConfigError
from practice_bus.sim.devices import Behavior
from practice_bus.storage import read_params, read_ppm
from tests.conftest import small_scenario


@pytest.fixture
def scenario_file(tmp_path):
    """A light switch scenario small enough to train from the command line."""
    config = small_scenario(
        candidates=30, pca_components=8, label_cap=2, heatmap_stride=16
    )
    path = tmp_path / "switch.yaml"
    path.write_text(dump_scenario(config))
    return path


@pytest.mark.unit
class TestParser:
    """Test argument parsing"""

    def test_common_options(self, tmp_path):
        """Test defaults shared by every command"""
        args = build_parser().parse_args(["capture", "--out", str(tmp_path / "o")])

        assert args.scenario == "standard:light_switch"
        assert args.seed == 0
        assert args.debug is False

    def test_out_is_required(self):
        """Test that every command needs an output directory"""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["capture"])

    def test_compare_defaults(self, tmp_path):
        """Test the comparison defaults"""
        args = build_parser().parse_args(["compare", "--out", str(tmp_path)])

        assert (args.seeds, args.views, args.max_labels, args.target) == (20, 10, 150, 0.9)

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("B", Behavior.PRIMARY),
            ("B*", Behavior.COMPLEMENT),
            ("switch-on", Behavior.PRIMARY),
            ("switch-off", Behavior.COMPLEMENT),
        ],
    )
    def test_parse_behavior(self, text, expected):
        """Test behaviors by role or action name"""
        assert parse_behavior(text, standard_scenario("light_switch")) is expected

    def test_parse_behavior_unknown(self):
        """Test an action of another device"""
        with pytest.raises(ConfigError, match="unknown behavior"):
            parse_behavior("drawer-open", standard_scenario("light_switch"))


@pytest.mark.integration
class TestCommands:
    """Test commands end to end"""

    def test_capture(self, fresh_bus, tmp_path):
        """Test the nominal view and its summary are written with the manifest"""
        out = tmp_path / "capture"

        code = main(["capture", "--out", str(out), "--seed", "3", "--state", "on"])

        assert code == EXIT_OK
        assert read_ppm(out / "observation.ppm").shape == (480, 640, 3)
        summary = yaml.safe_load((out / "observation.yaml").read_text())
        assert summary["state"] is True
        manifest = yaml.safe_load((out / "manifest.yaml").read_text())
        assert manifest["command"] == "capture"
        assert manifest["seed"] == 3
        assert manifest["options"]["state"] == "on"
        assert (out / "scenario.yaml").exists()

    def test_non_empty_output(self, fresh_bus, tmp_path):
        """Test an existing directory is never overwritten"""
        out = tmp_path / "taken"
        out.mkdir()
        (out / "keep.txt").write_text("mine")

        assert main(["capture", "--out", str(out)]) == EXIT_ERROR
        assert [p.name for p in out.iterdir()] == ["keep.txt"]

    def test_bad_scenario_leaves_nothing(self, fresh_bus, tmp_path):
        """Test a failed command leaves no output or staging directory"""
        bad = tmp_path / "bad.yaml"
        bad.write_text("version: 7\n")

        code = main(["capture", "--scenario", str(bad), "--out", str(tmp_path / "o")])

        assert code == EXIT_ERROR
        assert sorted(p.name for p in tmp_path.iterdir()) == ["bad.yaml"]

    def test_missing_checkpoint(self, fresh_bus, tmp_path):
        """Test evaluating without a checkpoint file"""
        code = main(
            ["evaluate", "--out", str(tmp_path / "o"), "--checkpoint", str(tmp_path / "none.bin")]
        )

        assert code == EXIT_ERROR
        assert not (tmp_path / "o").exists()

    @pytest.mark.slow
    def test_train_evaluate_heatmap(self, fresh_bus, tmp_path, scenario_file):
        """Test a capped training run, then evaluation and a heatmap from its checkpoint"""
        run = tmp_path / "run"

        code = main(["train", "--scenario", str(scenario_file), "--out", str(run)])

        assert code == EXIT_NOT_CONVERGED
        for name in ("trace.log", "checkpoint.bin", "labels.csv", "report.yaml", "manifest.yaml"):
            assert (run / name).exists()
        report = yaml.safe_load((run / "report.yaml").read_text())
        labels = pd.read_csv(run / "labels.csv")
        assert report["converged"] is False
        assert labels["total"].sum() == sum(v["total"] for v in report["labels"].values())
        trace = (run / "trace.log").read_text().splitlines()
        assert len(trace) == labels["total"].sum()

        checkpoint = str(run / "checkpoint.bin")
        code = main(
            ["evaluate", "--scenario", str(scenario_file), "--out", str(tmp_path / "ev"),
             "--checkpoint", checkpoint, "--trials", "1"]
        )
        assert code == EXIT_OK
        success = pd.read_csv(tmp_path / "ev" / "success.csv")
        assert success["trials"].tolist() == [1, 1]

        code = main(
            ["heatmap", "--scenario", str(scenario_file), "--out", str(tmp_path / "hm"),
             "--checkpoint", checkpoint, "--behavior", "switch-off"]
        )
        assert code == EXIT_OK
        summary = yaml.safe_load((tmp_path / "hm" / "heatmap.yaml").read_text())
        assert summary["action"] == "switch-off"
        assert read_ppm(tmp_path / "hm" / "heatmap.ppm").shape == (360, 480, 3)

        code = main(
            ["evaluate", "--scenario", "standard:rocker", "--out", str(tmp_path / "wrong"),
             "--checkpoint", checkpoint]
        )
        assert code == EXIT_ERROR

    @pytest.mark.slow
    def test_train_is_reproducible(self, fresh_bus, tmp_path, scenario_file):
        """Test two training runs from one seed write byte-identical trace and checkpoint"""
        runs = [tmp_path / "first", tmp_path / "second"]
        for run in runs:
            main(["train", "--scenario", str(scenario_file), "--seed", "5", "--out", str(run)])

        for name in ("trace.log", "checkpoint.bin"):
            first, second = ((run / name).read_bytes() for run in runs)
            assert first
            assert first == second, name

    @pytest.mark.slow
    def test_gridsearch_and_compare(self, fresh_bus, tmp_path):
        """Test hyperparameter selection and the strategy comparison on the drawer"""
        scenario = tmp_path / "drawer.yaml"
        config = small_scenario("drawer", candidates=30, pca_components=8)
        scenario.write_text(dump_scenario(config))

        code = main(
            ["gridsearch", "--scenario", str(scenario), "--out", str(tmp_path / "gs"),
             "--behavior", "B*", "--views", "2", "--gammas", "0.1", "1", "--c-scales", "1"]
        )
        assert code == EXIT_OK
        params = read_params(tmp_path / "gs" / "params.yaml")
        assert params.gamma in (0.1, 1.0)
        assert len(pd.read_csv(tmp_path / "gs" / "grid.csv")) == 2

        code = main(
            ["compare", "--scenario", str(scenario), "--out", str(tmp_path / "cmp"),
             "--behavior", "drawer-close", "--seeds", "1", "--views", "2", "--max-labels", "6"]
        )
        assert code == EXIT_OK
        table = pd.read_csv(tmp_path / "cmp" / "compare.csv")
        assert table.columns.tolist() == ["seed", "active", "random"]
        summary = yaml.safe_load((tmp_path / "cmp" / "compare.yaml").read_text())
        assert summary["target"] == 0.9

    def test_debug_turns_on_bus_logging(self, fresh_bus, tmp_path, mocker):
        """Test --debug switches the Bus to debug logging"""
        set_debug = mocker.spy(PracticeBus, "set_debug")

        assert main(["capture", "--debug", "--out", str(tmp_path / "o")]) == EXIT_OK
        assert set_debug.call_count == 1
        assert set_debug.call_args.args[-1] is True
