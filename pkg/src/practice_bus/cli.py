"""
Command-line entry point: ``practice-bus <command> --scenario ... --seed ... --out ...``.

Every command writes into a fresh output directory that appears atomically
when the command finishes, together with ``manifest.yaml`` (the command line
as data) and ``scenario.yaml`` (the resolved scenario).

Exit codes: 0 success, 1 configuration / data / IO error, 2 training did not
converge (partial artifacts are still written).
"""

import argparse
import logging
import shutil
import sys
import tempfile
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import yaml

from practice_bus._version import __version__
from practice_bus.config import ScenarioConfig, dump_scenario, load_scenario
from practice_bus.core.bus import PracticeBus
from practice_bus.errors import ConfigError, ConvergenceError, PracticeBusError
from practice_bus.learning.grid import grid_search, split_halves
from practice_bus.reports import render_heatmap
from practice_bus.sim.devices import DEVICE_TYPES, Behavior
from practice_bus.sim.world import SimWorld
from practice_bus.storage import (
    load_checkpoint,
    save_checkpoint,
    write_params,
    write_ppm,
    write_table,
)
from practice_bus.streams import Streams
from practice_bus.training.compare import compare_selection
from practice_bus.training.session import BehaviorPairSession
from practice_bus.training.trace import TraceRecorder
from practice_bus.training.trainer import PairTrainer
from practice_bus.training.views import build_view_dataset

logger = logging.getLogger("practice_bus.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

CHECKPOINT = "checkpoint.bin"


class NotConverged(Exception):
    """Raised by a command after its partial artifacts are written."""


# ============================================================================
# Helpers
# ============================================================================


def parse_behavior(text: str, scenario: ScenarioConfig) -> Behavior:
    """``B``, ``B*`` or one of the device's action names."""
    actions = DEVICE_TYPES[scenario.device_kind].actions
    for which in Behavior:
        if text in (which.value, actions[0] if which is Behavior.PRIMARY else actions[1]):
            return which
    raise ConfigError(f"unknown behavior {text!r}; use B, B* or one of {actions}")


def check_session(session: BehaviorPairSession, scenario: ScenarioConfig) -> None:
    if session.device_kind != scenario.device_kind:
        raise ConfigError(
            f"checkpoint was trained on a {session.device_kind}, "
            f"scenario {scenario.name!r} has a {scenario.device_kind}"
        )


class OutputDir:
    """
    Staging directory next to the final one, renamed into place on commit.

    The final directory must not exist or be empty.
    """

    def __init__(self, target: str | Path):
        self.target = Path(target)
        if self.target.exists() and (not self.target.is_dir() or any(self.target.iterdir())):
            raise ConfigError(f"output directory {self.target} already exists and is not empty")
        self.target.parent.mkdir(parents=True, exist_ok=True)
        self.path = Path(tempfile.mkdtemp(prefix=f".{self.target.name}.", dir=self.target.parent))

    def __truediv__(self, name: str) -> Path:
        return self.path / name

    def commit(self) -> Path:
        if self.target.exists():
            self.target.rmdir()
        self.path.rename(self.target)
        return self.target

    def discard(self) -> None:
        shutil.rmtree(self.path, ignore_errors=True)


def write_yaml(path: Path, data: Any) -> None:
    path.write_text(yaml.safe_dump(data, sort_keys=True), encoding="utf-8")


def manifest(args: argparse.Namespace) -> dict[str, Any]:
    options = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("command", "scenario", "seed", "out", "debug", "handler")
    }
    return {
        "command": args.command,
        "scenario": args.scenario,
        "seed": args.seed,
        "out": str(args.out),
        "options": {k: str(v) if isinstance(v, Path) else v for k, v in options.items()},
        "version": __version__,
    }


# ============================================================================
# Commands
# ============================================================================


def cmd_train(args: argparse.Namespace, scenario: ScenarioConfig, out: OutputDir) -> None:
    """Initialize and train to convergence; write checkpoint, trace and label table."""
    trainer = PairTrainer(scenario, args.seed)
    failure: ConvergenceError | None = None
    with TraceRecorder(source=trainer.name) as recorder, trainer:
        try:
            report = trainer.train()
        except ConvergenceError as e:
            report, failure = e.report, e
        recorder.write(out / "trace.log")

    session = trainer.session
    assert session is not None
    save_checkpoint(session, out / CHECKPOINT)
    write_table(session.label_table(), out / "labels.csv")
    write_yaml(out / "report.yaml", report.to_dict())

    if failure is not None:
        raise NotConverged(str(failure)) from failure
    print(session.label_table().to_string(index=False))


def cmd_evaluate(args: argparse.Namespace, scenario: ScenarioConfig, out: OutputDir) -> None:
    """Execution trials with retry for both behaviors; write the success table."""
    session = load_checkpoint(args.checkpoint)
    check_session(session, scenario)
    trainer = PairTrainer(scenario, args.seed, session=session)
    try:
        table = trainer.evaluate(trials=args.trials)
    finally:
        trainer.destroy()
    write_table(table, out / "success.csv")
    print(table.to_string(index=False))


def cmd_heatmap(args: argparse.Namespace, scenario: ScenarioConfig, out: OutputDir) -> None:
    """Classify a dense grid from the nominal pose and tint the positives green."""
    session = load_checkpoint(args.checkpoint)
    check_session(session, scenario)
    which = parse_behavior(args.behavior, scenario)
    world = SimWorld(scenario, Streams.from_seed(args.seed).device)
    heatmap = render_heatmap(session, world, which, stride=scenario.learner.heatmap_stride)
    write_ppm(out / "heatmap.ppm", heatmap.rgb)
    summary = {
        "action": session.slot(which).action,
        "grid_points": int(heatmap.positive.size),
        "positive": int(heatmap.positive.sum()),
        "stride": heatmap.stride,
        "overlap": heatmap.overlap(),
    }
    write_yaml(out / "heatmap.yaml", summary)
    print(f"{summary['action']}: {summary['positive']}/{summary['grid_points']} positive, "
          f"overlap {summary['overlap']:.3f}")


def cmd_gridsearch(args: argparse.Namespace, scenario: ScenarioConfig, out: OutputDir) -> None:
    """Select (gamma, C) on a ground-truth labeled multi-view set."""
    which = parse_behavior(args.behavior, scenario)
    views = build_view_dataset(scenario, args.seed, args.views, which)
    train_half, test_half = split_halves(views.data, Streams.from_seed(args.seed).baseline)
    kwargs: dict[str, Any] = {"tol": scenario.learner.solver_tol}
    if args.gammas:
        kwargs["gammas"] = tuple(args.gammas)
    if args.c_scales:
        kwargs["c_scales"] = tuple(args.c_scales)
    result = grid_search(train_half, test_half, **kwargs)
    write_params(result.params, out / "params.yaml")
    write_table(result.table, out / "grid.csv")
    print(f"gamma={result.params.gamma:g} C={result.params.c_negative:g} "
          f"balanced accuracy {result.score:.3f}")


def cmd_capture(args: argparse.Namespace, scenario: ScenarioConfig, out: OutputDir) -> None:
    """Render the view from the nominal pose."""
    world = SimWorld(scenario, Streams.from_seed(args.seed).device)
    if args.state is not None:
        world.device.reset(args.state == "on")
    observation = world.observe()
    write_ppm(out / "observation.ppm", observation.rgb)
    write_yaml(
        out / "observation.yaml",
        {
            "points": len(observation),
            "brightness": float(observation.brightness),
            "mean_intensity": observation.mean_intensity(),
            "state": bool(world.device.state),
        },
    )


def cmd_compare(args: argparse.Namespace, scenario: ScenarioConfig, out: OutputDir) -> None:
    """Labels to reach the target accuracy, active versus random selection."""
    which = parse_behavior(args.behavior, scenario)
    seeds = [args.seed + k for k in range(args.seeds)]
    result = compare_selection(scenario, seeds, which, args.views, args.max_labels, args.target)
    write_table(result.table, out / "compare.csv")
    write_yaml(
        out / "compare.yaml",
        {
            "target": result.target,
            "active_median": result.active_median,
            "random_median": result.random_median,
            "reduction": result.reduction,
        },
    )
    print(f"median labels: active {result.active_median:g}, random {result.random_median:g} "
          f"({result.reduction:.0%} fewer)")


# ============================================================================
# Parser
# ============================================================================

Command = Callable[[argparse.Namespace, ScenarioConfig, OutputDir], None]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--scenario",
        default="standard:light_switch",
        help="scenario YAML path or standard:<light_switch|rocker|drawer>",
    )
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--out", type=Path, required=True, help="output directory (must not exist)")
    common.add_argument("--debug", action="store_true", help="debug logging, including bus traffic")

    parser = argparse.ArgumentParser(
        prog="practice-bus",
        description="Autonomous practice of complementary manipulation behaviors in simulation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="initialize and train to convergence")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("evaluate", parents=[common], help="execution trials from noisy approaches")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--trials", type=int, default=10, help="trials per behavior")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("heatmap", parents=[common], help="render where a behavior should succeed")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--behavior", default="B", help="B, B* or an action name")
    p.set_defaults(handler=cmd_heatmap)

    p = sub.add_parser("gridsearch", parents=[common], help="select RBF gamma and C")
    p.add_argument("--behavior", default="B")
    p.add_argument("--views", type=int, default=10)
    p.add_argument("--gammas", type=float, nargs="+", default=None)
    p.add_argument("--c-scales", dest="c_scales", type=float, nargs="+", default=None)
    p.set_defaults(handler=cmd_gridsearch)

    p = sub.add_parser("capture", parents=[common], help="write the nominal view as PPM")
    p.add_argument("--state", choices=("on", "off"), default=None, help="device state to render")
    p.set_defaults(handler=cmd_capture)

    p = sub.add_parser("compare", parents=[common], help="active versus random query selection")
    p.add_argument("--behavior", default="B")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--views", type=int, default=10)
    p.add_argument("--max-labels", dest="max_labels", type=int, default=150)
    p.add_argument("--target", type=float, default=0.9)
    p.set_defaults(handler=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    if args.debug:
        PracticeBus().set_debug(True)

    out: OutputDir | None = None
    try:
        scenario = load_scenario(args.scenario)
        out = OutputDir(args.out)
        write_yaml(out / "manifest.yaml", manifest(args))
        (out / "scenario.yaml").write_text(dump_scenario(scenario), encoding="utf-8")
        handler: Command = args.handler
        handler(args, scenario, out)
    except NotConverged as e:
        assert out is not None
        out.commit()
        logger.error(f"❌ {e}")
        return EXIT_NOT_CONVERGED
    except (PracticeBusError, OSError, ValueError) as e:
        if out is not None:
            out.discard()
        logger.error(f"❌ {args.command} failed: {e}")
        return EXIT_ERROR

    assert out is not None
    out.commit()
    logger.info(f"✅ {args.command} wrote {out.target}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
