"""
Autonomous training of a complementary behavior pair.

Lifecycle:

1. ``init()`` runs initialization at the stored device pose: sample points
   around the seed, execute whichever behavior the device state allows, and
   stop once both behaviors hold a success and a failure.
2. ``train_to_convergence()`` visits the eight practice poses round-robin.
   Each visit drives back to the device with navigation error, captures a
   fresh observation and practices. A pose retires once neither classifier
   has a candidate closer to its boundary than its support vectors.

Every labeled example is announced as a ``practice:label`` event.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
import pandas as pd

from practice_bus._version import __version__
from practice_bus.config import LearnerConfig, NoiseConfig, ScenarioConfig
from practice_bus.core import events
from practice_bus.core.module import PracticeModule
from practice_bus.errors import ConvergenceError, InitializationError
from practice_bus.features.pipeline import FeatureExtractor
from practice_bus.features.sampling import SamplerParams, sample_candidates
from practice_bus.learning.active import (
    CONVERGED,
    CandidatePool,
    add_and_retrain,
    svm_pick,
    visit_converged,
)
from practice_bus.learning.svm import SvmParams, default_gamma, train
from practice_bus.sim.devices import Behavior
from practice_bus.sim.scene import Observation
from practice_bus.sim.world import SimWorld
from practice_bus.streams import Streams
from practice_bus.training.execution import execute_with_retry
from practice_bus.training.session import (
    BehaviorPairSession,
    BehaviorSlot,
    ExecutionReport,
    TrainingReport,
)


class StopRule(Enum):
    CONVERGENCE = "convergence"
    FIRST_SUCCESS = "first-success"


@dataclass
class PracticeResult:
    observation: Observation
    pool: CandidatePool
    labels: int
    succeeded: bool


class PairTrainer(PracticeModule):
    """Learns where a behavior pair succeeds on one simulated device."""

    def __init__(
        self,
        scenario: ScenarioConfig,
        seed: int = 0,
        *,
        streams: Streams | None = None,
        world: SimWorld | None = None,
        extractor: FeatureExtractor | None = None,
        session: BehaviorPairSession | None = None,
        name: str = "trainer",
    ):
        super().__init__(name, __version__, "Learns a complementary behavior pair")
        self.scenario = scenario
        self.seed = seed
        self.streams = streams or Streams.from_seed(seed)
        self.world = world or SimWorld(scenario, self.streams.device)
        self.extractor = extractor or FeatureExtractor()
        self.session = session
        self._pose = "nominal"

    @property
    def learner(self) -> LearnerConfig:
        return self.scenario.learner

    def _initialize(self) -> None:
        self.initialize()

    def _require_session(self) -> BehaviorPairSession:
        if self.session is None or not self.session.ready:
            raise RuntimeError("trainer has no initialized session; call init() first")
        return self.session

    def _sampler(self, center: np.ndarray) -> SamplerParams:
        return SamplerParams.around(center, self.learner.sampler_variance, self.learner.candidates)

    # ========================================================================
    # Events
    # ========================================================================

    def _emit_label(
        self,
        slot: BehaviorSlot,
        point: np.ndarray,
        label: int,
        phase: str,
        distance: float,
        pool: int,
    ) -> None:
        self.emit(
            events.LABEL,
            {
                "phase": phase,
                "action": slot.action,
                "pose": self._pose,
                "point": [float(v) for v in point],
                "distance": float(distance),
                "label": int(label),
                "pool": int(pool),
            },
        )

    def _on_execution_label(
        self,
        slot: BehaviorSlot,
        features: np.ndarray,
        point: np.ndarray,
        label: int,
        phase: str,
        distance: float,
        pool: int,
    ) -> None:
        self.emit(
            events.ATTEMPT,
            {
                "phase": phase,
                "action": slot.action,
                "point": [float(v) for v in point],
                "label": label,
            },
        )
        # evaluation data is thrown away, so it never reaches the label trace
        if phase != "evaluate":
            self._emit_label(slot, point, label, phase, distance, pool)

    # ========================================================================
    # Initialization
    # ========================================================================

    def initialize(self) -> BehaviorPairSession:
        """
        Gather one success and one failure for each behavior, then train.

        Raises:
            InitializationError: the iteration cap ran out first
        """
        cfg, learner = self.scenario, self.learner
        device = self.world.device
        session = BehaviorPairSession.create(
            scenario=cfg.name,
            device_kind=device.kind,
            actions=device.actions,
            seed_point=np.asarray(learner.seed_point, dtype=float),
            nominal_pose=cfg.nominal_pose(),
            practice_poses=[p.pose for p in cfg.practice_poses()],
            n_features=learner.pca_components,
            visit_budget=learner.visit_budget,
        )
        self.session = session
        self._pose = "nominal"
        self.world.move_to(session.nominal_pose)
        observation = self.world.observe()

        sigma2 = learner.init_sigma**2
        seed_sampler = SamplerParams.around(session.seed_point, (sigma2, sigma2, sigma2), 1)
        # both bases come from the first observation
        fit_raw: dict[Behavior, np.ndarray] = {}
        for which, slot in session.slots.items():
            indices = self.extractor.candidates(
                observation, self._sampler(session.seed_point), self.streams.sampling
            )
            fit_raw[which] = self.extractor.raw(observation, indices)
            slot.pca = self.extractor.fit(fit_raw[which], learner.pca_components, slot.action)
        trace: list[dict[str, Any]] = []

        for iteration in range(1, learner.init_max_iterations + 1):
            which = device.applicable()
            slot = session.slot(which)
            assert slot.pca is not None

            index = int(sample_candidates(observation.points, seed_sampler, self.streams.init)[0])
            point = observation.points[index].copy()
            features = self.extractor.features(observation, np.array([index]), slot.pca).values[0]
            trial = self.world.act(which, point, observation)
            observation = trial.after
            label = 1 if trial.success else -1
            slot.dataset.add(features, point, label)
            trace.append(
                {
                    "iteration": iteration,
                    "action": slot.action,
                    "point": point.tolist(),
                    "label": label,
                }
            )
            self._emit_label(slot, point, label, "init", float("nan"), 0)

            if all(s.dataset.has_both_labels() for s in session.slots.values()):
                break
        else:
            counts = ", ".join(
                f"{s.action}: {s.dataset.n_positive}+/{s.dataset.n_negative}-"
                for s in session.slots.values()
            )
            raise InitializationError(
                f"initialization did not find both labels for both behaviors within "
                f"{learner.init_max_iterations} executions ({counts})",
                trace,
            )

        for which, slot in session.slots.items():
            assert slot.pca is not None
            gamma = learner.gamma or default_gamma(slot.pca.project(fit_raw[which]))
            slot.params = SvmParams(
                gamma=gamma,
                c_negative=learner.c_negative,
                tol=learner.solver_tol,
                max_iterations=learner.solver_max_iterations,
            )
            slot.model = train(slot.dataset, slot.params)

        self.logger.info(
            f"✅ Initialized {cfg.name} after {iteration} executions "
            f"({session.total_labels} labels)"
        )
        self.emit(events.INITIALIZED, {"executions": iteration, "labels": session.total_labels})
        return session

    # ========================================================================
    # Practice
    # ========================================================================

    def practice(
        self,
        which: Behavior,
        observation: Observation,
        center: np.ndarray,
        stop_rule: StopRule = StopRule.CONVERGENCE,
        phase: str = "practice",
    ) -> PracticeResult:
        """
        Practice one behavior on a fresh observation.

        Candidates are sampled around ``center`` once. Each round queries
        the candidate nearest the boundary, executes, labels, retrains and
        drops the candidate. A success hands the returned point to the
        complement, practiced until its first success, which puts the device
        back into this behavior's start state.
        """
        session = self._require_session()
        slot = session.slot(which)
        assert slot.model is not None and slot.pca is not None and slot.params is not None

        indices = self.extractor.candidates(
            observation, self._sampler(center), self.streams.sampling
        )
        candidates = self.extractor.features(observation, indices, slot.pca)
        pool = CandidatePool(candidates.values, candidates.points)

        labels = 0
        succeeded = False
        device = self.world.device
        while slot.convergence.can_label() and device.is_start_state(which):
            pick = svm_pick(slot.model, pool)
            if pick is CONVERGED:
                break

            trial = self.world.act(which, pick.point, observation)
            observation = trial.after
            label = 1 if trial.success else -1
            slot.model = add_and_retrain(
                slot.dataset, pick.features, pick.point, label, slot.params
            )
            pool.consume(pick.index)
            slot.convergence.record_label()
            labels += 1
            self.logger.debug(
                f"🎯 {slot.action} at pose {self._pose}: d={pick.distance:.4f} label={label:+d}"
            )
            self._emit_label(slot, pick.point, label, phase, pick.distance, len(pool))

            if trial.success:
                succeeded = True
                if stop_rule is StopRule.FIRST_SUCCESS:
                    break
                inner = self.practice(
                    which.complement,
                    observation,
                    trial.outcome.point,
                    StopRule.FIRST_SUCCESS,
                    phase="complement",
                )
                observation = inner.observation

        return PracticeResult(observation, pool, labels, succeeded)

    # ========================================================================
    # Training loop
    # ========================================================================

    def _check_converged(self, slot: BehaviorSlot, pose_index: int, pool: CandidatePool) -> None:
        assert slot.model is not None
        was = slot.convergence.is_converged(pose_index)
        if visit_converged(slot.convergence, pose_index, pool, slot.model) and not was:
            self.emit(events.CONVERGED, {"action": slot.action, "pose": pose_index})

    def visit(self, pose_index: int) -> None:
        """Go to a practice pose, come back to the device and practice."""
        session = self._require_session()
        session.visits += 1
        self.world.move_to(session.practice_poses[pose_index])
        approach = self.world.approach(self.streams.approach, self.scenario.noise_for(pose_index))
        observation = self.world.observe()
        for slot in session.slots.values():
            slot.convergence.begin_visit()

        which = self.world.device.applicable()
        slot, other = session.slot(which), session.slot(which.complement)
        self._pose = str(pose_index)
        self.emit(
            events.VISIT,
            {"pose": pose_index, "approach": approach.as_list(), "action": slot.action},
        )

        if not slot.convergence.is_converged(pose_index):
            result = self.practice(which, observation, session.seed_point)
            self._check_converged(slot, pose_index, result.pool)
        elif not other.convergence.is_converged(pose_index):
            # the applicable side is done here; operate it to reach the complement
            report = self.operate(which)
            if report.succeeded and report.returned_point is not None:
                result = self.practice(
                    which.complement, self.world.observe(), report.returned_point
                )
                self._check_converged(other, pose_index, result.pool)

    def operate(self, which: Behavior) -> ExecutionReport:
        """Execute with retries as part of training; labels are kept."""
        session = self._require_session()
        return execute_with_retry(
            self.world,
            session.slot(which),
            self.extractor,
            self.learner,
            session.seed_point,
            phase="operate",
            on_label=self._on_execution_label,
        )

    def train_to_convergence(self) -> TrainingReport:
        """
        Cycle the practice poses until every pose is retired for both behaviors.

        Raises:
            ConvergenceError: total labels exceeded ``learner.label_cap``
        """
        session = self._require_session()
        cap = self.learner.label_cap
        while not session.converged:
            for pose_index in range(len(session.practice_poses)):
                if session.pose_retired(pose_index):
                    continue
                self.visit(pose_index)
                if session.total_labels > cap:
                    report = TrainingReport.from_session(session)
                    self.logger.warning(f"❌ Label cap {cap} exceeded before convergence")
                    raise ConvergenceError(
                        f"{session.total_labels} labels exceed the cap of {cap}", report
                    )

        report = TrainingReport.from_session(session)
        self.logger.info(
            f"✅ Converged after {session.visits} visits: "
            + ", ".join(f"{a} {c['total']}" for a, c in report.labels.items())
        )
        return report

    def train(self) -> TrainingReport:
        """Initialize if needed, then train to convergence."""
        if self.session is None or not self.session.ready:
            self.init()
        return self.train_to_convergence()

    # ========================================================================
    # Evaluation
    # ========================================================================

    def evaluate(self, trials: int = 10, noise: NoiseConfig | None = None) -> pd.DataFrame:
        """
        Run execution trials for both behaviors from noisy approaches.

        Each trial starts from a copy of the trained session with the device
        reset to the behavior's start state; anything learned during the
        trial's retries is discarded afterwards.
        """
        base = self._require_session()
        rows = []
        self._pose = "evaluate"
        for which in (Behavior.PRIMARY, Behavior.COMPLEMENT):
            counts = {"first_try": 0, "second_try": 0, "later_try": 0, "failed": 0}
            for _ in range(trials):
                trial_session = base.copy()
                self.world.device.reset(which.start_state)
                self.world.approach(self.streams.evaluation, noise or self.scenario.noise)
                report = execute_with_retry(
                    self.world,
                    trial_session.slot(which),
                    self.extractor,
                    self.learner,
                    base.seed_point,
                    phase="evaluate",
                    on_label=self._on_execution_label,
                )
                if not report.succeeded:
                    counts["failed"] += 1
                elif report.tries == 1:
                    counts["first_try"] += 1
                elif report.tries == 2:
                    counts["second_try"] += 1
                else:
                    counts["later_try"] += 1
            rows.append({"action": base.slot(which).action, "trials": trials, **counts})
            self.logger.info(f"📊 {base.slot(which).action}: {counts}")
        return pd.DataFrame(
            rows, columns=["action", "trials", "first_try", "second_try", "later_try", "failed"]
        )
