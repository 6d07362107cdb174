"""Tests for initialization, practice, training and evaluation of a behavior pair."""

import numpy as np
import pytest

from practice_bus.config import standard_scenario
from practice_bus.core import events
from practice_bus.core.bus import PracticeBus
from practice_bus.core.events import ModuleStatus
from practice_bus.errors import ConvergenceError, InitializationError
from practice_bus.features.pipeline import FeatureExtractor
from practice_bus.training.trace import TraceRecorder
from practice_bus.training.trainer import PairTrainer, StopRule
from tests.conftest import FAST_PATCHES, small_scenario


def make_trainer(config, seed=0, name="trainer"):
    return PairTrainer(config, seed, extractor=FeatureExtractor(FAST_PATCHES), name=name)


def label_events(bus, phase=None):
    found = bus.events(events.LABEL)
    if phase is not None:
        found = [e for e in found if e.detail["phase"] == phase]
    return found


@pytest.fixture
def trained(fresh_bus, light_switch):
    """An initialized light switch trainer."""
    trainer = make_trainer(light_switch)
    trainer.init()
    yield trainer
    trainer.destroy()


# ============================================================================
# Initialization
# ============================================================================


@pytest.mark.integration
class TestInitialization:
    """Test gathering the first examples of both behaviors"""

    def test_both_behaviors_ready(self, trained):
        """Test each slot holds both labels and a trained model"""
        session = trained.session

        assert trained.status is ModuleStatus.READY
        assert session.ready
        for slot in session.slots.values():
            assert slot.dataset.has_both_labels()
            assert slot.pca.components == 12
            assert slot.model.params.c_positive is not None

    def test_every_label_is_announced(self, trained, fresh_bus):
        """Test one init label event per stored example"""
        announced = label_events(fresh_bus, "init")

        assert len(announced) == trained.session.total_labels
        assert all(e.source == "trainer" for e in announced)
        assert [e.type for e in fresh_bus.get_event_log()][-2:] == [
            "practice:initialized",
            "module:ready",
        ]

    def test_labels_come_from_the_verifier(self, trained, fresh_bus):
        """Test labels in events match the stored datasets in order"""
        by_action = {}
        for event in label_events(fresh_bus, "init"):
            by_action.setdefault(event.detail["action"], []).append(event.detail["label"])

        for slot in trained.session.slots.values():
            assert by_action[slot.action] == slot.dataset.labels.tolist()

    def test_iteration_cap(self, fresh_bus):
        """Test the error carries the trace of what was tried"""
        config = small_scenario(init_max_iterations=1)
        trainer = make_trainer(config)

        with pytest.raises(InitializationError, match="within 1 executions") as info:
            trainer.init()

        assert len(info.value.trace) == 1
        assert info.value.trace[0]["iteration"] == 1
        assert trainer.status is ModuleStatus.ERROR

    def test_fixed_gamma(self, fresh_bus):
        """Test a configured gamma overrides the default"""
        trainer = make_trainer(small_scenario(gamma=0.25))
        trainer.init()

        for slot in trainer.session.slots.values():
            assert slot.params.gamma == 0.25

    def test_same_seed_same_trace(self, fresh_bus, light_switch):
        """Test two runs from one seed label identical points"""
        traces = []
        for name in ("first", "second"):
            recorder = TraceRecorder(source=name, name=f"trace-{name}")
            recorder.init()
            make_trainer(light_switch, seed=7, name=name).init()
            traces.append(recorder.text())

        assert traces[0] == traces[1]
        assert traces[0]

    @pytest.mark.parametrize("seed", [0, 3])
    def test_drawer_finds_both_labels(self, fresh_bus, drawer, seed):
        """Test opening and closing both see a success and a failure"""
        trainer = make_trainer(drawer, seed=seed)
        trainer.init()

        for slot in trainer.session.slots.values():
            assert slot.dataset.n_positive >= 1, slot.action
            assert slot.dataset.n_negative >= 1, slot.action

    def test_bases_fit_before_first_execution(self, fresh_bus, light_switch, mocker):
        """Test both PCA bases are fit on the first observation, before anything moves"""
        trainer = make_trainer(light_switch)
        order = []
        real_fit, real_act = trainer.extractor.fit, trainer.world.act

        def fit(*args, **kwargs):
            order.append(("fit", args[2]))
            return real_fit(*args, **kwargs)

        def act(*args, **kwargs):
            order.append(("act", None))
            return real_act(*args, **kwargs)

        mocker.patch.object(trainer.extractor, "fit", side_effect=fit)
        mocker.patch.object(trainer.world, "act", side_effect=act)
        trainer.init()

        assert sorted(order[:2]) == sorted(("fit", a) for a in trainer.world.device.actions)
        assert all(kind == "act" for kind, _ in order[2:])
        assert len(order) > 2


# ============================================================================
# Practice
# ============================================================================


@pytest.mark.integration
class TestPractice:
    """Test practicing one behavior on one observation"""

    def test_respects_visit_budget(self, trained):
        """Test at most the visit budget of labels per behavior"""
        which = trained.world.device.applicable()
        slot = trained.session.slot(which)
        slot.convergence.budget = 2
        trained.session.slot(which.complement).convergence.budget = 2
        for s in trained.session.slots.values():
            s.convergence.begin_visit()
        before = len(slot.dataset)

        result = trained.practice(which, trained.world.observe(), trained.session.seed_point)

        assert result.labels <= 2
        assert len(slot.dataset) == before + result.labels
        assert slot.convergence.labels_this_visit == result.labels
        assert len(result.pool) == result.pool.size - result.labels

    def test_first_success_stops(self, trained):
        """Test the first-success rule ends practice at the first positive label"""
        which = trained.world.device.applicable()
        slot = trained.session.slot(which)
        for s in trained.session.slots.values():
            s.convergence.begin_visit()
        start = len(slot.dataset)

        result = trained.practice(
            which, trained.world.observe(), trained.session.seed_point, StopRule.FIRST_SUCCESS
        )

        new_labels = slot.dataset.labels[start:].tolist()
        assert new_labels.count(1) == (1 if result.succeeded else 0)
        if result.succeeded:
            assert new_labels[-1] == 1

    def test_practice_needs_session(self, fresh_bus, light_switch):
        """Test practicing before init"""
        trainer = make_trainer(light_switch)

        with pytest.raises(RuntimeError, match="init"):
            trainer.visit(0)


# ============================================================================
# Training loop
# ============================================================================


@pytest.mark.integration
class TestTraining:
    """Test visits and the label cap"""

    def test_visit_emits_and_counts(self, trained, fresh_bus):
        """Test a visit announces itself and labels at most the budget per action"""
        budget = trained.learner.visit_budget
        fresh_bus.clear_event_log()

        trained.visit(0)

        visits = fresh_bus.events(events.VISIT)
        assert len(visits) == 1
        assert visits[0].detail["pose"] == 0
        assert trained.session.visits == 1
        per_action = {}
        for event in label_events(fresh_bus):
            assert event.detail["pose"] == "0"
            per_action[event.detail["action"]] = per_action.get(event.detail["action"], 0) + 1
        assert all(count <= budget for count in per_action.values())

    def test_labels_lie_on_the_wall(self, trained, fresh_bus):
        """Test every practiced point is a point of the observed wall"""
        trained.visit(1)

        for event in label_events(fresh_bus):
            assert event.detail["point"][1] == pytest.approx(0.0, abs=1e-9)

    def test_label_cap(self, fresh_bus):
        """Test exceeding the cap raises with a partial report"""
        trainer = make_trainer(small_scenario(label_cap=2))
        trainer.init()

        with pytest.raises(ConvergenceError, match="cap of 2") as info:
            trainer.train_to_convergence()

        report = info.value.report
        assert report.converged is False
        assert report.visits == 1
        assert sum(c["total"] for c in report.labels.values()) == trainer.session.total_labels
        assert all(len(flags) == 8 for flags in report.pose_flags.values())

    @pytest.mark.slow
    def test_train_reports_consistently(self, fresh_bus, light_switch):
        """Test a full run ends converged or with a capped report that matches the session"""
        trainer = make_trainer(light_switch)
        try:
            report = trainer.train()
        except ConvergenceError as e:
            report = e.report

        session = trainer.session
        assert report.converged == session.converged
        assert report.visits == session.visits
        for slot in session.slots.values():
            assert report.labels[slot.action]["total"] == len(slot.dataset)
        # every labeled example was announced exactly once
        assert fresh_bus.emitted[events.LABEL] == session.total_labels
        if report.converged:
            assert all(session.pose_retired(i) for i in range(8))


# ============================================================================
# Evaluation
# ============================================================================


@pytest.mark.integration
class TestEvaluate:
    """Test execution trials"""

    def test_table_and_no_learning(self, trained, fresh_bus):
        """Test counts add up and trial data never reaches the session"""
        totals = {s.action: len(s.dataset) for s in trained.session.slots.values()}
        fresh_bus.clear_event_log()

        table = trained.evaluate(trials=2)

        assert list(table.columns) == [
            "action",
            "trials",
            "first_try",
            "second_try",
            "later_try",
            "failed",
        ]
        assert table["action"].tolist() == list(trained.world.device.actions)
        counts = table[["first_try", "second_try", "later_try", "failed"]].sum(axis=1)
        assert counts.tolist() == [2, 2]
        assert {s.action: len(s.dataset) for s in trained.session.slots.values()} == totals
        assert label_events(fresh_bus) == []
        attempts = fresh_bus.events(events.ATTEMPT)
        assert attempts and all(e.detail["phase"] == "evaluate" for e in attempts)

    def test_operate_keeps_labels(self, trained, fresh_bus):
        """Test operating during training adds every attempt to the dataset"""
        which = trained.world.device.applicable()
        slot = trained.session.slot(which)
        before = len(slot.dataset)

        report = trained.operate(which)

        assert len(slot.dataset) == before + report.tries
        assert len(label_events(fresh_bus, "operate")) == report.tries
        if report.succeeded:
            assert trained.world.device.is_goal_state(which)



# ============================================================================
# Packaged scenarios
# ============================================================================

PACKAGED = ("light_switch", "rocker", "drawer")


@pytest.fixture(scope="module")
def packaged_trainers():
    """Every packaged scenario trained to convergence from seed 0."""
    trainers = {}
    for name in PACKAGED:
        PracticeBus.reset()
        trainer = PairTrainer(standard_scenario(name), seed=0, name=name)
        trainer.train()
        trainers[name] = trainer
    yield trainers
    for trainer in trainers.values():
        trainer.destroy()
    PracticeBus.reset()


@pytest.mark.slow
@pytest.mark.integration
class TestPackagedScenarios:
    """Test label budgets and execution success at full resolution"""

    def test_first_visit_not_converged(self, fresh_bus):
        """Test the first practice visit on the light switch leaves pose 0 open"""
        trainer = PairTrainer(standard_scenario("light_switch"), seed=0)
        trainer.init()

        trainer.visit(0)

        assert fresh_bus.events(events.CONVERGED) == []
        assert not any(s.convergence.is_converged(0) for s in trainer.session.slots.values())

    def test_label_budget(self, packaged_trainers):
        """Test every behavior converges within 150 labels, median at most 110"""
        totals = {
            slot.action: len(slot.dataset)
            for trainer in packaged_trainers.values()
            for slot in trainer.session.slots.values()
        }

        assert len(totals) == 6
        assert all(trainer.session.converged for trainer in packaged_trainers.values())
        assert max(totals.values()) <= 150, totals
        assert np.median(list(totals.values())) <= 110, totals

    @pytest.mark.parametrize("name", PACKAGED)
    def test_executes_within_two_tries(self, packaged_trainers, name):
        """Test ten noisy trials per behavior each succeed on the first or second try"""
        table = packaged_trainers[name].evaluate(trials=10)

        for row in table.itertuples():
            assert row.failed == 0, row.action
            assert row.later_try == 0, row.action
            assert row.first_try + row.second_try == 10
