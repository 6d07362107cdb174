"""
Test suite for Event structures (events.py)

- ModuleStatus enum
- EventMetadata dataclass
- PracticeEvent dataclass
"""

import dataclasses
from datetime import datetime

import pytest

from practice_bus.core import events
from practice_bus.core.events import EventMetadata, ModuleStatus, PracticeEvent

# ============================================================================
# ModuleStatus Tests
# ============================================================================


@pytest.mark.unit
class TestModuleStatus:
    """Test ModuleStatus enum"""

    def test_status_values(self):
        """Test that every lifecycle state has its string value"""
        assert [s.value for s in ModuleStatus] == [
            "uninitialized",
            "initializing",
            "ready",
            "error",
            "destroyed",
        ]

    def test_status_equality(self):
        """Test that status values can be compared"""
        assert ModuleStatus.READY == ModuleStatus.READY
        assert ModuleStatus.READY != ModuleStatus.ERROR


# ============================================================================
# EventMetadata Tests
# ============================================================================


@pytest.mark.unit
class TestEventMetadata:
    """Test EventMetadata dataclass"""

    def test_create_factory_method(self):
        """Test EventMetadata.create() fills source, version and sequence"""
        meta = EventMetadata.create(source="trainer", version="1.0.0", sequence=4)

        assert meta.source == "trainer"
        assert meta.version == "1.0.0"
        assert meta.sequence == 4

    def test_sequence_defaults_to_zero(self):
        """Test the default sequence number"""
        assert EventMetadata.create(source="x", version="1").sequence == 0

    def test_timestamp_is_current(self):
        """Test that timestamp is set to current time in milliseconds"""
        before = int(datetime.now().timestamp() * 1000)
        meta = EventMetadata.create(source="Test", version="1.0.0")
        after = int(datetime.now().timestamp() * 1000)

        assert before <= meta.timestamp <= after

    def test_metadata_equality(self):
        """Test metadata equality comparison"""
        meta1 = EventMetadata(timestamp=1704067200000, source="a", version="1", sequence=1)
        meta2 = EventMetadata(timestamp=1704067200000, source="a", version="1", sequence=1)
        meta3 = EventMetadata(timestamp=1704067200000, source="a", version="1", sequence=2)

        assert meta1 == meta2
        assert meta1 != meta3


# ============================================================================
# PracticeEvent Tests
# ============================================================================


@pytest.mark.unit
class TestPracticeEvent:
    """Test PracticeEvent dataclass"""

    def test_event_holds_type_and_detail(self):
        """Test event construction"""
        meta = EventMetadata.create(source="trainer", version="0.3.0", sequence=9)
        event = PracticeEvent(type="practice:label", detail={"label": -1}, _meta=meta)

        assert event.type == "practice:label"
        assert event.detail == {"label": -1}
        assert event._meta is meta

    def test_event_string_representation(self):
        """Test that str() names the type, source and sequence"""
        meta = EventMetadata.create(source="trainer", version="0.3.0", sequence=9)
        text = str(PracticeEvent(type="practice:visit", detail={}, _meta=meta))

        assert "practice:visit" in text
        assert "trainer" in text
        assert "seq=9" in text

    def test_event_is_immutable(self):
        """Test listeners cannot rewrite an event other listeners will see"""
        meta = EventMetadata.create(source="trainer", version="0.3.0")
        event = PracticeEvent(type="practice:label", detail={}, _meta=meta)

        with pytest.raises(dataclasses.FrozenInstanceError):
            event.type = "practice:visit"

    def test_source_shortcut(self):
        """Test source reads through to the metadata"""
        meta = EventMetadata.create(source="trace", version="0.3.0")

        assert PracticeEvent(type="x:y", detail=None, _meta=meta).source == "trace"


@pytest.mark.unit
def test_library_event_names():
    """Test every library event type is area-prefixed"""
    names = [events.LABEL, events.VISIT, events.CONVERGED, events.INITIALIZED, events.ATTEMPT]

    assert len(set(names)) == len(names)
    assert all(name.split(":")[0] in ("practice", "execution") for name in names)
