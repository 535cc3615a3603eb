"""Shared fixtures: the shipped ontology, the flight-search story and prototypes."""
import copy
import json
from pathlib import Path

import pytest

from uiverify.ontology_core import DEFAULT_ONTOLOGY_PATH, default_ontology
from uiverify.prototype_model import load_prototype
from uiverify.story_parser import load_story

FIXTURES = Path(__file__).parent / 'fixtures'

FLIGHT_STORY = FIXTURES / 'flight_search.story'
FLIGHT_PROTO = FIXTURES / 'flight.proto.json'
TEXT_FIELD_PROTO = FIXTURES / 'flight_search_as_text_field.proto.json'
MISSING_STATE_STORY = FIXTURES / 'missing_state.story'
CLAUSE_MISMATCH_STORY = FIXTURES / 'clause_mismatch.story'
BROKEN_STORY = FIXTURES / 'broken.story'
CYCLE_ONTOLOGY = FIXTURES / 'cycle.onto.json'


@pytest.fixture(scope='session')
def model():
    return default_ontology()


@pytest.fixture(scope='session')
def default_document():
    return json.loads(DEFAULT_ONTOLOGY_PATH.read_text(encoding='utf-8'))


@pytest.fixture
def document(default_document):
    """A mutable copy of the shipped ontology document."""
    return copy.deepcopy(default_document)


@pytest.fixture
def flight_story():
    return load_story(FLIGHT_STORY)


@pytest.fixture
def flight_proto(model):
    return load_prototype(FLIGHT_PROTO, model)


@pytest.fixture
def text_field_proto(model):
    return load_prototype(TEXT_FIELD_PROTO, model)


@pytest.fixture
def flight_proto_document():
    return json.loads(FLIGHT_PROTO.read_text(encoding='utf-8'))


@pytest.fixture
def clean_environment(monkeypatch):
    """Unset uiverify variables; anything set during the test is removed afterwards."""
    for name in ('UIVERIFY_ONTOLOGY', 'UIVERIFY_FORMAT', 'UIVERIFY_WORKERS'):
        monkeypatch.setenv(name, '')
        monkeypatch.delenv(name)
