"""Tests for User Story parsing, serialization and step binding."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uiverify.common import DocumentSyntaxError
from uiverify.ontology_core import ClauseRole
from uiverify.story_parser import (
    Narrative, Scenario, Step, UserStory, bind_scenario, bind_steps, load_story, parse_story,
    serialize_story,
)

from tests.conftest import BROKEN_STORY, FLIGHT_STORY, MISSING_STATE_STORY

MINIMAL = """\
User Story: Minimal
Narrative:
As a user
I want something
So that it works
Scenario: Smallest
Given I go to "Home"
When I click on "Go"
Then will be displayed "Done"
"""


def test_flight_story_structure(flight_story):
    assert flight_story.title == 'Flight Tickets Search'
    assert flight_story.narrative.role == 'frequent traveler'
    assert flight_story.narrative.feature.startswith('to be able to search tickets')
    assert len(flight_story.scenarios) == 1
    scenario = flight_story.scenarios[0]
    assert scenario.title == 'One-Way Tickets Search'
    assert len(scenario.steps) == 8
    clauses = [step.clause for step in scenario.steps]
    assert clauses.count(ClauseRole.CONDITION) == 1
    assert clauses.count(ClauseRole.EVENT) == 6
    assert clauses.count(ClauseRole.ACTION) == 1


def test_steps_keep_source_lines(flight_story):
    steps = flight_story.scenarios[0].steps
    assert [step.line for step in steps] == list(range(7, 15))
    assert flight_story.path == str(FLIGHT_STORY)


def test_minimal_story_parses():
    story = parse_story(MINIMAL)
    assert [s.keyword for s in story.scenarios[0].steps] == ['Given', 'When', 'Then']


def test_and_inherits_preceding_clause():
    story = parse_story(MINIMAL.replace('Then will be displayed "Done"',
                                        'And I click on "Again"\nThen will be displayed "Done"'))
    steps = story.scenarios[0].steps
    assert steps[2].keyword == 'And'
    assert steps[2].clause is ClauseRole.EVENT


def test_missing_then_is_rejected():
    source = MINIMAL.replace('Then will be displayed "Done"\n', '')
    with pytest.raises(DocumentSyntaxError) as excinfo:
        parse_story(source)
    assert 'Condition, Event and Action' in excinfo.value.message
    assert excinfo.value.line == 6


def test_and_first_step_is_rejected():
    with pytest.raises(DocumentSyntaxError) as excinfo:
        load_story(BROKEN_STORY)
    assert (excinfo.value.line, excinfo.value.column) == (7, 1)
    assert str(excinfo.value).startswith(f"{BROKEN_STORY}:7:1:")


def test_missing_narrative_is_rejected():
    source = MINIMAL.replace('Narrative:\n', '')
    with pytest.raises(DocumentSyntaxError) as excinfo:
        parse_story(source)
    assert 'Narrative' in excinfo.value.message
    assert excinfo.value.line == 2


def test_second_story_is_rejected():
    with pytest.raises(DocumentSyntaxError):
        parse_story(MINIMAL + MINIMAL)


def test_story_without_scenarios_is_rejected():
    source = MINIMAL.split('Scenario:')[0]
    with pytest.raises(DocumentSyntaxError):
        parse_story(source)


def test_keywords_are_case_sensitive():
    with pytest.raises(DocumentSyntaxError):
        parse_story(MINIMAL.replace('When I click', 'when I click'))


def test_template_headers_are_tolerated():
    source = MINIMAL.replace('As a user', 'As an administrator')
    source = source.replace('Scenario: Smallest', 'Acceptance Criteria:\nScenario 1: Smallest')
    story = parse_story(source)
    assert story.narrative.role == 'administrator'
    assert story.scenarios[0].title == 'Smallest'
    assert parse_story(serialize_story(story)) == story


def test_comments_and_blank_lines_are_skipped():
    source = '# flight search\n\n' + MINIMAL.replace('Given', '\n  Given')
    assert parse_story(source) == parse_story(MINIMAL)


# ============== ROUND TRIP ==============

@pytest.mark.parametrize('path', [FLIGHT_STORY, MISSING_STATE_STORY])
def test_fixture_round_trip(path):
    story = load_story(path)
    assert parse_story(serialize_story(story)) == story


def _phrases():
    words = st.from_regex(r'[A-Za-z][A-Za-z0-9 ,.]{0,20}[A-Za-z0-9.]', fullmatch=True)
    return words.map(str.strip).filter(bool)


_step_texts = st.sampled_from([
    'I go to "{}"', 'I click on "{}"', 'I choose "{}"', 'will be displayed "{}"', '"{}" is displayed',
])


@st.composite
def stories(draw):
    scenarios = []
    for index in range(draw(st.integers(min_value=1, max_value=3))):
        steps = []
        for keyword, clause in (('Given', ClauseRole.CONDITION), ('When', ClauseRole.EVENT),
                                ('Then', ClauseRole.ACTION)):
            for position in range(draw(st.integers(min_value=1, max_value=3))):
                text = draw(_step_texts).format(draw(_phrases()))
                steps.append(Step('And' if position else keyword, clause, text))
        scenarios.append(Scenario(f"{draw(_phrases())} {index}", tuple(steps)))
    narrative = Narrative(draw(_phrases()), draw(_phrases()), draw(_phrases()))
    return UserStory(draw(_phrases()), narrative, tuple(scenarios))


@given(stories())
@settings(max_examples=200)
def test_generated_round_trip(story):
    parsed = parse_story(serialize_story(story))
    assert parsed == story
    assert parse_story(serialize_story(parsed)) == parsed


# ============== BINDING ==============

def test_flight_story_binds_to_seven_behaviors(flight_story, model):
    (binding,) = bind_steps(flight_story, model)
    assert None not in binding.steps
    assert [b.behavior_id for b in binding.steps] == [
        'goTo', 'choose', 'typeAndChooseInTheField', 'typeAndChooseInTheField',
        'chooseTheOptionOfValueInTheField', 'chooseReferringTo', 'clickOn', 'willBeDisplayed',
    ]
    assert len({b.behavior_id for b in binding.steps}) == 7


def test_binding_arguments(flight_story, model):
    steps = bind_scenario(flight_story.scenarios[0], model).steps
    click = steps[6]
    assert (click.behavior_id, click.element_arg, click.step.clause) == ('clickOn', 'Search', ClauseRole.EVENT)
    choose = steps[5]
    assert choose.value_args == ('12/15/2016',)
    assert choose.element_arg == 'Depart'
    type_and_choose = steps[2]
    assert type_and_choose.element_arg == 'From'
    assert type_and_choose.value_args == ('Paris', 'CDG - Paris Ch De Gaulle, France')


def test_unknown_step_is_collected(model):
    story = parse_story(MINIMAL.replace('When I click on "Go"', 'When I frobnicate "X"'))
    (binding,) = bind_steps(story, model)
    assert binding.steps[1] is None
    assert [b.behavior_id for b in binding.steps if b is not None] == ['goTo', 'willBeDisplayed']


def test_and_resolution_does_not_change_binding(flight_story, model):
    scenario = flight_story.scenarios[0]
    resolved = Scenario(scenario.title, tuple(
        Step(step.clause.keyword, step.clause, step.raw_text, step.line) for step in scenario.steps
    ))
    original = bind_scenario(scenario, model).steps
    rewritten = bind_scenario(resolved, model).steps
    assert [(b.behavior_id, b.element_arg, b.value_args, b.step.clause) for b in original] == \
        [(b.behavior_id, b.element_arg, b.value_args, b.step.clause) for b in rewritten]


def test_bindings_carry_scenario_index(model):
    story = parse_story(MINIMAL + 'Scenario: Smallest\nGiven I go to "Home"\nWhen I click on "Go"\nThen will be displayed "Done"\n')
    assert [binding.index for binding in bind_steps(story, model)] == [0, 1]


def test_invalid_utf8_is_a_positioned_syntax_error(tmp_path):
    path = tmp_path / 'latin1.story'
    path.write_bytes(MINIMAL.replace('Go', 'G\xf6').encode('latin-1'))
    with pytest.raises(DocumentSyntaxError) as excinfo:
        load_story(path)
    error = excinfo.value
    assert (error.path, error.line, error.column) == (str(path), 8, 19)
    assert 'UTF-8' in error.message
