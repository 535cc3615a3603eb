"""
User Story parser and step binder.

Story layout:
    User Story: <title>
    Narrative:
    As a <role>
    I want <feature>
    So that <benefit>
    Scenario: <title>
    Given/When/Then/And <step text>
"""
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

from uiverify.common import DocumentSyntaxError, read_document
from uiverify.logging_config import logger
from uiverify.ontology_core import ClauseRole, OntologyModel

TITLE_PATTERN = re.compile(r'^User Story:\s*(.*)$')
NARRATIVE_PATTERN = re.compile(r'^Narrative:\s*$')
ROLE_PATTERN = re.compile(r'^As an?\s+(.+)$')
FEATURE_PATTERN = re.compile(r'^I want\s+(.+)$')
BENEFIT_PATTERN = re.compile(r'^So that\s+(.+)$')
CRITERIA_PATTERN = re.compile(r'^Acceptance Criteria:')
SCENARIO_PATTERN = re.compile(r'^Scenario(?:\s+\d+)?:\s*(.*)$')
STEP_PATTERN = re.compile(r'^(Given|When|Then|And)\s+(.+)$')


@dataclass(frozen=True)
class Narrative:
    role: str
    feature: str
    benefit: str


@dataclass(frozen=True)
class Step:
    keyword: str
    clause: ClauseRole
    raw_text: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Scenario:
    title: str
    steps: Tuple[Step, ...]
    line: int = field(default=0, compare=False)

    def clauses(self) -> set:
        return {step.clause for step in self.steps}


@dataclass(frozen=True)
class UserStory:
    title: str
    narrative: Narrative
    scenarios: Tuple[Scenario, ...]
    path: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class BoundStep:
    step: Step
    behavior_id: str
    element_arg: Optional[str]
    value_args: Tuple[str, ...]
    pattern: str = field(default='', compare=False)


@dataclass(frozen=True)
class ScenarioBinding:
    """Steps bound in order; None where no template matches."""
    scenario: Scenario
    steps: Tuple[Optional[BoundStep], ...]
    index: int = 0


class _Expect(Enum):
    TITLE = 'User Story:'
    NARRATIVE = 'Narrative:'
    ROLE = 'As a'
    FEATURE = 'I want'
    BENEFIT = 'So that'
    SCENARIO = 'Scenario:'
    STEP = 'Given/When/Then/And'


class _StoryBuilder:
    """Line-driven state machine that accumulates one story."""

    def __init__(self, path: Optional[str]):
        self.path = path
        self.expect = _Expect.TITLE
        self.title = ''
        self.narrative = {}
        self.scenarios: List[Scenario] = []
        self.current_title: Optional[str] = None
        self.current_line = 0
        self.current_steps: List[Step] = []

    def error(self, message: str, line: int, column: int = 1) -> DocumentSyntaxError:
        return DocumentSyntaxError(message, self.path, line, column)

    def feed(self, text: str, line: int, column: int):
        handler = getattr(self, f"_on_{self.expect.name.lower()}")
        handler(text, line, column)

    def _expect_match(self, pattern, text, line, column):
        match = pattern.match(text)
        if not match:
            raise self.error(f"expected '{self.expect.value}'", line, column)
        return match

    def _on_title(self, text, line, column):
        title = self._expect_match(TITLE_PATTERN, text, line, column).group(1).strip()
        if not title:
            raise self.error("User Story title is empty", line, column)
        self.title = title
        self.expect = _Expect.NARRATIVE

    def _on_narrative(self, text, line, column):
        if not NARRATIVE_PATTERN.match(text):
            raise self.error("missing Narrative: expected 'Narrative:' after the title", line, column)
        self.expect = _Expect.ROLE

    def _on_role(self, text, line, column):
        self.narrative['role'] = self._expect_match(ROLE_PATTERN, text, line, column).group(1).strip()
        self.expect = _Expect.FEATURE

    def _on_feature(self, text, line, column):
        self.narrative['feature'] = self._expect_match(FEATURE_PATTERN, text, line, column).group(1).strip()
        self.expect = _Expect.BENEFIT

    def _on_benefit(self, text, line, column):
        self.narrative['benefit'] = self._expect_match(BENEFIT_PATTERN, text, line, column).group(1).strip()
        self.expect = _Expect.SCENARIO

    def _on_scenario(self, text, line, column):
        if CRITERIA_PATTERN.match(text) and not self.scenarios:
            return
        self._open_scenario(text, line, column)

    def _on_step(self, text, line, column):
        if SCENARIO_PATTERN.match(text):
            self._close_scenario()
            self._open_scenario(text, line, column)
            return
        if TITLE_PATTERN.match(text):
            raise self.error("a story file may contain exactly one User Story", line, column)
        match = STEP_PATTERN.match(text)
        if not match:
            raise self.error("expected a step starting with Given, When, Then or And", line, column)
        keyword, step_text = match.group(1), match.group(2).strip()
        if keyword == 'And':
            if not self.current_steps:
                raise self.error("the first step of a scenario cannot be 'And'", line, column)
            clause = self.current_steps[-1].clause
        else:
            clause = ClauseRole.from_keyword(keyword)
        self.current_steps.append(Step(keyword, clause, step_text, line))

    def _open_scenario(self, text, line, column):
        match = self._expect_match(SCENARIO_PATTERN, text, line, column)
        title = match.group(1).strip()
        if not title:
            raise self.error("Scenario title is empty", line, column)
        self.current_title = title
        self.current_line = line
        self.current_steps = []
        self.expect = _Expect.STEP

    def _close_scenario(self):
        present = {step.clause for step in self.current_steps}
        missing = [role for role in ClauseRole if role not in present]
        if missing:
            names = ', '.join(f"{role.keyword} ({role.value})" for role in missing)
            raise self.error(
                f"scenario '{self.current_title}' must contain at least one Condition, Event and Action step; "
                f"missing {names}",
                self.current_line,
            )
        self.scenarios.append(Scenario(self.current_title, tuple(self.current_steps), self.current_line))

    def finish(self, last_line: int) -> UserStory:
        if self.expect is _Expect.STEP:
            self._close_scenario()
        elif self.expect is _Expect.SCENARIO:
            raise self.error("a User Story needs at least one Scenario", last_line)
        else:
            raise self.error(f"unexpected end of story, expected '{self.expect.value}'", last_line)
        return UserStory(self.title, Narrative(**self.narrative), tuple(self.scenarios), self.path)


def parse_story(source: str, path: Optional[str] = None) -> UserStory:
    """Parse story text; raises DocumentSyntaxError with line/column on any violation."""
    builder = _StoryBuilder(path)
    lineno = 0
    for lineno, raw in enumerate(source.splitlines(), start=1):
        text = raw.strip()
        if not text or text.startswith('#'):
            continue
        column = len(raw) - len(raw.lstrip()) + 1
        builder.feed(text, lineno, column)
    story = builder.finish(max(lineno, 1))
    logger.info(f"Parsed story '{story.title}': {len(story.scenarios)} scenario(s)")
    return story


def load_story(path: Union[str, Path]) -> UserStory:
    return parse_story(read_document(path), str(path))


def serialize_story(story: UserStory) -> str:
    """Canonical story text; parse_story(serialize_story(s)) == s."""
    lines = [
        f"User Story: {story.title}",
        "Narrative:",
        f"As a {story.narrative.role}",
        f"I want {story.narrative.feature}",
        f"So that {story.narrative.benefit}",
    ]
    for scenario in story.scenarios:
        lines.append(f"Scenario: {scenario.title}")
        lines.extend(f"{step.keyword} {step.raw_text}" for step in scenario.steps)
    return '\n'.join(lines) + '\n'


def bind_scenario(scenario: Scenario, model: OntologyModel, index: int = 0) -> ScenarioBinding:
    bound = []
    for step in scenario.steps:
        match = model.match_step(step.raw_text)
        if match is None:
            logger.debug(f"No behavior matches step at line {step.line}: {step.raw_text}")
            bound.append(None)
            continue
        bound.append(BoundStep(step, match.behavior.id, match.element_arg, match.value_args,
                               match.template.pattern))
    return ScenarioBinding(scenario, tuple(bound), index)


def bind_steps(story: UserStory, model: OntologyModel) -> List[ScenarioBinding]:
    """Bind every step of every scenario; unmatched steps are collected, not raised."""
    return [bind_scenario(scenario, model, index) for index, scenario in enumerate(story.scenarios)]
