"""
Static linting of bound stories and execution of scenarios as dialog
transitions over a prototype.

Lint and execution share one step evaluator: execution stops at the first
failing step, lint keeps walking and collects every finding. A scenario that
lints clean therefore cannot fail execution with an element-level finding.
"""
import asyncio
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from uiverify.common import fold_name
from uiverify.localization import get_text
from uiverify.logging_config import logger
from uiverify.ontology_core import BehaviorDef, ClauseRole, OntologyModel, Resolution
from uiverify.prototype_model import Prototype, find_state, find_transition, find_widget
from uiverify.story_parser import (
    BoundStep, Scenario, ScenarioBinding, Step, UserStory, bind_scenario, bind_steps,
)


class StepStatus(Enum):
    PASS = 'Pass'
    FAIL = 'Fail'
    UNTESTED = 'Untested'

    @property
    def symbol(self) -> str:
        return {'Pass': 'V', 'Fail': 'X', 'Untested': '?'}[self.value]


class FindingCode(Enum):
    UNKNOWN_BEHAVIOR = 'UnknownBehavior'
    CLAUSE_MISMATCH = 'ClauseMismatch'
    WIDGET_NOT_FOUND = 'WidgetNotFound'
    STATE_NOT_FOUND = 'StateNotFound'
    INCOMPATIBLE_ELEMENT = 'IncompatibleElement'
    TRANSITION_NOT_FOUND = 'TransitionNotFound'


ELEMENT_LEVEL_CODES = frozenset({
    FindingCode.INCOMPATIBLE_ELEMENT,
    FindingCode.WIDGET_NOT_FOUND,
    FindingCode.STATE_NOT_FOUND,
    FindingCode.CLAUSE_MISMATCH,
})


@dataclass(frozen=True)
class StepLocus:
    """Position of a step: scenario title and index within the story, step index within the scenario."""
    scenario_title: str
    scenario_index: int
    index: int
    line: int
    text: str


@dataclass(frozen=True)
class Finding:
    """A lint or execution finding.

    `state` is set for every prototype-level code, `widget`/`widget_class`/
    `allowed` only for WidgetNotFound and IncompatibleElement.
    """
    code: FindingCode
    locus: StepLocus
    message: str
    behavior_id: Optional[str] = None
    state: Optional[str] = None
    widget: Optional[str] = None
    widget_class: Optional[str] = None
    allowed: Tuple[str, ...] = ()


@dataclass(frozen=True)
class StepResult:
    step: Step
    bound_step: Optional[BoundStep]
    status: StepStatus
    finding: Optional[Finding] = None


@dataclass(frozen=True)
class ScenarioResult:
    title: str
    steps: Tuple[StepResult, ...]

    @property
    def overall(self) -> StepStatus:
        if all(r.status is StepStatus.PASS for r in self.steps):
            return StepStatus.PASS
        return StepStatus.FAIL

    @property
    def failure(self) -> Optional[Finding]:
        for result in self.steps:
            if result.finding is not None:
                return result.finding
        return None

    def statuses(self) -> List[StepStatus]:
        return [r.status for r in self.steps]


@dataclass(frozen=True)
class SkippedScenario:
    """A scenario not run because an earlier one failed under fail-fast."""
    title: str
    step_count: int


@dataclass(frozen=True)
class VerificationReport:
    story_title: str
    scenarios: Tuple[ScenarioResult, ...]
    skipped: Tuple[SkippedScenario, ...] = ()

    @property
    def counts(self) -> Dict[str, int]:
        tally = {'pass': 0, 'fail': 0, 'untested': 0}
        for scenario in self.scenarios:
            for result in scenario.steps:
                tally[result.status.value.lower()] += 1
        tally['untested'] += sum(s.step_count for s in self.skipped)
        return tally

    @property
    def passed(self) -> bool:
        return not self.skipped and all(s.overall is StepStatus.PASS for s in self.scenarios)


# ============== STEP EVALUATION ==============

class _Skip:
    """Marker: the step could not be evaluated because the cursor state is unknown."""


SKIPPED = _Skip()


class ScenarioWalk:
    """Walks one scenario over a prototype with a current-state cursor."""

    def __init__(self, binding: ScenarioBinding, model: OntologyModel, proto: Prototype):
        self.binding = binding
        self.model = model
        self.proto = proto
        self.cursor: Optional[str] = proto.initial_state
        self.transitioned = False

    @property
    def title(self) -> str:
        return self.binding.scenario.title

    def locus(self, index: int) -> StepLocus:
        step = self.binding.scenario.steps[index]
        return StepLocus(self.title, self.binding.index, index, step.line, step.raw_text)

    def evaluate(self, index: int):
        """Return a Finding, None for success, or SKIPPED when the cursor is lost."""
        step = self.binding.scenario.steps[index]
        bound = self.binding.steps[index]
        if bound is None:
            return unknown_behavior(self.locus(index))
        behavior = self.model.get_behavior(bound.behavior_id)

        if step.clause is ClauseRole.ACTION and not self.transitioned:
            self.transitioned = True
            if self.cursor is None:
                return SKIPPED
            transition = find_transition(self.proto, self.cursor, self.title)
            if transition is None:
                source, self.cursor = self.cursor, None
                return Finding(
                    FindingCode.TRANSITION_NOT_FOUND, self.locus(index),
                    get_text('en', 'transition_not_found', state=source, scenario=self.title),
                    behavior_id=behavior.id, state=source,
                )
            self.cursor = find_state(self.proto, transition.target).name

        if behavior.resolves is Resolution.STATE:
            finding = self._go_to(index, bound, behavior)
        elif self.cursor is None:
            return SKIPPED
        elif behavior.resolves is Resolution.TEXT:
            finding = self._displayed_text(index, bound, behavior)
        else:
            finding = self._widget(index, bound, behavior)
        if finding is not None:
            return finding

        if step.clause not in behavior.roles:
            return clause_mismatch(self.locus(index), step, behavior)
        return None

    def _go_to(self, index: int, bound: BoundStep, behavior: BehaviorDef) -> Optional[Finding]:
        name = bound.element_arg or ''
        state = find_state(self.proto, name)
        if state is None:
            self.cursor = None
            return Finding(
                FindingCode.STATE_NOT_FOUND, self.locus(index),
                get_text('en', 'state_not_found', name=name, prototype=self.proto.name),
                behavior_id=behavior.id, state=name,
            )
        self.cursor = state.name
        return None

    def _widget(self, index: int, bound: BoundStep, behavior: BehaviorDef) -> Optional[Finding]:
        if bound.element_arg is None:
            return None
        state = find_state(self.proto, self.cursor)
        widget = find_widget(state, bound.element_arg)
        if widget is None:
            return Finding(
                FindingCode.WIDGET_NOT_FOUND, self.locus(index),
                get_text('en', 'widget_not_found', name=bound.element_arg, state=state.name),
                behavior_id=behavior.id, state=state.name, widget=bound.element_arg,
            )
        if not self.model.element_satisfies(widget.element_class, behavior.id):
            return self._incompatible(index, behavior, state.name, widget.name, widget.element_class)
        return None

    def _displayed_text(self, index: int, bound: BoundStep, behavior: BehaviorDef) -> Optional[Finding]:
        if bound.element_arg is not None:
            expected = bound.element_arg
        else:
            expected = bound.value_args[0] if bound.value_args else ''
        state = find_state(self.proto, self.cursor)
        candidates = [
            w for w in state.widgets
            if fold_name(w.name) == fold_name(expected) or w.properties.get('text') == expected
        ]
        if any(self.model.element_satisfies(w.element_class, behavior.id) for w in candidates):
            return None
        if candidates:
            widget = candidates[0]
            return self._incompatible(index, behavior, state.name, widget.name, widget.element_class)
        return Finding(
            FindingCode.WIDGET_NOT_FOUND, self.locus(index),
            get_text('en', 'text_not_found', text=expected, state=state.name),
            behavior_id=behavior.id, state=state.name, widget=expected,
        )

    def _incompatible(self, index, behavior, state_name, widget_name, widget_class) -> Finding:
        allowed = tuple(sorted(behavior.allowed_elements))
        return Finding(
            FindingCode.INCOMPATIBLE_ELEMENT, self.locus(index),
            get_text('en', 'incompatible_element', name=widget_name, widget_class=widget_class,
                     behavior=behavior.id, allowed=', '.join(allowed)),
            behavior_id=behavior.id, state=state_name, widget=widget_name,
            widget_class=widget_class, allowed=allowed,
        )


def unknown_behavior(locus: StepLocus) -> Finding:
    return Finding(FindingCode.UNKNOWN_BEHAVIOR, locus, get_text('en', 'unknown_behavior', text=locus.text))


def clause_mismatch(locus: StepLocus, step: Step, behavior: BehaviorDef) -> Finding:
    roles = ', '.join(role.value for role in ClauseRole if role in behavior.roles)
    return Finding(
        FindingCode.CLAUSE_MISMATCH, locus,
        get_text('en', 'clause_mismatch', behavior=behavior.id, clause=step.clause.value, roles=roles),
        behavior_id=behavior.id,
    )


# ============== LINT ==============

def _lint_binding(binding: ScenarioBinding, model: OntologyModel) -> List[Finding]:
    findings = []
    for index, (step, bound) in enumerate(zip(binding.scenario.steps, binding.steps)):
        locus = StepLocus(binding.scenario.title, binding.index, index, step.line, step.raw_text)
        if bound is None:
            findings.append(unknown_behavior(locus))
            continue
        behavior = model.get_behavior(bound.behavior_id)
        if step.clause not in behavior.roles:
            findings.append(clause_mismatch(locus, step, behavior))
    return findings


def lint(story: UserStory, model: OntologyModel) -> List[Finding]:
    """Ontology-only checks: unbindable steps and clause/role mismatches."""
    findings = []
    for binding in bind_steps(story, model):
        findings.extend(_lint_binding(binding, model))
    return findings


def lint_against_prototype(story: UserStory, model: OntologyModel, proto: Prototype) -> List[Finding]:
    """Lint plus a non-stopping walk of every scenario over the prototype."""
    findings = []
    for binding in bind_steps(story, model):
        collected = {(f.locus.index, f.code): f for f in _lint_binding(binding, model)}
        walk = ScenarioWalk(binding, model, proto)
        for index in range(len(binding.steps)):
            outcome = walk.evaluate(index)
            if isinstance(outcome, Finding):
                collected.setdefault((index, outcome.code), outcome)
        findings.extend(f for _, f in sorted(collected.items(), key=lambda item: item[0][0]))
    return findings


# ============== EXECUTION ==============

def execute_binding(binding: ScenarioBinding, model: OntologyModel, proto: Prototype) -> ScenarioResult:
    walk = ScenarioWalk(binding, model, proto)
    results = []
    failed = False
    for index, (step, bound) in enumerate(zip(binding.scenario.steps, binding.steps)):
        if failed:
            results.append(StepResult(step, bound, StepStatus.UNTESTED))
            continue
        outcome = walk.evaluate(index)
        if isinstance(outcome, Finding):
            logger.info(f"Scenario '{walk.title}' step {index + 1} failed: {outcome.code.value}")
            results.append(StepResult(step, bound, StepStatus.FAIL, outcome))
            failed = True
        else:
            results.append(StepResult(step, bound, StepStatus.PASS))
    return ScenarioResult(binding.scenario.title, tuple(results))


def execute_scenario(scenario: Scenario, model: OntologyModel, proto: Prototype,
                     index: int = 0) -> ScenarioResult:
    """Run one scenario from the initial state; the first failure leaves the rest untested."""
    return execute_binding(bind_scenario(scenario, model, index), model, proto)


def _assemble(story: UserStory, results: List[ScenarioResult], fail_fast: bool) -> VerificationReport:
    kept, skipped = [], []
    for scenario, result in zip(story.scenarios, results):
        if skipped or (fail_fast and kept and kept[-1].overall is StepStatus.FAIL):
            skipped.append(SkippedScenario(scenario.title, len(scenario.steps)))
        else:
            kept.append(result)
    return VerificationReport(story.title, tuple(kept), tuple(skipped))


def execute_story(story: UserStory, model: OntologyModel, proto: Prototype,
                  fail_fast: bool = False) -> VerificationReport:
    """Run each scenario independently with a fresh cursor, in source order."""
    results = []
    for index, scenario in enumerate(story.scenarios):
        result = execute_scenario(scenario, model, proto, index)
        results.append(result)
        if fail_fast and result.overall is StepStatus.FAIL:
            break
    results.extend([None] * (len(story.scenarios) - len(results)))
    return _assemble(story, results, fail_fast)


async def execute_story_async(story: UserStory, model: OntologyModel, proto: Prototype,
                              workers: int = 4, fail_fast: bool = False) -> VerificationReport:
    """Same report as execute_story, with scenarios run concurrently in a thread pool."""
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = await asyncio.gather(*[
            loop.run_in_executor(executor, execute_scenario, scenario, model, proto, index)
            for index, scenario in enumerate(story.scenarios)
        ])
    return _assemble(story, list(results), fail_fast)
