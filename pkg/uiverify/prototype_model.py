"""
Prototype model: Presentation (states of typed widgets) plus Dialog
(transitions labeled by scenario titles), validated against the ontology.
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import pydantic
from pydantic import BaseModel, Field

from uiverify.common import DocumentSyntaxError, UiVerifyError, fold_name, read_document, schema_error
from uiverify.logging_config import logger
from uiverify.ontology_core import OntologyModel
from uiverify.validators import validator


class Platform(Enum):
    WEB = 'Web'
    MOBILE = 'Mobile'
    DESKTOP = 'Desktop'


@dataclass(frozen=True)
class Widget:
    name: str
    element_class: str
    properties: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class State:
    name: str
    widgets: Tuple[Widget, ...] = ()


@dataclass(frozen=True)
class Transition:
    scenario_title: str
    source: str
    target: str


@dataclass(frozen=True)
class Prototype:
    name: str
    platforms: frozenset
    states: Tuple[State, ...]
    transitions: Tuple[Transition, ...]
    initial_state: str

    def state_names(self) -> List[str]:
        return [state.name for state in self.states]


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    locus: str
    message: str


class ValidationError(UiVerifyError):
    def __init__(self, issues: List[ValidationIssue], path: Optional[str] = None):
        self.issues = list(issues)
        self.path = path
        details = '; '.join(f"{i.code} at {i.locus}: {i.message}" for i in self.issues)
        prefix = f"{path}: " if path else ''
        super().__init__(f"{prefix}invalid prototype ({len(self.issues)} issue(s)): {details}")


# ============== LOOKUPS ==============

def find_widget(state: State, name: str) -> Optional[Widget]:
    """Case-insensitive exact-name lookup."""
    if not name:
        return None
    key = fold_name(name)
    for widget in state.widgets:
        if fold_name(widget.name) == key:
            return widget
    return None


def find_state(proto: Prototype, name: str) -> Optional[State]:
    if not name:
        return None
    key = fold_name(name)
    for state in proto.states:
        if fold_name(state.name) == key:
            return state
    return None


def find_transition(proto: Prototype, source: str, scenario_title: str) -> Optional[Transition]:
    source_key, title_key = fold_name(source), fold_name(scenario_title)
    for transition in proto.transitions:
        if fold_name(transition.source) == source_key and fold_name(transition.scenario_title) == title_key:
            return transition
    return None


def unreachable_states(proto: Prototype) -> List[str]:
    """States no transition path reaches from the initial state."""
    initial = find_state(proto, proto.initial_state)
    if initial is None:
        return proto.state_names()
    reached = {fold_name(initial.name)}
    frontier = [initial.name]
    while frontier:
        source = fold_name(frontier.pop())
        for transition in proto.transitions:
            target = fold_name(transition.target)
            if fold_name(transition.source) == source and target not in reached:
                reached.add(target)
                frontier.append(transition.target)
    return [state.name for state in proto.states if fold_name(state.name) not in reached]


# ============== VALIDATION ==============

def validate_prototype(proto: Prototype, model: OntologyModel) -> List[ValidationIssue]:
    issues: List[ValidationIssue] = []

    def add(code, locus, message):
        issues.append(ValidationIssue(code, locus, message))

    if not proto.platforms:
        add('NO_PLATFORM', 'prototype', "a prototype is built for at least one platform")

    seen_states = set()
    for state in proto.states:
        state_key = fold_name(state.name)
        if state_key in seen_states:
            add('DUPLICATE_STATE', f"state:{state.name}", f"state '{state.name}' is declared twice")
        seen_states.add(state_key)

        seen_widgets = set()
        for widget in state.widgets:
            locus = f"state:{state.name}/widget:{widget.name}"
            widget_key = fold_name(widget.name)
            if widget_key in seen_widgets:
                add('DUPLICATE_WIDGET', locus, f"widget '{widget.name}' appears twice in '{state.name}'")
            seen_widgets.add(widget_key)

            element = model.classes.get(widget.element_class)
            if element is None:
                add('UNKNOWN_CLASS', locus, f"undeclared element class '{widget.element_class}'")
                continue
            if element.abstract:
                add('ABSTRACT_CLASS', locus, f"abstract class '{element.id}' cannot be instantiated")
            closure = model.subclass_closure(element.id)
            for key, value in widget.properties.items():
                prop = model.data_properties.get(key)
                if prop is None:
                    add('UNKNOWN_PROPERTY', locus, f"undeclared data property '{key}'")
                    continue
                if not closure & prop.applies_to:
                    add('PROPERTY_NOT_APPLICABLE', locus,
                        f"data property '{key}' does not apply to '{element.id}'")
                if not validator.conforms(prop.range, value):
                    add('BAD_DATATYPE', locus, f"value {value!r} of '{key}' is not a valid {prop.range}")

    if find_state(proto, proto.initial_state) is None:
        add('UNKNOWN_INITIAL_STATE', 'prototype', f"initial state '{proto.initial_state}' is not declared")

    seen_transitions = set()
    for transition in proto.transitions:
        locus = f"transition:{transition.scenario_title}"
        for end in (transition.source, transition.target):
            if find_state(proto, end) is None:
                add('DANGLING_TRANSITION', locus, f"transition endpoint '{end}' is not a declared state")
        key = (fold_name(transition.source), fold_name(transition.scenario_title))
        if key in seen_transitions:
            add('DUPLICATE_TRANSITION', locus,
                f"'{transition.source}' already has a transition for scenario '{transition.scenario_title}'")
        seen_transitions.add(key)

    return issues


# ============== DOCUMENTS ==============

class WidgetEntry(BaseModel):
    name: str
    element_class: str = Field(alias='class')
    properties: Dict[str, Any] = Field(default_factory=dict)


class StateEntry(BaseModel):
    name: str
    widgets: List[WidgetEntry] = Field(default_factory=list)


class TransitionEntry(BaseModel):
    scenario: str = Field(..., description="Title of the scenario that fires the transition.")
    source: str
    target: str


class PrototypeDocument(BaseModel):
    """Schema of a `*.proto.json` document."""
    name: str
    platforms: List[Platform]
    initial_state: str
    states: List[StateEntry]
    transitions: List[TransitionEntry] = Field(default_factory=list)


def prototype_from_document(data: Any, path: Optional[str] = None) -> Prototype:
    try:
        document = PrototypeDocument.model_validate(data)
    except pydantic.ValidationError as e:
        raise schema_error(e, path) from None
    states = tuple(
        State(entry.name, tuple(Widget(w.name, w.element_class, dict(w.properties)) for w in entry.widgets))
        for entry in document.states
    )
    return Prototype(
        name=document.name,
        platforms=frozenset(document.platforms),
        states=states,
        transitions=tuple(Transition(t.scenario, t.source, t.target) for t in document.transitions),
        initial_state=document.initial_state,
    )


def loads_prototype(text: str, model: OntologyModel, path: Optional[str] = None) -> Prototype:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentSyntaxError(e.msg, path, e.lineno, e.colno) from None
    proto = prototype_from_document(data, path)
    issues = validate_prototype(proto, model)
    if issues:
        raise ValidationError(issues, path)
    for name in unreachable_states(proto):
        logger.warning(f"Prototype '{proto.name}': state '{name}' is unreachable from '{proto.initial_state}'")
    logger.info(f"Loaded prototype '{proto.name}': {len(proto.states)} states, "
                f"{len(proto.transitions)} transitions")
    return proto


def load_prototype(path: Union[str, Path], model: OntologyModel) -> Prototype:
    return loads_prototype(read_document(path), model, str(path))


def dump_prototype(proto: Prototype) -> Dict[str, Any]:
    return {
        'name': proto.name,
        'platforms': [p.value for p in Platform if p in proto.platforms],
        'initial_state': proto.initial_state,
        'states': [
            {
                'name': state.name,
                'widgets': [
                    {'name': w.name, 'class': w.element_class, 'properties': dict(w.properties)}
                    for w in state.widgets
                ],
            }
            for state in proto.states
        ],
        'transitions': [
            {'scenario': t.scenario_title, 'source': t.source, 'target': t.target}
            for t in proto.transitions
        ],
    }


def dumps_prototype(proto: Prototype) -> str:
    return json.dumps(dump_prototype(proto), indent=2, ensure_ascii=False) + '\n'
