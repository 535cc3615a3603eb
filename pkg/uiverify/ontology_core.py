"""
Behavior ontology: interaction-element classes, data properties, behaviors
with their phrase templates, and the consistency checker.

The model is immutable after construction and safe to share between threads.
"""
import json
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from uiverify.common import (
    DocumentSyntaxError, UiVerifyError, UnknownBehaviorError, UnknownClassError,
    normalize_space, read_document, schema_error,
)
from uiverify.logging_config import logger
from uiverify.validators import Identifier

DEFAULT_ONTOLOGY_PATH = Path(__file__).parent / 'data' / 'default.onto.json'


class ClauseRole(Enum):
    CONDITION = 'Condition'
    EVENT = 'Event'
    ACTION = 'Action'

    @property
    def keyword(self) -> str:
        return _ROLE_KEYWORDS[self]

    @classmethod
    def from_keyword(cls, keyword: str) -> 'ClauseRole':
        return _KEYWORD_ROLES[keyword]


_KEYWORD_ROLES = {
    'Given': ClauseRole.CONDITION,
    'When': ClauseRole.EVENT,
    'Then': ClauseRole.ACTION,
}
_ROLE_KEYWORDS = {role: keyword for keyword, role in _KEYWORD_ROLES.items()}


class Datatype(Enum):
    STRING = 'String'
    BASE64_BINARY = 'Base64Binary'
    HEX_BINARY = 'HexBinary'
    INTEGER = 'Integer'
    BOOLEAN = 'Boolean'
    DATE = 'Date'


DATATYPE_NAMES = frozenset(d.value for d in Datatype)


class SlotKind(Enum):
    ELEMENT = 'element'
    VALUE = 'value'


class Resolution(Enum):
    """What the element argument of a behavior denotes when a scenario runs."""
    WIDGET = 'widget'
    STATE = 'state'
    TEXT = 'text'


class Severity(Enum):
    ERROR = 'error'
    WARNING = 'warning'


class ConsistencyCode(Enum):
    CYCLE = 'CYCLE'
    UNKNOWN_CLASS = 'UNKNOWN_CLASS'
    UNKNOWN_PROPERTY_TARGET = 'UNKNOWN_PROPERTY_TARGET'
    EQUIV_MISMATCH = 'EQUIV_MISMATCH'
    AMBIGUOUS_TEMPLATE = 'AMBIGUOUS_TEMPLATE'
    EMPTY_ROLESET = 'EMPTY_ROLESET'
    BAD_DATATYPE = 'BAD_DATATYPE'


# ============== DOMAIN TYPES ==============

@dataclass(frozen=True)
class ElementClass:
    id: str
    display_name: str
    parents: FrozenSet[str] = frozenset()
    abstract: bool = False


@dataclass(frozen=True)
class DataPropertyDef:
    id: str
    range: str
    applies_to: FrozenSet[str] = frozenset()


_PLACEHOLDER = re.compile(r'^\{([A-Za-z_][A-Za-z0-9_]*)\}$')


def shape_of(literals: Iterable[str]) -> Tuple[str, ...]:
    """Matching key of a step or template: its literal segments, whitespace-collapsed and case-folded."""
    return tuple(normalize_space(part).casefold() for part in literals)


@dataclass(frozen=True)
class PhraseTemplate:
    """Surface phrase of a behavior; every placeholder sits between double quotes.

    `slots` lists (name, kind) pairs in the order the placeholders appear.
    """
    behavior_id: str
    pattern: str
    slots: Tuple[Tuple[str, SlotKind], ...]

    @property
    def literals(self) -> Tuple[str, ...]:
        return tuple(self.pattern.split('"')[0::2])

    @property
    def shape(self) -> Tuple[str, ...]:
        return shape_of(self.literals)

    @property
    def signature(self) -> Tuple[int, int]:
        """(value slots, element slots)"""
        kinds = [kind for _, kind in self.slots]
        return kinds.count(SlotKind.VALUE), kinds.count(SlotKind.ELEMENT)

    def bind(self, arguments: List[str]) -> Tuple[Optional[str], List[str]]:
        """Split quoted arguments into (element_arg, value_args)."""
        element_arg = None
        values = []
        for (_, kind), argument in zip(self.slots, arguments):
            if kind is SlotKind.ELEMENT:
                element_arg = argument
            else:
                values.append(argument)
        return element_arg, values

    def render(self, element_arg: Optional[str], value_args: List[str]) -> str:
        """Inverse of bind: fill the placeholders and return step text."""
        remaining = list(value_args)
        filled = []
        for _, kind in self.slots:
            if kind is SlotKind.ELEMENT:
                filled.append(element_arg or '')
            else:
                filled.append(remaining.pop(0) if remaining else '')
        parts = self.pattern.split('"')
        for index, argument in enumerate(filled):
            parts[2 * index + 1] = argument
        return '"'.join(parts)

    @classmethod
    def parse(cls, behavior_id: str, pattern: str, slot_kinds: Dict[str, str],
              path: Optional[str] = None) -> 'PhraseTemplate':
        where = f"behavior '{behavior_id}' template '{pattern}'"
        parts = pattern.split('"')
        if len(parts) % 2 == 0:
            raise DocumentSyntaxError(f"{where}: unbalanced double quotes", path)
        for literal in parts[0::2]:
            if '{' in literal or '}' in literal:
                raise DocumentSyntaxError(f"{where}: placeholders must be enclosed in double quotes", path)
        slots = []
        for quoted in parts[1::2]:
            match = _PLACEHOLDER.match(quoted)
            if not match:
                raise DocumentSyntaxError(f"{where}: quoted text must be a single placeholder", path)
            name = match.group(1)
            if any(name == seen for seen, _ in slots):
                raise DocumentSyntaxError(f"{where}: duplicate placeholder '{name}'", path)
            if name not in slot_kinds:
                raise DocumentSyntaxError(f"{where}: placeholder '{name}' has no declared kind", path)
            try:
                slots.append((name, SlotKind(slot_kinds[name])))
            except ValueError:
                raise DocumentSyntaxError(f"{where}: slot kind must be 'element' or 'value'", path) from None
        unused = set(slot_kinds) - {name for name, _ in slots}
        if unused:
            raise DocumentSyntaxError(f"{where}: slots not used in pattern: {sorted(unused)}", path)
        if sum(1 for _, kind in slots if kind is SlotKind.ELEMENT) > 1:
            raise DocumentSyntaxError(f"{where}: at most one element placeholder is allowed", path)
        return cls(behavior_id, pattern, tuple(slots))


@dataclass(frozen=True)
class BehaviorDef:
    id: str
    templates: Tuple[PhraseTemplate, ...]
    roles: FrozenSet[ClauseRole]
    allowed_elements: FrozenSet[str]
    equivalence_group: Optional[str] = None
    resolves: Resolution = Resolution.WIDGET

    @property
    def signature(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(t.signature for t in self.templates)


@dataclass(frozen=True)
class StepMatch:
    behavior: BehaviorDef
    template: PhraseTemplate
    element_arg: Optional[str]
    value_args: Tuple[str, ...]


@dataclass(frozen=True)
class PaletteEntry:
    class_id: str
    display_name: str
    properties: Tuple[str, ...]
    behaviors: Tuple[str, ...]


@dataclass(frozen=True)
class OntologyModel:
    classes: Dict[str, ElementClass]
    data_properties: Dict[str, DataPropertyDef]
    behaviors: Dict[str, BehaviorDef]
    version: str = '1.0'

    def get_class(self, class_id: str) -> ElementClass:
        try:
            return self.classes[class_id]
        except KeyError:
            raise UnknownClassError(class_id) from None

    def get_behavior(self, behavior_id: str) -> BehaviorDef:
        try:
            return self.behaviors[behavior_id]
        except KeyError:
            raise UnknownBehaviorError(behavior_id) from None

    @cached_property
    def _closures(self) -> Dict[str, FrozenSet[str]]:
        closures = {}
        for class_id in self.classes:
            seen = {class_id}
            stack = [class_id]
            while stack:
                current = self.classes[stack.pop()]
                for parent in current.parents:
                    if parent in self.classes and parent not in seen:
                        seen.add(parent)
                        stack.append(parent)
            closures[class_id] = frozenset(seen)
        return closures

    def subclass_closure(self, class_id: str) -> FrozenSet[str]:
        """The class itself plus all of its ancestors."""
        self.get_class(class_id)
        return self._closures[class_id]

    def satisfying_classes(self, behavior_id: str) -> FrozenSet[str]:
        """Every declared class whose instances support the behavior."""
        allowed = self.get_behavior(behavior_id).allowed_elements
        return frozenset(c for c, closure in self._closures.items() if closure & allowed)

    def element_satisfies(self, widget_class: str, behavior_id: str) -> bool:
        closure = self.subclass_closure(widget_class)
        return bool(closure & self.get_behavior(behavior_id).allowed_elements)

    def behaviors_for_class(self, class_id: str) -> List[str]:
        """Behavioral properties a widget of this class features."""
        closure = self.subclass_closure(class_id)
        return [b.id for b in self.behaviors.values() if closure & b.allowed_elements]

    def properties_for_class(self, class_id: str) -> List[str]:
        closure = self.subclass_closure(class_id)
        return [p.id for p in self.data_properties.values() if closure & p.applies_to]

    @cached_property
    def _template_index(self) -> Dict[Tuple[str, ...], PhraseTemplate]:
        index = {}
        for behavior in self.behaviors.values():
            for template in behavior.templates:
                index.setdefault(template.shape, template)
        return index

    def match_step(self, text: str) -> Optional[StepMatch]:
        """Bind step text to the single template with the same literal shape."""
        parts = text.split('"')
        if len(parts) % 2 == 0:
            return None
        template = self._template_index.get(shape_of(parts[0::2]))
        if template is None:
            return None
        element_arg, values = template.bind(parts[1::2])
        return StepMatch(self.behaviors[template.behavior_id], template, element_arg, tuple(values))

    def roots(self) -> List[str]:
        return [c.id for c in self.classes.values() if not c.parents]

    def palette(self) -> Dict[str, List[PaletteEntry]]:
        """Widget palette: one category per root class holding its concrete descendants."""
        categories = {root: [] for root in self.roots()}
        for element in self.classes.values():
            if element.abstract:
                continue
            for root in categories:
                if root in self._closures[element.id]:
                    categories[root].append(PaletteEntry(
                        class_id=element.id,
                        display_name=element.display_name,
                        properties=tuple(self.properties_for_class(element.id)),
                        behaviors=tuple(self.behaviors_for_class(element.id)),
                    ))
        return categories


# ============== CONSISTENCY CHECKING ==============

@dataclass(frozen=True)
class ConsistencyFinding:
    code: ConsistencyCode
    severity: Severity
    locus: str
    message: str
    subjects: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ConsistencyReport:
    version: str
    findings: Tuple[ConsistencyFinding, ...] = ()

    @property
    def errors(self) -> List[ConsistencyFinding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    @property
    def warnings(self) -> List[ConsistencyFinding]:
        return [f for f in self.findings if f.severity is Severity.WARNING]

    @property
    def is_consistent(self) -> bool:
        return not self.errors


class ConsistencyError(UiVerifyError):
    def __init__(self, report: ConsistencyReport):
        self.report = report
        codes = ', '.join(sorted({f.code.value for f in report.errors}))
        super().__init__(f"ontology {report.version} is inconsistent: {len(report.errors)} error(s) ({codes})")


def _find_cycles(model: OntologyModel) -> List[Tuple[str, ...]]:
    closures = model._closures
    cycles = []
    assigned = set()
    for class_id, element in model.classes.items():
        if class_id in assigned:
            continue
        in_cycle = any(class_id in closures[p] for p in element.parents if p in closures)
        if not in_cycle:
            continue
        component = tuple(sorted(d for d in closures[class_id] if class_id in closures[d]))
        assigned.update(component)
        cycles.append(component)
    return cycles


def check_consistency(model: OntologyModel) -> ConsistencyReport:
    """Run every structural check; findings are returned, never raised."""
    findings: List[ConsistencyFinding] = []

    def add(code, locus, message, subjects=(), severity=Severity.ERROR):
        findings.append(ConsistencyFinding(code, severity, locus, message, tuple(subjects)))

    for element in model.classes.values():
        for parent in sorted(element.parents.difference(model.classes)):
            add(ConsistencyCode.UNKNOWN_CLASS, f"class:{element.id}",
                f"class '{element.id}' has undeclared parent '{parent}'", (element.id, parent))

    for cycle in _find_cycles(model):
        add(ConsistencyCode.CYCLE, f"class:{cycle[0]}",
            f"subclass cycle through {', '.join(cycle)}", cycle)

    for prop in model.data_properties.values():
        if prop.range not in DATATYPE_NAMES:
            add(ConsistencyCode.BAD_DATATYPE, f"data_property:{prop.id}",
                f"data property '{prop.id}' ranges over unsupported datatype '{prop.range}'",
                (prop.id, prop.range))
        for target in sorted(prop.applies_to.difference(model.classes)):
            add(ConsistencyCode.UNKNOWN_PROPERTY_TARGET, f"data_property:{prop.id}",
                f"data property '{prop.id}' applies to undeclared class '{target}'", (prop.id, target))

    for behavior in model.behaviors.values():
        if not behavior.roles:
            add(ConsistencyCode.EMPTY_ROLESET, f"behavior:{behavior.id}",
                f"behavior '{behavior.id}' is allowed in no clause", (behavior.id,))
        for target in sorted(behavior.allowed_elements.difference(model.classes)):
            add(ConsistencyCode.UNKNOWN_CLASS, f"behavior:{behavior.id}",
                f"behavior '{behavior.id}' allows undeclared class '{target}'", (behavior.id, target))

    seen_shapes: Dict[Tuple[str, ...], PhraseTemplate] = {}
    for behavior in model.behaviors.values():
        for template in behavior.templates:
            first = seen_shapes.setdefault(template.shape, template)
            if first is not template:
                add(ConsistencyCode.AMBIGUOUS_TEMPLATE, f"behavior:{behavior.id}",
                    f"template '{template.pattern}' of '{behavior.id}' matches the same steps as "
                    f"'{first.pattern}' of '{first.behavior_id}'",
                    (first.behavior_id, behavior.id))

    groups: Dict[str, List[BehaviorDef]] = {}
    for behavior in model.behaviors.values():
        if behavior.equivalence_group:
            groups.setdefault(behavior.equivalence_group, []).append(behavior)
    for group_id, members in groups.items():
        if len(members) == 1:
            add(ConsistencyCode.EQUIV_MISMATCH, f"group:{group_id}",
                f"equivalence group '{group_id}' has a single member", (members[0].id,),
                severity=Severity.WARNING)
            continue
        reference = members[0]
        reference_elements = model.satisfying_classes(reference.id)
        for other in members[1:]:
            differences = []
            if other.roles != reference.roles:
                differences.append('roles')
            if model.satisfying_classes(other.id) != reference_elements:
                differences.append('allowed elements')
            if other.signature != reference.signature:
                differences.append('placeholders')
            if other.resolves is not reference.resolves:
                differences.append('resolution')
            if differences:
                add(ConsistencyCode.EQUIV_MISMATCH, f"group:{group_id}",
                    f"'{reference.id}' and '{other.id}' differ in {', '.join(differences)}",
                    (reference.id, other.id))

    for finding in findings:
        logger.debug(f"Consistency finding {finding.code.value} at {finding.locus}: {finding.message}")
    return ConsistencyReport(model.version, tuple(findings))


# ============== DOCUMENTS ==============

class ClassEntry(BaseModel):
    id: Identifier
    display_name: Optional[str] = None
    parents: List[Identifier] = Field(default_factory=list)
    abstract: bool = False


class DataPropertyEntry(BaseModel):
    id: Identifier
    range: str
    applies_to: List[Identifier]


class TemplateEntry(BaseModel):
    pattern: str
    slots: Dict[str, str] = Field(default_factory=dict)


class BehaviorEntry(BaseModel):
    id: Identifier
    templates: List[TemplateEntry] = Field(min_length=1)
    roles: List[ClauseRole]
    allowed_elements: List[Identifier] = Field(min_length=1, description="Classes the element argument may be.")
    equivalent_to: Optional[str] = None
    resolves: Resolution = Resolution.WIDGET


class OntologyDocument(BaseModel):
    """Schema of a `*.onto.json` document."""
    version: str = '1.0'
    classes: List[ClassEntry]
    data_properties: List[DataPropertyEntry] = Field(default_factory=list)
    behaviors: List[BehaviorEntry] = Field(default_factory=list)

    @field_validator('version', mode='before')
    @classmethod
    def _numeric_version(cls, value: Any) -> Any:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return str(value)
        return value


def _unique(declared: Dict[str, Any], new_id: str, what: str, path: Optional[str]):
    if new_id in declared:
        raise DocumentSyntaxError(f"duplicate {what} '{new_id}'", path)


def ontology_from_document(data: Any, path: Optional[str] = None) -> OntologyModel:
    """Build a model from a decoded document without the consistency gate."""
    try:
        document = OntologyDocument.model_validate(data)
    except ValidationError as e:
        raise schema_error(e, path) from None

    classes = {}
    for entry in document.classes:
        _unique(classes, entry.id, 'class', path)
        classes[entry.id] = ElementClass(
            id=entry.id,
            display_name=entry.display_name or entry.id.replace('_', ' '),
            parents=frozenset(entry.parents),
            abstract=entry.abstract,
        )

    data_properties = {}
    for entry in document.data_properties:
        _unique(data_properties, entry.id, 'data property', path)
        data_properties[entry.id] = DataPropertyDef(
            id=entry.id, range=entry.range, applies_to=frozenset(entry.applies_to),
        )

    behaviors = {}
    for entry in document.behaviors:
        _unique(behaviors, entry.id, 'behavior', path)
        behaviors[entry.id] = BehaviorDef(
            id=entry.id,
            templates=tuple(PhraseTemplate.parse(entry.id, t.pattern, t.slots, path) for t in entry.templates),
            roles=frozenset(entry.roles),
            allowed_elements=frozenset(entry.allowed_elements),
            equivalence_group=entry.equivalent_to or None,
            resolves=entry.resolves,
        )

    return OntologyModel(classes=classes, data_properties=data_properties,
                         behaviors=behaviors, version=document.version)


def _decode(text: str, path: Optional[str]) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentSyntaxError(e.msg, path, e.lineno, e.colno) from None


def loads_ontology(text: str, path: Optional[str] = None) -> OntologyModel:
    model = ontology_from_document(_decode(text, path), path)
    report = check_consistency(model)
    if not report.is_consistent:
        raise ConsistencyError(report)
    logger.info(f"Loaded ontology {model.version}: {len(model.classes)} classes, "
                f"{len(model.data_properties)} data properties, {len(model.behaviors)} behaviors")
    return model


def read_ontology_document(path: Union[str, Path]) -> OntologyModel:
    """Parse a file into an unchecked model (check-ontology reports instead of failing)."""
    text = read_document(path)
    return ontology_from_document(_decode(text, str(path)), str(path))


def load_ontology(path: Union[str, Path]) -> OntologyModel:
    return loads_ontology(read_document(path), str(path))


_default_model: Optional[OntologyModel] = None


def default_ontology() -> OntologyModel:
    """The shipped default ontology, loaded once."""
    global _default_model
    if _default_model is None:
        _default_model = load_ontology(DEFAULT_ONTOLOGY_PATH)
    return _default_model


def dump_ontology(model: OntologyModel) -> Dict[str, Any]:
    behaviors = []
    for behavior in model.behaviors.values():
        entry = {
            'id': behavior.id,
            'templates': [
                {'pattern': t.pattern, 'slots': {name: kind.value for name, kind in t.slots}}
                for t in behavior.templates
            ],
            'roles': [role.value for role in ClauseRole if role in behavior.roles],
            'allowed_elements': sorted(behavior.allowed_elements),
        }
        if behavior.equivalence_group:
            entry['equivalent_to'] = behavior.equivalence_group
        if behavior.resolves is not Resolution.WIDGET:
            entry['resolves'] = behavior.resolves.value
        behaviors.append(entry)
    return {
        'version': model.version,
        'classes': [
            {'id': c.id, 'display_name': c.display_name, 'parents': sorted(c.parents), 'abstract': c.abstract}
            for c in model.classes.values()
        ],
        'data_properties': [
            {'id': p.id, 'range': p.range, 'applies_to': sorted(p.applies_to)}
            for p in model.data_properties.values()
        ],
        'behaviors': behaviors,
    }


def dumps_ontology(model: OntologyModel) -> str:
    return json.dumps(dump_ontology(model), indent=2, ensure_ascii=False) + '\n'


# Module-level operations over a model

def subclass_closure(model: OntologyModel, class_id: str) -> FrozenSet[str]:
    return model.subclass_closure(class_id)


def element_satisfies(model: OntologyModel, widget_class: str, behavior_id: str) -> bool:
    return model.element_satisfies(widget_class, behavior_id)
