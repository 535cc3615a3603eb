"""
uiverify - BDD User Story verification against a behavior ontology

Modules:
- ontology_core: interaction-element classes, behaviors and the consistency checker
- story_parser: User Story parsing and step binding
- prototype_model: UI prototypes (states of widgets plus scenario-labeled transitions)
- verifier: linting and scenario execution with Pass/Fail/Untested verdicts
- reporting, cli: text/JSON/JUnit reports and the command line
"""
from uiverify import ontology_core, story_parser, prototype_model, verifier

__all__ = ['ontology_core', 'story_parser', 'prototype_model', 'verifier']
