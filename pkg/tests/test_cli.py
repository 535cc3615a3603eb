"""Tests for the command line: exit codes, formats and path handling."""
import json
import xml.etree.ElementTree as ET

import pytest

from uiverify.cli import EXIT_ERROR, EXIT_FINDINGS, EXIT_OK, main
from uiverify.ontology_core import DEFAULT_ONTOLOGY_PATH

from tests.conftest import (
    BROKEN_STORY, CLAUSE_MISMATCH_STORY, CYCLE_ONTOLOGY, FIXTURES, FLIGHT_PROTO, FLIGHT_STORY,
    MISSING_STATE_STORY, TEXT_FIELD_PROTO,
)

pytestmark = pytest.mark.usefixtures('clean_environment')


def run(capsys, *argv):
    code = main([str(arg) for arg in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ============== check-ontology ==============

def test_check_default_ontology(capsys):
    code, out, _ = run(capsys, 'check-ontology', DEFAULT_ONTOLOGY_PATH)
    assert code == EXIT_OK
    assert '0 findings' in out


def test_check_uses_shipped_default(capsys):
    code, out, _ = run(capsys, 'check-ontology')
    assert code == EXIT_OK
    assert '0 findings' in out


def test_check_cycle(capsys):
    code, out, _ = run(capsys, 'check-ontology', CYCLE_ONTOLOGY)
    assert code == EXIT_FINDINGS
    assert 'CYCLE' in out


def test_check_missing_file(capsys, tmp_path):
    code, out, err = run(capsys, 'check-ontology', tmp_path / 'missing.onto.json')
    assert code == EXIT_ERROR
    assert out == ''
    assert 'missing.onto.json' in err


def test_check_ontology_from_environment(capsys, monkeypatch):
    monkeypatch.setenv('UIVERIFY_ONTOLOGY', str(CYCLE_ONTOLOGY))
    code, _, _ = run(capsys, 'check-ontology')
    assert code == EXIT_FINDINGS


# ============== lint ==============

def test_lint_flight_story(capsys):
    code, out, _ = run(capsys, 'lint', DEFAULT_ONTOLOGY_PATH, FLIGHT_STORY)
    assert code == EXIT_OK
    assert '0 findings' in out


def test_lint_clause_mismatch(capsys):
    code, out, _ = run(capsys, 'lint', CLAUSE_MISMATCH_STORY)
    assert code == EXIT_FINDINGS
    assert 'ClauseMismatch' in out


def test_lint_with_prototype(capsys):
    code, out, _ = run(capsys, 'lint', FLIGHT_STORY, '--prototype', TEXT_FIELD_PROTO, '--format', 'json')
    assert code == EXIT_FINDINGS
    document = json.loads(out)
    assert [f['code'] for f in document['stories'][0]['findings']] == ['IncompatibleElement']


def test_lint_unparseable_story(capsys):
    code, _, err = run(capsys, 'lint', BROKEN_STORY)
    assert code == EXIT_ERROR
    assert f"{BROKEN_STORY}:7:1:" in err


def test_lint_story_that_is_not_utf8(capsys, tmp_path):
    story = tmp_path / 'latin1.story'
    story.write_bytes(FLIGHT_STORY.read_text(encoding='utf-8').replace('Paris', 'P\xe2ris').encode('latin-1'))
    code, out, err = run(capsys, 'lint', story)
    assert code == EXIT_ERROR
    assert out == ''
    assert f"{story}:" in err
    assert 'internal error' not in err


def test_lint_rejects_positional_prototype(capsys):
    code, _, _ = run(capsys, 'lint', FLIGHT_PROTO, FLIGHT_STORY)
    assert code == EXIT_ERROR


# ============== run ==============

def test_run_flight_story(capsys):
    code, out, _ = run(capsys, 'run', DEFAULT_ONTOLOGY_PATH, FLIGHT_PROTO, FLIGHT_STORY, '--no-color')
    assert code == EXIT_OK
    assert len([line for line in out.splitlines() if line.startswith('    V ')]) == 8
    assert '8 passed, 0 failed, 0 untested' in out


def test_run_text_field_mutation_junit(capsys):
    code, out, _ = run(capsys, 'run', TEXT_FIELD_PROTO, FLIGHT_STORY, '--format', 'junit')
    assert code == EXIT_FINDINGS
    root = ET.fromstring(out.encode('utf-8'))
    assert [f.get('type') for f in root.iter('failure')] == ['IncompatibleElement']


def test_run_missing_state(capsys):
    code, out, _ = run(capsys, 'run', FLIGHT_PROTO, MISSING_STATE_STORY)
    assert code == EXIT_FINDINGS
    assert '0 passed, 1 failed, 7 untested' in out


def test_run_json_matches_text(capsys):
    _, text_out, _ = run(capsys, 'run', FLIGHT_PROTO, FLIGHT_STORY, MISSING_STATE_STORY)
    _, json_out, _ = run(capsys, 'run', FLIGHT_PROTO, FLIGHT_STORY, MISSING_STATE_STORY, '--format', 'json')
    counts = json.loads(json_out)['counts']
    assert f"{counts['pass']} passed, {counts['fail']} failed, {counts['untested']} untested" == \
        text_out.strip().splitlines()[-1]


def test_run_fail_fast_across_stories(capsys):
    code, out, _ = run(capsys, 'run', FLIGHT_PROTO, MISSING_STATE_STORY, FLIGHT_STORY,
                       '--fail-fast', '--format', 'json')
    assert code == EXIT_FINDINGS
    document = json.loads(out)
    assert document['counts'] == {'pass': 0, 'fail': 1, 'untested': 15}
    assert document['stories'][1]['skipped'] == [{'title': 'One-Way Tickets Search', 'steps': 8}]


def test_run_with_workers(capsys):
    code, out, _ = run(capsys, 'run', FLIGHT_PROTO, FLIGHT_STORY, '--workers', '3', '--format', 'json')
    assert code == EXIT_OK
    assert json.loads(out)['counts'] == {'pass': 8, 'fail': 0, 'untested': 0}


def test_run_writes_output_file(capsys, tmp_path):
    target = tmp_path / 'report.xml'
    code, out, _ = run(capsys, 'run', FLIGHT_PROTO, FLIGHT_STORY, '--format', 'junit', '--output', target)
    assert code == EXIT_OK
    assert out == ''
    ET.fromstring(target.read_bytes())


def test_run_needs_prototype(capsys):
    code, _, err = run(capsys, 'run', FLIGHT_STORY)
    assert code == EXIT_ERROR
    assert 'prototype' in err


def test_run_invalid_prototype(capsys, tmp_path):
    document = json.loads(FLIGHT_PROTO.read_text(encoding='utf-8'))
    document['states'][0]['widgets'][0]['class'] = 'Spinner'
    bad = tmp_path / 'bad.proto.json'
    bad.write_text(json.dumps(document), encoding='utf-8')
    code, _, err = run(capsys, 'run', bad, FLIGHT_STORY)
    assert code == EXIT_ERROR
    assert 'UNKNOWN_CLASS' in err


def test_run_prototype_with_null_widgets(capsys, tmp_path):
    document = json.loads(FLIGHT_PROTO.read_text(encoding='utf-8'))
    document['states'][1]['widgets'] = None
    bad = tmp_path / 'null.proto.json'
    bad.write_text(json.dumps(document), encoding='utf-8')
    code, _, err = run(capsys, 'run', bad, FLIGHT_STORY)
    assert code == EXIT_ERROR
    assert 'states[1].widgets' in err
    assert 'internal error' not in err


def test_run_inconsistent_ontology(capsys):
    code, _, _ = run(capsys, 'run', CYCLE_ONTOLOGY, FLIGHT_PROTO, FLIGHT_STORY)
    assert code == EXIT_ERROR


def test_format_from_environment(capsys, monkeypatch):
    monkeypatch.setenv('UIVERIFY_FORMAT', 'json')
    _, out, _ = run(capsys, 'run', FLIGHT_PROTO, FLIGHT_STORY)
    assert json.loads(out)['counts']['pass'] == 8


# ============== palette and arguments ==============

def test_palette(capsys):
    code, out, _ = run(capsys, 'palette', '--format', 'json')
    assert code == EXIT_OK
    assert 'Input_Control' in json.loads(out)


def test_bad_arguments_exit_with_error(capsys):
    assert run(capsys, 'frobnicate')[0] == EXIT_ERROR
    assert run(capsys, 'run', '--format', 'yaml', FLIGHT_STORY)[0] == EXIT_ERROR


def test_help_exits_clean(capsys):
    assert run(capsys, '--help')[0] == EXIT_OK


def test_fixture_directory_is_not_a_story(capsys):
    code, _, _ = run(capsys, 'lint', FIXTURES)
    assert code == EXIT_ERROR
