"""
Report emitters: human text, JSON and JUnit-XML.

Every format is rendered from the same in-memory objects so that counts agree
across formats.
"""
import json
from typing import Any, Dict, List, Sequence, Tuple

from junit_xml import TestCase, TestSuite, to_xml_report_string

from uiverify.localization import get_text
from uiverify.ontology_core import ConsistencyCode, ConsistencyReport, PaletteEntry, Severity
from uiverify.story_parser import UserStory
from uiverify.verifier import Finding, ScenarioResult, StepStatus, VerificationReport

GREEN = '\033[32m'
RED = '\033[31m'
RESET = '\033[0m'

_STATUS_COLORS = {StepStatus.PASS: GREEN, StepStatus.FAIL: RED}


def _paint(text: str, status: StepStatus, color: bool) -> str:
    if not color or status not in _STATUS_COLORS:
        return text
    return f"{_STATUS_COLORS[status]}{text}{RESET}"


def total_counts(reports: Sequence[VerificationReport]) -> Dict[str, int]:
    totals = {'pass': 0, 'fail': 0, 'untested': 0}
    for report in reports:
        for key, value in report.counts.items():
            totals[key] += value
    return totals


def _summary(counts: Dict[str, int]) -> str:
    return get_text('en', 'summary', passed=counts['pass'], failed=counts['fail'], untested=counts['untested'])


def _finding_dict(finding: Finding) -> Dict[str, Any]:
    data = {
        'code': finding.code.value,
        'message': finding.message,
        'scenario': finding.locus.scenario_title,
        'step': finding.locus.index + 1,
        'line': finding.locus.line,
        'text': finding.locus.text,
    }
    for key in ('behavior_id', 'state', 'widget', 'widget_class'):
        value = getattr(finding, key)
        if value is not None:
            data[key] = value
    if finding.allowed:
        data['allowed'] = list(finding.allowed)
    return data


# ============== VERIFICATION REPORTS ==============

def render_run_text(reports: Sequence[VerificationReport], color: bool = False) -> str:
    lines = []
    for report in reports:
        lines.append(get_text('en', 'story_header', title=report.story_title))
        for scenario in report.scenarios:
            overall = _paint(scenario.overall.value, scenario.overall, color)
            lines.append(get_text('en', 'scenario_header', title=scenario.title, overall=overall))
            for result in scenario.steps:
                symbol = _paint(result.status.symbol, result.status, color)
                lines.append(get_text('en', 'step_line', symbol=symbol, keyword=result.step.keyword,
                                      text=result.step.raw_text))
                if result.finding is not None:
                    lines.append(get_text('en', 'step_finding', code=result.finding.code.value,
                                          message=result.finding.message))
        for skipped in report.skipped:
            lines.append(get_text('en', 'skipped_scenario', title=skipped.title, steps=skipped.step_count))
        lines.append(_summary(report.counts))
        lines.append('')
    if len(reports) > 1:
        lines.append(_summary(total_counts(reports)))
    return '\n'.join(lines).rstrip('\n') + '\n'


def _scenario_dict(scenario: ScenarioResult) -> Dict[str, Any]:
    steps = []
    for result in scenario.steps:
        entry = {
            'keyword': result.step.keyword,
            'clause': result.step.clause.value,
            'text': result.step.raw_text,
            'line': result.step.line,
            'status': result.status.value,
        }
        if result.bound_step is not None:
            entry['behavior'] = result.bound_step.behavior_id
            entry['element'] = result.bound_step.element_arg
            entry['values'] = list(result.bound_step.value_args)
        if result.finding is not None:
            entry['finding'] = _finding_dict(result.finding)
        steps.append(entry)
    return {'title': scenario.title, 'overall': scenario.overall.value, 'steps': steps}


def render_run_json(reports: Sequence[VerificationReport]) -> str:
    document = {
        'stories': [
            {
                'title': report.story_title,
                'scenarios': [_scenario_dict(s) for s in report.scenarios],
                'skipped': [{'title': s.title, 'steps': s.step_count} for s in report.skipped],
                'counts': report.counts,
            }
            for report in reports
        ],
        'counts': total_counts(reports),
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + '\n'


def render_run_junit(reports: Sequence[VerificationReport]) -> str:
    """One testsuite per story, one testcase per scenario; untested steps go to system-out."""
    suites = []
    for report in reports:
        cases = []
        for scenario in report.scenarios:
            untested = [r for r in scenario.steps if r.status is StepStatus.UNTESTED]
            stdout = '\n'.join(
                f"? {r.step.keyword} {r.step.raw_text}" for r in untested
            ) or None
            case = TestCase(scenario.title, classname=report.story_title, stdout=stdout)
            failure = scenario.failure
            if failure is not None:
                case.add_failure_info(
                    message=f"{failure.code.value}: {failure.message}",
                    output=f"step {failure.locus.index + 1} (line {failure.locus.line}): {failure.locus.text}",
                    failure_type=failure.code.value,
                )
            cases.append(case)
        for skipped in report.skipped:
            case = TestCase(skipped.title, classname=report.story_title)
            case.add_skipped_info(message='not run (fail-fast)')
            cases.append(case)
        suites.append(TestSuite(report.story_title, cases, properties=report.counts))
    return to_xml_report_string(suites, prettyprint=True, encoding='utf-8')


# ============== LINT ==============

def render_lint_text(results: Sequence[Tuple[UserStory, List[Finding]]]) -> str:
    lines = []
    total = 0
    for story, findings in results:
        lines.append(get_text('en', 'lint_header', title=story.title))
        for finding in findings:
            lines.append(get_text('en', 'lint_line', scenario=finding.locus.scenario_title,
                                  index=finding.locus.index + 1, line=finding.locus.line,
                                  code=finding.code.value, message=finding.message))
        lines.append(get_text('en', 'findings_count', count=len(findings)))
        total += len(findings)
    if len(results) > 1:
        lines.append(get_text('en', 'findings_count', count=total))
    return '\n'.join(lines) + '\n'


def render_lint_json(results: Sequence[Tuple[UserStory, List[Finding]]]) -> str:
    document = {
        'stories': [
            {'title': story.title, 'path': story.path, 'findings': [_finding_dict(f) for f in findings]}
            for story, findings in results
        ],
        'total': sum(len(findings) for _, findings in results),
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + '\n'


def render_lint_junit(results: Sequence[Tuple[UserStory, List[Finding]]]) -> str:
    suites = []
    for story, findings in results:
        cases = []
        for index, scenario in enumerate(story.scenarios):
            case = TestCase(scenario.title, classname=story.title, allow_multiple_subelements=True)
            for finding in findings:
                if finding.locus.scenario_index == index:
                    case.add_failure_info(message=f"{finding.code.value}: {finding.message}",
                                          failure_type=finding.code.value)
            cases.append(case)
        suites.append(TestSuite(story.title, cases, properties={'findings': len(findings)}))
    return to_xml_report_string(suites, prettyprint=True, encoding='utf-8')


# ============== CONSISTENCY ==============

def render_consistency_text(report: ConsistencyReport) -> str:
    lines = [get_text('en', 'consistency_header', version=report.version)]
    for finding in report.findings:
        lines.append(get_text('en', 'consistency_line', severity=finding.severity.value,
                              code=finding.code.value, locus=finding.locus, message=finding.message))
    lines.append(get_text('en', 'findings_count', count=len(report.findings)))
    return '\n'.join(lines) + '\n'


def render_consistency_json(report: ConsistencyReport) -> str:
    document = {
        'version': report.version,
        'consistent': report.is_consistent,
        'findings': [
            {'code': f.code.value, 'severity': f.severity.value, 'locus': f.locus,
             'message': f.message, 'subjects': list(f.subjects)}
            for f in report.findings
        ],
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + '\n'


def render_consistency_junit(report: ConsistencyReport) -> str:
    """One testcase per consistency check; every error finding is a failure of its check."""
    cases = []
    for code in ConsistencyCode:
        case = TestCase(code.value, classname='ontology', allow_multiple_subelements=True)
        for finding in report.findings:
            if finding.code is not code:
                continue
            if finding.severity is Severity.ERROR:
                case.add_failure_info(message=finding.message, output=finding.locus, failure_type=code.value)
        cases.append(case)
    suite = TestSuite(f"ontology {report.version}", cases, properties={'findings': len(report.findings)})
    return to_xml_report_string([suite], prettyprint=True, encoding='utf-8')


# ============== PALETTE ==============

def render_palette_text(palette: Dict[str, List[PaletteEntry]]) -> str:
    lines = []
    for category, entries in palette.items():
        lines.append(get_text('en', 'palette_category', name=category))
        for entry in entries:
            lines.append(get_text('en', 'palette_entry', display_name=entry.display_name, class_id=entry.class_id))
            lines.append(get_text('en', 'palette_properties',
                                  items=', '.join(entry.properties) or get_text('en', 'none')))
            lines.append(get_text('en', 'palette_behaviors',
                                  items=', '.join(entry.behaviors) or get_text('en', 'none')))
    return '\n'.join(lines) + '\n'


def render_palette_json(palette: Dict[str, List[PaletteEntry]]) -> str:
    document = {
        category: [
            {'class': e.class_id, 'display_name': e.display_name,
             'properties': list(e.properties), 'behaviors': list(e.behaviors)}
            for e in entries
        ]
        for category, entries in palette.items()
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + '\n'
