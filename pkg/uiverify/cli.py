"""
Command-line front end.

    uiverify check-ontology [<onto>]
    uiverify lint [<onto>] <story...> [--prototype <proto>]
    uiverify run [<onto>] <proto> <story...>
    uiverify palette [<onto>]

Exit codes: 0 clean, 1 findings or failures, 2 operational error.
"""
import argparse
import asyncio
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

from uiverify import reporting
from uiverify.common import UiVerifyError
from uiverify.config import FORMATS, Settings, load_settings
from uiverify.logging_config import configure_logging, logger
from uiverify.ontology_core import (
    DEFAULT_ONTOLOGY_PATH, OntologyModel, check_consistency, load_ontology, read_ontology_document,
)
from uiverify.prototype_model import load_prototype
from uiverify.story_parser import load_story
from uiverify.verifier import (
    SkippedScenario, VerificationReport, execute_story, execute_story_async, lint, lint_against_prototype,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2

ONTOLOGY_SUFFIX = '.onto.json'
PROTOTYPE_SUFFIX = '.proto.json'


@dataclass
class RunConfig:
    command: str
    ontology_path: Optional[Path] = None
    story_paths: List[Path] = field(default_factory=list)
    prototype_path: Optional[Path] = None
    format: str = 'text'
    fail_fast: bool = False
    output_path: Optional[Path] = None
    no_color: bool = False
    workers: int = 1


class UsageError(UiVerifyError):
    """Arguments parsed but the combination is unusable."""


# ============== OUTPUT ==============

def _emit(config: RunConfig, text: str):
    if config.output_path is not None:
        config.output_path.write_text(text, encoding='utf-8')
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _use_color(config: RunConfig) -> bool:
    return (not config.no_color and config.output_path is None
            and config.format == 'text' and sys.stdout.isatty())


def _ontology(config: RunConfig) -> OntologyModel:
    return load_ontology(config.ontology_path or DEFAULT_ONTOLOGY_PATH)


# ============== COMMANDS ==============

def cmd_check_ontology(config: RunConfig) -> int:
    model = read_ontology_document(config.ontology_path or DEFAULT_ONTOLOGY_PATH)
    report = check_consistency(model)
    renderers = {
        'text': reporting.render_consistency_text,
        'json': reporting.render_consistency_json,
        'junit': reporting.render_consistency_junit,
    }
    _emit(config, renderers[config.format](report))
    return EXIT_OK if report.is_consistent else EXIT_FINDINGS


def cmd_lint(config: RunConfig) -> int:
    if not config.story_paths:
        raise UsageError("lint needs at least one story file")
    model = _ontology(config)
    proto = load_prototype(config.prototype_path, model) if config.prototype_path else None
    results = []
    for path in config.story_paths:
        story = load_story(path)
        findings = lint_against_prototype(story, model, proto) if proto else lint(story, model)
        results.append((story, findings))
    renderers = {
        'text': reporting.render_lint_text,
        'json': reporting.render_lint_json,
        'junit': reporting.render_lint_junit,
    }
    _emit(config, renderers[config.format](results))
    return EXIT_OK if all(not findings for _, findings in results) else EXIT_FINDINGS


def cmd_run(config: RunConfig) -> int:
    if config.prototype_path is None:
        raise UsageError("run needs a prototype file (*.proto.json)")
    if not config.story_paths:
        raise UsageError("run needs at least one story file")
    model = _ontology(config)
    proto = load_prototype(config.prototype_path, model)
    stories = [load_story(path) for path in config.story_paths]

    reports: List[VerificationReport] = []
    stopped = False
    for story in stories:
        if stopped:
            skipped = tuple(SkippedScenario(s.title, len(s.steps)) for s in story.scenarios)
            reports.append(VerificationReport(story.title, (), skipped))
            continue
        if config.workers > 1:
            report = asyncio.run(execute_story_async(story, model, proto, config.workers, config.fail_fast))
        else:
            report = execute_story(story, model, proto, fail_fast=config.fail_fast)
        reports.append(report)
        stopped = config.fail_fast and not report.passed

    if config.format == 'json':
        text = reporting.render_run_json(reports)
    elif config.format == 'junit':
        text = reporting.render_run_junit(reports)
    else:
        text = reporting.render_run_text(reports, color=_use_color(config))
    _emit(config, text)
    return EXIT_OK if all(report.passed for report in reports) else EXIT_FINDINGS


def cmd_palette(config: RunConfig) -> int:
    palette = _ontology(config).palette()
    if config.format == 'json':
        _emit(config, reporting.render_palette_json(palette))
    else:
        _emit(config, reporting.render_palette_text(palette))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    'check-ontology': cmd_check_ontology,
    'lint': cmd_lint,
    'run': cmd_run,
    'palette': cmd_palette,
}


# ============== ARGUMENTS ==============

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=FORMATS, default=None, help="output format (default: text)")
    common.add_argument('--output', type=Path, default=None, help="write the report to a file instead of stdout")
    common.add_argument('--fail-fast', action='store_true', help="stop after the first failing scenario")
    common.add_argument('--no-color', action='store_true', help="never color text output")
    common.add_argument('--workers', type=int, default=None, help="run scenarios concurrently")

    parser = argparse.ArgumentParser(
        prog='uiverify',
        description="Check BDD User Stories against a behavior ontology and run them over UI prototypes.",
    )
    commands = parser.add_subparsers(dest='command', required=True)

    check = commands.add_parser('check-ontology', parents=[common], help="check ontology consistency")
    check.add_argument('ontology', nargs='?', type=Path)

    lint_parser = commands.add_parser('lint', parents=[common], help="lint stories")
    lint_parser.add_argument('paths', nargs='+', type=Path, help="[ontology] story...")
    lint_parser.add_argument('--prototype', type=Path, default=None)

    run = commands.add_parser('run', parents=[common], help="execute stories over a prototype")
    run.add_argument('paths', nargs='+', type=Path, help="[ontology] prototype story...")

    palette = commands.add_parser('palette', parents=[common], help="list widget classes by category")
    palette.add_argument('ontology', nargs='?', type=Path)
    return parser


def _classify(paths: List[Path]):
    """Split positional paths by extension into (ontology, prototype, stories)."""
    ontology, prototype, stories = None, None, []
    for path in paths:
        name = path.name
        if name.endswith(ONTOLOGY_SUFFIX):
            if ontology is not None:
                raise UsageError(f"more than one ontology given: {ontology}, {path}")
            ontology = path
        elif name.endswith(PROTOTYPE_SUFFIX):
            if prototype is not None:
                raise UsageError(f"more than one prototype given: {prototype}, {path}")
            prototype = path
        else:
            stories.append(path)
    return ontology, prototype, stories


def config_from_args(args: argparse.Namespace, settings: Settings) -> RunConfig:
    config = RunConfig(
        command=args.command,
        format=args.format or settings.output_format,
        fail_fast=args.fail_fast,
        output_path=args.output,
        no_color=args.no_color,
        workers=args.workers if args.workers is not None else settings.workers,
    )
    if args.command in ('check-ontology', 'palette'):
        config.ontology_path = args.ontology
    else:
        ontology, prototype, stories = _classify(args.paths)
        if prototype is not None and args.command == 'lint':
            raise UsageError("pass the prototype of lint with --prototype")
        config.ontology_path = ontology
        config.prototype_path = getattr(args, 'prototype', None) or prototype
        config.story_paths = stories
    if config.ontology_path is None:
        config.ontology_path = settings.ontology_path
    return config


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    settings = load_settings()
    configure_logging(settings.log_level)
    try:
        config = config_from_args(args, settings)
        return COMMANDS[config.command](config)
    except (UiVerifyError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"uiverify: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.exception(f"Unexpected error in {args.command}: {e}")
        print(f"uiverify: internal error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
