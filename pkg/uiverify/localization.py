# Message catalog for findings and reports. Step keywords are never localized.
from uiverify.logging_config import logger

TEXTS = {
    'en': {
        # Verifier findings
        'unknown_behavior': 'No behavior template matches "{text}"',
        'clause_mismatch': "Behavior '{behavior}' cannot be used in a {clause} step; allowed in: {roles}",
        'widget_not_found': 'No widget named "{name}" in state "{state}"',
        'text_not_found': 'Nothing displays "{text}" in state "{state}"',
        'state_not_found': 'No state named "{name}" in prototype "{prototype}"',
        'incompatible_element': 'Widget "{name}" is a {widget_class}; \'{behavior}\' requires one of: {allowed}',
        'transition_not_found': 'No transition from "{state}" labeled with scenario "{scenario}"',

        # Text report
        'story_header': 'User Story: {title}',
        'scenario_header': '  Scenario: {title} [{overall}]',
        'step_line': '    {symbol} {keyword} {text}',
        'step_finding': '        {code}: {message}',
        'skipped_scenario': '  Scenario: {title} [not run, {steps} step(s) untested]',
        'summary': '{passed} passed, {failed} failed, {untested} untested',
        'lint_header': 'Lint: {title}',
        'lint_line': '  {scenario}:{index} (line {line}) {code}: {message}',
        'findings_count': '{count} findings',
        'consistency_header': 'Ontology {version}',
        'consistency_line': '  [{severity}] {code} at {locus}: {message}',

        # Palette
        'palette_category': '{name}',
        'palette_entry': '  {display_name} ({class_id})',
        'palette_properties': '      properties: {items}',
        'palette_behaviors': '      behaviors: {items}',
        'none': '-',
    },
}


def get_text(lang: str, key: str, **kwargs) -> str:
    """Look up a message and format it.

    Args:
        lang: Language code
        key: Message key
        **kwargs: Format parameters

    Returns:
        The formatted message, the unformatted one on format errors, or the key itself when missing
    """
    try:
        texts = TEXTS.get(lang, TEXTS['en'])
        text = texts.get(key, key)

        if text == key and lang != 'en':
            text = TEXTS['en'].get(key, key)

        if kwargs and text != key:
            try:
                return text.format(**kwargs)
            except (KeyError, ValueError) as e:
                logger.warning(f"Format error in get_text: {e}, key={key}, lang={lang}")
                return text

        return text
    except Exception as e:
        logger.error(f"Error in get_text: {e}, key={key}, lang={lang}")
        return key
