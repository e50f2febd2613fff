import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fixtures import EXPLORE_STRUCT_TEXT, TANGERINE_TEXT, TOMATO_TEXT, TOMI_TEXT

from tomforge.story import parse_story


@pytest.fixture(scope="session")
def tangerine_story():
    return parse_story(TANGERINE_TEXT, story_id="tangerine", dataset_tag="hitom")


@pytest.fixture(scope="session")
def tomi_story():
    return parse_story(TOMI_TEXT, story_id="jeans", dataset_tag="tomi")


@pytest.fixture(scope="session")
def explore_story():
    return parse_story(EXPLORE_STRUCT_TEXT, story_id="typewriter", dataset_tag="exploretom_struct")


@pytest.fixture(scope="session")
def tomato_story():
    return parse_story(TOMATO_TEXT, story_id="tomato", dataset_tag="hitom")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERION_RESULTS
    except ImportError:
        return
    if CRITERION_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_RESULTS):
            terminalreporter.write_line(line)
