import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_script_path() -> Path:
    return FIXTURES / "fixture_script.txt"


@pytest.fixture(scope="session")
def fixture_script_text(fixture_script_path) -> str:
    return fixture_script_path.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fixture_script_truth() -> dict:
    path = FIXTURES / "fixture_script_truth.json"
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def small_lexicon_path() -> Path:
    return FIXTURES / "small_lexicon.tsv"


@pytest.fixture(scope="session")
def small_lexicon(small_lexicon_path):
    from scenescore.sentiment import load_lexicon

    return load_lexicon(small_lexicon_path)
