import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slsguard.model import Language, SourceUnit, Vendor  # noqa: E402


@pytest.fixture
def make_unit():
    def _make(text, path="handler.py", language=None, vendor=None):
        unit = SourceUnit(path=Path(path), text=text)
        if language is not None:
            unit.language = Language(language)
        if vendor is not None:
            unit.vendor = Vendor(vendor)
        return unit

    return _make


CORPUS_DIR = Path(__file__).parent / "corpus"


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS_DIR
