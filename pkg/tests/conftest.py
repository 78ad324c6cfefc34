from pathlib import Path

import pytest

from gemframe import load_lexicon

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"

GOLDEN_NAMES = sorted(p.stem for p in GOLDEN.glob("*.txt"))


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


def golden_text(name: str) -> str:
    return (GOLDEN / f"{name}.txt").read_text("utf-8")


def golden_xml(name: str) -> str:
    return (GOLDEN / f"{name}.expected.xml").read_text("utf-8")
