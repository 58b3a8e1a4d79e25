from pathlib import Path

import pytest

from rsdl.core import Variant
from rsdl.parser import parse_theory

ROOT = Path(__file__).resolve().parent.parent
THEORIES = ROOT / "theories"
GOLDEN = Path(__file__).resolve().parent / "golden"


def load(name: str, variant: Variant | None = None):
    return parse_theory((THEORIES / name).read_text(encoding="utf-8"), variant)


@pytest.fixture
def ex1():
    return load("example1.rsdl")


@pytest.fixture
def ex2():
    return load("example2.rsdl")


@pytest.fixture
def ex3():
    return load("example3.rsdl")


@pytest.fixture
def ex4():
    return load("example4.rsdl")
