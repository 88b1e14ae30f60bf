from __future__ import annotations

import re
import sys
from pathlib import Path

import pytest

from varsat.parser import load_theory, parse_formula, parse_term
from varsat.variants import VariantEngine

ROOT = Path(__file__).resolve().parents[1]
THEORIES = ROOT / "theories"


def theory(name: str):
    return load_theory(str(THEORIES / f"{name}.vsat"))


@pytest.fixture(scope="session")
def natset():
    return theory("natset")


@pytest.fixture(scope="session")
def preds():
    return theory("natsetpreds")


@pytest.fixture(scope="session")
def boolth():
    return theory("bool")


@pytest.fixture(scope="session")
def peano():
    return theory("peano")


@pytest.fixture(scope="session")
def peanoctor():
    return theory("peanoctor")


@pytest.fixture(scope="session")
def lists():
    return theory("lists")


@pytest.fixture(scope="session")
def listsel():
    return theory("listsel")


def engine(th, **bounds):
    from varsat.variants import Bounds
    return VariantEngine(th.rules, th.rewriter, th.unifier, Bounds(**bounds) if bounds else None)


def T(th, text):
    return parse_term(th, text)


def F(th, text):
    return parse_formula(th, text)


def alpha_str(s: str) -> str:
    """Rename fresh variables ``V<n>`` in order of first occurrence."""
    seen: dict[str, str] = {}

    def sub(m: re.Match) -> str:
        return seen.setdefault(m.group(0), f"_{len(seen)}")

    return re.sub(r"\bV\d+\b", sub, s)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(mod.RESULTS):
            terminalreporter.write_line(mod.RESULTS[n])
