import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from pathlib import Path

import pytest

from diagcert.rings import RingDescriptor, ZZ

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def zz():
    return ZZ


@pytest.fixture(scope="session")
def zx():
    return RingDescriptor.polynomial("integers", ["x"], "lex")


@pytest.fixture(scope="session")
def qx():
    return RingDescriptor.polynomial("rationals", ["x"], "lex")


@pytest.fixture(scope="session")
def qxy():
    return RingDescriptor.polynomial("rationals", ["x", "y"], "grevlex")


@pytest.fixture(scope="session")
def qxy_lex():
    return RingDescriptor.polynomial("rationals", ["x", "y"], "lex")


@pytest.fixture(scope="session")
def f5x():
    return RingDescriptor.polynomial(5, ["x"], "lex")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES
