from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import cases


@pytest.fixture
def case1_timeline():
    return cases.case1()


@pytest.fixture
def case2_timeline():
    return cases.case2()


@pytest.fixture
def case3_timeline():
    return cases.case3()


@pytest.fixture
def case4_timeline():
    return cases.case4()
