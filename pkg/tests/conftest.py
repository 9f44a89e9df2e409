from pathlib import Path

import pytest

from itc.freemodel import base_model
from itc.treecore import Step, TreeDescriptor, iterate

TREES = Path(__file__).resolve().parent.parent / "trees"

# acceptance criterion lines, printed once at the end of the run
ACCEPTANCE: dict[int, str] = {}


def bad3_descriptor() -> TreeDescriptor:
    # M_0 has points 0..20 and extenders F0 = (3, 8, 8), F1 = (5, 7, 7).
    # E_0 = F0 (rank 1 by index); E_1 = the copy of F1 in M_1 (rank 0),
    # applied to M_1 although M_0 would have been legal.
    base = base_model(21, [(3, 8, 8), (5, 7, 7)])
    return TreeDescriptor(base, (Step(1, 0), Step(0, 1)))


@pytest.fixture
def bad3_desc():
    return bad3_descriptor()


@pytest.fixture
def bad3():
    return iterate(bad3_descriptor())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
