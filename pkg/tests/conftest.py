import io
import random

import pytest

from patientmetrics.ingestion import loads_records
from patientmetrics.tree import LabeledTree

# Table 2 rows, one CSV row per event occurrence
TABLE2_CSV = """patient_id,sex,age,event_code
a6706013B,1,15,M26
a6706015R,2,10,168
a6706015R,2,10,195
a6706015R,2,10,730
a6706015R,2,10,F58
a6706015R,2,10,F58
a670601o8,1,12,171
a670601o8,1,12,19C
a670601o8,1,12,1A5
a670601o8,1,12,H17
a670601o8,1,12,M0.
a670601o8,1,12,M26
a670601o8,1,12,N24
a670601o8,1,12,N32
a670601o8,1,12,SD.
a670601o8,1,12,SL.
a670601yJ,2,11,M26
a670601yJ,2,11,ZL5
"""

THREE_PATIENTS_CSV = """patient_id,sex,age,event_code
p1,1,10,A10
p1,1,10,B20
p2,1,10,A10
p2,1,10,B20
p2,1,10,B20
p3,2,12,C30
"""


def random_tree(rng: random.Random, max_nodes: int, alphabet: str = "abc") -> LabeledTree:
    """Random ordered tree of 1..max_nodes nodes by attaching to random parents."""
    n = rng.randint(1, max_nodes)
    labels = [rng.choice(alphabet) for _ in range(n)]
    kids: list[list[int]] = [[] for _ in range(n)]
    for i in range(1, n):
        parent = rng.randrange(i)
        kids[parent].insert(rng.randint(0, len(kids[parent])), i)

    def build(i):
        return LabeledTree(labels[i], tuple(build(c) for c in kids[i]))

    return build(0)


@pytest.fixture
def table2():
    return loads_records(TABLE2_CSV)


@pytest.fixture
def three_patients():
    return loads_records(THREE_PATIENTS_CSV)


@pytest.fixture
def table2_path(tmp_path):
    path = tmp_path / "table2.csv"
    path.write_text(TABLE2_CSV)
    return path


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, ok, detail)."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
