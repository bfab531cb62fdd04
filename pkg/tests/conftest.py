import pytest

from geolp.fixtures import read
from geolp.io import parse_problem_text
from geolp.model import Problem, canonicalize

WORKED_C = (0.5, 1.0, 2.0)
WORKED_A = (
    (2.1, 3, 1),
    (1.7, 2.8, 2.1),
    (3, 1, 2),
    (1.1, 2.3, -1),
    (2.1, 3, 1.1),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0.2, 1),
)
WORKED_SENSES = ("<=",) * 5 + (">=",) * 3
WORKED_B = (5.2, 5, 5.5, 5.3, 5.8, 0, 0, -1)

# reference point and answer as printed in the worked example
PRINTED_BODMP = (0.331, 0.662, 1.325)
PRINTED_X = (1.1497, 0.6241, 0.7134)


@pytest.fixture
def worked() -> Problem:
    return Problem.from_arrays(WORKED_C, WORKED_A, WORKED_SENSES, WORKED_B)


@pytest.fixture
def worked_np(worked):
    return canonicalize(worked)


@pytest.fixture
def fixture_problem():
    return lambda name: parse_problem_text(read(name))


_acceptance: list[tuple[str, str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = "; ".join(str(v) for k, v in report.user_properties if k == "detail")
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}" + (f"  [{detail}]" if detail else ""))
