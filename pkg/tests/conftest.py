import pytest

from condfiber import ConditionalSpec

DOWNLOAD = (("3/5", "1/5"), ("2/5", "4/5"))
THREE_COL = (("1/2", "1/3", "1/4"), ("1/2", "2/3", "3/4"))
SEVENTEENTHS = (("3/7", "5/17"), ("4/7", "12/17"))
FULL_FOUR = (("1/3", "1/4", "2/5", "1/6"), ("2/3", "0", "0", "1/3"), ("0", "3/4", "3/5", "1/2"))


def spec(c, K, N):
    return ConditionalSpec(c=c, K=K, N=N)


@pytest.fixture
def download():
    """Download (yes/no) given gender, one binary remainder, 50 people."""
    return spec(DOWNLOAD, 2, 50)


@pytest.fixture
def three_col():
    return spec(THREE_COL, 2, 240)


@pytest.fixture
def seventeenths():
    return spec(SEVENTEENTHS, 3, 240)


def evidence_json(N, reference=None):
    data = {
        "N": N,
        "levels": {"A": 3, "B": 2, "C": 2},
        "pieces": [
            {"kind": "conditional", "of": ["B"], "given": ["A"], "values": [list(r) for r in THREE_COL]},
            {
                "kind": "conditional",
                "of": ["C"],
                "given": ["A"],
                "values": [["1/3", "1/3", "1/4"], ["2/3", "2/3", "3/4"]],
            },
        ],
    }
    if reference is not None:
        data["reference_margin"] = list(reference)
    return data


# acceptance lines collected by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
