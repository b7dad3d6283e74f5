import pytest

from odvote import InformationStructure, Metric, Preference, Radius, VotingRule

NAMES = "wbcde"


def plural(m, c):
    return tuple(int(i == c) for i in range(m))


@pytest.fixture
def five_cand():
    """Others' state, prefs e>d>c>b>w and the four EMD levels around it."""
    state = (29, 26, 22, 17, 5)
    info = InformationStructure.concentric(
        Metric.emd(), state, [Radius.percent(p) for p in (1, 3, 7, 17)]
    )
    prefs = Preference.from_order([4, 3, 2, 1, 0])
    return state, info, prefs, VotingRule.plurality(5)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
