from __future__ import annotations

import pytest

from rentsim import CapacityConfig, Job, JobSequence

from helpers import ACCEPTANCE_VERDICTS


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture
def three_job_instance() -> JobSequence:
    """The 3/4/4 instance where the third job forces a close at t=3.

    Next Fit packs jobs 1 and 2 together, closes their server when job 3
    arrives, and pays 5 + 2 = 7 in total; the offline optimum is also 7.
    """
    return JobSequence(
        [Job(1, 3, 1, 5), Job(2, 4, 2, 6), Job(3, 4, 3, 5)],
        CapacityConfig(10),
    )
