import re

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

_acceptance: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and report.when == "call":
        m = re.match(r"test_criterion_(\d+)", item.name)
        if m:
            title = (item.function.__doc__ or item.name).strip().splitlines()[0]
            _acceptance[int(m.group(1))] = ("PASS" if report.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        status, title = _acceptance[n]
        terminalreporter.write_line(f"{status} criterion {n}: {title}")
