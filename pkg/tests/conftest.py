import os

import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("COUPLEDSCALE_PAPER_SCALE") == "1":
        return
    skip = pytest.mark.skip(reason="full-scale run; set COUPLEDSCALE_PAPER_SCALE=1")
    for item in items:
        if "paper_scale" in item.keywords:
            item.add_marker(skip)


class _Recorder:
    def __init__(self, lines):
        self.lines = lines

    def __call__(self, label):
        return _Criterion(self.lines, label)


class _Criterion:
    def __init__(self, lines, label):
        self.lines = lines
        self.label = label
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "FAIL" if exc_type else "PASS"
        line = f"{status}  {self.label}"
        if self.detail:
            line += f"  [{self.detail}]"
        if exc_type and exc is not None:
            line += f"  {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        self.lines.append(line)
        return False


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """``with criterion("label") as c:`` records one PASS/FAIL line."""
    return _Recorder(_ACCEPTANCE_LINES)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
