import contextlib
import os
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).parent / "fixtures"


def _data_file(env, name):
    p = Path(os.environ.get(env, ROOT / "data" / name))
    return p if p.is_file() else None


REDWINE_CSV = _data_file("SKETCHLS_REDWINE_CSV", "winequality-red.csv")
CALIHOUSING_CSV = _data_file("SKETCHLS_CALIHOUSING_CSV", "cal_housing.csv")


@pytest.fixture
def redwine_csv():
    if REDWINE_CSV is None:
        pytest.skip("red wine CSV not available (set SKETCHLS_REDWINE_CSV or use data/)")
    return REDWINE_CSV


@pytest.fixture
def calihousing_csv():
    if CALIHOUSING_CSV is None:
        pytest.skip("California housing CSV not available (set SKETCHLS_CALIHOUSING_CSV or use data/)")
    return CALIHOUSING_CSV


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion.

    Usage: ``with acceptance("C1", "summary") as note: ...``; ``note(text)``
    appends detail. The line is printed immediately and again in the
    terminal summary so it survives output capture.
    """
    @contextlib.contextmanager
    def record(tag, title):
        details = []
        try:
            yield details.append
        except BaseException as err:
            if isinstance(err, pytest.skip.Exception):
                raise
            line = f"{tag} FAIL  {title}: {'; '.join(details + [str(err).splitlines()[0] if str(err) else type(err).__name__])}"
            ACCEPTANCE_LINES.append(line)
            print(line)
            raise
        line = f"{tag} PASS  {title}" + (f": {'; '.join(details)}" if details else "")
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
