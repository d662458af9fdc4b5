import time

import pytest

from k3db.db import BuildReport, build, compute_centres, save

# (criterion, PASS/FAIL/SKIP, detail) lines collected by the acceptance tests
ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.fixture(scope="session")
def k3_build():
    """The full K3 database up to codim 4, built once per session."""
    report = BuildReport()
    t0 = time.perf_counter()
    db = build("k3", 4, jobs=1, report=report)
    elapsed = time.perf_counter() - t0
    missing = []
    db = compute_centres(db, missing)
    return db, report, elapsed, missing


@pytest.fixture(scope="session")
def k3_db(k3_build):
    return k3_build[0]


@pytest.fixture(scope="session")
def k3_db_file(k3_db, tmp_path_factory):
    path = tmp_path_factory.mktemp("db") / "k3.jsonl"
    save(k3_db, path)
    return path


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {name}: {detail}")
