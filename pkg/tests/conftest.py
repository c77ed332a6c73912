from __future__ import annotations

import pytest

from acceptancelog import ACCEPTANCE_LABELS, ACCEPTANCE_RESULTS
from synthdata import make_provider_files, make_standard_corpus


@pytest.fixture(scope="session")
def standard_corpus(tmp_path_factory):
    d = tmp_path_factory.mktemp("standard_corpus")
    return make_standard_corpus(str(d))


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    d = tmp_path_factory.mktemp("small_corpus")
    return make_standard_corpus(str(d), n_claims=80, n_debates=20, n_queries=16, seed=21)


@pytest.fixture(scope="session")
def provider_files(tmp_path_factory, small_corpus):
    d = tmp_path_factory.mktemp("providers")
    return make_provider_files(str(d), small_corpus)


def pytest_terminal_summary(terminalreporter):
    reports = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid:
                name = rep.nodeid.split("::")[-1]
                reports.append((name, outcome))
    if not reports:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, outcome in sorted(reports, key=lambda r: ACCEPTANCE_LABELS.get(r[0], r[0])):
        label = ACCEPTANCE_LABELS.get(name, name)
        value = ACCEPTANCE_RESULTS.get(name, "no measurement recorded")
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}: {value}")
