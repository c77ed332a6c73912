"""Shared recorder for the acceptance tests' PASS/FAIL summary lines.

Lives in its own module (not conftest) so the import is unambiguous when
several test roots are collected in one run.
"""

# acceptance tests record (criterion label, measured value) here; the
# terminal-summary hook prints one PASS/FAIL line per criterion
ACCEPTANCE_RESULTS: dict[str, str] = {}
ACCEPTANCE_LABELS: dict[str, str] = {}


def record_acceptance(test_name: str, label: str, value: str) -> None:
    ACCEPTANCE_LABELS[test_name] = label
    ACCEPTANCE_RESULTS[test_name] = value
