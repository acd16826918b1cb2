from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

# every property suite runs at least this many generated cases
PROPERTY_CASES = 1000

settings.register_profile(
    "props", max_examples=PROPERTY_CASES, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("props")


@pytest.fixture
def tmp_fixtures(tmp_path):
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "scripts"))
    from make_fixtures import make_fixtures

    return make_fixtures(tmp_path / "fx", size=64)


# -- acceptance reporting -----------------------------------------------------

_ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def _report(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


# -- property-only runs -------------------------------------------------------

def pytest_addoption(parser):
    parser.addoption("--properties-only", action="store_true",
                     help="run only the hypothesis property tests")


def pytest_collection_modifyitems(config, items):
    if not config.getoption("--properties-only"):
        return
    from hypothesis.internal.detection import is_hypothesis_test

    keep = [it for it in items if is_hypothesis_test(getattr(it, "obj", None))]
    config.hook.pytest_deselected(items=[it for it in items if it not in keep])
    items[:] = keep
