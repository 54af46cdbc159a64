import time
from contextlib import contextmanager

import pytest

from forestlab import complexes

CRITERIA = {
    1: "reduction confluence",
    2: "group laws",
    3: "hypergraph table",
    4: "Morse lemma",
    5: "bad simplex argument",
    6: "complete-join theorem",
    7: "Stein-Farley local geometry",
    8: "cross-module consistency",
}

# every complex built while the suite runs; criterion 8 audits them at the end
SUITE_COMPLEXES = None


def pytest_configure(config):
    global SUITE_COMPLEXES
    config._acceptance = {}
    SUITE_COMPLEXES = complexes.track_complexes()


def pytest_collection_modifyitems(session, config, items):
    # the consistency audit runs last so it sees everything the suite built
    last = [it for it in items if "criterion_8" in it.name]
    rest = [it for it in items if "criterion_8" not in it.name]
    items[:] = rest + last


def suite_complexes():
    return SUITE_COMPLEXES


@pytest.fixture
def acceptance(request):
    results = request.config._acceptance

    @contextmanager
    def record(number):
        info = {"detail": ""}
        t0 = time.perf_counter()
        try:
            yield info
        except BaseException:
            results[number] = ("FAIL", time.perf_counter() - t0, info["detail"])
            raise
        results[number] = ("PASS", time.perf_counter() - t0, info["detail"])

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n, name in CRITERIA.items():
        if n in results:
            status, secs, detail = results[n]
            extra = f" [{detail}]" if detail else ""
            terminalreporter.write_line(f"criterion {n} ({name}): {status} in {secs:.1f}s{extra}")
        else:
            terminalreporter.write_line(f"criterion {n} ({name}): NOT RUN")
