import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from deltaplates import Plate, Stack

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", "60")),
)
settings.load_profile("default")


# --- shared stacks ----------------------------------------------------------

@pytest.fixture
def pe_pair():
    return Stack([Plate.perfect_e(0.0), Plate.perfect_e(1.0)])


@pytest.fixture
def pe_triple():
    return Stack([Plate.perfect_e(0.0), Plate.perfect_e(1.0), Plate.perfect_e(2.0)])


@pytest.fixture
def md_triple():
    return Stack([
        Plate.magnetodielectric(0.0, 2.0, 1.0),
        Plate.magnetodielectric(0.8, 0.5, 3.0),
        Plate.magnetodielectric(1.5, 4.0, 0.0),
    ])


def random_md_stack(rng, n, lam_max=10.0, gap_range=(0.1, 5.0), start=0.0):
    gaps = rng.uniform(*gap_range, n - 1)
    positions = start + np.concatenate(([0.0], np.cumsum(gaps)))
    return Stack([Plate.magnetodielectric(z, *rng.uniform(0.0, lam_max, 2)) for z in positions])


# --- acceptance report ------------------------------------------------------
# Tests marked @pytest.mark.acceptance(n, title) may attach a detail string
# through the ``acceptance_detail`` fixture; the summary prints one line per
# criterion with its pass/fail status.

def pytest_configure(config):
    config._acceptance = {}


@pytest.fixture
def acceptance_detail(request):
    marker = request.node.get_closest_marker("acceptance")
    store = request.config._acceptance

    def note(text):
        number = marker.args[0]
        entry = store.setdefault(number, {"title": marker.args[1], "outcomes": [], "details": []})
        entry["details"].append(text)

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = marker.args[0], marker.args[1]
        entry = item.config._acceptance.setdefault(number, {"title": title, "outcomes": [], "details": []})
        entry["outcomes"].append(report.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = getattr(config, "_acceptance", {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        entry = store[number]
        ok = bool(entry["outcomes"]) and all(entry["outcomes"])
        status = "PASS" if ok else "FAIL"
        detail = "; ".join(entry["details"])
        terminalreporter.write_line(f"[{status}] criterion {number}: {entry['title']}" + (f" -- {detail}" if detail else ""))
