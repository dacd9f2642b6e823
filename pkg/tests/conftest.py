import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def half_split_image(h, w, left=(50.0, 50.0, 50.0), right=(200.0, 50.0, 50.0)):
    img = np.empty((h, w, 3))
    img[:, : w // 2] = left
    img[:, w // 2:] = right
    return img


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
