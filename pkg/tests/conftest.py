import numpy as np
import pytest
from hypothesis import settings

from condcoding.prob import Joint2

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_joint(rng, nrow, ncol, sparsity=0.0, row_offset=0, col_offset=0):
    w = rng.random((nrow, ncol))
    if sparsity:
        w[rng.random((nrow, ncol)) < sparsity] = 0.0
        if w.sum() == 0:
            w[0, 0] = 1.0
    return Joint2(w / w.sum(), row_offset, col_offset)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            for key, value in getattr(rep, "user_properties", []):
                if key == "criterion":
                    lines.append((value, "PASS" if outcome == "passed" else "FAIL"))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(lines):
        terminalreporter.write_line(f"[{verdict}] {name}")
