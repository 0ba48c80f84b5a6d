import json
import sys
from pathlib import Path

import mpmath as mp
import pytest

from rieszlab.arith import PrecisionConfig
from rieszlab.zeros import standard_table

HERE = Path(__file__).parent
FROZEN = json.loads((HERE / "oracles" / "frozen.json").read_text())


def mpv(s):
    """Frozen oracle string (or [re, im] pair) as an mpmath number."""
    with mp.workprec(256):
        if isinstance(s, (list, tuple)):
            return mp.mpc(mp.mpf(s[0]), mp.mpf(s[1]))
        return mp.mpf(s)


@pytest.fixture(scope="session")
def frozen():
    return FROZEN


@pytest.fixture(scope="session")
def cfg():
    return PrecisionConfig()


@pytest.fixture(scope="session")
def zero_cache(request):
    # persistent between sessions so enrichment runs once per machine
    return Path(request.config.cache.mkdir("rieszlab-zeros"))


@pytest.fixture(scope="session")
def table30(zero_cache):
    return standard_table(30, PrecisionConfig(), cache_dir=zero_cache)


@pytest.fixture(scope="session")
def table60(zero_cache):
    return standard_table(60, PrecisionConfig(), cache_dir=zero_cache)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        ok, detail = results[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
