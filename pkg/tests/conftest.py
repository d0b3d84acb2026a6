import sys
from pathlib import Path

import pytest

from cordchat.corpus import build_corpus

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return DATA_DIR / "corpus"


@pytest.fixture(scope="session")
def fixture_corpus(corpus_dir):
    return build_corpus(corpus_dir)


@pytest.fixture(scope="session")
def raw_generation() -> str:
    return (DATA_DIR / "raw_generation.txt").read_text("utf-8")


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        outcome = "PASS" if report.passed else ("FAIL" if report.failed else "SKIP")
        name = report.nodeid.split("::")[-1]
        print(f"\nACCEPTANCE {outcome}: {name}", flush=True)
