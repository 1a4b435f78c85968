import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from oracles import CORPUS  # noqa: E402

CORPUS_MAX_K = 20


@pytest.fixture(scope="session")
def corpus_report():
    """All modes over the bundled corpus, serial and seeded."""
    from kiwi.cli.corpus import run_corpus

    return run_corpus(CORPUS, max_k=CORPUS_MAX_K, seed=0)
