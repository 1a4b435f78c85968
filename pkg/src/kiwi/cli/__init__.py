"""Command-line entry point and corpus harness."""

from kiwi.cli.corpus import CorpusEntry, Report, read_manifest, run_corpus
from kiwi.cli.main import main

__all__ = ["CorpusEntry", "Report", "main", "read_manifest", "run_corpus"]
