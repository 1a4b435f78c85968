"""Verification loop, restricted modes, portfolio and certification."""

from kiwi.engine.run import (AI, IBMC, KIKI, KIND, PORTFOLIO, RESOURCE_OUT, SAFE, UNKNOWN, UNSAFE,
                             CertificationError, Config, Engine, Verdict, run, run_ai, run_ibmc,
                             run_kiki, run_kinduction)
from kiwi.engine.portfolio import run_portfolio
from kiwi.engine.trace import Trace, replay

__all__ = ["AI", "IBMC", "KIKI", "KIND", "PORTFOLIO", "RESOURCE_OUT", "SAFE", "UNKNOWN", "UNSAFE",
           "CertificationError", "Config", "Engine", "Trace", "Verdict", "replay", "run", "run_ai",
           "run_ibmc", "run_kiki", "run_kinduction", "run_portfolio"]
