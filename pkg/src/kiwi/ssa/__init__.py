"""Guarded SSA encoding, incremental unwinding and check construction."""

from kiwi.ssa.checks import build_check
from kiwi.ssa.dump import full_view, match_up_to_naming, program_view
from kiwi.ssa.system import AssertionInstance, Constraint, LoopInfo, LoopInstance, SsaSystem, encode

__all__ = ["AssertionInstance", "Constraint", "LoopInfo", "LoopInstance", "SsaSystem", "build_check",
           "encode", "full_view", "match_up_to_naming", "program_view"]
