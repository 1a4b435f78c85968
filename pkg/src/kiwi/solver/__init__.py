"""Bit-vector expressions, bit-blasting and incremental SAT back ends."""

from kiwi.solver.bv import BvExpr, evaluate
from kiwi.solver.context import Model, ResourceLimit, SolveResult, SolverContext

__all__ = ["BvExpr", "evaluate", "Model", "ResourceLimit", "SolveResult", "SolverContext"]
