"""Template invariant inference by binary search and by model enumeration."""

from kiwi.inference.solve import (BINSEARCH, ENUM, Inductive, Inference, InferenceStats, StrengthenStats,
                                  Violation, infer, infer_enumeration)

__all__ = ["BINSEARCH", "ENUM", "Inductive", "Inference", "InferenceStats", "StrengthenStats", "Violation",
           "infer", "infer_enumeration"]
