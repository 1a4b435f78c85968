"""Parsing, type checking, pretty-printing and concrete execution of input programs."""

from kiwi.frontend.ast import Diagnostic, Program
from kiwi.frontend.parser import parse
from kiwi.frontend.printer import pretty
from kiwi.frontend.typecheck import load, typecheck

__all__ = ["Diagnostic", "Program", "parse", "pretty", "typecheck", "load"]
