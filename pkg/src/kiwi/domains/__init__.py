"""Guarded template domains: intervals, zones and octagons."""

from kiwi.domains.template import (BOTTOM, INTERVALS, OCTAGONS, TOP, ZONES, AbstractValue, GuardedTemplate,
                                   TemplateRow, make_template, row_max)

__all__ = ["BOTTOM", "INTERVALS", "OCTAGONS", "TOP", "ZONES", "AbstractValue", "GuardedTemplate",
           "TemplateRow", "make_template", "row_max"]
