"""Order-one invariant calculus for surface immersions: symbols, relations, universal group, QQ geometry."""

from .abelian import GroupElement, GroupSpec, IntMatrix, presentation_quotient, smith_normal_form
from .quintuple import PlaneQuintuple, bifurcation_diagram, qq_relation_check, random_quintuple
from .relations import crosscheck_gU, raw_relation_instances, universal_group
from .symbols import Configuration, DegreeWindow, FormalSum, Symbol, make_configuration, sum_normalize

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "DegreeWindow",
    "FormalSum",
    "GroupElement",
    "GroupSpec",
    "IntMatrix",
    "PlaneQuintuple",
    "Symbol",
    "bifurcation_diagram",
    "crosscheck_gU",
    "make_configuration",
    "presentation_quotient",
    "qq_relation_check",
    "random_quintuple",
    "raw_relation_instances",
    "smith_normal_form",
    "sum_normalize",
    "universal_group",
]
