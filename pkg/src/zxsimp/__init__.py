"""zxsimp: exact-scalar stabilizer simplification of qubit and qutrit ZX-diagrams."""

from .diagram import (
    Builder,
    Diagram,
    Edge,
    Phase,
    PortRef,
    Spider,
    adjoint,
    boundary_port,
    compose,
    construct,
    spider_port,
    validate,
)
from .oracle import contract_closed, interpret, proportional_ratio
from .scalars import ExactScalar
from .serialize import diagram_from_json, diagram_to_json, dumps, loads

__all__ = [
    "Builder", "Diagram", "Edge", "ExactScalar", "Phase", "PortRef", "Spider",
    "adjoint", "boundary_port", "compose", "construct", "contract_closed",
    "diagram_from_json", "diagram_to_json", "dumps", "interpret", "loads",
    "proportional_ratio", "spider_port", "validate",
]

__version__ = "0.1.0"
