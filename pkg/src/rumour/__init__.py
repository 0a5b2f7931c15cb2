"""Firework and reverse firework rumour processes on the integers.

Radius laws and schedules, Monte Carlo simulators, analytic survival
criteria and bounds, a brute-force oracle and an experiment runner.
"""

from .distributions import (
    BSequence,
    CriticalTail,
    FiniteTable,
    Geometric,
    PowerLaw,
    catalog,
    distribution_from_spec,
    make_example_schedule,
    make_power_law,
)
from .processes import VertexLayout

__version__ = "0.1.0"

__all__ = [
    "BSequence",
    "CriticalTail",
    "FiniteTable",
    "Geometric",
    "PowerLaw",
    "VertexLayout",
    "catalog",
    "distribution_from_spec",
    "make_example_schedule",
    "make_power_law",
]
