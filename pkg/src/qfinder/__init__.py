"""Exact search for quadratic first integrals of conservative Newtonian systems on E^2 and E^3."""

from .constraints import Potential, SolutionSpace, solve_integral1, solve_integral2
from .exponential import solve_integral3
from .geometry import GeometryConfig, UnsupportedDimension
from .parser import ParseError, parse_potential, parse_ring_elem
from .qfi import QFI, TimeBasis, noether_generator
from .ring import RingElem
from .search import find_integrals

__all__ = [
    "GeometryConfig",
    "ParseError",
    "Potential",
    "QFI",
    "RingElem",
    "SolutionSpace",
    "TimeBasis",
    "UnsupportedDimension",
    "find_integrals",
    "noether_generator",
    "parse_potential",
    "parse_ring_elem",
    "solve_integral1",
    "solve_integral2",
    "solve_integral3",
]
