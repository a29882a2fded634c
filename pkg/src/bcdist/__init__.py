"""Distortion regions for broadcasting a memoryless source over a degraded broadcast channel.

Modules:

* ``infomath``: binary entropy, its inverse, binary convolution, h4, g1, g2
* ``capacity``: channel instances and capacity-region membership
* ``gaussian`` / ``binary``: inner and outer distortion bounds
* ``region``: Pareto frontiers, hulls, containment and comparison
* ``discrete``: brute-force inner bound over small alphabets
* ``hybrid``: Monte Carlo hybrid coding and covering/packing experiments
* ``cli``: the ``bcdist`` command
"""
from .capacity import (BinaryBcSpec, GaussianBcSpec, Membership, SideInfoSpec, bbc_member,
                       gbc_member)
from .errors import ConfigError, DimensionError, DomainError, MemoryGuardError, UnsupportedError
from .infomath import bconv, g1, g2, h2, h2_inv, h4
from .region import Frontier, frontier_compare, frontier_contains, lower_hull, pareto_reduce

__version__ = "0.1.0"

__all__ = [
    "BinaryBcSpec", "GaussianBcSpec", "Membership", "SideInfoSpec", "bbc_member", "gbc_member",
    "ConfigError", "DimensionError", "DomainError", "MemoryGuardError", "UnsupportedError",
    "bconv", "g1", "g2", "h2", "h2_inv", "h4",
    "Frontier", "frontier_compare", "frontier_contains", "lower_hull", "pareto_reduce",
]
