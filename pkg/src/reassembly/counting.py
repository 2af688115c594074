"""Closed-form graph-size and reassembly-count analytics.

These recursions describe the decision graph with the outsider class
enabled and no cuts; they double as an independent check of the builder.
All arithmetic is in unbounded Python integers (a 17-fragment graph has
billions of nodes, well past 32-bit range).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError

MAX_POSITIONS = 8


@dataclass(frozen=True)
class GraphSizeQuery:
    f: int  # lateral fragments to place
    p: int  # available lateral positions

    def __post_init__(self):
        if self.f < 1:
            raise DomainError(f"f must be >= 1, got {self.f}")
        if not 0 <= self.p <= MAX_POSITIONS:
            raise DomainError(f"p must be in 0..{MAX_POSITIONS}, got {self.p}")


@lru_cache(maxsize=None)
def _n(f: int, p: int) -> int:
    if f == 1:
        return p + 2
    if p == 0:
        return f + 1
    return p * _n(f - 1, p - 1) + _n(f - 1, p) + 1


@lru_cache(maxsize=None)
def _e(f: int, p: int) -> int:
    # The recursive term is e(f-1, p-1); see tests for the exhaustive
    # enumeration that pins this reading down.
    if f == 1:
        return 2 * p + 3
    if p == 0:
        return f + 2
    return p * _e(f - 1, p - 1) + _e(f - 1, p) + 1


def node_count(q: GraphSizeQuery) -> int:
    """Total nodes, source and sink included."""
    return _n(q.f, q.p) + 1


def edge_count(q: GraphSizeQuery) -> int:
    return _e(q.f, q.p) - 1


def reassembly_lower_bound(f: int, p: int, outsiders_allowed: bool) -> int:
    """Lower bound on the number of complete reassemblies.

    Without outsiders every fragment must land on a distinct position, so
    f <= p is required and the count is exactly p!/(p-f)!. With outsiders
    and more fragments than positions, each position can be filled by any
    remaining fragment or left empty, giving (f+1)!/(f+1-p)! as a floor.
    """
    GraphSizeQuery(f, p)  # reuse the domain checks
    if f <= p:
        return math.factorial(p) // math.factorial(p - f)
    if not outsiders_allowed:
        raise DomainError(f"{f} fragments cannot fill {p} positions without the outsider class")
    return math.factorial(f + 1) // math.factorial(f + 1 - p)
