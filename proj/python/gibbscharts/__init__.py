"""Gibbs measures on subshifts of finite type and the smooth structures they
induce on hyperbolic toral automorphisms."""

from _gibbscharts import (  # noqa: F401
    GibbsError,
    Structure,
    Subshift,
    partition_info,
    periodic_points,
    verify_suite,
)

__all__ = [
    "GibbsError",
    "Structure",
    "Subshift",
    "partition_info",
    "periodic_points",
    "verify_suite",
]
