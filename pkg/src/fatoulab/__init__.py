"""Iteration, Fatou/Julia approximation and postsingular tracking for a small
catalog of transcendental meromorphic maps."""

from .errors import FatouLabError, PoleHit, OverflowDomain, UnlabeledSeed
from .fatou import FatouGrid, boundary_distance, classify_grid, inscribed_disk_radius, julia_pixels
from .mapcat import MeromorphicMap, Window, deriv, evaluate, poles_in_window, singular_points
from .orbit import IterParams, Orbit, Verdict, convergence_order, iterate, real_orbit
from .psv import PostsingularCloud, build_cloud, nearest
from .verify import VerificationReport

__all__ = [
    "FatouLabError", "PoleHit", "OverflowDomain", "UnlabeledSeed",
    "FatouGrid", "boundary_distance", "classify_grid", "inscribed_disk_radius", "julia_pixels",
    "MeromorphicMap", "Window", "deriv", "evaluate", "poles_in_window", "singular_points",
    "IterParams", "Orbit", "Verdict", "convergence_order", "iterate", "real_orbit",
    "PostsingularCloud", "build_cloud", "nearest", "VerificationReport",
]
