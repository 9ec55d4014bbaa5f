"""Site percolation experiments on boxes and tiles."""

from ._backend import BACKEND
from .core import (BoxSpec, ClusterStats, Configuration, ProfileRow, RenormRow, Substrate,
                   bernoulli_sites, box_substrate, centered_boxes, clusters, good_box,
                   nondecreasing_within_noise, renorm_experiment, strictly_decreasing,
                   substrate_from_elements, uniforms, unique_giant_profile)

__all__ = ["BACKEND", "BoxSpec", "ClusterStats", "Configuration", "ProfileRow", "RenormRow",
           "Substrate", "bernoulli_sites", "box_substrate", "centered_boxes", "clusters", "good_box",
           "nondecreasing_within_noise", "renorm_experiment", "strictly_decreasing",
           "substrate_from_elements", "uniforms", "unique_giant_profile"]
