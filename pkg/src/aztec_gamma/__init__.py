"""Sampler and verification toolkit for Gamma-disordered random dimer
models on the diamond graph and their companion lattice polymers."""

__version__ = "0.1.0"

from .params import ParamSet, AdmissibilityError
from .rng import RngStream
from .weights import WeightField, downshuffle, upshuffle_arrays, cascade, partition_product
from .matching import Matching, validate, matching_weight, turning_points
from .matching import vertical_slice, horizontal_slice

__all__ = [
    "ParamSet", "AdmissibilityError", "RngStream", "WeightField",
    "downshuffle", "upshuffle_arrays", "cascade", "partition_product",
    "Matching", "validate", "matching_weight", "turning_points",
    "vertical_slice", "horizontal_slice",
]
