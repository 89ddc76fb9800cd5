"""Model Beltrami differentials, quartic pairings, surface Green operator, curvature."""

from .bochner import bochner_curvature
from .differentials import (
    ModelDifferential,
    collar_sin6_integral,
    model_gradient,
    model_thick,
    sine_decay_argmax,
)
from .experiments import EXAMPLES, example_experiment, example_point
from .pairings import Frame, Product, holder_chain, pairing, riemann_entry, wp_inner
from .surface import SurfaceGreen, collar_gap

__all__ = [
    "EXAMPLES",
    "Frame",
    "ModelDifferential",
    "Product",
    "SurfaceGreen",
    "bochner_curvature",
    "collar_gap",
    "collar_sin6_integral",
    "example_experiment",
    "example_point",
    "holder_chain",
    "model_gradient",
    "model_thick",
    "pairing",
    "riemann_entry",
    "sine_decay_argmax",
    "wp_inner",
]
