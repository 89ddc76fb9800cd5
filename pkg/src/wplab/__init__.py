"""wplab — hyperbolic surfaces, orbit sums and Weil-Petersson curvature rates."""

__version__ = "0.1.0"
