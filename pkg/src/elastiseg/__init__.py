"""Elastic-interaction boundary loss for segmentation, at desk scale.

Core pieces: a spectral |k| quadratic form over the combined field
D = G - alpha*H(P - 0.5) with an O(N^2) direct-summation oracle, the
analytic dE/dP, a projected gradient flow, baseline losses, a tiny
hand-backprop conv net, synthetic vessel phantoms, and evaluation metrics.
"""

from .elastic_loss import (
    EnergyGrad,
    PilParams,
    combined_field,
    energy_direct,
    energy_spectral,
    loss_and_grad,
)
from .fields import (
    HARDTANH,
    SINUSOIDAL,
    HeavisideSpec,
    apply_heaviside,
    apply_heaviside_deriv,
    heaviside,
    heaviside_deriv,
    prob_to_levelset,
)
from .spectral import SpectralPlan, apply_halfnorm, build_plan, kernel_table

__all__ = [
    "EnergyGrad",
    "PilParams",
    "combined_field",
    "energy_direct",
    "energy_spectral",
    "loss_and_grad",
    "HARDTANH",
    "SINUSOIDAL",
    "HeavisideSpec",
    "apply_heaviside",
    "apply_heaviside_deriv",
    "heaviside",
    "heaviside_deriv",
    "prob_to_levelset",
    "SpectralPlan",
    "apply_halfnorm",
    "build_plan",
    "kernel_table",
]

__version__ = "0.1.0"
