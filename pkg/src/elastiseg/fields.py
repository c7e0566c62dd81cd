"""2D scalar fields, binary masks, and the smoothed Heaviside machinery.

Fields are plain float64 numpy arrays of shape (height, width), row-major.
Masks are arrays whose entries are exactly 0 or 1. Grid spacing lives on the
SpectralPlan (see spectral.py); the field ops here are spacing-free.
"""

from dataclasses import dataclass

import numpy as np

SINUSOIDAL = "sinusoidal"
HARDTANH = "hardtanh"

_KINDS = (SINUSOIDAL, HARDTANH)


@dataclass(frozen=True)
class HeavisideSpec:
    """Smoothed step function: half-width beta, profile kind."""

    beta: float = 0.25
    kind: str = HARDTANH

    def __post_init__(self):
        if not (self.beta > 0):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")


def as_field(values) -> np.ndarray:
    """Validate and return a 2D float64 field (finite entries)."""
    f = np.asarray(values, dtype=np.float64)
    if f.ndim != 2:
        raise ValueError(f"field must be 2D, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("field contains non-finite values")
    return f


def as_mask(values) -> np.ndarray:
    """Validate and return a 2D mask with entries in {0, 1} (float64)."""
    m = as_field(values)
    if not np.all((m == 0.0) | (m == 1.0)):
        raise ValueError("mask entries must be exactly 0 or 1")
    return m


def prob_to_levelset(p) -> np.ndarray:
    """Map a probability field in [0,1] to a level set phi = p - 0.5.

    phi > 0 inside the predicted region. Values outside [0,1] beyond a
    1e-9 tolerance are rejected.
    """
    p = as_field(p)
    if p.min() < -1e-9 or p.max() > 1.0 + 1e-9:
        raise ValueError(
            f"probabilities must lie in [0,1], got range [{p.min()}, {p.max()}]"
        )
    return p - 0.5


def heaviside(phi, spec: HeavisideSpec):
    """Smoothed Heaviside H(phi) in [0,1].

    Sinusoidal: 0 for phi <= -beta, 1 for phi >= beta,
    0.5*(sin(pi*phi/(2*beta)) + 1) in between. HardTanh: the linear ramp
    clamp(phi/(2*beta) + 0.5, 0, 1). Accepts scalars or arrays.
    """
    phi = np.asarray(phi, dtype=np.float64)
    b = spec.beta
    if spec.kind == HARDTANH:
        out = np.clip(phi / (2.0 * b) + 0.5, 0.0, 1.0)
    else:
        ramp = 0.5 * (np.sin(np.pi * phi / (2.0 * b)) + 1.0)
        out = np.where(phi <= -b, 0.0, np.where(phi >= b, 1.0, ramp))
    return out if out.ndim else float(out)


def heaviside_deriv(phi, spec: HeavisideSpec):
    """Exact derivative dH/dphi, nonnegative.

    At the kink points |phi| = beta the interior one-sided value is
    returned, so pixels sitting exactly on the threshold keep a live
    gradient (measure zero, energy unaffected).
    """
    phi = np.asarray(phi, dtype=np.float64)
    b = spec.beta
    inside = np.abs(phi) <= b
    if spec.kind == HARDTANH:
        out = np.where(inside, 1.0 / (2.0 * b), 0.0)
    else:
        out = np.where(
            inside, (np.pi / (4.0 * b)) * np.cos(np.pi * phi / (2.0 * b)), 0.0
        )
    return out if out.ndim else float(out)


def apply_heaviside(phi, spec: HeavisideSpec) -> np.ndarray:
    """Elementwise H(phi) over a field."""
    return heaviside(as_field(phi), spec)


def apply_heaviside_deriv(phi, spec: HeavisideSpec) -> np.ndarray:
    """Elementwise dH/dphi over a field."""
    return heaviside_deriv(as_field(phi), spec)
