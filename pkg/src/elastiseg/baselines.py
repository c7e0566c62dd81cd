"""Comparison losses: binary cross-entropy, Dice, and signed-distance surface loss.

Each loss returns (value, dL/dP) with P the probability map and G the
binary ground-truth mask. All are pure functions.
"""

import numpy as np
from scipy import ndimage

from .fields import as_field, as_mask

BCE_EPS = 1e-7


def bce_loss_grad(p, g):
    """Mean binary cross-entropy and its gradient.

    P is clamped to [eps, 1-eps] before the logs; the gradient is taken
    at the clamped values.
    """
    p = as_field(p)
    g = as_mask(g)
    if p.shape != g.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {g.shape}")
    pc = np.clip(p, BCE_EPS, 1.0 - BCE_EPS)
    n = p.size
    loss = float(-np.mean(g * np.log(pc) + (1.0 - g) * np.log(1.0 - pc)))
    grad = -(g / pc - (1.0 - g) / (1.0 - pc)) / n
    return loss, grad


def dice_loss_grad(p, g, smooth: float = 1.0):
    """Soft Dice loss 1 - (2*sum(PG)+s)/(sum(P)+sum(G)+s) with analytic gradient."""
    p = as_field(p)
    g = as_mask(g)
    if p.shape != g.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {g.shape}")
    num = 2.0 * np.sum(p * g) + smooth
    den = np.sum(p) + np.sum(g) + smooth
    loss = float(1.0 - num / den)
    grad = (num - 2.0 * g * den) / den**2
    return loss, grad


def distance_transform(g) -> np.ndarray:
    """Per-pixel Euclidean distance (in pixels) to the nearest foreground pixel.

    Zero on the foreground. An all-zero mask has no foreground; the
    sentinel W+H is returned everywhere in that case.
    """
    g = as_mask(g)
    if not g.any():
        h, w = g.shape
        return np.full(g.shape, float(w + h))
    # exact EDT: distance to nearest zero of (1-g), i.e. nearest foreground of g
    return ndimage.distance_transform_edt(1.0 - g).astype(np.float64)


def signed_distance(g) -> np.ndarray:
    """Signed distance map: positive outside G, negative inside."""
    g = as_mask(g)
    return distance_transform(g) - distance_transform(1.0 - g)


def surface_loss_grad(p, g):
    """Distance-weighted surface loss: mean of P * sdf(G), gradient sdf/(W*H)."""
    p = as_field(p)
    g = as_mask(g)
    if p.shape != g.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {g.shape}")
    sdf = signed_distance(g)
    loss = float(np.mean(p * sdf))
    return loss, sdf / p.size
