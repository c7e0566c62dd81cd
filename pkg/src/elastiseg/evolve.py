"""Level-set gradient flow driven by the elastic boundary force.

Plain projected gradient descent on the probability field: no network, no
reinitialization. Demonstrates that the boundary-alignment force pulls a
predicted contour onto the ground truth.
"""

from dataclasses import dataclass, field

import numpy as np

from .elastic_loss import DEFAULT_PREFACTOR, PilParams, loss_and_grad
from .fields import HeavisideSpec, as_field, as_mask
from .spectral import SpectralPlan

ETA_FLOOR = 1e-6


class DivergenceError(RuntimeError):
    """Raised when step halving drives the step size below the floor."""


@dataclass(frozen=True)
class EvolveConfig:
    alpha: float = 1.0
    heaviside: HeavisideSpec = field(default_factory=HeavisideSpec)
    prefactor: float = DEFAULT_PREFACTOR
    eta: float = 0.5
    max_steps: int = 500
    tol: float = 1e-8
    snapshot_every: int = 0  # 0 = no snapshots

    def __post_init__(self):
        if not (self.eta > 0):
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass
class EvolveTrace:
    energies: list
    final_p: np.ndarray
    iou_final: float
    snapshots: list | None = None


def mask_init(mask, beta: float = 0.25) -> np.ndarray:
    """Probability init reproducing a mask while keeping the flow alive.

    A hard 0/1 init is a fixed point: the Heaviside derivative vanishes on
    saturated pixels, so nothing moves. Placing pixels exactly on the ramp
    edges, P = 0.5 +- beta, gives H(P - 0.5) equal to the mask while the
    kink derivative (interior one-sided value) keeps every pixel responsive.
    """
    m = as_mask(mask)
    return 0.5 + beta * (2.0 * m - 1.0)


def iou(a, b) -> float:
    """Intersection over union of two masks; 1 when both are empty."""
    a = as_mask(a)
    b = as_mask(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    union = np.sum((a + b) > 0)
    if union == 0:
        return 1.0
    return float(np.sum((a * b) > 0) / union)


def gradient_flow(p0, g, cfg: EvolveConfig, plan: SpectralPlan) -> EvolveTrace:
    """Iterate P <- clamp(P - eta * dE/dP, 0, 1) until the energy stalls.

    Stops when |dE|/max(E, 1e-12) < cfg.tol or after max_steps. Divergence
    guard: 5 consecutive energy increases halve eta; eta below 1e-6 aborts.
    """
    p = np.clip(as_field(p0), 0.0, 1.0)
    g = as_mask(g)
    params = PilParams(
        alpha=cfg.alpha, heaviside=cfg.heaviside, prefactor=cfg.prefactor
    )
    eta = cfg.eta
    energies = []
    snapshots = [] if cfg.snapshot_every > 0 else None
    inc_streak = 0
    for step in range(cfg.max_steps):
        eg = loss_and_grad(g, p, params, plan)
        energies.append(eg.energy)
        if snapshots is not None and step % cfg.snapshot_every == 0:
            snapshots.append(p.copy())
        if step > 0:
            prev = energies[-2]
            if abs(eg.energy - prev) / max(eg.energy, 1e-12) < cfg.tol:
                break
            if eg.energy > prev:
                inc_streak += 1
                if inc_streak >= 5:
                    eta *= 0.5
                    inc_streak = 0
                    if eta < ETA_FLOOR:
                        raise DivergenceError(
                            f"step size underflow (eta={eta:.3e}) at step {step}; "
                            f"energy {eg.energy:.6e} still rising"
                        )
            else:
                inc_streak = 0
        p = np.clip(p - eta * eg.grad_p, 0.0, 1.0)
    final_mask = (p >= 0.5).astype(np.float64)
    return EvolveTrace(
        energies=energies,
        final_p=p,
        iou_final=iou(final_mask, g),
        snapshots=snapshots,
    )
