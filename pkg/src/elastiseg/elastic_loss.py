"""Elastic interaction boundary energy, its gradient, and the O(N^2) oracle.

The energy of a combined field D is the spectral quadratic form

    E = prefactor * (1/(W*H)) * sum_k |k| * |D_hat(k)|^2
      = prefactor * <D, apply_halfnorm(D)>

with D = G - alpha*H(phi) and phi = P - 0.5. Perfect prediction at
alpha = 1 gives D = 0 and zero energy (the two boundaries annihilate).
Periodic boundary conditions throughout; a zero-padded free-space variant
is available via padded=True but is never the test oracle.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .fields import (
    HeavisideSpec,
    apply_heaviside,
    apply_heaviside_deriv,
    as_field,
    prob_to_levelset,
)
from .spectral import SpectralPlan, apply_halfnorm, build_plan, forward, kernel_table

DEFAULT_PREFACTOR = 1.0 / (8.0 * np.pi)

# direct summation is O(N^2); keep the oracle path to desk scale by default
DIRECT_SIZE_LIMIT = 64 * 64


@dataclass(frozen=True)
class PilParams:
    """Interaction strength, Heaviside profile, and overall energy scale.

    raw_plus_sign flips the combined field to G + alpha*H (ablation only);
    the canonical orientation is D = G - alpha*H so that matched boundaries
    annihilate.
    """

    alpha: float = 0.35
    heaviside: HeavisideSpec = field(default_factory=HeavisideSpec)
    prefactor: float = DEFAULT_PREFACTOR
    raw_plus_sign: bool = False

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.prefactor > 0):
            raise ValueError(f"prefactor must be positive, got {self.prefactor}")


@dataclass(frozen=True)
class EnergyGrad:
    """Energy value paired with dE/dP for one evaluation."""

    energy: float
    grad_p: np.ndarray


def combined_field(g, h_phi, alpha: float, raw_plus_sign: bool = False) -> np.ndarray:
    """Signed superposition D = G - alpha*H(phi) (or G + alpha*H with the flag)."""
    g = as_field(g)
    h = as_field(h_phi)
    if g.shape != h.shape:
        raise ValueError(f"shape mismatch: {g.shape} vs {h.shape}")
    return g + alpha * h if raw_plus_sign else g - alpha * h


def energy_spectral(d, plan: SpectralPlan, prefactor: float = DEFAULT_PREFACTOR) -> float:
    """FFT-path energy: prefactor/(W*H) * sum_k k_mag * |D_hat|^2."""
    d_hat = forward(d, plan)
    n = plan.width * plan.height
    return float(prefactor / n * np.sum(plan.k_mag * (d_hat.real**2 + d_hat.imag**2)))


def energy_padded(d, prefactor: float = DEFAULT_PREFACTOR, pad_factor: int = 2) -> float:
    """Free-space approximation: embed D in a zero-padded grid before the quadratic form."""
    d = as_field(d)
    h, w = d.shape
    big = np.zeros((h * pad_factor, w * pad_factor))
    big[:h, :w] = d
    return energy_spectral(big, build_plan(w * pad_factor, h * pad_factor), prefactor)


def energy_direct(
    d,
    plan: SpectralPlan,
    prefactor: float = DEFAULT_PREFACTOR,
    force: bool = False,
) -> float:
    """O(N^2) reference energy by explicit pairwise summation.

    E = prefactor * sum_x sum_x' D(x) K(x-x') D(x') with K the tabulated
    periodic kernel, evaluated pixel by pixel. Refuses grids larger than
    64x64 unless force=True (the benchmark forces).
    """
    d = as_field(d)
    h, w = d.shape
    if h != plan.height or w != plan.width:
        raise ValueError(f"field shape {d.shape} does not match plan")
    if h * w > DIRECT_SIZE_LIMIT and not force:
        raise ValueError(
            f"direct path refused for {w}x{h} (> 64x64); pass force=True"
        )
    k = kernel_table(plan)
    # kf[a, b] = K[-a mod H, -b mod W]; rolling kf by (j, i) gives the row
    # of interaction weights K(x - x') for the pixel x = (j, i)
    kf = k[(-np.arange(h)) % h][:, (-np.arange(w)) % w]
    total = 0.0
    for j in range(h):
        for i in range(w):
            if d[j, i] == 0.0:
                continue
            row = np.roll(np.roll(kf, j, axis=0), i, axis=1)
            total += d[j, i] * float(np.sum(row * d))
    return prefactor * total


def loss_and_grad(g, p, params: PilParams, plan: SpectralPlan) -> EnergyGrad:
    """Energy and analytic dE/dP for ground truth G and probability map P.

    Chain: phi = P - 0.5, H = heaviside(phi), D = G - alpha*H,
    dE/dP = -2 * prefactor * alpha * H'(phi) * apply_halfnorm(D).
    """
    g = as_field(g)
    phi = prob_to_levelset(p)
    if g.shape != phi.shape:
        raise ValueError(f"shape mismatch: {g.shape} vs {phi.shape}")
    h_phi = apply_heaviside(phi, params.heaviside)
    d = combined_field(g, h_phi, params.alpha, params.raw_plus_sign)
    ld = apply_halfnorm(d, plan)
    energy = float(params.prefactor * np.sum(d * ld))
    sign = 1.0 if params.raw_plus_sign else -1.0
    grad_p = (
        2.0
        * sign
        * params.prefactor
        * params.alpha
        * apply_heaviside_deriv(phi, params.heaviside)
        * ld
    )
    return EnergyGrad(energy=energy, grad_p=grad_p)


def bench_paths(sizes, repeats: int = 5, seed: int = 0):
    """Median wall-clock of the FFT vs direct energy paths per grid size.

    Returns a list of (size, t_fft_ns, t_direct_ns, ratio) rows. Runs
    single-threaded; timings only, values are discarded.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        plan = build_plan(n, n)
        d = rng.standard_normal((n, n))
        t_fft = _median_time(lambda: energy_spectral(d, plan), repeats)
        t_direct = _median_time(lambda: energy_direct(d, plan, force=True), repeats)
        rows.append((n, t_fft, t_direct, t_direct / t_fft))
    return rows


def _median_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        fn()
        times.append(time.perf_counter_ns() - t0)
    return float(np.median(times))
