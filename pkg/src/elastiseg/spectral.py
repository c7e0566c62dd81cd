"""Fixed-size 2D FFT engine with a precomputed |k| multiplier.

Conventions (everything else in the package is written against these):
  - forward transform is unnormalized, inverse divides by W*H
    (numpy's default fft2/ifft2 pair);
  - periodic boundary conditions, i.e. all convolutions are cyclic;
  - the DC multiplier is exactly 0, so constant fields carry no energy.
"""

from dataclasses import dataclass, field

import numpy as np

from .fields import as_field


@dataclass(frozen=True)
class SpectralPlan:
    """Immutable per-size workspace: dimensions, spacing, |k| grid."""

    width: int
    height: int
    spacing: float
    k_mag: np.ndarray = field(repr=False)  # shape (height, width)


def build_plan(width: int, height: int, spacing: float = 1.0) -> SpectralPlan:
    """Precompute the |k| multiplier grid for a fixed field size.

    k_mag[j, i] = 2*pi*sqrt(fx(i)^2 + fy(j)^2) with fx, fy the standard
    DFT frequencies in cycles per unit length (negative frequencies in
    the upper half). Plans are immutable and shareable across threads.
    """
    if width < 4 or height < 4:
        raise ValueError(f"dimensions must be >= 4, got {width}x{height}")
    if not (spacing > 0):
        raise ValueError(f"spacing must be positive, got {spacing}")
    fx = np.fft.fftfreq(width, d=spacing)
    fy = np.fft.fftfreq(height, d=spacing)
    k_mag = 2.0 * np.pi * np.sqrt(fx[None, :] ** 2 + fy[:, None] ** 2)
    k_mag.flags.writeable = False
    return SpectralPlan(width=width, height=height, spacing=spacing, k_mag=k_mag)


def _check_dims(f: np.ndarray, plan: SpectralPlan):
    if f.shape != (plan.height, plan.width):
        raise ValueError(
            f"field shape {f.shape} does not match plan "
            f"({plan.height}, {plan.width})"
        )


def forward(f, plan: SpectralPlan) -> np.ndarray:
    """Unnormalized forward 2D transform."""
    f = as_field(f)
    _check_dims(f, plan)
    return np.fft.fft2(f)


def inverse_real(F, plan: SpectralPlan) -> np.ndarray:
    """Inverse transform (1/(W*H) normalization), returning the real part.

    The imaginary residual must be negligible; a large residual signals a
    conjugate-symmetry bug upstream and raises.
    """
    F = np.asarray(F, dtype=np.complex128)
    _check_dims(F, plan)
    g = np.fft.ifft2(F)
    re = g.real
    im_max = np.abs(g.imag).max()
    if im_max > 1e-9 * (np.abs(re).max() + 1.0):
        raise ValueError(
            f"imaginary residual {im_max:.3e} too large; spectrum not conjugate-symmetric"
        )
    return re


def apply_halfnorm(f, plan: SpectralPlan) -> np.ndarray:
    """Multiply the spectrum by |k| and transform back.

    Linear, self-adjoint, positive semidefinite; output is DC-free
    (zero mean) because the DC multiplier is 0.
    """
    return inverse_real(plan.k_mag * forward(f, plan), plan)


def kernel_table(plan: SpectralPlan) -> np.ndarray:
    """Real-space tabulation of the periodic kernel.

    K[j, i] = inverse transform of k_mag, so that apply_halfnorm(f) is the
    cyclic convolution K (*) f. Used by the O(N^2) direct-summation oracle.
    """
    return inverse_real(plan.k_mag.astype(np.complex128), plan)
