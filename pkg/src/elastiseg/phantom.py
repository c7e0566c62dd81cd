"""Synthetic branching-vessel phantoms with a portable seeded RNG.

The generator is splitmix64 (64-bit state, the standard finalizer
constants), so the same seed produces bit-identical phantoms in any
language. Gaussians come from Box-Muller on consecutive splitmix draws.
"""

import math
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64: state += 0x9E3779B97F4A7C15, then the murmur-style mix."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64
        self._spare = None

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53  # 53-bit mantissa in [0,1)
        return lo + (hi - lo) * u

    def normal(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = max(self.uniform(), 2.0**-53)
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 64
    height: int = 64
    n_branches: int = 7
    min_width: float = 1.0
    max_width: float = 3.0
    contrast: float = 0.6
    noise_sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_branches < 1:
            raise ValueError("n_branches must be >= 1")
        if self.min_width > self.max_width:
            raise ValueError("min_width must be <= max_width")
        if not (0.0 < self.contrast <= 1.0):
            raise ValueError("contrast must lie in (0, 1]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")


def _stamp_disc(mask, cx, cy, radius):
    h, w = mask.shape
    r = int(math.ceil(radius))
    x0, x1 = max(0, int(cx) - r), min(w, int(cx) + r + 2)
    y0, y1 = max(0, int(cy) - r), min(h, int(cy) + r + 2)
    if x0 >= x1 or y0 >= y1:
        return
    yy, xx = np.mgrid[y0:y1, x0:x1]
    mask[y0:y1, x0:x1] |= (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2


def _trace_segment(mask, x, y, angle, length, half_width):
    """Rasterize a straight segment by stamping discs every half pixel.

    Stops at the image border so the tree never re-enters disconnected.
    Returns the endpoint actually reached.
    """
    h, w = mask.shape
    dx, dy = math.cos(angle), math.sin(angle)
    steps = max(1, int(length / 0.5))
    for s in range(steps + 1):
        cx = x + dx * 0.5 * s
        cy = y + dy * 0.5 * s
        if cx < 0 or cx >= w or cy < 0 or cy >= h:
            return cx - dx * 0.5, cy - dy * 0.5
        _stamp_disc(mask, cx, cy, half_width)
    return cx, cy


def generate(spec: PhantomSpec):
    """Build one phantom: (image in [0,1], binary mask), both (H, W).

    A root trunk starts on the image border heading inward; each segment
    spawns two narrower children until n_branches segments are drawn.
    Image = 0.5*(1 - contrast) + contrast*mask + N(0, noise_sigma), clamped.
    """
    rng = SplitMix64(spec.seed)
    h, w = spec.height, spec.width
    mask = np.zeros((h, w), dtype=bool)

    side = rng.next_u64() % 4
    if side == 0:  # left edge, heading right
        x, y, base = 0.0, rng.uniform(0.2 * h, 0.8 * h), 0.0
    elif side == 1:  # right edge
        x, y, base = w - 1.0, rng.uniform(0.2 * h, 0.8 * h), math.pi
    elif side == 2:  # top edge, heading down
        x, y, base = rng.uniform(0.2 * w, 0.8 * w), 0.0, math.pi / 2
    else:  # bottom edge
        x, y, base = rng.uniform(0.2 * w, 0.8 * w), h - 1.0, -math.pi / 2
    angle = base + rng.uniform(-0.3, 0.3)
    trunk_len = rng.uniform(0.35, 0.55) * min(w, h)

    queue = [(x, y, angle, trunk_len, spec.max_width)]
    drawn = 0
    while queue and drawn < spec.n_branches:
        x, y, ang, length, hw = queue.pop(0)
        ex, ey = _trace_segment(mask, x, y, ang, length, hw)
        drawn += 1
        child_hw = max(spec.min_width, hw * 0.75)
        child_len = length * rng.uniform(0.6, 0.8)
        if child_len >= 3.0:
            spread = rng.uniform(0.3, 0.8)
            queue.append((ex, ey, ang + spread, child_len, child_hw))
            queue.append((ex, ey, ang - spread, child_len, child_hw))

    bg = 0.5 * (1.0 - spec.contrast)
    image = bg + spec.contrast * mask.astype(np.float64)
    if spec.noise_sigma > 0:
        noise = np.empty(h * w)
        for i in range(h * w):  # row-major draw order fixes the bit pattern
            noise[i] = rng.normal()
        image = image + spec.noise_sigma * noise.reshape(h, w)
    return np.clip(image, 0.0, 1.0), mask.astype(np.float64)


def dataset(spec_base: PhantomSpec, n_images: int, seed: int):
    """n_images phantoms with per-image seeds seed+i; deterministic."""
    if n_images < 1:
        raise ValueError("n_images must be >= 1")
    out = []
    for i in range(n_images):
        spec = PhantomSpec(
            width=spec_base.width,
            height=spec_base.height,
            n_branches=spec_base.n_branches,
            min_width=spec_base.min_width,
            max_width=spec_base.max_width,
            contrast=spec_base.contrast,
            noise_sigma=spec_base.noise_sigma,
            seed=seed + i,
        )
        out.append(generate(spec))
    return out


def split(pairs):
    """Even indices train, odd indices test."""
    train = [p for i, p in enumerate(pairs) if i % 2 == 0]
    test = [p for i, p in enumerate(pairs) if i % 2 == 1]
    return train, test
