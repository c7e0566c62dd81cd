import numpy as np
import pytest

from elastiseg.fields import (
    HARDTANH,
    SINUSOIDAL,
    HeavisideSpec,
    apply_heaviside,
    apply_heaviside_deriv,
    heaviside,
    heaviside_deriv,
    prob_to_levelset,
)


def test_prob_to_levelset_half_is_zero():
    p = np.full((6, 6), 0.5)
    assert np.all(prob_to_levelset(p) == 0.0)


def test_prob_to_levelset_endpoints():
    p = np.zeros((4, 4))
    p[1, 2] = 1.0
    phi = prob_to_levelset(p)
    assert phi[1, 2] == 0.5
    assert phi[0, 0] == -0.5


def test_prob_to_levelset_random_is_affine():
    rng = np.random.default_rng(0)
    p = rng.uniform(0, 1, (9, 7))
    assert np.array_equal(prob_to_levelset(p), p - 0.5)


def test_prob_to_levelset_rejects_out_of_range():
    with pytest.raises(ValueError):
        prob_to_levelset(np.full((4, 4), 1.1))
    with pytest.raises(ValueError):
        prob_to_levelset(np.full((4, 4), -0.1))
    # within 1e-9 tolerance is fine
    prob_to_levelset(np.full((4, 4), 1.0 + 5e-10))


def test_heaviside_spec_validation():
    with pytest.raises(ValueError):
        HeavisideSpec(beta=0.0)
    with pytest.raises(ValueError):
        HeavisideSpec(kind="other")


@pytest.mark.parametrize("kind", [SINUSOIDAL, HARDTANH])
@pytest.mark.parametrize("beta", [0.1, 0.25, 1.0])
def test_heaviside_at_zero(kind, beta):
    assert heaviside(0.0, HeavisideSpec(beta=beta, kind=kind)) == 0.5


def test_heaviside_sinusoidal_branches():
    spec = HeavisideSpec(beta=0.25, kind=SINUSOIDAL)
    assert heaviside(0.25, spec) == 1.0
    assert heaviside(-0.25, spec) == 0.0
    assert heaviside(1.0, spec) == 1.0
    assert heaviside(-1.0, spec) == 0.0


def test_heaviside_sinusoidal_hand_value():
    # half-beta point: 0.5*(sin(pi/4) + 1)
    spec = HeavisideSpec(beta=0.25, kind=SINUSOIDAL)
    assert heaviside(0.125, spec) == pytest.approx(0.5 * (np.sin(np.pi / 4) + 1), abs=1e-12)
    assert heaviside(0.125, spec) == pytest.approx(0.8535533905932737, abs=1e-12)


def test_heaviside_hardtanh_ramp():
    spec = HeavisideSpec(beta=0.25, kind=HARDTANH)
    assert heaviside(0.125, spec) == 0.75
    assert heaviside(0.25, spec) == 1.0
    assert heaviside(-0.3, spec) == 0.0


def test_deriv_hand_values():
    spec = HeavisideSpec(beta=0.25, kind=SINUSOIDAL)
    assert heaviside_deriv(0.0, spec) == pytest.approx(np.pi, abs=1e-12)
    assert heaviside_deriv(0.5, spec) == 0.0
    spec = HeavisideSpec(beta=0.25, kind=HARDTANH)
    assert heaviside_deriv(0.0, spec) == 2.0
    assert heaviside_deriv(0.5, spec) == 0.0


@pytest.mark.parametrize("kind", [SINUSOIDAL, HARDTANH])
def test_deriv_kink_uses_interior_value(kind):
    spec = HeavisideSpec(beta=0.25, kind=kind)
    interior = heaviside_deriv(0.25 - 1e-12, spec)
    assert heaviside_deriv(0.25, spec) == pytest.approx(interior, abs=1e-9)


@pytest.mark.parametrize("kind", [SINUSOIDAL, HARDTANH])
def test_deriv_matches_finite_differences(kind):
    spec = HeavisideSpec(beta=0.25, kind=kind)
    eps = 1e-5
    for phi in (-0.2, 0.0, 0.1):
        fd = (heaviside(phi + eps, spec) - heaviside(phi - eps, spec)) / (2 * eps)
        assert heaviside_deriv(phi, spec) == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize("kind", [SINUSOIDAL, HARDTANH])
def test_monotone_and_range_and_symmetry(kind):
    spec = HeavisideSpec(beta=0.25, kind=kind)
    rng = np.random.default_rng(1)
    a = rng.uniform(-2, 2, 1000)
    b = rng.uniform(-2, 2, 1000)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    assert np.all(heaviside(lo, spec) <= heaviside(hi, spec))
    grid = np.arange(-10, 10, 1e-3)
    hv = heaviside(grid, spec)
    assert hv.min() >= 0.0 and hv.max() <= 1.0
    phi = rng.uniform(-3, 3, 500)
    assert np.all(heaviside(phi, spec) + heaviside(-phi, spec) == 1.0)


def test_apply_heaviside_field_ops():
    spec = HeavisideSpec(beta=0.25, kind=HARDTANH)
    phi = np.zeros((5, 5))
    assert np.all(apply_heaviside(phi, spec) == 0.5)
    # binary mask round trip through prob_to_levelset saturates hardtanh
    rng = np.random.default_rng(2)
    mask = (rng.uniform(0, 1, (8, 8)) > 0.5).astype(float)
    h = apply_heaviside(prob_to_levelset(mask), spec)
    assert np.array_equal(h, mask)
    # elementwise lift agrees with the scalar op
    field = rng.uniform(-1, 1, (6, 6))
    looped = np.array([[heaviside(v, spec) for v in row] for row in field])
    assert np.array_equal(apply_heaviside(field, spec), looped)
    looped_d = np.array([[heaviside_deriv(v, spec) for v in row] for row in field])
    assert np.array_equal(apply_heaviside_deriv(field, spec), looped_d)
