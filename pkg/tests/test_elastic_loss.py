import numpy as np
import pytest

from elastiseg.elastic_loss import (
    DEFAULT_PREFACTOR,
    EnergyGrad,
    PilParams,
    bench_paths,
    combined_field,
    energy_direct,
    energy_padded,
    energy_spectral,
    loss_and_grad,
)
from elastiseg.fdcheck import check_loss_grad
from elastiseg.fields import HARDTANH, SINUSOIDAL, HeavisideSpec
from elastiseg.spectral import build_plan, kernel_table


def test_combined_field_cases():
    rng = np.random.default_rng(0)
    g = (rng.uniform(0, 1, (8, 8)) > 0.5).astype(float)
    assert np.all(combined_field(g, g, alpha=1.0) == 0.0)
    d = combined_field(np.ones((4, 4)), np.ones((4, 4)), alpha=0.35)
    assert np.allclose(d, 0.65)
    h0 = np.zeros((8, 8))
    assert np.array_equal(combined_field(g, h0, alpha=1.0), g)
    plus = combined_field(g, np.full((8, 8), 0.5), alpha=1.0, raw_plus_sign=True)
    assert np.array_equal(plus, g + 0.5)


def test_energy_trivial_cases():
    plan = build_plan(16, 16)
    assert energy_spectral(np.zeros((16, 16)), plan) == 0.0
    assert abs(energy_spectral(np.full((16, 16), 1.3), plan)) <= 1e-12
    assert energy_direct(np.zeros((16, 16)), plan) == 0.0


def test_energy_square_matches_oracle():
    plan = build_plan(16, 16)
    d = np.zeros((16, 16))
    d[7:10, 7:10] = 1.0
    e_spec = energy_spectral(d, plan)
    e_dir = energy_direct(d, plan)
    assert e_spec > 0
    assert abs(e_spec - e_dir) / e_spec <= 1e-10


def test_energy_impulse_collapses_to_kernel_origin():
    plan = build_plan(8, 8)
    d = np.zeros((8, 8))
    d[2, 3] = 1.0
    k00 = kernel_table(plan)[0, 0]
    assert energy_direct(d, plan) == pytest.approx(DEFAULT_PREFACTOR * k00, rel=1e-12)
    assert energy_spectral(d, plan) == pytest.approx(DEFAULT_PREFACTOR * k00, rel=1e-10)


def test_oracle_equivalence_random_fields():
    rng = np.random.default_rng(1)
    for n in (8, 16):
        plan = build_plan(n, n)
        for _ in range(20):
            d = rng.standard_normal((n, n))
            e_spec = energy_spectral(d, plan)
            e_dir = energy_direct(d, plan)
            assert abs(e_spec - e_dir) / abs(e_spec) <= 1e-10


def test_direct_size_guard():
    plan = build_plan(128, 128)
    with pytest.raises(ValueError):
        energy_direct(np.zeros((128, 128)), plan)
    # forced path runs
    energy_direct(np.zeros((128, 128)), plan, force=True)


def test_energy_nonnegative():
    rng = np.random.default_rng(2)
    plan = build_plan(16, 16)
    for _ in range(100):
        assert energy_spectral(rng.standard_normal((16, 16)), plan) >= -1e-12


def test_annihilation():
    rng = np.random.default_rng(3)
    plan = build_plan(16, 16)
    params = PilParams(alpha=1.0, heaviside=HeavisideSpec(beta=0.25, kind=HARDTANH))
    for _ in range(10):
        g = (rng.uniform(0, 1, (16, 16)) > 0.5).astype(float)
        eg = loss_and_grad(g, g, params, plan)
        assert eg.energy <= 1e-10 * g.size
        assert np.abs(eg.grad_p).max() <= 1e-10


def test_swap_symmetry_at_alpha_one():
    rng = np.random.default_rng(4)
    plan = build_plan(16, 16)
    g = (rng.uniform(0, 1, (16, 16)) > 0.5).astype(float)
    h = rng.uniform(0, 1, (16, 16))
    assert energy_spectral(g - h, plan) == energy_spectral(h - g, plan)


def test_translation_invariance():
    rng = np.random.default_rng(5)
    plan = build_plan(16, 16)
    g = (rng.uniform(0, 1, (16, 16)) > 0.5).astype(float)
    p = rng.uniform(0, 1, (16, 16))
    params = PilParams()
    e0 = loss_and_grad(g, p, params, plan).energy
    gs = np.roll(g, (3, 5), axis=(0, 1))
    ps = np.roll(p, (3, 5), axis=(0, 1))
    e1 = loss_and_grad(gs, ps, params, plan).energy
    assert abs(e0 - e1) / e0 <= 1e-10


@pytest.mark.parametrize("kind", [SINUSOIDAL, HARDTANH])
@pytest.mark.parametrize("alpha", [0.35, 1.0])
def test_gradient_matches_finite_differences(kind, alpha):
    rng = np.random.default_rng(6)
    plan = build_plan(12, 12)
    params = PilParams(alpha=alpha, heaviside=HeavisideSpec(beta=0.25, kind=kind))
    for _ in range(10):
        g = (rng.uniform(0, 1, (12, 12)) > 0.6).astype(float)
        p = rng.uniform(0.02, 0.98, (12, 12))
        err = check_loss_grad("pil", g, p, plan, params=params)
        assert err <= 1e-5


def test_gradient_sign_structure_on_disc():
    # force pulls probability up inside the truth and down outside it
    yy, xx = np.mgrid[0:32, 0:32]
    r = np.sqrt((yy - 16.0) ** 2 + (xx - 16.0) ** 2)
    g = (r <= 4).astype(float)
    plan = build_plan(32, 32)
    eg = loss_and_grad(g, np.full((32, 32), 0.5), PilParams(alpha=1.0), plan)
    inner = (r >= 2) & (r < 4)
    outer = (r >= 4) & (r < 6)
    frac_in = np.mean(eg.grad_p[inner] < 0)
    frac_out = np.mean(eg.grad_p[outer] > 0)
    assert frac_in >= 0.9
    assert frac_out >= 0.9


def test_monotone_attraction_two_discs():
    yy, xx = np.mgrid[0:64, 0:64]
    plan = build_plan(64, 64)

    def disc(cx):
        return (((yy - 32.0) ** 2 + (xx - cx) ** 2) <= 36).astype(float)

    energies = []
    for dist in (12, 8, 4, 0):
        d = disc(32 - dist / 2) - disc(32 + dist / 2)
        energies.append(energy_spectral(d, plan))
    assert all(energies[i] > energies[i + 1] for i in range(len(energies) - 1))
    assert energies[-1] <= 1e-10


def test_loss_and_grad_returns_energygrad():
    rng = np.random.default_rng(7)
    plan = build_plan(8, 8)
    g = (rng.uniform(0, 1, (8, 8)) > 0.5).astype(float)
    p = rng.uniform(0, 1, (8, 8))
    eg = loss_and_grad(g, p, PilParams(), plan)
    assert isinstance(eg, EnergyGrad)
    assert eg.energy >= -1e-12
    assert eg.grad_p.shape == (8, 8)
    assert np.all(np.isfinite(eg.grad_p))


def test_padded_energy_runs_and_differs():
    rng = np.random.default_rng(8)
    plan = build_plan(16, 16)
    d = rng.standard_normal((16, 16))
    e_per = energy_spectral(d, plan)
    e_pad = energy_padded(d)
    assert e_pad >= -1e-12
    assert e_pad != e_per  # free-space approximation, not the periodic form


def test_bench_emits_rows():
    rows = bench_paths([8, 16], repeats=2)
    assert len(rows) == 2
    for n, t_fft, t_direct, ratio in rows:
        assert t_fft > 0 and t_direct > 0
        assert ratio == pytest.approx(t_direct / t_fft)
