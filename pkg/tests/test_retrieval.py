import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpmphase import (
    ClampOverflowError,
    FilterSpec,
    ParameterError,
    PhysicalConfig,
    RetrievalOptions,
    build_filter_grid,
    flat_field_correct,
    retrieve_thickness,
    unsharp_combination,
)
from gpmphase.phantom import band_limited

SPECS = [
    FilterSpec.pm(),
    FilterSpec.gpm(),
    FilterSpec.tunable(0.5),
    FilterSpec.anka(0.2, 5e-6),
    FilterSpec.anka_revised(0.2, 5e-6),
]


def _rel_rms(a, b):
    return np.sqrt(np.mean((a - b) ** 2)) / np.sqrt(np.mean(b**2))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
def test_uniform_attenuation_recovers_thickness(sim_cfg, spec):
    t0 = 40e-6
    img = np.full((32, 40), np.exp(-sim_cfg.mu * t0))
    t = retrieve_thickness(img, sim_cfg, RetrievalOptions(spec))
    np.testing.assert_allclose(t, t0, rtol=1e-10)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
def test_flat_image_gives_zero(sim_cfg, spec):
    cfg = sim_cfg.replace(incident_intensity=3.5)
    t = retrieve_thickness(np.full((16, 16), 3.5), cfg, RetrievalOptions(spec))
    assert np.abs(t).max() < 1e-12


def test_matches_closed_form_pm(sim_cfg, rng):
    # independent route: explicit Lorentzian on an explicit fftfreq mesh
    img = np.exp(-sim_cfg.mu * rng.uniform(0, 40e-6, (24, 32)))
    kx = 2 * np.pi * np.fft.fftfreq(24, sim_cfg.pixel_m)[:, None]
    ky = 2 * np.pi * np.fft.fftfreq(32, sim_cfg.pixel_m)[None, :]
    lorentz = 1 / (1 + sim_cfg.delta * sim_cfg.distance_m / sim_cfg.mu * (kx**2 + ky**2))
    expected = -np.log(np.fft.ifft2(np.fft.fft2(img) * lorentz).real) / sim_cfg.mu
    got = retrieve_thickness(img, sim_cfg, RetrievalOptions(FilterSpec.pm()))
    np.testing.assert_allclose(got, expected, rtol=1e-12)
    assert got.shape == img.shape and got.dtype == float


def test_flat_field_examples():
    img = np.arange(1.0, 13.0).reshape(3, 4)
    np.testing.assert_array_equal(flat_field_correct(img, img), 1.0)
    np.testing.assert_array_equal(flat_field_correct(np.full((3, 3), 4.0), 2.0), 2.0)
    m = np.arange(30)[:, None]
    flat = 1.0 + 0.02 * m + 0.01 * np.arange(20)[None, :]
    pattern = 0.5 + 0.25 * np.sin(m / 3.0) * np.ones((1, 20))
    np.testing.assert_allclose(flat_field_correct(flat * pattern, flat), pattern, rtol=1e-15)


def test_flat_field_rejects_bad_pixels():
    flat = np.ones((5, 6))
    flat[3, 2] = 0.0
    with pytest.raises(ParameterError, match=r"\(3, 2\)"):
        flat_field_correct(np.ones((5, 6)), flat)
    with pytest.raises(ParameterError):
        flat_field_correct(np.ones((5, 6)), -1.0)
    with pytest.raises(ParameterError):
        flat_field_correct(np.ones((5, 6)), np.ones((6, 5)))


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(1e-3, 1e4), seed=st.integers(0, 2**31))
def test_normalisation_invariance(sim_cfg, scale, seed):
    rng = np.random.default_rng(seed)
    img = np.exp(-sim_cfg.mu * rng.uniform(0, 40e-6, (16, 16)))
    flat = rng.uniform(0.5, 2.0, (16, 16))
    base = retrieve_thickness(img * flat, sim_cfg, RetrievalOptions(FilterSpec.gpm(), flat_field=flat))
    scaled = retrieve_thickness(
        scale * img * flat, sim_cfg, RetrievalOptions(FilterSpec.gpm(), flat_field=scale * flat)
    )
    np.testing.assert_allclose(scaled, base, rtol=1e-9, atol=1e-18)


@pytest.mark.parametrize("upsilon", [0.01, 0.1, 1.0, 10.0])
def test_gpm_reduces_to_pm_at_low_frequency(sim_cfg, upsilon):
    n = 256
    cfg = sim_cfg.replace(distance_m=sim_cfg.distance_m * upsilon / sim_cfg.upsilon)
    t = band_limited((n, n), k_max=0.1, thickness_m=40e-6, seed=11)
    img = np.exp(-cfg.mu * t)
    # check the input really is confined to |W k| <= 0.1
    k = 2 * np.pi * np.fft.fftfreq(n)
    outside = (k[:, None] ** 2 + k[None, :] ** 2) > 0.1**2
    spec_img = np.abs(np.fft.fft2(t))
    assert spec_img[outside].max() < 1e-12 * spec_img.max()
    t_pm = retrieve_thickness(img, cfg, RetrievalOptions(FilterSpec.pm()))
    t_gpm = retrieve_thickness(img, cfg, RetrievalOptions(FilterSpec.gpm()))
    assert _rel_rms(t_gpm, t_pm) <= 1e-3
    # the statement should also hold for the structure, not just the mean level
    fluct = t_pm - t_pm.mean()
    assert np.sqrt(np.mean((t_gpm - t_pm) ** 2)) / np.sqrt(np.mean(fluct**2)) <= 1e-3


@pytest.mark.parametrize("pad", [4, 8, 12])
def test_padding_independent_for_periodic_input(sim_cfg, pad):
    n1, n2, period = 48, 64, 8
    m = np.arange(n1)[:, None]
    n = np.arange(n2)[None, :]
    # even about the half-pixel edges, so mirror padding continues the period
    pattern = np.cos(2 * np.pi * (m + 0.5) / period) + 0.5 * np.cos(2 * np.pi * (n + 0.5) / period)
    img = np.exp(-0.2 + 0.05 * pattern)
    base = retrieve_thickness(img, sim_cfg, RetrievalOptions(FilterSpec.gpm()))
    padded = retrieve_thickness(img, sim_cfg, RetrievalOptions(FilterSpec.gpm(), pad=pad))
    np.testing.assert_allclose(padded, base, rtol=1e-12, atol=1e-18)
    wrapped = retrieve_thickness(img, sim_cfg, RetrievalOptions(FilterSpec.gpm(), pad=2 * period, pad_mode="wrap"))
    np.testing.assert_allclose(wrapped, base, rtol=1e-12, atol=1e-18)


def test_padding_reduces_edge_artefacts(sim_cfg):
    # a linear ramp wraps into a jump; mirror padding hides it
    ramp = np.exp(-sim_cfg.mu * np.linspace(0, 40e-6, 64))[None, :] * np.ones((64, 1))
    truth = np.linspace(0, 40e-6, 64)
    plain = retrieve_thickness(ramp, sim_cfg, RetrievalOptions(FilterSpec.gpm()))
    padded = retrieve_thickness(ramp, sim_cfg, RetrievalOptions(FilterSpec.gpm(), pad=32))
    assert np.abs(padded[32] - truth).max() < np.abs(plain[32] - truth).max()


def test_clamping_is_counted(sim_cfg):
    img = np.ones((64, 64))
    img[30:34, 30:34] = 0.0
    t, info = retrieve_thickness(img, sim_cfg, RetrievalOptions(FilterSpec.anka(0.1, 1e-5)), full_output=True)
    assert info["n_clamped"] > 0
    assert info["clamp_fraction"] == info["n_clamped"] / img.size
    assert np.all(np.isfinite(t))
    floor_t = -np.log(1e-8 * img.mean()) / sim_cfg.mu
    assert t.max() == pytest.approx(floor_t, rel=1e-12)


def test_too_much_clamping_raises(sim_cfg):
    img = np.zeros((64, 64))
    img[::8, ::8] = 1.0
    with pytest.raises(ClampOverflowError):
        retrieve_thickness(img, sim_cfg, RetrievalOptions(FilterSpec.anka(0.1, 2e-5)))


def test_no_clamping_on_clean_input(sim_cfg, sim_run):
    _, info = retrieve_thickness(sim_run["intensity"], sim_cfg, full_output=True)
    assert info["n_clamped"] == 0


def test_input_validation(sim_cfg):
    with pytest.raises(ParameterError):
        retrieve_thickness(-np.ones((8, 8)), sim_cfg)
    with pytest.raises(ParameterError):
        RetrievalOptions(log_floor=0.0)
    with pytest.raises(ParameterError):
        RetrievalOptions(pad=-1)


def test_default_is_gpm(sim_cfg, sim_run):
    t = retrieve_thickness(sim_run["intensity"], sim_cfg)
    np.testing.assert_array_equal(t, sim_run["gpm"])


def test_unsharp_combination(rng):
    t_pm = rng.standard_normal((10, 12))
    bump = np.exp(-((np.arange(10)[:, None] - 5) ** 2 + (np.arange(12)[None, :] - 6) ** 2) / 4.0)
    t_gpm = t_pm + bump
    assert np.array_equal(unsharp_combination(t_pm, t_gpm, 0.0), t_pm)
    assert np.array_equal(unsharp_combination(t_pm, t_gpm, 1.0), t_gpm)
    np.testing.assert_allclose(unsharp_combination(t_pm, t_gpm, 2.0) - t_pm, 2 * bump, atol=1e-14)
    with pytest.raises(ParameterError):
        unsharp_combination(t_pm, t_gpm[:, :-1], 0.5)


def test_source_blur_softens_filter(sim_cfg):
    sharp = build_filter_grid(FilterSpec.gpm(), sim_cfg, 32, 32)
    blurred = build_filter_grid(FilterSpec.gpm(source_blur_m=5e-6), sim_cfg, 32, 32)
    assert np.all(blurred >= sharp)
    with pytest.raises(ParameterError):
        build_filter_grid(FilterSpec.gpm(source_blur_m=1e-4), sim_cfg, 32, 32)


def test_physical_config_incident_intensity_used(sim_cfg):
    cfg = sim_cfg.replace(incident_intensity=2.0)
    assert isinstance(cfg, PhysicalConfig)
    img = np.full((8, 8), 2.0 * np.exp(-cfg.mu * 1e-5))
    np.testing.assert_allclose(retrieve_thickness(img, cfg), 1e-5, rtol=1e-10)
