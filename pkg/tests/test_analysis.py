import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpmphase import (
    ParameterError,
    difference_map,
    gaussian_blur,
    gpm_distance_band,
    gpm_filter,
    laplacian_5pt,
    laplacian_signature_residual,
    line_profile,
    validity_report,
)
from gpmphase.analysis import (
    laplacian_5pt_eigenvalues,
    pearson,
    peak_to_trough,
    spectral_laplacian,
)
from gpmphase.core import build_frequency_mesh
from gpmphase.phantom import band_limited, gaussian_bump, step_edge


def test_stencil_constant_is_zero():
    np.testing.assert_array_equal(laplacian_5pt(np.full((8, 9), 3.3)), 0.0)


def test_stencil_exact_on_quadratic():
    x = np.arange(20.0)[:, None] * np.ones((1, 16))
    out = laplacian_5pt(x**2)
    np.testing.assert_allclose(out[1:-1, :], 2.0, rtol=1e-14)
    w = 2.5e-6
    xy = (np.arange(20.0)[:, None] * w) ** 2 + (np.arange(16.0)[None, :] * w) ** 2
    np.testing.assert_allclose(laplacian_5pt(xy, w)[1:-1, 1:-1], 4.0, rtol=1e-9)


def test_eigenvalues_are_nonpositive_and_match_stencil(rng):
    n1, n2, w = 24, 20, 3e-6
    eig = laplacian_5pt_eigenvalues(n1, n2, w)
    assert np.all(eig <= 0) and eig[0, 0] == 0
    assert eig.min() == pytest.approx(-8 / w**2)
    h = rng.standard_normal((n1, n2))
    lhs = np.fft.fft2(laplacian_5pt(h, w))
    np.testing.assert_allclose(lhs, eig * np.fft.fft2(h), rtol=1e-10, atol=1e-10 * np.abs(lhs).max())


def test_gpm_denominator_is_one_minus_alpha_eigenvalue():
    n, w, alpha = 32, 1e-5, 2e-10
    mesh = build_frequency_mesh(n, n, w)
    kx, ky = mesh.grid()
    eig = laplacian_5pt_eigenvalues(n, n, w)
    np.testing.assert_allclose(1 / gpm_filter(kx, ky, alpha, w), 1 - alpha * eig, rtol=1e-14)


def test_spectral_laplacian_of_plane_wave():
    n = 64
    m = np.arange(n)[:, None]
    f = np.cos(2 * np.pi * 3 * m / n) * np.ones((1, n))
    k = 2 * np.pi * 3 / n
    np.testing.assert_allclose(spectral_laplacian(f), -(k**2) * f, atol=1e-13)


def test_blur_identity_and_mean(rng):
    img = rng.random((30, 40))
    np.testing.assert_array_equal(gaussian_blur(img, 0.0), img)
    assert gaussian_blur(img, 2.3).mean() == pytest.approx(img.mean(), rel=1e-10)
    with pytest.raises(ParameterError):
        gaussian_blur(img, -1.0)


def test_blur_of_delta_second_moment():
    n, s = 64, 2.5
    d = np.zeros((n, n))
    d[32, 32] = 1.0
    g = gaussian_blur(d, s)
    m = np.arange(n)[:, None] - 32
    var = (g * m**2).sum() / g.sum()
    assert var == pytest.approx(s**2, rel=0.02)


@settings(max_examples=20, deadline=None)
@given(s1=st.floats(0.3, 3.0), s2=st.floats(0.3, 3.0), seed=st.integers(0, 1000))
def test_blur_semigroup(s1, s2, seed):
    f = band_limited((64, 64), 1.0, seed=seed)
    two = gaussian_blur(gaussian_blur(f, s1), s2)
    one = gaussian_blur(f, np.hypot(s1, s2))
    assert np.sqrt(np.mean((two - one) ** 2)) <= 0.01 * np.sqrt(np.mean(one**2))


def test_signature_constant_is_zero():
    assert laplacian_signature_residual(np.full((16, 16), 2.0), 0.5, 1.0) == 0.0


def test_signature_sinusoid_matches_fourier_oracle():
    n, period = 128, 32
    m = np.arange(n)[:, None]
    f = np.sin(2 * np.pi * m / period) * np.ones((1, n))
    k2 = (2 * np.pi / period) ** 2
    s1, s2 = 0.5, 1.0
    exact = np.exp(-k2 * s2**2 / 2) - np.exp(-k2 * s1**2 / 2)
    model = -0.5 * (s2**2 - s1**2) * k2
    expected = abs(exact - model) / abs(model)
    got = laplacian_signature_residual(f, s1, s2)
    assert got == pytest.approx(expected, rel=1e-8)
    assert got <= 0.05


def test_signature_argument_order():
    with pytest.raises(ParameterError):
        laplacian_signature_residual(np.eye(4), 1.0, 0.5)


def test_signature_of_blur_difference_uses_pixel_units():
    f = band_limited((64, 64), 0.3, seed=2)
    w = 1e-5
    assert laplacian_signature_residual(f, 0.5 * w, w, pixel_m=w) == pytest.approx(
        laplacian_signature_residual(f, 0.5, 1.0), rel=1e-9
    )


def test_bump_difference_has_ring_morphology():
    # f2 - f1 for a bump: a negative core surrounded by a positive ring
    f = gaussian_bump((65, 65), 4.0)
    d = difference_map(gaussian_blur(f, 2.0), gaussian_blur(f, 1.0))
    assert d[32, 32] < 0
    ring = d[32, 32 + 8 : 32 + 14]
    assert ring.max() > 0
    lap = spectral_laplacian(f)
    assert pearson(d, lap) > 0.99


def test_step_difference_is_peak_plus_trough():
    f = step_edge((16, 64), 32)
    # smooth the corners of the periodic step so only the central edge matters
    d = difference_map(gaussian_blur(f, 2.0), gaussian_blur(f, 1.0))[8]
    assert d[28:32].max() > 0 > d[32:36].min()


def test_validity_flags():
    rep = validity_report(500.0, 1e9)
    assert not rep.gpm_worthwhile and rep.tie_valid
    rep = validity_report(500.0, 20.0)
    assert rep.gpm_worthwhile and rep.tie_valid
    assert rep.upsilon == pytest.approx(500 / (4 * np.pi * 20))
    assert rep.r_max == pytest.approx((1 + 2 * np.pi**2 * rep.upsilon) / (1 + 8 * rep.upsilon))
    assert not validity_report(500.0, 2.0).tie_valid
    assert validity_report(500.0, 2.0, tie_threshold=1.0).tie_valid
    with pytest.raises(ParameterError):
        validity_report(0.0, 10.0)


def test_worthwhile_boundary_is_where_rmax_reaches_one_plus_aleph():
    # at the bound, R_max(upsilon) is close to 1 + aleph (large-upsilon limit dropped)
    for aleph in (0.05, 0.1, 0.3):
        nf = validity_report(500.0, 1.0, aleph=aleph).max_fresnel_number
        rep = validity_report(500.0, nf, aleph=aleph)
        assert rep.gpm_worthwhile
        assert rep.r_max == pytest.approx(1 + aleph, rel=0.05)
        assert not validity_report(500.0, nf * 1.001, aleph=aleph).gpm_worthwhile


def test_exact_factor_value():
    nf = validity_report(1.0, 1.0, aleph=0.1).max_fresnel_number
    assert nf == pytest.approx((np.pi / 2 - 2 / np.pi) / 0.1 - 2 / np.pi, rel=1e-14)
    assert nf == pytest.approx(8.705, abs=1e-3)
    assert validity_report(1.0, 1.0, aleph=0.1, round_factor=True).max_fresnel_number == 10.0


def test_distance_band_units():
    lo, hi = gpm_distance_band(500, 0.5e-10, 10e-6, round_factor=True)
    assert hi == pytest.approx(2.0)
    assert lo == pytest.approx(4e-4)


def test_line_profile_row_and_segment():
    img = np.full((10, 12), 4.0)
    pos, val = line_profile(img, 3)
    np.testing.assert_array_equal(val, 4.0)
    np.testing.assert_array_equal(pos, np.arange(12))
    _, val = line_profile(img, start=(0, 0), end=(9, 11), num=25)
    np.testing.assert_allclose(val, 4.0)
    step = step_edge((10, 12), 6, 0.0, 1.0)
    _, val = line_profile(step, 5)
    assert np.count_nonzero(np.diff(val)) == 1
    pos, val = line_profile(step, start=(5, 0), end=(5, 11))
    assert pos[-1] == pytest.approx(11.0)
    assert np.count_nonzero(np.diff(val)) == 1


def test_line_profile_range_checks():
    img = np.zeros((6, 6))
    with pytest.raises(IndexError):
        line_profile(img, 6)
    with pytest.raises(IndexError):
        line_profile(img, start=(0, 0), end=(6, 2))
    with pytest.raises(ParameterError):
        line_profile(img)


def test_peak_to_trough():
    x = np.arange(64)
    assert peak_to_trough(np.sin(2 * np.pi * x / 16)) == pytest.approx(2.0, rel=1e-3)
    assert peak_to_trough(np.linspace(0, 3, 10)) == pytest.approx(3.0)


def test_difference_map():
    a = np.arange(12.0).reshape(3, 4)
    np.testing.assert_array_equal(difference_map(a, a), 0.0)
    np.testing.assert_array_equal(difference_map(a, 2 * a), -a)
    with pytest.raises(ParameterError):
        difference_map(a, a.T)


def test_difference_map_tracks_laplacian(sim_cfg):
    from gpmphase import FilterSpec, RetrievalOptions, retrieve_thickness, simulate_pbi

    t = band_limited((128, 128), 0.3, thickness_m=40e-6, seed=1)
    img = simulate_pbi(t, sim_cfg)
    t_pm = retrieve_thickness(img, sim_cfg, RetrievalOptions(FilterSpec.pm()))
    t_gpm = retrieve_thickness(img, sim_cfg, RetrievalOptions(FilterSpec.gpm()))
    # GPM keeps more high frequency, so T_GPM - T_PM follows -lap T_PM
    assert pearson(difference_map(t_pm, t_gpm), laplacian_5pt(t_pm)) > 0.9
