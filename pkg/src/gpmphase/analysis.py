"""Image analysis helpers: lattice Laplacian, Gaussian blur, difference maps,
line profiles and the GPM validity domain.

All image operators are periodic, matching the DFT used for retrieval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import ParameterError, as_image, build_frequency_mesh
from .filters import lattice_bracket, r_max

__all__ = [
    "laplacian_5pt",
    "laplacian_5pt_eigenvalues",
    "spectral_laplacian",
    "gaussian_blur",
    "laplacian_signature_residual",
    "ValidityReport",
    "validity_report",
    "gpm_distance_band",
    "line_profile",
    "peak_to_trough",
    "difference_map",
    "pearson",
]


def laplacian_5pt(image, pixel_m: float = 1.0) -> np.ndarray:
    """Five-point Laplacian with wrap-around boundaries."""
    h = as_image(image)
    out = (
        np.roll(h, 1, axis=0)
        + np.roll(h, -1, axis=0)
        + np.roll(h, 1, axis=1)
        + np.roll(h, -1, axis=1)
        - 4.0 * h
    )
    return out / pixel_m**2


def laplacian_5pt_eigenvalues(n1: int, n2: int, pixel_m: float = 1.0) -> np.ndarray:
    """DFT eigenvalues ``(2/W^2)[cos(W kx) + cos(W ky) - 2]`` of :func:`laplacian_5pt`.

    These are the bracket that appears in the GPM denominator, which is
    ``1 - alpha * eigenvalue``.
    """
    mesh = build_frequency_mesh(n1, n2, pixel_m)
    kx, ky = mesh.grid()
    return (2.0 / pixel_m**2) * lattice_bracket(kx, ky, pixel_m)


def spectral_laplacian(image, pixel_m: float = 1.0) -> np.ndarray:
    """Continuum Laplacian ``-(kx^2 + ky^2)`` applied through the DFT."""
    h = as_image(image)
    mesh = build_frequency_mesh(*h.shape, pixel_m)
    return np.fft.ifft2(-mesh.k_squared() * np.fft.fft2(h)).real


def gaussian_blur(image, sigma: float, pixel_m: float = 1.0) -> np.ndarray:
    """Convolve with a unit-mass Gaussian of standard deviation ``sigma``.

    Done spectrally, ``exp(-k^2 sigma^2 / 2)``, so there is no kernel
    truncation.  ``sigma`` and ``pixel_m`` share units.
    """
    h = as_image(image)
    if sigma < 0:
        raise ParameterError("blur sigma must be >= 0")
    if sigma == 0:
        return h.copy()
    mesh = build_frequency_mesh(*h.shape, pixel_m)
    otf = np.exp(-0.5 * mesh.k_squared() * sigma**2)
    return np.fft.ifft2(otf * np.fft.fft2(h)).real


def laplacian_signature_residual(f, sigma1: float, sigma2: float, pixel_m: float = 1.0) -> float:
    """How far ``blur(f, s2) - blur(f, s1)`` is from ``(s2^2 - s1^2)/2 * lap f``.

    Returns the relative RMS residual; 0 when both sides vanish.
    """
    if not 0 < sigma1 < sigma2:
        raise ParameterError(f"need 0 < sigma1 < sigma2, got {sigma1}, {sigma2}")
    f = as_image(f)
    diff = gaussian_blur(f, sigma2, pixel_m) - gaussian_blur(f, sigma1, pixel_m)
    model = 0.5 * (sigma2**2 - sigma1**2) * spectral_laplacian(f, pixel_m)
    scale = np.linalg.norm(model)
    # constant images: both sides are round-off
    tiny = 1e-12 * np.linalg.norm(f)
    if scale <= tiny:
        return 0.0 if np.linalg.norm(diff) <= tiny else float("inf")
    return float(np.linalg.norm(diff - model) / scale)


@dataclass(frozen=True)
class ValidityReport:
    gpm_worthwhile: bool
    tie_valid: bool
    r_max: float
    upsilon: float
    #: largest Fresnel number for which GPM differs from PM by at least ``aleph``
    max_fresnel_number: float


def _worthwhile_factor(aleph: float, round_factor: bool) -> float:
    factor = (np.pi / 2 - 2 / np.pi) / aleph - 2 / np.pi
    if round_factor:
        factor = 10.0 ** np.round(np.log10(factor))
    return float(factor)


def validity_report(
    delta_beta: float,
    fresnel_number: float,
    aleph: float = 0.1,
    tie_threshold: float = 10.0,
    round_factor: bool = False,
) -> ValidityReport:
    """Is GPM a significant change over PM, and is the TIE regime respected?

    GPM is worthwhile when the corner ratio ``R_max`` exceeds ``1 + aleph``,
    i.e. ``(delta/beta) ((pi/2 - 2/pi)/aleph - 2/pi) >= N_F``.  The TIE is
    taken as valid for ``N_F >= tie_threshold``.  ``round_factor`` rounds the
    numerical factor to the nearest power of ten (10 for ``aleph = 0.1``).
    """
    if not (delta_beta > 0 and fresnel_number > 0 and aleph > 0):
        raise ParameterError("delta_beta, fresnel_number and aleph must be positive")
    nf_max = delta_beta * _worthwhile_factor(aleph, round_factor)
    upsilon = delta_beta / (4 * np.pi * fresnel_number)
    return ValidityReport(
        gpm_worthwhile=bool(nf_max >= fresnel_number),
        tie_valid=bool(fresnel_number >= tie_threshold),
        r_max=float(r_max(upsilon)),
        upsilon=float(upsilon),
        max_fresnel_number=float(nf_max),
    )


def gpm_distance_band(
    delta_beta: float,
    wavelength_m: float,
    length_m: float,
    aleph: float = 0.1,
    round_factor: bool = False,
) -> tuple[float, float]:
    """Propagation distances ``(lower, upper)`` where GPM is worthwhile and N_F >> 1.

    ``lower`` is where ``N_F`` equals the worthwhile bound; ``upper`` is the
    distance at which ``N_F = 1``, to be read as "much less than".
    """
    nf_max = delta_beta * _worthwhile_factor(aleph, round_factor)
    fresnel_distance = length_m**2 / wavelength_m
    return fresnel_distance / nf_max, fresnel_distance


def line_profile(image, row: int | None = None, *, start=None, end=None, num: int | None = None):
    """Samples along image row ``row``, or along the segment ``start -> end``.

    Returns ``(positions, values)``; positions are pixel indices for a row and
    arc length in pixels for a segment (bilinear sampling).
    """
    image = as_image(image)
    if row is not None:
        if not -image.shape[0] <= row < image.shape[0]:
            raise IndexError(f"row {row} out of range for shape {image.shape}")
        values = image[row].copy()
        return np.arange(values.size, dtype=float), values
    if start is None or end is None:
        raise ParameterError("give either row or both start and end")
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    hi = np.asarray(image.shape) - 1
    for p in (start, end):
        if np.any(p < 0) or np.any(p > hi):
            raise IndexError(f"endpoint {tuple(p)} outside image of shape {image.shape}")
    length = float(np.hypot(*(end - start)))
    num = int(num or max(2, int(np.ceil(length)) + 1))
    t = np.linspace(0.0, 1.0, num)
    coords = start[:, None] + (end - start)[:, None] * t[None, :]
    values = ndimage.map_coordinates(image, coords, order=1)
    return t * length, values


def peak_to_trough(values) -> float:
    """Mean local maximum minus mean local minimum of a 1-D profile.

    Falls back to ``max - min`` for monotone profiles.
    """
    v = np.asarray(values, dtype=float)
    inner = v[1:-1]
    peaks = inner[(inner > v[:-2]) & (inner >= v[2:])]
    troughs = inner[(inner < v[:-2]) & (inner <= v[2:])]
    if peaks.size == 0 or troughs.size == 0:
        return float(v.max() - v.min())
    return float(peaks.mean() - troughs.mean())


def difference_map(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ParameterError(f"shape mismatch {a.shape} vs {b.shape}")
    return a - b


def pearson(a, b) -> float:
    """Correlation coefficient of two images; NaN if either is constant."""
    a = np.ravel(a) - np.mean(a)
    b = np.ravel(b) - np.mean(b)
    norm = np.sqrt((a @ a) * (b @ b))
    return float(a @ b / norm) if norm > 0 else float("nan")
