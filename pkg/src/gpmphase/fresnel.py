"""Forward model: projection-approximation exit wave and paraxial propagation.

All propagation is periodic (the DFT wraps around).  The time convention is
``exp(-i w t)`` so a field picks up ``exp(+i k n z)`` in a medium; the exit
phase of a material with ``n = 1 - delta`` is therefore ``-k delta T`` and
the free-space transfer function is ``exp(-i z (kx^2 + ky^2) / (2 k))``.
"""

from __future__ import annotations

import numpy as np

from .core import ParameterError, PhysicalConfig, as_image, build_frequency_mesh

__all__ = [
    "transmission",
    "fresnel_transfer",
    "propagate",
    "upsample_replicate",
    "rebin_average",
    "simulate_pbi",
    "tie_rhs",
]


def transmission(thickness, cfg: PhysicalConfig) -> np.ndarray:
    """Exit-surface field ``sqrt(I0) exp(-mu T / 2) exp(-i k delta T)``."""
    thickness = as_image(thickness, "thickness")
    if np.any(thickness < 0):
        raise ParameterError("thickness must be non-negative")
    amplitude = np.sqrt(cfg.incident_intensity) * np.exp(-0.5 * cfg.mu * thickness)
    return amplitude * np.exp(-1j * cfg.k * cfg.delta * thickness)


def fresnel_transfer(shape, pixel_m: float, distance_m: float, wavelength_m: float) -> np.ndarray:
    """Paraxial free-space transfer function on the FFT-ordered mesh."""
    if distance_m < 0:
        raise ParameterError("propagation distance must be >= 0")
    if not wavelength_m > 0:
        raise ParameterError("wavelength must be positive")
    mesh = build_frequency_mesh(shape[0], shape[1], pixel_m)
    k = 2.0 * np.pi / wavelength_m
    return np.exp(-1j * distance_m * mesh.k_squared() / (2.0 * k))


def propagate(field, distance_m: float, wavelength_m: float, pixel_m: float) -> np.ndarray:
    """Propagate a complex field through ``distance_m`` of vacuum.

    Unitary on the periodic grid, so total intensity is conserved and
    ``propagate(propagate(u, a), b) == propagate(u, a + b)``.
    """
    field = as_image(field, "field", dtype=complex)
    if distance_m == 0:
        if wavelength_m <= 0:
            raise ParameterError("wavelength must be positive")
        return field.copy()
    h = fresnel_transfer(field.shape, pixel_m, distance_m, wavelength_m)
    return np.fft.ifft2(np.fft.fft2(field) * h)


def upsample_replicate(image, factor: int) -> np.ndarray:
    """Replicate every pixel into a ``factor x factor`` block."""
    factor = int(factor)
    if factor < 1:
        raise ParameterError("upsampling factor must be >= 1")
    image = np.asarray(image)
    return np.repeat(np.repeat(image, factor, axis=0), factor, axis=1)


def rebin_average(image, factor: int) -> np.ndarray:
    """Average non-overlapping ``factor x factor`` blocks."""
    factor = int(factor)
    if factor < 1:
        raise ParameterError("rebinning factor must be >= 1")
    image = np.asarray(image)
    n1, n2 = image.shape
    if n1 % factor or n2 % factor:
        raise ParameterError(f"shape {image.shape} is not divisible by {factor}")
    blocks = image.reshape(n1 // factor, factor, n2 // factor, factor)
    # mean about the first sample, so constant blocks come back bit-exact
    ref = blocks[:, :1, :, :1]
    return ref[:, 0, :, 0] + (blocks - ref).mean(axis=(1, 3))


def simulate_pbi(thickness, cfg: PhysicalConfig, oversample: int = 2) -> np.ndarray:
    """Propagation-based phase-contrast intensity at ``cfg.distance_m``.

    The phantom is replicated onto an ``oversample``-times finer grid, turned
    into an exit wave, propagated, and the intensity is block-averaged back
    to the phantom's own grid.
    """
    thickness = as_image(thickness, "thickness")
    fine = upsample_replicate(thickness, oversample)
    field = transmission(fine, cfg)
    field = propagate(field, cfg.distance_m, cfg.wavelength_m, cfg.pixel_m / oversample)
    return rebin_average(np.abs(field) ** 2, oversample)


def tie_rhs(intensity, phase, wavelength_m: float, pixel_m: float) -> np.ndarray:
    """``-(1/k) div(I grad phi)`` evaluated with spectral derivatives.

    By the transport-of-intensity equation this is ``dI/dz`` at the plane
    where ``intensity`` and ``phase`` are given.  ``phase`` must be smooth
    and periodic (no wrapping).
    """
    intensity = as_image(intensity, "intensity")
    phase = as_image(phase, "phase")
    mesh = build_frequency_mesh(*intensity.shape, pixel_m)
    kx, ky = mesh.grid()

    def d(a, kk):
        return np.fft.ifft2(1j * kk * np.fft.fft2(a)).real

    fx = intensity * d(phase, kx)
    fy = intensity * d(phase, ky)
    k = 2.0 * np.pi / wavelength_m
    return -(d(fx, kx) + d(fy, ky)) / k
