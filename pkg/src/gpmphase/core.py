"""Physical parameters, frequency meshes and the DFT convention.

Images are plain 2-D ``numpy`` arrays of shape ``(N1, N2)``; axis 0 is the
``x`` index ``m`` and axis 1 the ``y`` index ``n``.  The pixel width travels
separately, normally inside a :class:`PhysicalConfig`.

The transform convention is numpy's: forward DFT unnormalised, inverse DFT
carrying ``1/(N1*N2)``, frequencies in native FFT order (DC at ``[0, 0]``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ParameterError",
    "SingularFilterError",
    "ClampOverflowError",
    "PhysicalConfig",
    "Constants",
    "FrequencyMesh",
    "derive_constants",
    "build_frequency_mesh",
    "wavelength_from_energy",
    "as_image",
    "dft2",
    "idft2",
]

#: hc in eV·m, for ``lambda[m] = HC_EV_M / E[eV]``.
HC_EV_M = 1.23984193e-6


class ParameterError(ValueError):
    """A physical or geometric parameter is outside its valid domain."""


class SingularFilterError(ArithmeticError):
    """A Fourier filter denominator vanished or changed sign."""


class ClampOverflowError(ArithmeticError):
    """Too many non-positive pixels had to be clamped before the logarithm."""


def wavelength_from_energy(energy_ev: float) -> float:
    """Vacuum wavelength in metres for a photon energy in eV."""
    if energy_ev <= 0:
        raise ParameterError(f"energy must be positive, got {energy_ev!r}")
    return HC_EV_M / energy_ev


class Constants(NamedTuple):
    k: float
    mu: float
    alpha: float
    upsilon: float
    fresnel_number: float | None


@dataclass(frozen=True)
class PhysicalConfig:
    """Imaging geometry and single-material optical constants (SI units).

    Parameters
    ----------
    wavelength_m : float
        Vacuum wavelength.
    delta, beta : float
        Refractive index is ``n = 1 - delta + i*beta``.
    distance_m : float
        Sample-to-detector propagation distance.
    pixel_m : float
        Detector pixel width ``W``.
    incident_intensity : float
        Uniform incident intensity ``I0``.
    """

    wavelength_m: float
    delta: float
    beta: float
    distance_m: float
    pixel_m: float
    incident_intensity: float = 1.0

    def __post_init__(self):
        checks = (
            ("wavelength_m", self.wavelength_m > 0),
            ("pixel_m", self.pixel_m > 0),
            ("beta", self.beta > 0),
            ("incident_intensity", self.incident_intensity > 0),
            ("distance_m", self.distance_m >= 0),
            ("delta", self.delta >= 0),
        )
        for name, ok in checks:
            value = getattr(self, name)
            if not ok or not np.isfinite(value):
                raise ParameterError(f"invalid {name}={value!r}")

    @classmethod
    def from_energy(cls, energy_ev: float, **kwargs) -> "PhysicalConfig":
        return cls(wavelength_m=wavelength_from_energy(energy_ev), **kwargs)

    @property
    def k(self) -> float:
        return 2.0 * np.pi / self.wavelength_m

    @property
    def mu(self) -> float:
        """Linear attenuation coefficient ``2 k beta``."""
        return 2.0 * self.k * self.beta

    @property
    def alpha(self) -> float:
        """Screening area ``delta * distance / mu`` (m^2)."""
        return self.delta * self.distance_m / self.mu

    @property
    def upsilon(self) -> float:
        """Dimensionless filter strength ``alpha / W**2``."""
        return self.alpha / self.pixel_m**2

    @property
    def delta_beta(self) -> float:
        return self.delta / self.beta

    def fresnel_number(self, char_length_m: float) -> float:
        """``L**2 / (lambda * distance)``; infinite at zero distance."""
        if char_length_m <= 0:
            raise ParameterError("characteristic length must be positive")
        if self.distance_m == 0:
            return float("inf")
        return char_length_m**2 / (self.wavelength_m * self.distance_m)

    def replace(self, **changes) -> "PhysicalConfig":
        fields = dict(self.__dict__)
        fields.update(changes)
        return PhysicalConfig(**fields)


def derive_constants(cfg: PhysicalConfig, char_length_m: float | None = None) -> Constants:
    """Derived constants ``k, mu, alpha, upsilon`` and optionally ``N_F``.

    The Fresnel number needs an explicit characteristic length because the
    length scale of the field and the detector pixel are different things in
    general; pass ``cfg.pixel_m`` to get the pixel-scale Fresnel number.
    """
    nf = None if char_length_m is None else cfg.fresnel_number(char_length_m)
    return Constants(cfg.k, cfg.mu, cfg.alpha, cfg.upsilon, nf)


@dataclass(frozen=True)
class FrequencyMesh:
    """Angular spatial frequencies of an ``N1 x N2`` mesh, in FFT order."""

    kx: np.ndarray
    ky: np.ndarray
    pixel_m: float

    @property
    def shape(self) -> tuple[int, int]:
        return (self.kx.size, self.ky.size)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable ``(N1, 1)`` and ``(1, N2)`` frequency arrays."""
        return self.kx[:, None], self.ky[None, :]

    def k_squared(self) -> np.ndarray:
        kx, ky = self.grid()
        return kx**2 + ky**2


def build_frequency_mesh(n1: int, n2: int, pixel_m: float) -> FrequencyMesh:
    """Frequencies ``2*pi*p/(N*W)`` in the ordering produced by ``np.fft.fft2``.

    For even ``N`` the Nyquist bin ``p = -N/2`` sits at ``W*k = -pi``.
    """
    if int(n1) < 2 or int(n2) < 2:
        raise ParameterError(f"mesh needs at least 2x2 points, got {n1}x{n2}")
    if not pixel_m > 0:
        raise ParameterError(f"pixel width must be positive, got {pixel_m!r}")
    kx = 2.0 * np.pi * np.fft.fftfreq(int(n1), d=pixel_m)
    ky = 2.0 * np.pi * np.fft.fftfreq(int(n2), d=pixel_m)
    return FrequencyMesh(kx, ky, float(pixel_m))


def as_image(a, name: str = "image", dtype=float) -> np.ndarray:
    """Validate a 2-D finite array with at least 2x2 samples."""
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim != 2:
        raise ParameterError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 2 or arr.shape[1] < 2:
        raise ParameterError(f"{name} must be at least 2x2, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite samples")
    return arr


def dft2(a: np.ndarray) -> np.ndarray:
    return np.fft.fft2(a)


def idft2(a: np.ndarray) -> np.ndarray:
    return np.fft.ifft2(a)
