"""Fourier-space phase-retrieval filters.

Every scalar filter accepts scalars or broadcastable arrays of angular
frequencies ``kx, ky`` (rad/m).  ``alpha`` is the screening area
``delta * distance / mu`` and ``pixel_m`` the detector pixel width.  The
grid builder :func:`build_filter_grid` is the only place where a discrete
mesh enters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ParameterError, PhysicalConfig, SingularFilterError, build_frequency_mesh

__all__ = [
    "FilterSpec",
    "pm_filter",
    "gpm_filter",
    "tunable_filter",
    "filter_ratio",
    "r_max",
    "quartic_ratio_approx",
    "anka_filter",
    "anka_filter_revised",
    "anka_matched_sigma",
    "apply_source_blur",
    "lattice_bracket",
    "build_filter_grid",
]

_ZONE_RTOL = 1e-12


def _check_alpha(alpha):
    if np.any(np.asarray(alpha) < 0):
        raise ParameterError(f"alpha must be non-negative, got {alpha!r}")


def _check_zone(kx, ky, pixel_m):
    if not pixel_m > 0:
        raise ParameterError(f"pixel width must be positive, got {pixel_m!r}")
    limit = np.pi * (1 + _ZONE_RTOL)
    if np.any(np.abs(pixel_m * np.asarray(kx)) > limit) or np.any(
        np.abs(pixel_m * np.asarray(ky)) > limit
    ):
        raise ParameterError("frequency outside the first Brillouin zone |W k| <= pi")


def lattice_bracket(kx, ky, pixel_m):
    """``cos(W kx) + cos(W ky) - 2``, always in ``[-4, 0]``.

    ``(2 / W**2)`` times this bracket is the DFT eigenvalue of the
    five-point Laplacian.  Evaluated as ``-2 [sin^2(W kx / 2) + sin^2(W ky / 2)]``
    to avoid cancellation near DC.
    """
    sx = np.sin(0.5 * pixel_m * np.asarray(kx))
    sy = np.sin(0.5 * pixel_m * np.asarray(ky))
    return -2.0 * (sx * sx + sy * sy)


def pm_filter(kx, ky, alpha):
    """Lorentzian filter ``1 / (1 + alpha (kx^2 + ky^2))``."""
    _check_alpha(alpha)
    return 1.0 / (1.0 + alpha * (np.square(kx) + np.square(ky)))


def gpm_filter(kx, ky, alpha, pixel_m):
    """Five-point-lattice filter ``1 / (1 - (2 alpha / W^2) [cos W kx + cos W ky - 2])``."""
    _check_alpha(alpha)
    _check_zone(kx, ky, pixel_m)
    return 1.0 / (1.0 - (2.0 * alpha / pixel_m**2) * lattice_bracket(kx, ky, pixel_m))


def _phi(kx, ky, pixel_m):
    wx = pixel_m * np.asarray(kx)
    wy = pixel_m * np.asarray(ky)
    return lattice_bracket(kx, ky, pixel_m) + 0.5 * wx**2 + 0.5 * wy**2


def tunable_filter(kx, ky, alpha, pixel_m, tau):
    """Filter deforming PM (``tau=0``) into GPM (``tau=1``).

    ``tau > 1`` over-sharpens.  Raises :class:`SingularFilterError` if the
    denominator is not strictly positive anywhere.
    """
    _check_alpha(alpha)
    _check_zone(kx, ky, pixel_m)
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    denom = (
        1.0
        + alpha * (kx**2 + ky**2)
        - (2.0 * alpha * tau / pixel_m**2) * _phi(kx, ky, pixel_m)
    )
    bad = denom <= 0
    if np.any(bad):
        kxb, kyb, badb = np.broadcast_arrays(kx, ky, bad)
        i = np.unravel_index(np.argmax(badb), badb.shape)
        raise SingularFilterError(
            f"tunable filter denominator <= 0 at (kx, ky) = "
            f"({float(kxb[i]):.6g}, {float(kyb[i]):.6g}) for tau={tau}"
        )
    return 1.0 / denom


def filter_ratio(kx, ky, alpha, pixel_m):
    """``P_GPM / P_PM``; equals 1 at DC and is never below 1."""
    _check_alpha(alpha)
    _check_zone(kx, ky, pixel_m)
    num = 1.0 + alpha * (np.square(kx) + np.square(ky))
    den = 1.0 - (2.0 * alpha / pixel_m**2) * lattice_bracket(kx, ky, pixel_m)
    return num / den


def r_max(upsilon):
    """Ratio at the mesh corner ``(pi/W, pi/W)``: ``(1 + 2 pi^2 U) / (1 + 8 U)``."""
    if np.any(np.asarray(upsilon) < 0):
        raise ParameterError("upsilon must be non-negative")
    return (1.0 + 2.0 * np.pi**2 * upsilon) / (1.0 + 8.0 * upsilon)


def quartic_ratio_approx(kx, ky, alpha, pixel_m):
    """Fourth-order expansion ``1 + alpha W^2 (kx^4 + ky^4) / 12`` of the ratio."""
    _check_alpha(alpha)
    _check_zone(kx, ky, pixel_m)
    return 1.0 + alpha * pixel_m**2 * (np.power(kx, 4) + np.power(ky, 4)) / 12.0


def _check_anka(c, sigma):
    if not c > 0:
        raise ParameterError(f"ANKA constant c must be positive, got {c!r}")
    if sigma < 0:
        raise ParameterError(f"ANKA width sigma must be non-negative, got {sigma!r}")


def anka_filter(kx, ky, c, sigma):
    """Gaussian deconvolution mask ``(1 + c) / (c + exp(-pi sigma^2 k^2))``."""
    _check_anka(c, sigma)
    return (1.0 + c) / (c + np.exp(-np.pi * sigma**2 * (np.square(kx) + np.square(ky))))


def anka_filter_revised(kx, ky, c, sigma):
    """Quartic deconvolution mask ``(1 + c) / (c + exp(-sigma^4 (kx^4 + ky^4)))``."""
    _check_anka(c, sigma)
    return (1.0 + c) / (c + np.exp(-(sigma**4) * (np.power(kx, 4) + np.power(ky, 4))))


def anka_matched_sigma(alpha, pixel_m, c):
    """Width for which the revised mask matches the ratio to fourth order.

    Solves ``12 sigma^4 / (1 + c) = W^2 alpha``.
    """
    _check_alpha(alpha)
    if not c > 0:
        raise ParameterError(f"ANKA constant c must be positive, got {c!r}")
    return float((pixel_m**2 * alpha * (1.0 + c) / 12.0) ** 0.25)


def apply_source_blur(alpha, source_radius_m, distance_m):
    """Fold a source-size blur of radius ``S`` into the screening area.

    ``delta/mu -> delta/mu - 2 S^2 / distance`` becomes ``alpha -> alpha - 2 S^2``.
    A negative result would turn the low-pass filter into an amplifier and is
    rejected.
    """
    if source_radius_m < 0:
        raise ParameterError(f"source blur radius must be >= 0, got {source_radius_m!r}")
    if source_radius_m == 0:
        return alpha
    if not distance_m > 0:
        raise ParameterError("source blur needs a positive propagation distance")
    blurred = alpha - 2.0 * source_radius_m**2
    if blurred < 0:
        raise ParameterError(
            f"source blur S={source_radius_m:.4g} m gives alpha'={blurred:.4g} m^2 < 0; "
            "the filter would amplify high frequencies"
        )
    return blurred


_KINDS = ("pm", "gpm", "tunable", "anka", "anka_revised")


@dataclass(frozen=True)
class FilterSpec:
    """Selects a retrieval filter.

    ``kind`` is one of ``"pm"``, ``"gpm"``, ``"tunable"`` (uses ``tau``),
    ``"anka"`` or ``"anka_revised"`` (use ``c`` and ``sigma_m``).  The ANKA
    kinds are deconvolution masks and are applied on top of the PM filter.
    ``source_blur_m`` replaces ``alpha`` by ``alpha - 2 S^2`` for every kind.
    """

    kind: str = "gpm"
    tau: float = 1.0
    c: float = 1.0
    sigma_m: float = 0.0
    source_blur_m: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown filter kind {self.kind!r}; expected one of {_KINDS}")
        if self.source_blur_m < 0:
            raise ParameterError("source blur radius must be >= 0")
        if self.kind in ("anka", "anka_revised"):
            _check_anka(self.c, self.sigma_m)

    @classmethod
    def pm(cls, **kw):
        return cls("pm", **kw)

    @classmethod
    def gpm(cls, **kw):
        return cls("gpm", **kw)

    @classmethod
    def tunable(cls, tau, **kw):
        return cls("tunable", tau=tau, **kw)

    @classmethod
    def anka(cls, c, sigma_m, **kw):
        return cls("anka", c=c, sigma_m=sigma_m, **kw)

    @classmethod
    def anka_revised(cls, c, sigma_m, **kw):
        return cls("anka_revised", c=c, sigma_m=sigma_m, **kw)

    def effective_alpha(self, cfg: PhysicalConfig) -> float:
        return apply_source_blur(cfg.alpha, self.source_blur_m, cfg.distance_m)

    def evaluate(self, kx, ky, alpha, pixel_m):
        """Filter values at ``(kx, ky)`` for an already-effective ``alpha``."""
        if self.kind == "pm":
            _check_zone(kx, ky, pixel_m)
            return pm_filter(kx, ky, alpha)
        if self.kind == "gpm":
            return gpm_filter(kx, ky, alpha, pixel_m)
        if self.kind == "tunable":
            return tunable_filter(kx, ky, alpha, pixel_m, self.tau)
        _check_zone(kx, ky, pixel_m)
        mask = anka_filter if self.kind == "anka" else anka_filter_revised
        return pm_filter(kx, ky, alpha) * mask(kx, ky, self.c, self.sigma_m)


def build_filter_grid(spec: FilterSpec, cfg: PhysicalConfig, n1: int, n2: int) -> np.ndarray:
    """Sample ``spec`` on the ``n1 x n2`` mesh of ``cfg.pixel_m``, FFT order."""
    mesh = build_frequency_mesh(n1, n2, cfg.pixel_m)
    kx, ky = mesh.grid()
    grid = spec.evaluate(kx, ky, spec.effective_alpha(cfg), cfg.pixel_m)
    return np.broadcast_to(grid, mesh.shape).copy()
