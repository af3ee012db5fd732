"""Single-image thickness retrieval.

The pipeline is: flat-field correct, optionally pad, DFT, multiply by the
chosen filter, inverse DFT, crop, clamp, then ``-log(.) / mu``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import ClampOverflowError, ParameterError, PhysicalConfig, as_image
from .filters import FilterSpec, build_filter_grid

__all__ = [
    "RetrievalOptions",
    "flat_field_correct",
    "retrieve_thickness",
    "unsharp_combination",
]

log = logging.getLogger(__name__)

#: fraction of pixels that may be clamped before the retrieval is refused
MAX_CLAMP_FRACTION = 0.01


@dataclass(frozen=True)
class RetrievalOptions:
    """Knobs for :func:`retrieve_thickness`.

    Parameters
    ----------
    spec : FilterSpec
        Fourier filter, GPM by default.
    flat_field : ndarray or float, optional
        Illumination image (or scalar) to divide by.  ``None`` uses
        ``cfg.incident_intensity``.
    log_floor : float
        Relative floor, as a fraction of the mean normalised intensity, used
        in place of non-positive filtered values before the logarithm.
    pad : int
        Mirror-padding width in pixels applied after flat-field correction.
    pad_mode : str
        Any :func:`numpy.pad` mode; ``"symmetric"`` by default.
    """

    spec: FilterSpec = field(default_factory=FilterSpec)
    flat_field: object = None
    log_floor: float = 1e-8
    pad: int = 0
    pad_mode: str = "symmetric"

    def __post_init__(self):
        if not self.log_floor > 0:
            raise ParameterError("log_floor must be positive")
        if int(self.pad) < 0:
            raise ParameterError("padding width must be >= 0")


def flat_field_correct(image, flat) -> np.ndarray:
    """Divide ``image`` by a scalar or per-pixel illumination ``flat``."""
    image = as_image(image)
    flat_arr = np.asarray(flat, dtype=float)
    if flat_arr.ndim == 0:
        if not flat_arr > 0:
            raise ParameterError(f"flat-field scalar must be positive, got {float(flat_arr)!r}")
        return image / flat_arr
    flat_arr = as_image(flat_arr, "flat field")
    if flat_arr.shape != image.shape:
        raise ParameterError(f"flat field shape {flat_arr.shape} != image shape {image.shape}")
    bad = flat_arr <= 0
    if np.any(bad):
        m, n = np.argwhere(bad)[0]
        raise ParameterError(f"flat field is non-positive at pixel ({m}, {n})")
    return image / flat_arr


def retrieve_thickness(
    image,
    cfg: PhysicalConfig,
    opts: RetrievalOptions | None = None,
    *,
    full_output: bool = False,
):
    """Projected thickness (m) from one propagation-based phase-contrast image.

    Parameters
    ----------
    image : array_like
        Measured intensity at the detector, shape ``(N1, N2)``.
    cfg : PhysicalConfig
        Supplies ``mu``, ``alpha`` and the pixel width.
    opts : RetrievalOptions, optional
    full_output : bool
        Also return a dict with ``n_clamped`` and ``clamp_fraction``.

    Returns
    -------
    thickness : ndarray
    info : dict
        Only when ``full_output`` is true.
    """
    opts = RetrievalOptions() if opts is None else opts
    image = as_image(image)
    if np.any(image < 0):
        raise ParameterError("intensity image has negative samples")

    flat = cfg.incident_intensity if opts.flat_field is None else opts.flat_field
    norm = flat_field_correct(image, flat)

    pad = int(opts.pad)
    work = np.pad(norm, pad, mode=opts.pad_mode) if pad else norm
    grid = build_filter_grid(opts.spec, cfg, *work.shape)
    filtered = np.fft.ifft2(np.fft.fft2(work) * grid).real
    if pad:
        filtered = filtered[pad:-pad, pad:-pad]

    floor = opts.log_floor * abs(norm.mean()) if norm.mean() != 0 else opts.log_floor
    bad = filtered <= 0
    n_clamped = int(bad.sum())
    fraction = n_clamped / filtered.size
    if n_clamped:
        if fraction > MAX_CLAMP_FRACTION:
            raise ClampOverflowError(
                f"{n_clamped} of {filtered.size} pixels ({100 * fraction:.2f}%) were non-positive "
                "after filtering"
            )
        log.warning("clamped %d non-positive pixels to %.3g before the logarithm", n_clamped, floor)
        filtered = np.where(bad, floor, filtered)

    thickness = -np.log(filtered) / cfg.mu
    if full_output:
        return thickness, {"n_clamped": n_clamped, "clamp_fraction": fraction}
    return thickness


def unsharp_combination(t_pm, t_gpm, s: float) -> np.ndarray:
    """``t_pm + s (t_gpm - t_pm)``; ``s > 1`` sharpens beyond the GPM result."""
    t_pm = np.asarray(t_pm, dtype=float)
    t_gpm = np.asarray(t_gpm, dtype=float)
    if t_pm.shape != t_gpm.shape:
        raise ParameterError(f"shape mismatch {t_pm.shape} vs {t_gpm.shape}")
    if s == 0:
        return t_pm.copy()
    if s == 1:
        return t_gpm.copy()
    return t_pm + s * (t_gpm - t_pm)
