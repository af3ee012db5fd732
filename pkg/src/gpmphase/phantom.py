"""Test objects: seeded random binary patterns and simple analytic shapes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ParameterError

__all__ = [
    "RNG_ALGORITHM",
    "BinaryPhantomSpec",
    "random_binary",
    "step_edge",
    "gaussian_bump",
    "disk",
    "band_limited",
    "analytic_phantom",
    "parse_phantom",
]

#: bit generator behind every random phantom; recorded in run manifests
RNG_ALGORITHM = "numpy.random.PCG64"


@dataclass(frozen=True)
class BinaryPhantomSpec:
    n1: int = 256
    n2: int = 256
    fill_fraction: float = 0.5
    thickness_m: float = 40e-6
    seed: int = 0
    block_px: int = 1

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ParameterError("phantom must be at least 2x2")
        if not 0 <= self.fill_fraction <= 1:
            raise ParameterError("fill_fraction must lie in [0, 1]")
        if self.thickness_m < 0:
            raise ParameterError("thickness must be >= 0")
        if self.block_px < 1:
            raise ParameterError("block_px must be >= 1")


def random_binary(spec: BinaryPhantomSpec) -> np.ndarray:
    """Two-valued ``{0, T0}`` pattern with independent ``block_px`` squares."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    b = spec.block_px
    m1 = -(-spec.n1 // b)
    m2 = -(-spec.n2 // b)
    blocks = rng.random((m1, m2)) < spec.fill_fraction
    pattern = np.repeat(np.repeat(blocks, b, axis=0), b, axis=1)[: spec.n1, : spec.n2]
    return np.where(pattern, spec.thickness_m, 0.0)


def _centre(shape, center):
    if center is None:
        return ((shape[0] - 1) / 2.0, (shape[1] - 1) / 2.0)
    return center


def step_edge(shape, column: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
    """``low`` for axis-1 index ``< column``, ``high`` from ``column`` on."""
    n1, n2 = shape
    if not 0 < column < n2:
        raise ParameterError(f"edge column {column} must lie strictly inside 0..{n2}")
    out = np.full(shape, float(low))
    out[:, column:] = high
    return out


def gaussian_bump(shape, sigma_px: float, amplitude: float = 1.0, center=None) -> np.ndarray:
    """Sampled Gaussian with peak ``amplitude`` at ``center`` (pixel units)."""
    if not sigma_px > 0:
        raise ParameterError("bump width must be positive")
    c1, c2 = _centre(shape, center)
    m = np.arange(shape[0])[:, None] - c1
    n = np.arange(shape[1])[None, :] - c2
    return amplitude * np.exp(-(m**2 + n**2) / (2.0 * sigma_px**2))


def disk(shape, radius_px: float, value: float = 1.0, center=None) -> np.ndarray:
    """``value`` on pixels whose centre lies within ``radius_px`` of ``center``."""
    if not radius_px > 0:
        raise ParameterError("disk radius must be positive")
    c1, c2 = _centre(shape, center)
    m = np.arange(shape[0])[:, None] - c1
    n = np.arange(shape[1])[None, :] - c2
    return np.where(m**2 + n**2 <= radius_px**2, float(value), 0.0)


def band_limited(shape, k_max: float, thickness_m: float = 1.0, seed: int = 0) -> np.ndarray:
    """Random smooth phantom whose spectrum lies inside ``|k| <= k_max`` (rad/pixel).

    White noise is masked to a disc in Fourier space and rescaled to span
    ``[0, thickness_m]``.
    """
    if not 0 < k_max <= np.pi:
        raise ParameterError("k_max must lie in (0, pi] rad/pixel")
    rng = np.random.Generator(np.random.PCG64(seed))
    kx = 2 * np.pi * np.fft.fftfreq(shape[0])[:, None]
    ky = 2 * np.pi * np.fft.fftfreq(shape[1])[None, :]
    spectrum = np.fft.fft2(rng.standard_normal(shape)) * (kx**2 + ky**2 <= k_max**2)
    f = np.fft.ifft2(spectrum).real
    span = f.max() - f.min()
    if span == 0:
        return np.zeros(shape)
    return thickness_m * (f - f.min()) / span


_ANALYTIC = {
    "step_edge": step_edge,
    "gaussian_bump": gaussian_bump,
    "disk": disk,
    "band_limited": band_limited,
}


def analytic_phantom(kind: str, shape, **params) -> np.ndarray:
    try:
        make = _ANALYTIC[kind]
    except KeyError:
        raise ParameterError(f"unknown phantom kind {kind!r}; choose from {sorted(_ANALYTIC)}") from None
    return make(shape, **params)


_BINARY_KEYS = {
    "seed": ("seed", int),
    "fill": ("fill_fraction", float),
    "thickness": ("thickness_m", float),
    "block": ("block_px", int),
    "n": (None, int),
    "n1": ("n1", int),
    "n2": ("n2", int),
}


def parse_phantom(text: str, shape=(256, 256), thickness_m: float = 40e-6):
    """Build a phantom from an inline spec such as ``"binary:seed=42,fill=0.5"``.

    Analytic kinds take their keyword arguments the same way, e.g.
    ``"disk:radius_px=20,value=4e-5"``.  Returns ``(array, params)``.
    """
    kind, _, rest = text.partition(":")
    kv = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ParameterError(f"malformed phantom parameter {item!r}")
        kv[key.strip()] = value.strip()

    if kind == "binary":
        args = {"n1": shape[0], "n2": shape[1], "thickness_m": thickness_m}
        for key, value in kv.items():
            if key not in _BINARY_KEYS:
                raise ParameterError(f"unknown binary phantom key {key!r}")
            name, conv = _BINARY_KEYS[key]
            if name is None:
                args["n1"] = args["n2"] = conv(value)
            else:
                args[name] = conv(value)
        spec = BinaryPhantomSpec(**args)
        return random_binary(spec), {"kind": "binary", "rng": RNG_ALGORITHM, **spec.__dict__}

    params = {k: float(v) for k, v in kv.items()}
    for key in ("column", "seed"):
        if key in params:
            params[key] = int(params[key])
    return analytic_phantom(kind, shape, **params), {"kind": kind, **params}
