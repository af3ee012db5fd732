"""File formats: float32 TIFF, headerless little-endian float32 raw, CSV."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import tifffile

__all__ = ["read_image", "write_tiff", "read_raw", "write_raw", "write_csv", "read_csv"]


def write_tiff(path, image) -> None:
    """Single-channel 32-bit float TIFF (a 3-D array becomes a page stack)."""
    tifffile.imwrite(str(path), np.asarray(image, dtype=np.float32), photometric="minisblack")


def read_raw(path, shape) -> np.ndarray:
    data = np.fromfile(str(path), dtype="<f4")
    expected = int(np.prod(shape))
    if data.size != expected:
        raise OSError(f"{path}: {data.size} float32 samples, expected {expected} for shape {shape}")
    return data.reshape(shape).astype(float)


def write_raw(path, image) -> None:
    np.asarray(image, dtype="<f4").tofile(str(path))


def read_image(path, shape=None) -> np.ndarray:
    """Load a TIFF, or a ``.raw``/``.bin`` file when ``shape`` is given, as float64."""
    path = Path(path)
    if path.suffix.lower() in (".raw", ".bin", ".f32"):
        if shape is None:
            raise OSError(f"{path}: raw files need explicit dimensions")
        return read_raw(path, shape)
    return np.asarray(tifffile.imread(str(path)), dtype=float)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def read_csv(path):
    """Return ``(header, float array)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return header, np.asarray(rows)
