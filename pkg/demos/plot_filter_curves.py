"""
Lorentzian and lattice filters side by side
===========================================

Both retrieval filters are low-pass.  The Lorentzian one is built from the
continuum Laplacian, the lattice one from the five-point stencil that the
detector grid actually supports.  This script draws their cross-sections
and the ratio between them for a few values of the dimensionless
parameter ``upsilon = alpha / W**2``.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gpmphase import filter_ratio, gpm_filter, pm_filter, r_max

###############################################################################
# Cross-sections along the kx axis
# --------------------------------
#
# Working in units where W = 1 makes ``alpha`` equal to ``upsilon`` and puts
# the Nyquist frequency at ``k = pi``.

wk = np.linspace(0, np.pi, 400)
upsilons = [0.01, 0.1, 1.0, 10.0]

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for u in upsilons:
    (line,) = axes[0].plot(wk, pm_filter(wk, 0, u), label=f"PM, U={u:g}")
    axes[0].plot(wk, gpm_filter(wk, 0, u, 1.0), "--", color=line.get_color())
    axes[1].plot(wk, filter_ratio(wk, 0, u, 1.0), color=line.get_color(), label=f"U={u:g}")
axes[0].set_xlabel("W kx")
axes[0].set_ylabel("filter")
axes[0].set_title("solid PM, dashed GPM")
axes[0].legend(fontsize=8)
axes[1].set_xlabel("W kx")
axes[1].set_ylabel("P_GPM / P_PM")
axes[1].legend(fontsize=8)
fig.tight_layout()
fig.savefig("filter_curves.png", dpi=120)

###############################################################################
# The two filters agree near DC and part ways toward the Nyquist frequency.
# The largest gap sits at the mesh corner, and it saturates as ``upsilon``
# grows.

for u in upsilons + [1e3, 1e6]:
    print(f"U={u:>9g}  R_max={r_max(u):.4f}")
print(f"limit pi^2/4 = {np.pi**2 / 4:.4f}")

###############################################################################
# Full 2-D maps
# -------------
#
# Near the origin the lattice filter is close to rotationally symmetric.  At
# the edge of the mesh its contours take on the square shape of the grid.

k = np.fft.fftshift(2 * np.pi * np.fft.fftfreq(128))
kx, ky = np.meshgrid(k, k, indexing="ij")
fig, axes = plt.subplots(1, 2, figsize=(9, 4))
for ax, (name, vals) in zip(axes, [("PM", pm_filter(kx, ky, 10.0)), ("GPM", gpm_filter(kx, ky, 10.0, 1.0))]):
    cs = ax.contour(k, k, vals.T, levels=12)
    ax.clabel(cs, fontsize=6)
    ax.set_aspect("equal")
    ax.set_title(f"{name}, U=10")
fig.tight_layout()
fig.savefig("filter_contours.png", dpi=120)
