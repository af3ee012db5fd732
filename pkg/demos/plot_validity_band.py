"""
When is the lattice filter worth it?
====================================

Near DC the two filters coincide.  The lattice filter only makes a visible
difference when the ratio at the mesh corner clears ``1 + aleph``.  The
Fresnel number also has to stay large for the underlying transport
equation to hold.  Together these give a band of propagation distances.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gpmphase import gpm_distance_band, validity_report

###############################################################################
# The distance band
# -----------------
#
# For delta/beta = 500 at 0.5 A, with the numerical factor rounded to a
# power of ten and with the exact factor.

for w in (10e-6, 5e-6):
    for rounded in (True, False):
        lo, hi = gpm_distance_band(500, 0.5e-10, w, aleph=0.1, round_factor=rounded)
        tag = "rounded" if rounded else "exact  "
        print(f"W = {w * 1e6:.0f} um, {tag}: {lo * 1e3:.3f} mm <= distance << {hi:.2f} m")

###############################################################################
# Corner ratio against distance
# -----------------------------
#
# Sweep the propagation distance for 10 um pixels and mark where the corner
# ratio crosses ``1.1``.

dist = np.logspace(-5, 1, 300)
nf = (10e-6) ** 2 / (0.5e-10 * dist)
rmax = np.array([validity_report(500, n).r_max for n in nf])
lo, hi = gpm_distance_band(500, 0.5e-10, 10e-6, aleph=0.1)

fig, ax = plt.subplots(figsize=(7, 4))
ax.semilogx(dist, rmax)
ax.axhline(1.1, color="0.5", ls=":")
ax.axvspan(lo, hi, color="C2", alpha=0.15, label="worthwhile band")
ax.set_xlabel("distance (m)")
ax.set_ylabel("R_max")
ax.legend()
fig.tight_layout()
fig.savefig("validity_band.png", dpi=120)
