"""
Matching a deconvolution mask to the lattice filter
===================================================

A phenomenological sharpening mask on top of the Lorentzian filter can
imitate the lattice filter.  A Gaussian mask gets the wrong low-frequency
shape.  A mask with a quartic exponent can be tuned so that its
fourth-order term equals that of the exact ratio.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gpmphase import anka_filter, anka_filter_revised, anka_matched_sigma, filter_ratio, quartic_ratio_approx

###############################################################################
# Work with W = 1 and upsilon = 2, and pick c = 0.5 for the mask.

alpha, w, c = 2.0, 1.0, 0.5
sigma = anka_matched_sigma(alpha, w, c)
print(f"matched sigma = {sigma:.4f} px; check 12 s^4/(1+c) = {12 * sigma**4 / (1 + c):.4f}")

###############################################################################
# Along the axis the quartic mask, the fourth-order expansion and the exact
# ratio share their low-frequency behaviour.  A Gaussian mask of similar
# width rises as k squared instead.

k = np.linspace(0, 1.2, 300)
fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(k, filter_ratio(k, 0, alpha, w), label="exact ratio")
ax.plot(k, quartic_ratio_approx(k, 0, alpha, w), "--", label="fourth-order expansion")
ax.plot(k, anka_filter_revised(k, 0, c, sigma), ":", label="quartic mask")
ax.plot(k, anka_filter(k, 0, c, sigma / np.sqrt(np.pi)), "-.", label="Gaussian mask")
ax.set_xlabel("W kx")
ax.set_ylabel("gain over PM")
ax.set_ylim(0.95, 1.6)
ax.legend()
fig.tight_layout()
fig.savefig("anka_matching.png", dpi=120)
