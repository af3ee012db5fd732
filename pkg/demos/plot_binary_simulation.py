"""
Retrieving a simulated random binary object
===========================================

A random two-level object is pushed through the forward model and then
retrieved with both filters.  The lattice filter keeps more of the fine
structure while the large-scale thickness stays right.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gpmphase import (
    BinaryPhantomSpec,
    FilterSpec,
    PhysicalConfig,
    RetrievalOptions,
    estimate_kernel_rl,
    gaussian_blur,
    random_binary,
    retrieve_thickness,
    simulate_pbi,
)
from gpmphase.analysis import line_profile, peak_to_trough

###############################################################################
# Set-up
# ------
#
# Hard x-rays of 0.5 A, a weakly absorbing material with delta/beta = 500,
# 10 um pixels and 10 cm of propagation.  The object is 40 um thick where
# it is present.

cfg = PhysicalConfig(wavelength_m=0.5e-10, delta=5e-7, beta=1e-9, distance_m=0.1, pixel_m=1e-5)
t0 = 40e-6
print(f"mu = {cfg.mu:.3f} 1/m, alpha = {cfg.alpha:.4e} m^2, upsilon = {cfg.upsilon:.4f}")

truth = random_binary(BinaryPhantomSpec(256, 256, fill_fraction=0.5, thickness_m=t0, seed=42))

###############################################################################
# The forward model works on a grid twice as fine as the detector and bins
# the intensity back down.  Edges pick up bright and dark fringes.

intensity = simulate_pbi(truth, cfg, oversample=2)

t_pm = retrieve_thickness(intensity, cfg, RetrievalOptions(FilterSpec.pm()))
t_gpm = retrieve_thickness(intensity, cfg, RetrievalOptions(FilterSpec.gpm()))

fig, axes = plt.subplots(1, 4, figsize=(14, 3.6))
for ax, (title, img) in zip(
    axes, [("object", truth), ("intensity", intensity), ("PM", t_pm), ("GPM", t_gpm)]
):
    ax.imshow(img[:64, :64], cmap="gray")
    ax.set_title(title)
    ax.axis("off")
fig.tight_layout()
fig.savefig("binary_maps.png", dpi=120)

###############################################################################
# Line profiles
# -------------
#
# Along any row the lattice reconstruction swings further between the two
# levels.

row = 20
x, p_pm = line_profile(t_pm / t0, row)
_, p_gpm = line_profile(t_gpm / t0, row)
fig, ax = plt.subplots(figsize=(8, 3))
ax.step(x[:64], truth[row, :64] / t0, where="mid", color="0.6", label="object")
ax.plot(x[:64], p_pm[:64], label="PM")
ax.plot(x[:64], p_gpm[:64], label="GPM")
ax.set_xlabel("pixel")
ax.set_ylabel("T / T0")
ax.legend()
fig.tight_layout()
fig.savefig("binary_profile.png", dpi=120)

wins = np.mean([peak_to_trough(g) > peak_to_trough(p) for g, p in zip(t_gpm, t_pm)])
print(f"rows where GPM has the larger peak-to-trough swing: {100 * wins:.1f}%")

###############################################################################
# Low-pass fidelity
# -----------------
#
# Blurring both the retrieval and the object by 2 px removes the fringe-scale
# detail and leaves the mean thickness, which is close to exact.

diff = gaussian_blur(t_gpm, 2.0) - gaussian_blur(truth, 2.0)
print(f"low-pass RMS error / T0 = {np.sqrt(np.mean(diff**2)) / t0:.4f}")

###############################################################################
# Effective blur kernels
# ----------------------
#
# Richardson-Lucy estimates the kernel that maps the object onto each
# reconstruction.  The lattice kernel has a taller, narrower core.  Its
# second moment is not smaller at this iteration count, because it also
# carries a faint wide halo.

k_pm = estimate_kernel_rl(truth, t_pm, kernel_size=15, iterations=100)
k_gpm = estimate_kernel_rl(truth, t_gpm, kernel_size=15, iterations=100)
for name, k in [("PM", k_pm), ("GPM", k_gpm)]:
    print(f"{name}: peak {k.kernel.max():.3f}, FWHM {k.fwhm:.2f} px, sigma_est {k.sigma_est:.2f} px")

fig, axes = plt.subplots(1, 2, figsize=(7, 3.4))
for ax, (name, k) in zip(axes, [("PM", k_pm), ("GPM", k_gpm)]):
    ax.imshow(k.kernel[3:12, 3:12], cmap="magma", vmin=0, vmax=k_gpm.kernel.max())
    ax.set_title(f"{name} kernel")
    ax.axis("off")
fig.tight_layout()
fig.savefig("binary_kernels.png", dpi=120)
