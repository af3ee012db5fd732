"""Single-distance propagation-based phase retrieval.

Lorentzian single-material (PM) and five-point-lattice (GPM) filters, a paraxial
forward model for simulated phase-contrast images, and the analysis tools
used to compare the two reconstructions.
"""

from .core import (
    ClampOverflowError,
    Constants,
    FrequencyMesh,
    ParameterError,
    PhysicalConfig,
    SingularFilterError,
    build_frequency_mesh,
    derive_constants,
    wavelength_from_energy,
)
from .filters import (
    FilterSpec,
    anka_filter,
    anka_filter_revised,
    anka_matched_sigma,
    apply_source_blur,
    build_filter_grid,
    filter_ratio,
    gpm_filter,
    pm_filter,
    quartic_ratio_approx,
    r_max,
    tunable_filter,
)
from .retrieval import RetrievalOptions, flat_field_correct, retrieve_thickness, unsharp_combination
from .fresnel import propagate, rebin_average, simulate_pbi, transmission, upsample_replicate
from .phantom import BinaryPhantomSpec, analytic_phantom, random_binary
from .deconv import KernelEstimate, estimate_kernel_rl, kernel_width
from .analysis import (
    difference_map,
    gaussian_blur,
    gpm_distance_band,
    laplacian_5pt,
    laplacian_signature_residual,
    line_profile,
    validity_report,
)

__version__ = "0.1.0"
