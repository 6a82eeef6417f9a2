"""Numerical laboratory for entropy convexity along Wasserstein geodesics."""

from .comparison import (ConjugatePointError, DistortionQuery, comparison_profiles,
                         dcn_classify, distortion_coefficients, sigma, tau)
from .densities import density_on_grid, density_preset, phase_on_grid
from .entropy import (EntropyGenerator, EntropySeries, build_series, fisher_information,
                      generalized_dissipation, generator, power, renyi_entropy,
                      shannon_entropy, sn_entropy_gap, sn_functional, sturm, xlogx)
from .geometry import (BakryEmeryParams, Grid, ManifoldModel, Potential, apply_witten_laplacian,
                       build_model, curvature_profile, gamma2_field, hessian_decomposition)
from .lab import (CheckReport, check_edi_epdi, check_ent_infty, check_jacobian, check_niw,
                  check_path_invariants, check_power_bound, check_renyi, check_sn,
                  check_sturm, identity_ij, infer_K, resolve_w_sign, rigidity_probe,
                  w_entropy_profile)
from .scenario import ConfigError, load_config, load_manifest, prepare, run_scenario
from .transport import (GeodesicPath, TransportMap, closed_form_map, hopf_lax_evolve,
                        interpolate_path, model_gaussian_path, monotone_map, recover_phase,
                        wasserstein_speed)

__version__ = "0.1.0"
