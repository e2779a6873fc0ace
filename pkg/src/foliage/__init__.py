"""Verification toolkit for foliated manifolds: exact frame models, spectral
grid geometry, sub-Dirac operators, Chern-Weil forms and almost-Riemannian
families."""

from .exact import ExactScalar, PoleError, as_exact, evaluate, limit_at_zero, parse_exact
from .frames import LieFrameModel, ModelError, load_model
from .frame_checks import (adiabatic_limit_check, omega_tensor, verify_curvature_expansion,
                           verify_frame_suite, verify_omega, verify_rescaling_laws)
from .library import abelian, filiform4, kodaira_thurston, random_almost_isometric, random_models
from .torus import CoordFoliatedTorus, flat_torus, load_torus, random_torus, sine_model
from .geometry import build_cache
from .probes import gap_inequality_probe, omega_sup_norm, verify_grid
from .clifford import (build_ext_rep, build_fiber, build_spin_rep, clifford_relations_report,
                       curvature_lift, graded_tensor)
from .subdirac import (assemble_eps_scaled, assemble_subdirac, bochner_laplacian,
                       frame_lichnerowicz_check, lichnerowicz_residual, lichnerowicz_rhs,
                       low_spectrum, operator_structure_report)
from .chern_weil import (a_hat_form, ch_form, characteristic_pairings, euler_form, l_form,
                         pontryagin_forms, vanishing_pairings)
from .almost import (almost_isometric_check, almost_riemannian_check, construct_ar_structure,
                     gamma_rescale_scaling_law, split_omega)
from .kernels import BACKEND
from .report import Report

__version__ = "0.1.0"
