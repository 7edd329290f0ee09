"""Noise sensitivity and Gaussian surface area of polynomial threshold functions."""
from .bounds import (
    BoundReport,
    chi2_log_density,
    chi2_log_density_max,
    gns_bound,
    gns_bound_asymptotic,
    radial_bound,
    surface_bound,
    wiggle_bound,
)
from .circle import CirclePolynomial, SignChangeReport, circle_polynomial, count_sign_changes, eval_along_circle
from .estimators import (
    EstimateResult,
    SurfaceEstimate,
    estimate_expected_sign_changes,
    estimate_gns,
    estimate_radial,
    estimate_rotation_disagreement,
    estimate_surface_collar,
    estimate_surface_crossing,
    estimate_wiggle,
    verify_bounds,
)
from .families import (
    FamilySpec,
    ball_surface_closed_form,
    make_ball,
    make_halfspace,
    make_product_linear_forms,
    make_radial_product,
    make_random_ptf,
)
from .poly import PTF, Monomial, Polynomial, evaluate, gradient, product_expand, ptf_eval
from .sampling import CorrelationSpec, SeededStream, correlated_pair, radial_pair, rotated_pair, sample_gaussian, wiggle_pair

__version__ = "0.1.0"
