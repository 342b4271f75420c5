"""Semi-Lagrangian jet schemes for linear advection on periodic grids.

Node jets (function value plus mixed partials up to order k per axis)
are advected along backward-traced characteristics and re-projected
onto tensor-product Hermite interpolants each step, giving schemes of
order 1, 3, or 5 with single-cell data locality.
"""

from .analytic import AnalyticField, cosine_product_ic, gaussian_hump_ic, zero_field
from .characteristics import (
    BUTCHER_TABLEAUS,
    ConstantVelocity,
    FootResult,
    RigidRotation,
    SwirlVelocity,
    VelocityModel,
    advect_forward,
    swirl_gradient,
    swirl_hessian,
    swirl_velocity,
    trace_foot,
)
from .diagnostics import (
    E_k,
    Polyline,
    QuadratureSpec,
    TrigPoly,
    average_identity_residual,
    extract_contour,
    hausdorff_distance,
    marker_oracle,
    mu_k,
    r_k,
    random_trig_poly,
    stability_functional,
    write_contours,
)
from .hermite import BasisId, CellData, basis_derivative, basis_matrix, basis_value, cell_eval
from .jetfield import (
    GridSpec,
    JetField,
    NodeJet,
    assemble_cell,
    deriv_column_names,
    dump_csv,
    eval_derivs,
    eval_global,
    linf_node_error,
    locate_cell,
    sample_from_function,
)
from .jetupdate import (
    DEFAULT_EPSILON,
    SchemeConfig,
    advance,
    default_stepper,
    reconstruct_cross_cubic,
    reconstruct_cross_quintic,
    step,
    update_node_analytic,
    update_node_epsilon_fd,
    upwind_step,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticField",
    "BUTCHER_TABLEAUS",
    "BasisId",
    "CellData",
    "ConstantVelocity",
    "DEFAULT_EPSILON",
    "E_k",
    "FootResult",
    "GridSpec",
    "JetField",
    "NodeJet",
    "Polyline",
    "QuadratureSpec",
    "RigidRotation",
    "SchemeConfig",
    "SwirlVelocity",
    "TrigPoly",
    "VelocityModel",
    "advance",
    "advect_forward",
    "assemble_cell",
    "average_identity_residual",
    "basis_derivative",
    "basis_matrix",
    "basis_value",
    "cell_eval",
    "cosine_product_ic",
    "default_stepper",
    "deriv_column_names",
    "dump_csv",
    "eval_derivs",
    "eval_global",
    "extract_contour",
    "gaussian_hump_ic",
    "hausdorff_distance",
    "linf_node_error",
    "locate_cell",
    "marker_oracle",
    "mu_k",
    "r_k",
    "random_trig_poly",
    "reconstruct_cross_cubic",
    "reconstruct_cross_quintic",
    "sample_from_function",
    "stability_functional",
    "step",
    "swirl_gradient",
    "swirl_hessian",
    "swirl_velocity",
    "trace_foot",
    "update_node_analytic",
    "update_node_epsilon_fd",
    "upwind_step",
    "write_contours",
    "zero_field",
]
