//! Numerical classification of real q-convexity and q-plurisubharmonicity.

pub mod complex;
pub mod error;
pub mod expr;
pub mod field;
pub mod grid;
pub mod lp;
pub mod qconvex;
pub mod report;
pub mod sampling;
pub mod sets;
pub mod spectra;

pub use complex::{
    check_first_main_theorem, check_reinhardt, levi_matrix, qpsh_index_on_grid, reinhardt_pullback, rigid_lift,
    tube_pseudoconvexity_check, FirstMainReport, LeviEstimate, ReinhardtReport, TubeReport, TubeSpec,
};
pub use error::{Error, EvalError, Result};
pub use expr::{parse_complex_expr, parse_expr, Expr, VarStyle};
pub use field::{fd_gradient, fd_hessian, FieldSpec, HessianEstimate, ScalarField, Smoothness};
pub use grid::{DomainBox, GridField, GridSpec};
pub use lp::{fit_affine_upper_envelope, AffineFunctional};
pub use qconvex::{
    approximate_from_above, classify_on_grid, hessian_q_index, sup_convolve, witness_search, KernelSpec, QIndexReport,
    Witness, WitnessBudget, WitnessOutcome,
};
pub use report::Report;
pub use sets::{
    continuity_principle_test, exhaustion_field, graph_complement_exhaustion, graph_complement_family,
    neg_log_dist_field, set_q_convex_check, ContinuityVerdict, DistanceKind, NormSpec, OpenSetModel, PlanarFamily,
};
pub use spectra::{eig_hermitian, eig_symmetric, inertia, HermitianMatrix, Inertia, SymmetricMatrix};
