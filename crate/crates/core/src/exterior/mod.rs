//! Exterior calculus on a finite-dimensional Lie algebra: forms, the
//! Chevalley–Eilenberg differential, Hodge theory and Dolbeault operators.

mod complex;
mod differential;
mod form;
mod hodge;
mod laplacian;

pub use complex::{
    adapted_one_zero_forms, dolbeault_split, one_one_part, type_decomposition, type_projectors, ComplexTypeDecomposition,
    Dolbeault, NIJENHUIS_TOL,
};
pub use differential::{
    apply_j, apply_matrix, ce_differential, differential_matrix, j_derivation_matrix, operator_matrix,
};
pub use form::{basis_masks, mask_indices, mask_rank, sort_indices, wedge_sign, GradedForm, Mask};
pub use hodge::{apply_real, hodge_star, lefschetz_inverse, wedge_adjoint, wedge_matrix, Metric};
pub use laplacian::{
    adjoint_operator, balanced_bott_chern, bott_chern_laplacian, AdjointKind, HermitianCalculus,
};
