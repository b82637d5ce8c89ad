//! Exact integer linear algebra: sparse matrices, Smith normal form, homology.

pub mod homology;
pub mod matrix;
pub mod snf;

pub use homology::{betti_numbers, homology, homology_all, HomologyGroup};
pub use matrix::{boundary_matrix, SparseIntMatrix};
pub use snf::{invariant_factors, smith_normal_form, smith_normal_form_with_transforms, SmithForm};
