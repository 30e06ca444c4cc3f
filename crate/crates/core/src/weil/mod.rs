//! The reduction engine: local lattice reduction to finite Gauss sums, archimedean
//! closed forms, and the two-stage reductions for loop spaces and
//! two-dimensional local fields.

pub mod diag;
mod local;
mod loops;
pub mod ratfunc;

pub use diag::{congruent, diagonalize_symmetric, Diagonalization, PivotScalar};
pub use local::{
    weil_index, weil_index_arch, weil_index_form, weil_index_form_local, weil_index_local,
    weil_index_rational, LatticeWindow, LocalIndex, QuadraticCharDescriptor,
};
pub use loops::{loop_diagonal, weil_index_2dlocal, weil_index_loop, weil_index_loop_form};
pub use ratfunc::{LaurentPoly, RatFunc};
