//! Exact Weil indices of quadratic characters.
//!
//! Every index is reduced to a Gauss sum over a finite abelian group, evaluated
//! exactly in a cyclotomic ring and recognized as an element of μ₈. On top of the
//! engine sit four product-formula verifiers: forms over ℚ, formal loop spaces,
//! curves over ℚ_p, and the arithmetic surface at a point (p, t).

pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod finite_quadratic;
pub mod laurent;
pub mod local_fields;
pub mod verifiers;
pub mod weil;

pub use cyclotomic::{recognize_scaled_mu8, ComplexInterval, CycInt, Mu8};
pub use error::{Error, Result};

/// Resource caps shared by the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest group enumerated for Gauss sums and Fourier checks.
    pub enumeration_cap: u64,
    /// Largest group for which full |A|×|A| matrix relations are built.
    pub matrix_cap: u64,
    /// Largest cyclotomic order produced.
    pub order_cap: usize,
    /// Default relative precision of local-field elements, in uniformizer digits.
    pub precision: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_cap: 2_000_000,
            matrix_cap: 512,
            order_cap: cyclotomic::DEFAULT_ORDER_CAP,
            precision: 32,
        }
    }
}
