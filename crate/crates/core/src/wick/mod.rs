//! Formal verification engine for the deformation-quantization machinery:
//! truncated eps-series, normal-ordered Weyl words, the Wick contraction
//! functional, Duhamel expansion, the Grassmann supertrace, and the Todd
//! determinant identities.

pub mod clifford;
pub mod contract;
pub mod eps;
pub mod rational;
pub mod todd;
pub mod word;

pub use clifford::{projector, top_monomial, CliffordElement, Gen};
pub use contract::contract;
pub use eps::{EpsSeries, LaurentEps};
pub use todd::{todd_det_series, verify_todd, ToddReport};
pub use word::{
    duhamel_exp, duhamel_exp_windowed, duhamel_exp_with_levels, evaluate, multi_indices,
    sigma_levels, PPoly, WeylWord,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WickError {
    #[error("cap exceeded: {what}")]
    CapExceeded { what: String },
    #[error("perturbation term carries no power of eps")]
    NotFormallySmall,
    #[error(
        "net-negative eps power survived contraction (mass {magnitude:.3e}); \
         inverse powers were not matched by eps factors"
    )]
    NegativeValuation { magnitude: f64 },
}
