//! Pseudodifferential symbol calculus and Fredholm index engine on the
//! circle.
//!
//! The crate computes the index of an elliptic order-zero symbol three
//! independent ways — through the residue one-cocycle paired with a
//! parametrix, through branch winding numbers, and through singular-value
//! counting of an exactly windowed operator quantization — and ships a
//! formal power-series engine that checks the Wick-contraction and Todd
//! determinant identities the cocycle computation rests on.
//!
//! ```
//! use psindex::{index_report, parse_symbol, IndexOptions};
//!
//! // e^{ix} on the p > 0 branch, 1 on p < 0: the winding generator
//! let q = parse_symbol(
//!     "order 0\ndepth 4\ncomponent 0\nplus: exp(i*1*x)\nminus: 1\n",
//! )
//! .unwrap();
//! let report = index_report(&q, &IndexOptions::default());
//! assert_eq!(report.analytic_rounded, Some(-1));
//! assert_eq!(report.topological, Some(-1));
//! assert_eq!(report.oracle, Some(-1));
//! assert!(report.agree);
//! ```

pub mod config;
pub mod fourier;
pub mod index;
pub mod oracle;
pub mod radul;
pub mod residue;
pub mod rng;
pub mod suite;
pub mod symbol;
pub mod wick;

pub use fourier::CoeffFn;
pub use index::{index_report, IndexOptions, IndexReport};
pub use radul::{radul, LogDerivation};
pub use residue::wres;
pub use symbol::{parse_symbol, render_symbol, ClassicalSymbol};
