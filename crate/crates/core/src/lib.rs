//! Exact spectra of joins of circulant matrices.
//!
//! The crate computes the eigenvalues and a generalized eigenbasis of block
//! matrices whose diagonal blocks are circulant and whose off-diagonal blocks
//! are constant, without ever forming the full matrix: the circulant blocks
//! contribute their Fourier eigenpairs and a small `d x d` condensed matrix
//! supplies the rest. On top of that sit constructors for joins of circulant
//! graphs and tools for Kuramoto oscillator networks on such joins.
//!
//! ```
//! use circjoin::{CirculantMatrix, JoinSpec, C64};
//!
//! let c3 = CirculantMatrix::from_real(&[0.0, 1.0, 0.0])?;
//! let k5 = CirculantMatrix::from_real(&[0.0, 1.0, 1.0, 1.0, 1.0])?;
//! let join = JoinSpec::uniform(vec![c3, k5], C64::new(1.0, 0.0))?;
//!
//! let dec = join.full_spectrum()?;
//! assert_eq!(dec.eigenvalues().len(), 8);
//! assert_eq!(join.reduced_char_poly().to_string(), "X^2 - 5X - 11");
//! # Ok::<(), circjoin::Error>(())
//! ```

pub mod circulant;
pub mod cli;
pub mod dense;
pub mod error;
pub mod graphs;
pub mod join;
pub mod kuramoto;
pub mod smalldense;

pub use circulant::{CirculantMatrix, DftMatrix, FourierVector};
pub use dense::{CMatrix, C64};
pub use error::{Error, Result};
pub use join::{tensor_expand, JoinSpec, Polynomial, Provenance, SpectralDecomposition};
pub use smalldense::{EigenSettings, SmallMatrix};
