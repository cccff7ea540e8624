//! Universal state inversion for finite-dimensional multipartite quantum
//! states, the distributed concurrence, and the correlation equalities built
//! from linear entropies of all marginals.
//!
//! The crate is `no_std` with `alloc`. Dense complex matrices come from
//! `nalgebra`; party 1 is always the most significant tensor index.
//!
//! - [`dims`], [`state`], [`random`]: state representations, partial traces,
//!   subset enumeration and seeded random states.
//! - [`gellmann`]: generalized Gell-Mann generators and their completeness,
//!   trace and transpose identities.
//! - [`inversion`]: the inverter in product, subset-sum, generator and Bloch
//!   form.
//! - [`correlation`]: concurrences, the entropy ledger, the mixed-state
//!   equality, monogamy and conservation laws.
//! - [`monotone`], [`search`]: two-outcome channel analysis of the
//!   distributed concurrence and the randomized violation search.
//!
//! ```
//! use tildelab_core::correlation::{distributed_concurrence, verify_mixed_equality};
//! use tildelab_core::inversion::invert_product;
//! use tildelab_core::random::random_mixed;
//! use tildelab_core::{HilbertDims, PureState};
//!
//! let ghz = PureState::ghz(4)?;
//! assert!((distributed_concurrence(&ghz) - 1.0).abs() < 1e-12);
//!
//! let rho = random_mixed(&HilbertDims::new(&[2, 3, 2])?, 4, 7)?;
//! let tilde = invert_product(&rho);
//! assert!(tilde.min_eigenvalue() > -1e-10);
//! assert!(verify_mixed_equality(&rho)?.residual < 1e-10);
//! # Ok::<(), tildelab_core::Error>(())
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod correlation;
pub mod dims;
pub mod error;
pub mod gellmann;
pub mod inversion;
pub mod linalg;
pub mod monotone;
pub mod random;
pub mod search;
pub mod state;

pub use dims::{subsets, HilbertDims, SubsetMask};
pub use error::{Error, Result};
pub use gellmann::GellMannBasis;
pub use linalg::{CMatrix, CVector, C64};
pub use state::{default_tolerance, DensityOperator, PureState};
