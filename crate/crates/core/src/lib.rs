//! Open-system dynamics of bosonic atoms in a double well whose
//! population imbalance is read out dispersively by a driven, lossy cavity
//! mode.
//!
//! Rates are in units of the cavity field decay κ, which is fixed to 1.
//! [`ModelParams::from_hz`] converts laboratory frequencies.
//!
//! ```
//! use cavity_dimer::{build_hamiltonian, build_liouvillian, HilbertSpace, ModelParams, TruncationConfig};
//!
//! let params = ModelParams::default().with_delta(4.0);
//! let space = HilbertSpace::new(params.n_atoms, TruncationConfig::new(4, 1e-8).unwrap()).unwrap();
//! let h = build_hamiltonian(&params, &space).unwrap();
//! let l = build_liouvillian(&h.total, params.kappa(), &space).unwrap();
//! assert_eq!(l.side(), space.dim() * space.dim());
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dimer;
pub mod error;
pub mod liouvillian;
pub mod model;
pub mod oracle;
pub mod propagator;
pub mod state;

pub use dimer::{ground_state, initial_state, DimerGroundState};
pub use error::{Error, Result};
pub use liouvillian::{build_liouvillian, spectrum, steady_state, Liouvillian, SpectrumResult};
pub use model::{
    build_hamiltonian, CMatrix, FrequenciesHz, Hamiltonian, HilbertSpace, ModelParams, Operator, TruncationConfig,
};
pub use propagator::{evolve, EvolveOptions, TraceRecord};
#[cfg(feature = "std")]
pub use propagator::propagate_exact;
pub use state::DensityMatrix;
