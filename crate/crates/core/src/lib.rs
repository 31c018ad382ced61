//! Adaptive variational quantum Kolmogorov-Arnold networks on a dense
//! statevector simulator.
//!
//! The crate is organised bottom-up:
//!
//! - [`qsim`]: statevector, gates, Pauli expectation values.
//! - [`pauli`]: Pauli strings, operator pools and `exp(-iθP)` kernels.
//! - [`spline`]: clamped cubic B-spline bases and the trainable activation.
//! - [`optimizer`]: COBYLA and finite-difference helpers.
//! - [`vqkan`]: the network model, its loss and the adaptive growth loop.
//! - [`qnn`]: the data re-uploading QNN baseline.
//! - [`problems`]: fitting, classification and heat-equation benchmarks.
//! - [`experiment`]: configuration-driven runner, CSV/JSON output, comparison.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod error;
pub mod experiment;
pub mod optimizer;
pub mod pauli;
pub mod problems;
pub mod qnn;
pub mod qsim;
pub mod spline;
pub mod vqkan;

pub use error::{Error, Result};
pub use pauli::{Axis, Hamiltonian, OperatorPool, PauliString, PoolFlavor};
pub use qsim::{Encoding, Gate, StateVector};
pub use spline::{ActivationCoefficients, SplineGrid};
pub use vqkan::{AnsatzTerm, EpochRecord, VqkanModel};
