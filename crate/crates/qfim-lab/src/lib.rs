//! Quantum-estimation toolkit for a noisy two-qubit system.
//!
//! Two qubits start in a mixed entangled state parameterized by an
//! entanglement degree `p` and a mixedness parameter `r`, then dephase under
//! either a bosonic (Ohmic, zero-temperature) or a spin environment. The
//! evolved state keeps an X shape, which makes essentially every quantity of
//! interest available in closed form:
//!
//! * symmetric logarithmic derivatives and quantum Fisher information for
//!   `p` and `r`, plus the 2x2 QFI matrix and Cramér–Rao bounds
//!   ([`estimation`]),
//! * interferometric power, local quantum uncertainty, l1 coherence, purity,
//!   fidelity and trace distance ([`correlations`]),
//! * non-Markovianity witnesses built from time series of any of the above
//!   ([`witnesses`]).
//!
//! Every closed form is paired with an independent numeric route (eigenbasis
//! expansions, matrix square roots, finite differences) so the two can be
//! cross-checked; [`verify`] bundles those cross-checks into a runnable
//! suite and [`sweep`] produces CSV datasets over parameter grids.
//!
//! ```
//! use qfim_lab::models::{self, ModelConfig};
//! use qfim_lab::{estimation, Param};
//!
//! let cfg = ModelConfig::from_json(
//!     r#"{"initial": {"p": 0.1, "r": 0.9},
//!         "env": {"type": "spin", "N": 5, "lambda": 0.2, "h": 0.1},
//!         "omega1": 0.5, "omega2": 0.5}"#,
//! )?;
//!
//! // Closed-form QFI for the mixedness parameter at t = 0...
//! let f = estimation::qfi_closed(Param::R, 0.0, &cfg)?;
//! assert!((f - 300.0 / 37.0).abs() < 1e-12);
//!
//! // ...agrees with the brute-force eigenbasis oracle.
//! let rho = models::evolved_state(0.0, &cfg)?;
//! let drho = models::state_derivative(Param::R, 0.0, &cfg)?;
//! let oracle = estimation::qfi_numeric(&rho, &drho)?;
//! assert!((f - oracle).abs() < 1e-9);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod correlations;
pub mod estimation;
pub mod linalg;
pub mod models;
pub mod parallel;
pub mod sweep;
pub mod verify;
pub mod witnesses;

#[cfg(test)]
pub(crate) mod testutil;

pub use estimation::{CrbReport, Param, QfiMatrix, SldOperator};
pub use linalg::CMat;
pub use models::{DensityMatrix, ModelConfig};
pub use witnesses::{NonMarkovReport, Quantity, WitnessSeries};
