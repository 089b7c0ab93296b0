//! Return-to-home dispersal on a periodic square.
//!
//! Individuals are either at home (`u(y)`) or travelling (`v(x, y)`, position
//! `x`, home `y`). Travelers diffuse, return home at rate `α`, and residents
//! leave at rate `γ`, landing at an offset drawn from a Gaussian kernel `ρ`.
//! Two extensions reuse the same movement: colonization of new homes, and an
//! SI epidemic with home and traveler contacts.
//!
//! ```
//! use rhsim_core::{CoreParams, CoreState, CoreStepper, GridSpec, init};
//!
//! let grid = GridSpec::new(10.0, 16)?;
//! let params = CoreParams::new(1.0, 1.0, 0.5, 1.0)?;
//! let u0 = init::gaussian_blob(grid, (0.0, 0.0), 1.5, 1.0)?;
//! let state = CoreState::new(u0, rhsim_core::TravelerField::zeros(grid, rhsim_core::Frame::Eulerian))?;
//! let traj = CoreStepper::new(params, grid)?.simulate(&state, 1.0, 0.1, 5)?;
//! assert!(traj.diagnostics.iter().all(|d| d.conservation_residual < 1e-10));
//! # Ok::<(), rhsim_core::Error>(())
//! ```

pub mod analytic;
pub mod colonization;
pub mod epidemic;
pub mod error;
mod exchange;
pub mod grid;
pub mod init;
pub mod kernels;
pub mod model;
pub mod snapshot;
pub mod spectral;
pub mod trajectory;

pub use error::{Error, Result};
pub use grid::{Frame, GridSpec, ScalarField, TravelerField};
pub use kernels::CoreParams;
pub use model::{CoreState, CoreStepper};
pub use snapshot::Snapshot;
