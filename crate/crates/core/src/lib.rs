//! Frameness (asymmetry) monotones for finite-dimensional states under a
//! U(1) superselection rule.
//!
//! The crate covers the standard form of pure states and U(1) dephasing,
//! number-shifting Kraus channels, the pure-state monotones (tail sums,
//! entropy, elementary-symmetric concurrences, number variance), the
//! closed-form qubit concurrence and frameness of formation, and a numerical
//! convex-roof optimizer for everything else.

pub mod channels;
pub mod cli;
pub mod convexroof;
pub mod error;
pub mod io;
pub mod monotones;
pub mod numerics;
pub mod sampling;
pub mod states;
pub mod verify;

pub use channels::{Ensemble, U1Channel, U1Kraus};
pub use convexroof::{convex_roof, RoofConfig, RoofResult};
pub use error::{Error, Result};
pub use monotones::MonotoneId;
pub use states::{DensityMatrix, SectoredPureState, StandardState};
