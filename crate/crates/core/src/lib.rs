//! Correlation dynamics of two-qubit Bell-diagonal states under local
//! flip channels.
//!
//! The closed-form quantities live in [`correlations`] and [`channels`]; each
//! has a brute-force counterpart (measurement optimisation, Kraus evolution)
//! used to cross-check it. [`dynamics`] builds trajectories and analyses them,
//! and [`scenario`] drives everything from a JSON configuration.

pub mod channels;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod quantum;
pub mod scenario;

pub use channels::{ChannelPair, ChannelSpec, FlipType, NoiseSchedule, SweepVariable};
pub use correlations::{correlations, CorrelationTriple, OracleGrid};
pub use dynamics::{simulate, RegimeLabel, Sweep, Trajectory};
pub use error::{Error, Result};
pub use quantum::{BellDiagonalState, DensityMatrix4, Pauli, Side};
