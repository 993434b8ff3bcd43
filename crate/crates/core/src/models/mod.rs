//! Stationary path simulators.

mod iid;
mod mma;
mod path;
mod rcar;

pub use iid::simulate_iid;
pub use mma::{
    simulate_mma, simulate_mma_with, Attestations, CoefficientProcess, DiscreteMatrixLaw, MmaSpec,
    StationaryCoefficients,
};
pub use path::PathMatrix;
pub use rcar::{simulate_rcar, simulate_rcar_from, AbSampler, RcarSpec};

/// Substream tags shared by simulators and analytic samplers.
pub(crate) mod tags {
    pub const INNOVATIONS: u64 = 1;
    pub const COEFFICIENTS: u64 = 2;
    pub const RECURSION: u64 = 3;
}
