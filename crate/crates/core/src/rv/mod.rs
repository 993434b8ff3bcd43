//! Sampling primitives for regular variation.

pub mod law;
pub mod norm;
pub mod radial;
pub mod rng;
pub mod spectral;

pub use law::{sample_rv_vector, RvLaw};
pub use norm::{norm, NormSpec};
pub use radial::{sample_pareto, RadialLaw};
pub use rng::{RngStream, StreamRng};
pub use spectral::SpectralMeasure;
