//! Limit objects of a jointly regularly varying series, evaluated exactly
//! where a closed form exists and by Monte Carlo over spectral-process
//! windows otherwise.
//!
//! Every sampler implements [`SpectralProcess`]: one draw yields a list of
//! weighted windows `(Θ_s, ..., Θ_t)` with `‖Θ_0‖ = 1`. Expectations are
//! weighted averages normalized by the total weight, so samplers that
//! evaluate several mixture branches per draw (the moving average) and
//! plain samplers (weight one) are handled alike.

mod breiman;
mod cluster;
pub mod functionals;
mod laplace;
mod mma;
mod process;
mod projection;
mod theta;
mod time_change;
mod window;

pub use breiman::{breiman_constant, BreimanEstimate, MatrixSampler};
pub use cluster::{cluster_size_law, ClusterSizeLaw};
pub use functionals::{PointFn, PointFunctional, WindowFn, WindowFunctional, WindowView};
pub use laplace::{laplace_functional, LaplaceValue};
pub use mma::{mma_spectral_window, mma_theta, tail_equivalence_constant};
pub use process::{rcar_forward_tail, IidSpectral, MmaSpectral, RcarForward, SpectralProcess};
pub use projection::{linear_projection_theta, Sided};
pub use theta::{theta_forward, ThetaForward};
pub use time_change::{lag_reversal, time_change_check, IdentityCheck};
pub use window::{SpectralWindow, TailWindow, Truncation};

/// `x^alpha` with `0^alpha = 0`.
#[inline]
pub(crate) fn pow_alpha(x: f64, alpha: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if alpha == 1.0 {
        x
    } else {
        libm::pow(x, alpha)
    }
}
