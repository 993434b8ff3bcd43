use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rv::norm::NormSpec;
use crate::rv::radial::RadialLaw;
use crate::rv::rng::StreamRng;
use crate::rv::spectral::SpectralMeasure;

/// Law of `V = R Θ` with `R` Pareto(alpha) independent of `Θ`.
#[derive(Debug, Clone)]
pub struct RvLaw {
    pub radial: RadialLaw,
    pub spectral: SpectralMeasure,
}

impl RvLaw {
    pub fn new(radial: RadialLaw, spectral: SpectralMeasure) -> Self {
        RvLaw { radial, spectral }
    }

    pub fn alpha(&self) -> f64 {
        self.radial.alpha()
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim()
    }

    pub fn norm(&self) -> &NormSpec {
        self.spectral.norm()
    }

    pub fn sample_into(&self, rng: &mut StreamRng, out: &mut [f64]) {
        let r = self.radial.sample(rng);
        self.spectral.sample_into(rng, out);
        out.iter_mut().for_each(|x| *x *= r);
    }
}

/// One draw of `R Θ`; `dim` must match the spectral measure.
pub fn sample_rv_vector(
    radial: &RadialLaw,
    spectral: &SpectralMeasure,
    dim: usize,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    if dim != spectral.dim() {
        return Err(Error::DimensionMismatch(format!(
            "requested dimension {dim}, spectral measure has {}",
            spectral.dim()
        )));
    }
    let r = radial.sample(rng);
    let mut v = spectral.sample(rng);
    v.iter_mut().for_each(|x| *x *= r);
    Ok(v)
}
