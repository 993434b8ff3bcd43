//! Models built from the `[model]` section.

use std::sync::Arc;

use tailproc_core::analytic::{IidSpectral, MmaSpectral, RcarForward, SpectralProcess};
use tailproc_core::linalg::Matrix;
use tailproc_core::models::{
    simulate_iid, simulate_mma, simulate_rcar, CoefficientProcess, DiscreteMatrixLaw, MmaSpec,
    PathMatrix, RcarSpec,
};
use tailproc_core::rv::{NormSpec, RadialLaw, RvLaw, SpectralMeasure};
use tailproc_core::{Result, RngStream};

use crate::config::{Coefficients, Family, MatrixLaw, ModelConfig, SpectralSpec};
use crate::error::{CliError, CliResult};

pub enum ModelKind {
    Iid(RvLaw),
    Mma(MmaSpec),
    Rcar(RcarSpec),
}

/// A simulator together with its spectral-process sampler.
pub struct Model {
    pub kind: ModelKind,
    pub process: Box<dyn SpectralProcess>,
    pub alpha: f64,
    pub norm: NormSpec,
    /// Law of `A_t` for autoregressions, kept for the closed form of θ.
    a_law: Option<MatrixLaw>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model").field("id", &self.model_id()).finish()
    }
}

fn measure(key: &str, spec: &SpectralSpec, dim: usize, norm: &NormSpec) -> CliResult<SpectralMeasure> {
    let bad = |e: tailproc_core::Error| CliError::validation(key, e.to_string());
    let m = match spec {
        SpectralSpec::Positive => SpectralMeasure::positive_unit(),
        SpectralSpec::TwoSided(p) => SpectralMeasure::two_sided_unit(*p).map_err(bad)?,
        SpectralSpec::UniformSphere => SpectralMeasure::uniform_sphere(dim, norm.clone()).map_err(bad)?,
        SpectralSpec::Points(atoms) => {
            SpectralMeasure::point_masses(atoms.clone(), norm.clone()).map_err(bad)?
        }
    };
    if m.dim() != dim {
        return Err(CliError::validation(
            key,
            format!("spectral law has dimension {} but {dim} is needed", m.dim()),
        ));
    }
    Ok(m)
}

fn discrete(key: &str, law: &MatrixLaw) -> CliResult<DiscreteMatrixLaw> {
    DiscreteMatrixLaw::new(law.clone()).map_err(|e| CliError::validation(key, e.to_string()))
}

fn law_label(law: &MatrixLaw) -> String {
    law.iter()
        .map(|(m, w)| {
            let entries: Vec<String> = m.as_slice().iter().map(|x| x.to_string()).collect();
            if law.len() == 1 {
                entries.join(" ")
            } else {
                format!("{}@{w}", entries.join(" "))
            }
        })
        .collect::<Vec<_>>()
        .join("|")
}

impl Model {
    pub fn build(cfg: &ModelConfig) -> CliResult<Self> {
        let radial = |key: &str, a: f64| {
            RadialLaw::new(a).map_err(|e| CliError::validation(key, e.to_string()))
        };
        match cfg.family {
            Family::Iid => {
                let law = RvLaw::new(
                    radial("model.alpha", cfg.alpha)?,
                    measure("model.spectral", &cfg.spectral, cfg.d, &cfg.norm)?,
                );
                let process = IidSpectral {
                    alpha: cfg.alpha,
                    spectral: law.spectral.clone(),
                };
                Ok(Model {
                    kind: ModelKind::Iid(law),
                    process: Box::new(process),
                    alpha: cfg.alpha,
                    norm: cfg.norm.clone(),
                    a_law: None,
                })
            }
            Family::Mma => {
                let innovation = RvLaw::new(
                    radial("model.alpha", cfg.alpha)?,
                    measure("model.spectral", &cfg.spectral, cfg.q, &cfg.norm)?,
                );
                let coefficients = match cfg.coefficients.as_ref().expect("parsed with coefficients") {
                    Coefficients::Deterministic(c) => CoefficientProcess::Deterministic(c.clone()),
                    Coefficients::Iid(laws) => CoefficientProcess::IidDiscrete(
                        laws.iter()
                            .enumerate()
                            .map(|(i, l)| discrete(&format!("model.c{i}"), l))
                            .collect::<CliResult<_>>()?,
                    ),
                };
                let m = match cfg.coefficients.as_ref() {
                    Some(Coefficients::Deterministic(c)) => c.len() - 1,
                    Some(Coefficients::Iid(l)) => l.len() - 1,
                    None => unreachable!(),
                };
                let spec = MmaSpec::new(m, cfg.d, innovation, coefficients, cfg.norm.clone())
                    .map_err(|e| CliError::validation("model.c0", e.to_string()))?;
                Ok(Model {
                    process: Box::new(MmaSpectral::new(spec.clone())),
                    kind: ModelKind::Mma(spec),
                    alpha: cfg.alpha,
                    norm: cfg.norm.clone(),
                    a_law: None,
                })
            }
            Family::Rcar => {
                let a_law = cfg.a.clone().expect("parsed with a");
                if a_law.iter().any(|(m, _)| m.rows() != cfg.d || m.cols() != cfg.d) {
                    return Err(CliError::validation("model.a", format!("A must be {0}x{0}", cfg.d)));
                }
                let a = discrete("model.a", &a_law)?;
                let b = RvLaw::new(
                    radial("model.b_alpha", cfg.b_alpha)?,
                    measure("model.b_spectral", &cfg.spectral, cfg.d, &cfg.norm)?,
                );
                let d = cfg.d;
                let spec = RcarSpec::new(
                    d,
                    Arc::new(move |rng| {
                        let am = a.sample(rng).clone();
                        let mut bv = vec![0.0; d];
                        b.sample_into(rng, &mut bv);
                        (am, bv)
                    }),
                )
                .map_err(|e| CliError::validation("model.d", e.to_string()))?
                .with_burn_in(cfg.burn_in)
                .with_label(format!("a={},b_alpha={}", law_label(&a_law), cfg.b_alpha));
                let forward = RcarForward::new(
                    spec.clone(),
                    cfg.alpha,
                    measure("model.forward_spectral", &cfg.forward_spectral, d, &cfg.norm)?,
                )
                .map_err(|e| CliError::validation("model.forward_spectral", e.to_string()))?
                .with_eps(cfg.eps);
                Ok(Model {
                    kind: ModelKind::Rcar(spec),
                    process: Box::new(forward),
                    alpha: cfg.alpha,
                    norm: cfg.norm.clone(),
                    a_law: Some(a_law),
                })
            }
        }
    }

    pub fn model_id(&self) -> String {
        match &self.kind {
            ModelKind::Iid(law) => format!("iid(d={},alpha={})", law.dim(), law.alpha()),
            ModelKind::Mma(spec) => spec.model_id(),
            ModelKind::Rcar(spec) => spec.model_id(),
        }
    }

    pub fn family(&self) -> Family {
        match self.kind {
            ModelKind::Iid(_) => Family::Iid,
            ModelKind::Mma(_) => Family::Mma,
            ModelKind::Rcar(_) => Family::Rcar,
        }
    }

    pub fn dim(&self) -> usize {
        self.process.dim()
    }

    pub fn simulate(&self, n: usize, seed: RngStream) -> Result<PathMatrix> {
        match &self.kind {
            ModelKind::Iid(law) => simulate_iid(law, n, seed),
            ModelKind::Mma(spec) => simulate_mma(spec, n, seed),
            ModelKind::Rcar(spec) => simulate_rcar(spec, n, seed),
        }
    }

    /// θ where it is known without simulation: 1 for iid sequences and
    /// `1 - |a|^α` for a univariate autoregression with constant `a` and
    /// `|a| < 1`. Moving averages go through the library's own routine.
    pub fn known_theta(&self) -> Option<f64> {
        match (&self.kind, &self.a_law) {
            (ModelKind::Iid(_), _) => Some(1.0),
            (ModelKind::Rcar(spec), Some(law)) if spec.d == 1 && law.len() == 1 => {
                let a = law[0].0.get(0, 0).abs();
                (a < 1.0).then(|| 1.0 - a.powf(self.alpha))
            }
            _ => None,
        }
    }

    /// `Pr(‖ξ_0‖ > x)` for the innovation of a moving average.
    pub fn innovation_law(&self) -> Option<&RvLaw> {
        match &self.kind {
            ModelKind::Mma(spec) => Some(&spec.innovation),
            _ => None,
        }
    }

    pub fn constant_a(&self) -> Option<&Matrix> {
        self.a_law.as_ref().filter(|l| l.len() == 1).map(|l| &l[0].0)
    }
}
