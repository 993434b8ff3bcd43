use alloc::vec;
use alloc::vec::Vec;

use super::window::{SpectralWindow, TailWindow, Truncation};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, Matrix};
use crate::mc::ShardRngs;
use crate::models::{CoefficientProcess, MmaSpec, RcarSpec};
use crate::rv::norm::NormSpec;
use crate::rv::rng::StreamRng;
use crate::rv::spectral::SpectralMeasure;

/// A sampler of (weighted) spectral-process windows.
///
/// `draw` clears `out` and pushes the windows for one Monte Carlo draw, each
/// with `‖Θ_0‖ = 1`. Expectations are `E[Σ w f(win)] / E[Σ w]`. `radius` is
/// the scale the window will be multiplied by, used only to decide where a
/// forward recursion may be cut off; pass `1.0` for the spectral process
/// itself.
pub trait SpectralProcess: Send + Sync {
    fn dim(&self) -> usize;
    fn alpha(&self) -> f64;
    fn norm(&self) -> &NormSpec;
    /// Whether negative lags can be drawn.
    fn two_sided(&self) -> bool;
    /// Bound on the bias of any mean of a `[0, 1]`-valued functional caused
    /// by truncating the window, if any truncation happens.
    fn truncation_bound(&self) -> Option<f64> {
        None
    }
    fn draw(
        &self,
        s: i64,
        t: i64,
        radius: f64,
        rng: &mut StreamRng,
        out: &mut Vec<SpectralWindow>,
    ) -> Result<Truncation>;
}

fn check_window(p: &(impl SpectralProcess + ?Sized), s: i64, t: i64) -> Result<()> {
    if s > 0 || t < 0 {
        return Err(Error::invalid("window", "need s <= 0 <= t"));
    }
    if s < 0 && !p.two_sided() {
        return Err(Error::NotTwoSided { s, t });
    }
    Ok(())
}

/// Spectral process of an iid sequence: `Θ_0 ~ spectral`, zero elsewhere.
#[derive(Debug, Clone)]
pub struct IidSpectral {
    pub alpha: f64,
    pub spectral: SpectralMeasure,
}

impl SpectralProcess for IidSpectral {
    fn dim(&self) -> usize {
        self.spectral.dim()
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn norm(&self) -> &NormSpec {
        self.spectral.norm()
    }
    fn two_sided(&self) -> bool {
        true
    }
    fn draw(
        &self,
        s: i64,
        t: i64,
        _radius: f64,
        rng: &mut StreamRng,
        out: &mut Vec<SpectralWindow>,
    ) -> Result<Truncation> {
        check_window(self, s, t)?;
        out.clear();
        let mut w = SpectralWindow::zeros(s, t, self.dim(), 1.0);
        self.spectral.sample_into(rng, w.at_mut(0));
        out.push(w);
        Ok(Truncation::Horizon)
    }
}

/// Spectral process of a moving average with random coefficients, as a
/// mixture over the `m + 1` lags at which the single large innovation can
/// enter. Branch `i` has `Θ_j = C_{i+j}(j) Θ / ‖C_i(0) Θ‖` and weight
/// `‖C_i(0) Θ‖^α`.
#[derive(Debug, Clone)]
pub struct MmaSpectral {
    pub spec: MmaSpec,
}

impl MmaSpectral {
    pub fn new(spec: MmaSpec) -> Self {
        MmaSpectral { spec }
    }

    /// Coefficient arrays for the times `lo..=hi`.
    fn coefficients(&self, lo: i64, hi: i64, rng: &mut StreamRng) -> Result<Vec<Vec<Matrix>>> {
        let len = (hi - lo + 1) as usize;
        let arrays = match &self.spec.coefficients {
            CoefficientProcess::Deterministic(c) => vec![c.clone(); len],
            other => other.window(len, rng),
        };
        for a in &arrays {
            self.spec.check_array(a)?;
        }
        Ok(arrays)
    }
}

impl SpectralProcess for MmaSpectral {
    fn dim(&self) -> usize {
        self.spec.d
    }
    fn alpha(&self) -> f64 {
        self.spec.alpha()
    }
    fn norm(&self) -> &NormSpec {
        &self.spec.norm
    }
    fn two_sided(&self) -> bool {
        true
    }
    fn draw(
        &self,
        s: i64,
        t: i64,
        _radius: f64,
        rng: &mut StreamRng,
        out: &mut Vec<SpectralWindow>,
    ) -> Result<Truncation> {
        check_window(self, s, t)?;
        out.clear();
        let m = self.spec.m as i64;
        let d = self.spec.d;
        let alpha = self.alpha();
        let theta = self.spec.innovation.spectral.sample(rng);
        // only times in [-m, m] ∩ [s, t] and time 0 carry nonzero coefficients
        let lo = s.max(-m).min(0);
        let hi = t.min(m).max(0);
        let arrays = self.coefficients(lo, hi, rng)?;
        let at = |time: i64| &arrays[(time - lo) as usize];
        let mut v0 = vec![0.0; d];
        for i in 0..=m {
            v0.fill(0.0);
            at(0)[i as usize].mul_vec_add(&theta, &mut v0);
            let w = self.spec.norm.eval(&v0);
            if w == 0.0 {
                continue;
            }
            let mut win = SpectralWindow::zeros(s, t, d, super::pow_alpha(w, alpha));
            for j in s.max(-i)..=t.min(m - i) {
                let slot = win.at_mut(j);
                at(j)[(i + j) as usize].mul_vec_add(&theta, slot);
                slot.iter_mut().for_each(|x| *x /= w);
            }
            out.push(win);
        }
        Ok(Truncation::Horizon)
    }
}

/// Forward spectral process of a random-coefficient autoregression,
/// `Θ_j = A_j ⋯ A_1 Θ_0` with `Θ_0` from the (user-supplied) spectral
/// measure of the stationary law.
///
/// The recursion stops once `‖A_j ⋯ A_1‖ · radius < eps`; later values are
/// set to zero.
#[derive(Debug, Clone)]
pub struct RcarForward {
    pub spec: RcarSpec,
    pub alpha: f64,
    pub spectral: SpectralMeasure,
    pub eps: f64,
}

impl RcarForward {
    pub const DEFAULT_EPS: f64 = 1e-6;

    pub fn new(spec: RcarSpec, alpha: f64, spectral: SpectralMeasure) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid("alpha", "must be finite and > 0"));
        }
        if spectral.dim() != spec.d {
            return Err(Error::DimensionMismatch(alloc::format!(
                "spectral measure of dimension {} for d={}",
                spectral.dim(),
                spec.d
            )));
        }
        Ok(RcarForward {
            spec,
            alpha,
            spectral,
            eps: Self::DEFAULT_EPS,
        })
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Forward window of the tail process from an explicit radius.
    pub fn tail_window(&self, radius: f64, horizon: usize, rng: &mut StreamRng) -> Result<TailWindow> {
        let mut out = Vec::with_capacity(1);
        let truncation = self.draw(0, horizon as i64, radius, rng, &mut out)?;
        Ok(TailWindow {
            radius,
            spectral: out.pop().expect("one window per draw"),
            truncation,
        })
    }

    fn product_norm(&self, p: &Matrix) -> f64 {
        if p.rows() == 1 {
            p.get(0, 0).abs()
        } else {
            operator_norm(p, self.spectral.norm(), self.spectral.norm())
        }
    }
}

impl SpectralProcess for RcarForward {
    fn dim(&self) -> usize {
        self.spec.d
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn norm(&self) -> &NormSpec {
        self.spectral.norm()
    }
    fn two_sided(&self) -> bool {
        false
    }
    fn truncation_bound(&self) -> Option<f64> {
        Some(libm::pow(self.eps, self.alpha))
    }
    fn draw(
        &self,
        s: i64,
        t: i64,
        radius: f64,
        rng: &mut StreamRng,
        out: &mut Vec<SpectralWindow>,
    ) -> Result<Truncation> {
        check_window(self, s, t)?;
        out.clear();
        let d = self.spec.d;
        let mut win = SpectralWindow::zeros(0, t, d, 1.0);
        self.spectral.sample_into(rng, win.at_mut(0));
        let mut product = Matrix::identity(d);
        let mut truncation = Truncation::Horizon;
        for j in 1..=t {
            let (a, _) = self.spec.draw(rng)?;
            product = a.matmul(&product);
            let (prev, cur) = win.values.split_at_mut(j as usize * d);
            a.mul_vec_add(&prev[(j as usize - 1) * d..], &mut cur[..d]);
            if !cur[..d].iter().all(|x| x.is_finite()) {
                return Err(Error::Divergence { step: j as usize });
            }
            if product.is_zero() {
                truncation = Truncation::Absorbed { lag: j };
                break;
            }
            if self.product_norm(&product) * radius < self.eps {
                cur[..d].fill(0.0);
                truncation = Truncation::BelowEps { lag: j };
                break;
            }
        }
        out.push(win);
        Ok(truncation)
    }
}

/// One forward window `(Y_0, ..., Y_T')` of the tail process of an
/// autoregression: Pareto radius from `rngs.radial`, angular part and
/// coefficients from `rngs.angular`.
pub fn rcar_forward_tail(
    process: &RcarForward,
    horizon: usize,
    rngs: &mut ShardRngs,
) -> Result<TailWindow> {
    let radius = crate::rv::radial::RadialLaw::new(process.alpha)?.sample(&mut rngs.radial);
    process.tail_window(radius, horizon, &mut rngs.angular)
}
