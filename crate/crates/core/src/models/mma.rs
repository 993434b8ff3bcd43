use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::path::PathMatrix;
use super::tags;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rv::law::RvLaw;
use crate::rv::norm::NormSpec;
use crate::rv::rng::{RngStream, StreamRng};

/// A user-supplied stationary process of coefficient arrays
/// `(C_0(t), ..., C_m(t))`. Stationarity is the implementer's promise.
pub trait StationaryCoefficients: Send + Sync {
    /// Visits the arrays at `len` consecutive times `0..len`, started in
    /// the stationary regime.
    fn run(&self, len: usize, rng: &mut StreamRng, visit: &mut dyn FnMut(usize, &[Matrix]));
}

/// Finite law of a coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMatrixLaw {
    atoms: Vec<Matrix>,
    cumulative: Vec<f64>,
}

impl DiscreteMatrixLaw {
    pub fn new(atoms: Vec<(Matrix, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("coefficients", "empty coefficient law"));
        }
        let shape = (atoms[0].0.rows(), atoms[0].0.cols());
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut out = Vec::with_capacity(atoms.len());
        for (m, w) in atoms {
            if (m.rows(), m.cols()) != shape {
                return Err(Error::DimensionMismatch("coefficient atoms differ in shape".into()));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid("coefficients", format!("atom weight {w} is not positive")));
            }
            if !m.is_finite() {
                return Err(Error::invalid("coefficients", "non-finite coefficient"));
            }
            acc += w;
            cumulative.push(acc);
            out.push(m);
        }
        cumulative.iter_mut().for_each(|c| *c /= acc);
        Ok(DiscreteMatrixLaw {
            atoms: out,
            cumulative,
        })
    }

    pub fn point(m: Matrix) -> Self {
        DiscreteMatrixLaw {
            atoms: vec![m],
            cumulative: vec![1.0],
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Matrix, f64)> {
        let mut prev = 0.0;
        self.atoms.iter().zip(self.cumulative.iter()).map(move |(m, &c)| {
            let w = c - prev;
            prev = c;
            (m, w)
        })
    }

    pub fn sample(&self, rng: &mut StreamRng) -> &Matrix {
        if self.atoms.len() == 1 {
            &self.atoms[0]
        } else {
            &self.atoms[rng.categorical(&self.cumulative)]
        }
    }

    fn shape(&self) -> (usize, usize) {
        (self.atoms[0].rows(), self.atoms[0].cols())
    }
}

pub type IidCoefficientSampler = Arc<dyn Fn(&mut StreamRng) -> Vec<Matrix> + Send + Sync>;

/// The coefficient process `{C_i(t)}` of a moving average.
#[derive(Clone)]
pub enum CoefficientProcess {
    /// `C_i(t) = C_i` for all `t`.
    Deterministic(Vec<Matrix>),
    /// Each lag drawn independently from its own finite law, independently
    /// over `t`.
    IidDiscrete(Vec<DiscreteMatrixLaw>),
    /// Arrays iid over `t` from a user sampler.
    IidInT(IidCoefficientSampler),
    /// A user stationary process.
    Stationary(Arc<dyn StationaryCoefficients>),
}

impl fmt::Debug for CoefficientProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientProcess::Deterministic(c) => f.debug_tuple("Deterministic").field(c).finish(),
            CoefficientProcess::IidDiscrete(c) => f.debug_tuple("IidDiscrete").field(c).finish(),
            CoefficientProcess::IidInT(_) => f.write_str("IidInT(..)"),
            CoefficientProcess::Stationary(_) => f.write_str("Stationary(..)"),
        }
    }
}

impl CoefficientProcess {
    pub fn mode_name(&self) -> &'static str {
        match self {
            CoefficientProcess::Deterministic(_) => "deterministic",
            CoefficientProcess::IidDiscrete(_) | CoefficientProcess::IidInT(_) => "iid-in-t",
            CoefficientProcess::Stationary(_) => "user-stationary",
        }
    }

    /// Deterministic coefficients, or iid ones whose every lag law is a point mass.
    pub fn as_deterministic(&self) -> Option<Vec<Matrix>> {
        match self {
            CoefficientProcess::Deterministic(c) => Some(c.clone()),
            CoefficientProcess::IidDiscrete(laws) if laws.iter().all(|l| l.is_degenerate()) => {
                Some(laws.iter().map(|l| l.atoms[0].clone()).collect())
            }
            _ => None,
        }
    }

    /// Visits the arrays at times `0..len`.
    pub fn for_each_time(
        &self,
        len: usize,
        rng: &mut StreamRng,
        visit: &mut dyn FnMut(usize, &[Matrix]),
    ) {
        match self {
            CoefficientProcess::Deterministic(c) => (0..len).for_each(|t| visit(t, c)),
            CoefficientProcess::IidDiscrete(laws) => {
                let mut buf: Vec<Matrix> = laws.iter().map(|l| l.atoms[0].clone()).collect();
                for t in 0..len {
                    for (slot, law) in buf.iter_mut().zip(laws) {
                        if !law.is_degenerate() {
                            slot.clone_from(law.sample(rng));
                        }
                    }
                    visit(t, &buf);
                }
            }
            CoefficientProcess::IidInT(f) => {
                for t in 0..len {
                    let c = f(rng);
                    visit(t, &c);
                }
            }
            CoefficientProcess::Stationary(p) => p.run(len, rng, visit),
        }
    }

    /// The arrays at times `0..len`, collected.
    pub fn window(&self, len: usize, rng: &mut StreamRng) -> Vec<Vec<Matrix>> {
        let mut out = Vec::with_capacity(len);
        self.for_each_time(len, rng, &mut |_, c| out.push(c.to_vec()));
        out
    }
}

/// Moment hypotheses the caller vouches for. They are not verified; reports
/// print them so it is clear which assumptions a result rests on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Attestations {
    /// Some `β > α` with `E‖C_i(0)‖^β < ∞` for all lags.
    pub moment_beta: Option<f64>,
    /// `E‖C_i(0)‖^γ < ∞` for every `γ < 2α`.
    pub moment_all_below_two_alpha: bool,
    pub note: Option<String>,
}

/// Moving average `X_t = Σ_{i=0}^m C_i(t) ξ_{t-i}` with iid regularly
/// varying innovations `ξ_t ∈ R^q` and coefficient matrices in `R^{d×q}`
/// independent of the innovations.
#[derive(Debug, Clone)]
pub struct MmaSpec {
    pub m: usize,
    pub d: usize,
    pub q: usize,
    pub innovation: RvLaw,
    pub coefficients: CoefficientProcess,
    /// Norm on `R^d` used for the output series.
    pub norm: NormSpec,
    pub attestations: Attestations,
}

impl MmaSpec {
    pub fn new(
        m: usize,
        d: usize,
        innovation: RvLaw,
        coefficients: CoefficientProcess,
        norm: NormSpec,
    ) -> Result<Self> {
        let q = innovation.dim();
        if d == 0 {
            return Err(Error::invalid("d", "must be >= 1"));
        }
        let check = |shape: (usize, usize)| -> Result<()> {
            if shape != (d, q) {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient of shape {}x{} but d={d}, q={q}",
                    shape.0, shape.1
                )));
            }
            Ok(())
        };
        match &coefficients {
            CoefficientProcess::Deterministic(c) => {
                if c.len() != m + 1 {
                    return Err(Error::DimensionMismatch(format!(
                        "{} coefficient matrices for order m={m}",
                        c.len()
                    )));
                }
                for ci in c {
                    check((ci.rows(), ci.cols()))?;
                    if !ci.is_finite() {
                        return Err(Error::invalid("coefficients", "non-finite coefficient"));
                    }
                }
            }
            CoefficientProcess::IidDiscrete(laws) => {
                if laws.len() != m + 1 {
                    return Err(Error::DimensionMismatch(format!(
                        "{} coefficient laws for order m={m}",
                        laws.len()
                    )));
                }
                for l in laws {
                    check(l.shape())?;
                }
            }
            _ => {}
        }
        Ok(MmaSpec {
            m,
            d,
            q,
            innovation,
            coefficients,
            norm,
            attestations: Attestations::default(),
        })
    }

    /// Univariate `X_t = Σ c_i ξ_{t-i}` with deterministic scalar weights.
    pub fn univariate(weights: &[f64], innovation: RvLaw) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("coefficients", "need at least one weight"));
        }
        let c = weights.iter().map(|&w| Matrix::scalar(w)).collect();
        Self::new(
            weights.len() - 1,
            1,
            innovation,
            CoefficientProcess::Deterministic(c),
            NormSpec::Euclidean,
        )
    }

    pub fn with_attestations(mut self, a: Attestations) -> Self {
        self.attestations = a;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.innovation.alpha()
    }

    pub fn model_id(&self) -> String {
        format!(
            "mma(m={},d={},q={},alpha={},coeff={})",
            self.m,
            self.d,
            self.q,
            self.alpha(),
            self.coefficients.mode_name()
        )
    }

    pub(crate) fn check_array(&self, c: &[Matrix]) -> Result<()> {
        if c.len() != self.m + 1 {
            return Err(Error::DimensionMismatch(format!(
                "coefficient sampler returned {} matrices for order m={}",
                c.len(),
                self.m
            )));
        }
        for ci in c {
            if ci.rows() != self.d || ci.cols() != self.q {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient of shape {}x{} but d={}, q={}",
                    ci.rows(),
                    ci.cols(),
                    self.d,
                    self.q
                )));
            }
        }
        Ok(())
    }
}

/// Simulates `n` steps. Innovations `ξ_{1-m}, ..., ξ_n` are drawn once from
/// the innovation substream of `seed` and reused across overlapping
/// windows; coefficients come from a separate substream.
pub fn simulate_mma(spec: &MmaSpec, n: usize, seed: RngStream) -> Result<PathMatrix> {
    if n == 0 {
        return Err(Error::invalid("n", "path length must be >= 1"));
    }
    let q = spec.q;
    let mut innov_rng = seed.substream(tags::INNOVATIONS).rng();
    let mut xi = vec![0.0; (n + spec.m) * q];
    for chunk in xi.chunks_exact_mut(q) {
        spec.innovation.sample_into(&mut innov_rng, chunk);
    }
    let mut coef_rng = seed.substream(tags::COEFFICIENTS).rng();
    run_mma(spec, n, &xi, &mut |len, visit| {
        spec.coefficients.for_each_time(len, &mut coef_rng, visit)
    }, seed)
}

/// Test hook: simulate from injected innovations `ξ_{1-m}, ..., ξ_n`
/// (flattened, `(n + m) q` values) and, optionally, injected coefficient
/// arrays for times `1..=n`.
pub fn simulate_mma_with(
    spec: &MmaSpec,
    n: usize,
    innovations: &[f64],
    coefficients: Option<&[Vec<Matrix>]>,
    seed: RngStream,
) -> Result<PathMatrix> {
    if n == 0 {
        return Err(Error::invalid("n", "path length must be >= 1"));
    }
    if innovations.len() != (n + spec.m) * spec.q {
        return Err(Error::DimensionMismatch(format!(
            "expected {} innovation values, got {}",
            (n + spec.m) * spec.q,
            innovations.len()
        )));
    }
    match coefficients {
        Some(c) => {
            if c.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "expected {n} coefficient arrays, got {}",
                    c.len()
                )));
            }
            run_mma(spec, n, innovations, &mut |len, visit| {
                for (t, arr) in c.iter().take(len).enumerate() {
                    visit(t, arr);
                }
            }, seed)
        }
        None => {
            let mut coef_rng = seed.substream(tags::COEFFICIENTS).rng();
            run_mma(spec, n, innovations, &mut |len, visit| {
                spec.coefficients.for_each_time(len, &mut coef_rng, visit)
            }, seed)
        }
    }
}

type CoefficientFeed<'a> = dyn FnMut(usize, &mut dyn FnMut(usize, &[Matrix])) + 'a;

fn run_mma(
    spec: &MmaSpec,
    n: usize,
    xi: &[f64],
    feed: &mut CoefficientFeed<'_>,
    seed: RngStream,
) -> Result<PathMatrix> {
    let (m, d, q) = (spec.m, spec.d, spec.q);
    let mut data = vec![0.0; n * d];
    let mut failure: Option<Error> = None;
    feed(n, &mut |t, c| {
        if failure.is_some() {
            return;
        }
        if let Err(e) = spec.check_array(c) {
            failure = Some(e);
            return;
        }
        let out = &mut data[t * d..(t + 1) * d];
        // row t is time t+1; ξ_{t+1-i} sits at buffer slot t + m - i
        for (i, ci) in c.iter().enumerate() {
            let slot = t + m - i;
            ci.mul_vec_add(&xi[slot * q..(slot + 1) * q], out);
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
        return Err(Error::Divergence { step: pos / d + 1 });
    }
    Ok(PathMatrix::new(data, n, d, spec.model_id(), seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rv::radial::RadialLaw;
    use crate::rv::spectral::SpectralMeasure;

    fn pareto1() -> RvLaw {
        RvLaw::new(RadialLaw::new(1.0).unwrap(), SpectralMeasure::positive_unit())
    }

    #[test]
    fn impulse_response() {
        let spec = MmaSpec::univariate(&[1.0, 1.0], pareto1()).unwrap();
        // ξ_0, ξ_1, ..., ξ_6 with a unit impulse at time 3
        let xi = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let p = simulate_mma_with(&spec, 6, &xi, None, RngStream::new(0, 0)).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn order_zero_identity_reproduces_innovations() {
        let law = RvLaw::new(
            RadialLaw::new(1.5).unwrap(),
            SpectralMeasure::uniform_sphere(2, NormSpec::Euclidean).unwrap(),
        );
        let spec = MmaSpec::new(
            0,
            2,
            law.clone(),
            CoefficientProcess::Deterministic(vec![Matrix::identity(2)]),
            NormSpec::Euclidean,
        )
        .unwrap();
        let seed = RngStream::new(3, 1);
        let p = simulate_mma(&spec, 100, seed).unwrap();
        let mut rng = seed.substream(tags::INNOVATIONS).rng();
        let mut v = [0.0; 2];
        for t in 0..100 {
            law.sample_into(&mut rng, &mut v);
            assert_eq!(p.row(t), &v);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let r = MmaSpec::new(
            1,
            2,
            pareto1(),
            CoefficientProcess::Deterministic(vec![Matrix::identity(2), Matrix::identity(2)]),
            NormSpec::Euclidean,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));

        let bad = MmaSpec::new(
            0,
            1,
            pareto1(),
            CoefficientProcess::IidInT(Arc::new(|_r: &mut StreamRng| vec![Matrix::zeros(2, 1)])),
            NormSpec::Euclidean,
        )
        .unwrap();
        assert!(matches!(simulate_mma(&bad, 10, RngStream::new(0, 0)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn seed_determinism() {
        let law = DiscreteMatrixLaw::new(vec![(Matrix::scalar(0.0), 0.5), (Matrix::scalar(2.0), 0.5)]).unwrap();
        let spec = MmaSpec::new(
            1,
            1,
            pareto1(),
            CoefficientProcess::IidDiscrete(vec![DiscreteMatrixLaw::point(Matrix::scalar(1.0)), law]),
            NormSpec::Euclidean,
        )
        .unwrap();
        let a = simulate_mma(&spec, 1000, RngStream::new(9, 2)).unwrap();
        let b = simulate_mma(&spec, 1000, RngStream::new(9, 2)).unwrap();
        assert_eq!(a, b);
        let c = simulate_mma(&spec, 1000, RngStream::new(9, 3)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn injected_coefficients_override() {
        let spec = MmaSpec::univariate(&[1.0, 1.0], pareto1()).unwrap();
        let xi = [1.0, 2.0, 3.0];
        let coeffs = vec![
            vec![Matrix::scalar(1.0), Matrix::scalar(0.0)],
            vec![Matrix::scalar(0.0), Matrix::scalar(10.0)],
        ];
        let p = simulate_mma_with(&spec, 2, &xi, Some(&coeffs), RngStream::new(0, 0)).unwrap();
        // X_1 = 1 * ξ_1, X_2 = 10 * ξ_1
        assert_eq!(p.as_slice(), &[2.0, 20.0]);
    }
}
