use alloc::boxed::Box;

/// Norm on `R^d`.
///
/// `BlockMax { inner, blocks }` splits a vector into `blocks` consecutive
/// equal-length pieces and takes the maximum of the inner norm over them,
/// which is the norm placed on stacked innovation vectors
/// `(x_0, ..., x_m)` when a moving average is written as one random matrix
/// applied to one regularly varying vector.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NormSpec {
    Euclidean,
    Max,
    BlockMax { inner: Box<NormSpec>, blocks: usize },
}

impl NormSpec {
    pub fn block_max(inner: NormSpec, blocks: usize) -> Self {
        assert!(blocks > 0, "block-max norm needs at least one block");
        NormSpec::BlockMax {
            inner: Box::new(inner),
            blocks,
        }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean => libm::sqrt(v.iter().map(|x| x * x).sum::<f64>()),
            NormSpec::Max => v.iter().fold(0.0, |m, x| f64::max(m, x.abs())),
            NormSpec::BlockMax { inner, blocks } => {
                assert!(
                    v.len() % blocks == 0,
                    "vector of length {} does not split into {} blocks",
                    v.len(),
                    blocks
                );
                if v.is_empty() {
                    return 0.0;
                }
                v.chunks(v.len() / blocks)
                    .map(|b| inner.eval(b))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Dual norm `sup_{|x| <= 1} <y, x>`.
    pub fn dual(&self, y: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean => NormSpec::Euclidean.eval(y),
            NormSpec::Max => y.iter().map(|x| x.abs()).sum(),
            NormSpec::BlockMax { inner, blocks } => {
                if y.is_empty() {
                    return 0.0;
                }
                y.chunks(y.len() / blocks).map(|b| inner.dual(b)).sum()
            }
        }
    }

    /// Writes into `x` a unit vector attaining `<y, x> = dual(y)`.
    pub(crate) fn dual_maximizer(&self, y: &[f64], x: &mut [f64]) {
        match self {
            NormSpec::Euclidean => {
                let r = NormSpec::Euclidean.eval(y);
                if r > 0.0 {
                    x.iter_mut().zip(y).for_each(|(xi, yi)| *xi = yi / r);
                } else {
                    x.fill(0.0);
                    if let Some(x0) = x.first_mut() {
                        *x0 = 1.0;
                    }
                }
            }
            NormSpec::Max => x
                .iter_mut()
                .zip(y)
                .for_each(|(xi, yi)| *xi = if *yi < 0.0 { -1.0 } else { 1.0 }),
            NormSpec::BlockMax { inner, blocks } => {
                if y.is_empty() {
                    return;
                }
                let b = y.len() / blocks;
                for (xc, yc) in x.chunks_mut(b).zip(y.chunks(b)) {
                    inner.dual_maximizer(yc, xc);
                }
            }
        }
    }

    /// Writes into `z` a subgradient of the norm at `v`: `dual(z) <= 1` and
    /// `<z, v> = ‖v‖`.
    pub(crate) fn subgradient(&self, v: &[f64], z: &mut [f64]) {
        z.fill(0.0);
        match self {
            NormSpec::Euclidean => {
                let r = NormSpec::Euclidean.eval(v);
                if r > 0.0 {
                    z.iter_mut().zip(v).for_each(|(zi, vi)| *zi = vi / r);
                }
            }
            NormSpec::Max => {
                let mut j = 0;
                for i in 0..v.len() {
                    if v[i].abs() > v[j].abs() {
                        j = i;
                    }
                }
                if !v.is_empty() && v[j] != 0.0 {
                    z[j] = v[j].signum();
                }
            }
            NormSpec::BlockMax { inner, blocks } => {
                if v.is_empty() {
                    return;
                }
                let b = v.len() / blocks;
                let (mut best, mut arg) = (-1.0, 0);
                for (i, c) in v.chunks(b).enumerate() {
                    let r = inner.eval(c);
                    if r > best {
                        best = r;
                        arg = i;
                    }
                }
                inner.subgradient(&v[arg * b..(arg + 1) * b], &mut z[arg * b..(arg + 1) * b]);
            }
        }
    }

    /// True when the unit ball is the cube `[-1, 1]^d`.
    pub(crate) fn is_cube(&self) -> bool {
        match self {
            NormSpec::Max => true,
            NormSpec::BlockMax { inner, .. } => inner.is_cube(),
            NormSpec::Euclidean => false,
        }
    }
}

/// `‖v‖` under `spec`.
pub fn norm(v: &[f64], spec: &NormSpec) -> f64 {
    spec.eval(v)
}

/// Scales `v` in place to unit norm; returns the original norm.
pub fn normalize(v: &mut [f64], spec: &NormSpec) -> f64 {
    let r = spec.eval(v);
    if r > 0.0 {
        v.iter_mut().for_each(|x| *x /= r);
    }
    r
}
