use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::rv::norm::{normalize, NormSpec};
use crate::rv::rng::StreamRng;

/// User vector sampler; its output is normalized by the measure's norm.
pub type VectorSampler = Arc<dyn Fn(&mut StreamRng, &mut [f64]) + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Atoms {
        atoms: Vec<Vec<f64>>,
        weights: Vec<f64>,
        cumulative: Vec<f64>,
    },
    UniformSphere,
    Pushforward(VectorSampler),
}

/// Law of the angular part `Θ` of a regularly varying vector: a probability
/// measure on the unit sphere of `norm`.
#[derive(Clone)]
pub struct SpectralMeasure {
    dim: usize,
    norm: NormSpec,
    kind: Kind,
}

impl fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            Kind::Atoms { atoms, .. } => format!("atoms({})", atoms.len()),
            Kind::UniformSphere => "uniform-sphere".into(),
            Kind::Pushforward(_) => "pushforward".into(),
        };
        f.debug_struct("SpectralMeasure")
            .field("dim", &self.dim)
            .field("norm", &self.norm)
            .field("kind", &kind)
            .finish()
    }
}

const MAX_RESAMPLE: usize = 10_000;

impl SpectralMeasure {
    /// Finite mixture of point masses. Atoms are rescaled to unit norm and
    /// weights to total mass one.
    pub fn point_masses(atoms: Vec<(Vec<f64>, f64)>, norm: NormSpec) -> Result<Self> {
        let dim = atoms
            .first()
            .map(|(a, _)| a.len())
            .ok_or_else(|| Error::invalid("spectral", "no atoms given"))?;
        if dim == 0 {
            return Err(Error::invalid("spectral", "atoms must have dimension >= 1"));
        }
        let mut out_atoms = Vec::with_capacity(atoms.len());
        let mut weights = Vec::with_capacity(atoms.len());
        for (mut a, w) in atoms {
            if a.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "spectral atom of length {} in a measure of dimension {dim}",
                    a.len()
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid("spectral", format!("atom weight {w} is not positive")));
            }
            if !(normalize(&mut a, &norm) > 0.0) {
                return Err(Error::invalid("spectral", "zero atom"));
            }
            out_atoms.push(a);
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(SpectralMeasure {
            dim,
            norm,
            kind: Kind::Atoms {
                atoms: out_atoms,
                weights,
                cumulative,
            },
        })
    }

    /// Unit mass at `+1` on the real line.
    pub fn positive_unit() -> Self {
        Self::point_masses(alloc::vec![(alloc::vec![1.0], 1.0)], NormSpec::Euclidean)
            .expect("valid atom")
    }

    /// Mass `p` at `+1` and `1 - p` at `-1`.
    pub fn two_sided_unit(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("spectral", "p must lie in [0, 1]"));
        }
        let mut atoms = Vec::new();
        if p > 0.0 {
            atoms.push((alloc::vec![1.0], p));
        }
        if p < 1.0 {
            atoms.push((alloc::vec![-1.0], 1.0 - p));
        }
        Self::point_masses(atoms, NormSpec::Euclidean)
    }

    /// Standard Gaussian vector scaled to unit norm; uniform on the sphere
    /// when `norm` is Euclidean.
    pub fn uniform_sphere(dim: usize, norm: NormSpec) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be >= 1"));
        }
        Ok(SpectralMeasure {
            dim,
            norm,
            kind: Kind::UniformSphere,
        })
    }

    pub fn pushforward(dim: usize, norm: NormSpec, sampler: VectorSampler) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be >= 1"));
        }
        Ok(SpectralMeasure {
            dim,
            norm,
            kind: Kind::Pushforward(sampler),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    /// Atoms and their weights, for point-mass measures.
    pub fn atoms(&self) -> Option<impl Iterator<Item = (&[f64], f64)>> {
        match &self.kind {
            Kind::Atoms { atoms, weights, .. } => {
                Some(atoms.iter().map(|a| a.as_slice()).zip(weights.iter().copied()))
            }
            _ => None,
        }
    }

    pub fn sample_into(&self, rng: &mut StreamRng, out: &mut [f64]) {
        assert_eq!(out.len(), self.dim, "output buffer has wrong dimension");
        match &self.kind {
            Kind::Atoms {
                atoms, cumulative, ..
            } => {
                let i = if atoms.len() == 1 { 0 } else { rng.categorical(cumulative) };
                out.copy_from_slice(&atoms[i]);
            }
            Kind::UniformSphere => self.resample(out, |o| {
                o.iter_mut().for_each(|x| *x = rng.standard_normal())
            }),
            Kind::Pushforward(f) => self.resample(out, |o| f(rng, o)),
        }
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Vec<f64> {
        let mut v = alloc::vec![0.0; self.dim];
        self.sample_into(rng, &mut v);
        v
    }

    fn resample(&self, out: &mut [f64], mut draw: impl FnMut(&mut [f64])) {
        for _ in 0..MAX_RESAMPLE {
            draw(out);
            let r = normalize(out, &self.norm);
            if r > 0.0 && r.is_finite() {
                return;
            }
        }
        panic!("spectral sampler kept producing zero or non-finite vectors");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rv::rng::RngStream;

    #[test]
    fn samples_are_unit() {
        let specs = [
            SpectralMeasure::uniform_sphere(3, NormSpec::Euclidean).unwrap(),
            SpectralMeasure::uniform_sphere(4, NormSpec::Max).unwrap(),
            SpectralMeasure::point_masses(
                alloc::vec![(alloc::vec![2.0, 0.0], 1.0), (alloc::vec![1.0, -1.0], 3.0)],
                NormSpec::Euclidean,
            )
            .unwrap(),
            SpectralMeasure::pushforward(
                2,
                NormSpec::block_max(NormSpec::Euclidean, 2),
                Arc::new(|r: &mut StreamRng, o: &mut [f64]| {
                    o[0] = r.uniform() - 0.5;
                    o[1] = 3.0 * r.standard_normal();
                }),
            )
            .unwrap(),
        ];
        let mut rng = RngStream::new(4, 4).rng();
        for s in &specs {
            for _ in 0..10_000 {
                let v = s.sample(&mut rng);
                assert!((s.norm().eval(&v) - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn atom_weights_normalized() {
        let s = SpectralMeasure::point_masses(
            alloc::vec![(alloc::vec![1.0], 1.0), (alloc::vec![-3.0], 3.0)],
            NormSpec::Euclidean,
        )
        .unwrap();
        let atoms: Vec<_> = s.atoms().unwrap().collect();
        assert_eq!(atoms[1], (&[-1.0][..], 0.75));
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let r = SpectralMeasure::point_masses(
            alloc::vec![(alloc::vec![1.0], 1.0), (alloc::vec![1.0, 0.0], 1.0)],
            NormSpec::Euclidean,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }
}
