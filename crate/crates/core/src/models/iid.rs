use alloc::format;
use alloc::vec;

use super::path::PathMatrix;
use super::tags;
use crate::error::{Error, Result};
use crate::rv::law::RvLaw;
use crate::rv::rng::RngStream;

/// `n` iid draws of `R Θ`; the tail process is zero off the origin.
pub fn simulate_iid(law: &RvLaw, n: usize, seed: RngStream) -> Result<PathMatrix> {
    if n == 0 {
        return Err(Error::invalid("n", "path length must be >= 1"));
    }
    let d = law.dim();
    let mut rng = seed.substream(tags::INNOVATIONS).rng();
    let mut data = vec![0.0; n * d];
    for row in data.chunks_exact_mut(d) {
        law.sample_into(&mut rng, row);
    }
    let id = format!("iid(d={d},alpha={})", law.alpha());
    Ok(PathMatrix::new(data, n, d, id, seed))
}
