//! Small dense matrices and operator norms.

use alloc::vec;
use alloc::vec::Vec;

use crate::rv::norm::NormSpec;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn scalar(x: f64) -> Self {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![x],
        }
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = *x;
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// `out += self * x`.
    pub fn mul_vec_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols.max(1))) {
            *o += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        if self.cols > 0 {
            self.mul_vec_add(x, &mut out);
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    assert_eq!(a.rows, a.cols, "matrix must be square");
    let n = a.rows;
    let mut m = a.data.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

/// Largest singular value.
pub fn spectral_norm(a: &Matrix) -> f64 {
    if a.rows == 0 || a.cols == 0 {
        return 0.0;
    }
    let at = a.transpose();
    let gram = if a.cols <= a.rows { at.matmul(a) } else { a.matmul(&at) };
    let top = symmetric_eigenvalues(&gram)
        .into_iter()
        .fold(0.0, f64::max);
    libm::sqrt(top)
}

const MAX_VERTEX_DIM: usize = 20;

/// `sup { ‖A x‖_out : ‖x‖_in = 1 }`.
///
/// Exact for Euclidean to Euclidean (largest singular value), for a
/// max-type output norm (row-wise dual norms) and for a cube-shaped input
/// ball of dimension at most 20 (vertex enumeration). Other pairs go through
/// [`operator_norm_search`].
pub fn operator_norm(a: &Matrix, input: &NormSpec, output: &NormSpec) -> f64 {
    match (input, output) {
        (NormSpec::Euclidean, NormSpec::Euclidean) => spectral_norm(a),
        (_, NormSpec::Max) => (0..a.rows)
            .map(|i| input.dual(a.row(i)))
            .fold(0.0, f64::max),
        _ if input.is_cube() && a.cols <= MAX_VERTEX_DIM => vertex_max(a, output),
        _ => operator_norm_search(a, input, output),
    }
}

fn vertex_max(a: &Matrix, output: &NormSpec) -> f64 {
    let k = a.cols;
    let mut x = vec![0.0; k];
    let mut best = 0.0f64;
    // x and -x give the same value, so fix the sign of the last coordinate
    let count = if k == 0 { 1 } else { 1u64 << (k - 1) };
    for mask in 0..count {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = if (mask >> j) & 1 == 1 { -1.0 } else { 1.0 };
        }
        best = best.max(output.eval(&a.mul_vec(&x)));
    }
    best
}

/// Deterministic multi-start pattern search for the operator norm between
/// two arbitrary norms. Starts from the coordinate axes, the signed
/// diagonals, the top right singular vector and a low-discrepancy cloud;
/// each start is refined by coordinate moves with a halving step until the
/// step drops below `1e-12`.
pub fn operator_norm_search(a: &Matrix, input: &NormSpec, output: &NormSpec) -> f64 {
    let k = a.cols;
    if k == 0 || a.rows == 0 {
        return 0.0;
    }
    let ratio = |x: &[f64]| {
        let d = input.eval(x);
        if d > 0.0 {
            output.eval(&a.mul_vec(x)) / d
        } else {
            0.0
        }
    };
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for j in 0..k {
        let mut e = vec![0.0; k];
        e[j] = 1.0;
        starts.push(e);
    }
    starts.push(vec![1.0; k]);
    for j in 0..k {
        let mut e = vec![1.0; k];
        e[j] = -1.0;
        starts.push(e);
    }
    starts.push(top_right_singular_vector(a));
    // Weyl sequence on [-1, 1]^k
    let mut alphas = vec![0.0; k];
    for (j, aj) in alphas.iter_mut().enumerate() {
        *aj = libm::sqrt(PRIMES[j % PRIMES.len()] as f64) % 1.0;
    }
    let cloud = 64 * k.max(2);
    for i in 1..=cloud {
        starts.push(
            alphas
                .iter()
                .map(|aj| 2.0 * ((i as f64 * aj) % 1.0) - 1.0)
                .collect(),
        );
    }

    let mut scored: Vec<(f64, Vec<f64>)> = starts.into_iter().map(|x| (ratio(&x), x)).collect();
    scored.sort_by(|p, q| q.0.total_cmp(&p.0));
    scored.truncate(8);

    let mut best = 0.0f64;
    let mut z = vec![0.0; a.rows];
    for (mut value, mut x) in scored {
        let scale = input.eval(&x);
        if scale > 0.0 {
            x.iter_mut().for_each(|v| *v /= scale);
        }
        // Subgradient ascent: ‖Ax‖ is convex, so maximizing its linearization
        // over the input ball never decreases it.
        let mut next = vec![0.0; k];
        for _ in 0..500 {
            output.subgradient(&a.mul_vec(&x), &mut z);
            let g = a.transpose().mul_vec(&z);
            input.dual_maximizer(&g, &mut next);
            let v = ratio(&next);
            if v <= value * (1.0 + 1e-15) {
                break;
            }
            value = v;
            x.copy_from_slice(&next);
        }
        let mut step = 0.5;
        while step > 1e-12 {
            let mut improved = false;
            for j in 0..k {
                for sign in [1.0, -1.0] {
                    let old = x[j];
                    x[j] = old + sign * step;
                    let v = ratio(&x);
                    if v > value * (1.0 + 1e-15) {
                        value = v;
                        improved = true;
                    } else {
                        x[j] = old;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            } else {
                let scale = input.eval(&x);
                x.iter_mut().for_each(|v| *v /= scale);
            }
        }
        best = best.max(value);
    }
    best
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn top_right_singular_vector(a: &Matrix) -> Vec<f64> {
    let gram = a.transpose().matmul(a);
    let k = a.cols;
    let mut v: Vec<f64> = (0..k).map(|j| 1.0 + 0.1 * j as f64).collect();
    for _ in 0..200 {
        let w = gram.mul_vec(&v);
        let n = NormSpec::Euclidean.eval(&w);
        if n == 0.0 {
            break;
        }
        v = w.into_iter().map(|x| x / n).collect();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rv::rng::RngStream;

    #[test]
    fn euclidean_examples() {
        assert!((operator_norm(&Matrix::identity(2), &NormSpec::Euclidean, &NormSpec::Euclidean) - 1.0).abs() < 1e-14);
        let d = Matrix::diag(&[2.0, 0.5]);
        assert!((operator_norm(&d, &NormSpec::Euclidean, &NormSpec::Euclidean) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn max_input_row_vector() {
        // brute force over the sign vertices of the max-norm ball
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]);
        let brute = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
            .iter()
            .map(|x| (a.get(0, 0) * x[0] + a.get(0, 1) * x[1]).abs())
            .fold(0.0, f64::max);
        assert_eq!(brute, 2.0);
        assert_eq!(operator_norm(&a, &NormSpec::Max, &NormSpec::Euclidean), brute);
    }

    fn random_matrix(rng: &mut crate::StreamRng, r: usize, c: usize) -> Matrix {
        Matrix::from_row_major(r, c, (0..r * c).map(|_| rng.standard_normal()).collect())
    }

    #[test]
    fn search_matches_exact_routes() {
        let mut rng = RngStream::new(12, 0).rng();
        let pairs = [
            (NormSpec::Euclidean, NormSpec::Euclidean),
            (NormSpec::Max, NormSpec::Euclidean),
            (NormSpec::Euclidean, NormSpec::Max),
            (NormSpec::Max, NormSpec::Max),
        ];
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 3, 3);
            for (i, o) in &pairs {
                let exact = operator_norm(&a, i, o);
                let searched = operator_norm_search(&a, i, o);
                assert!(
                    (exact - searched).abs() <= 1e-6 * exact,
                    "{i:?}->{o:?}: exact {exact}, search {searched}"
                );
            }
        }
    }

    #[test]
    fn search_is_a_lower_bound_and_tight_for_blocks() {
        // For block-max(euclidean) input, the maximizer puts every block on
        // its unit sphere, so brute force over a fine grid of two angles is an
        // oracle in the 2+2 case.
        let mut rng = RngStream::new(13, 0).rng();
        let input = NormSpec::block_max(NormSpec::Euclidean, 2);
        for _ in 0..5 {
            let a = random_matrix(&mut rng, 2, 4);
            let value = operator_norm(&a, &input, &NormSpec::Euclidean);
            let steps = 720;
            let mut brute = 0.0f64;
            for i in 0..steps {
                let (s1, c1) = libm::sincos(core::f64::consts::TAU * i as f64 / steps as f64);
                for j in 0..steps {
                    let (s2, c2) = libm::sincos(core::f64::consts::TAU * j as f64 / steps as f64);
                    let y = a.mul_vec(&[c1, s1, c2, s2]);
                    brute = brute.max(NormSpec::Euclidean.eval(&y));
                }
            }
            assert!(value >= brute * (1.0 - 1e-9), "search {value} below grid {brute}");
            assert!(value <= brute * (1.0 + 1e-4), "search {value} far above grid {brute}");
        }
    }

    #[test]
    fn jacobi_eigenvalues() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let mut ev = symmetric_eigenvalues(&a);
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }
}
