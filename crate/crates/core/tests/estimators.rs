use std::sync::Arc;

use tailproc_core::analytic::{cluster_size_law, theta_forward, RcarForward};
use tailproc_core::estimators::{
    blocks_estimator, empirical_tail_process, extract_clusters, runs_estimator, select_threshold,
    BlockSpec, ThresholdSpec,
};
use tailproc_core::linalg::Matrix;
use tailproc_core::mc::{McPlan, Sequential};
use tailproc_core::models::{simulate_mma, simulate_rcar, AbSampler, MmaSpec, PathMatrix, RcarSpec};
use tailproc_core::rv::{norm, NormSpec, RadialLaw, RngStream, RvLaw, SpectralMeasure};

const N: usize = 1_000_000;

fn positive(alpha: f64) -> RvLaw {
    RvLaw::new(RadialLaw::new(alpha).unwrap(), SpectralMeasure::positive_unit())
}

fn ma1(c: f64, alpha: f64, seed: u64) -> PathMatrix {
    let spec = MmaSpec::univariate(&[1.0, c], positive(alpha)).unwrap();
    simulate_mma(&spec, N, RngStream::new(seed, 0)).unwrap()
}

fn half_ar_spec() -> RcarSpec {
    let law = positive(1.0);
    let ab: AbSampler = Arc::new(move |rng| {
        let mut b = vec![0.0];
        law.sample_into(rng, &mut b);
        (Matrix::scalar(0.5), b)
    });
    RcarSpec::new(1, ab).unwrap()
}

// r = n^0.25 keeps r k / n small; n^0.6 does not at k = 1000, see README
fn r() -> usize {
    BlockSpec::Power(0.25).resolve(N).unwrap()
}

fn k1000(path: &PathMatrix) -> tailproc_core::estimators::ResolvedThreshold {
    select_threshold(path, ThresholdSpec::OrderStatistic(1000), &NormSpec::Euclidean).unwrap()
}

#[test]
fn extremal_index_battery() {
    let battery = [
        ("iid", ma1(0.0, 1.0, 31), 1.0),
        ("ma1 c=1 a=1", ma1(1.0, 1.0, 32), 0.5),
        ("ma1 c=2 a=1", ma1(2.0, 1.0, 33), 2.0 / 3.0),
        ("ma1 c=1 a=2", ma1(1.0, 2.0, 34), 0.5),
        ("rcar a=0.5", simulate_rcar(&half_ar_spec(), N, RngStream::new(35, 0)).unwrap(), 0.5),
    ];
    for (name, path, theta) in &battery {
        let th = k1000(path);
        let runs = runs_estimator(path, &th, r()).unwrap().value;
        let blocks = blocks_estimator(path, &th, r()).unwrap().value;
        assert!((runs - theta).abs() <= 0.05, "{name}: runs {runs} vs {theta}");
        assert!((blocks - theta).abs() <= 0.05, "{name}: blocks {blocks} vs {theta}");
        assert!((runs - blocks).abs() <= 0.05, "{name}: {runs} vs {blocks}");
    }
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(a, i) - at(b, i)).abs()).sum::<f64>()
}

#[test]
fn cluster_sizes_match_analytic_law() {
    // MA(1) c = 1: clusters of size two
    let path = ma1(1.0, 1.0, 36);
    let pmf = extract_clusters(&path, &k1000(&path), r()).unwrap().size_pmf();
    assert!(total_variation(&pmf, &[0.0, 1.0]) <= 0.1, "{pmf:?}");

    // autoregression: against the forward-tail law
    let path = simulate_rcar(&half_ar_spec(), N, RngStream::new(37, 0)).unwrap();
    let pmf = extract_clusters(&path, &k1000(&path), r()).unwrap().size_pmf();
    let fwd = RcarForward::new(half_ar_spec(), 1.0, SpectralMeasure::positive_unit()).unwrap();
    let plan = McPlan::new(100_000, RngStream::new(37, 2));
    let theta = theta_forward(&fwd, 60, &plan.derive(1), &Sequential).unwrap().estimate;
    let law = cluster_size_law(&fwd, &theta, 60, 30, &plan, &Sequential).unwrap();
    let tv = total_variation(&pmf, &law.kappa);
    assert!(tv <= 0.1, "tv {tv}: {pmf:?}");
}

#[test]
fn spectral_anchor_is_unit_vector() {
    let spec = MmaSpec::univariate(&[1.0, -0.5], RvLaw::new(
        RadialLaw::new(1.5).unwrap(),
        SpectralMeasure::two_sided_unit(0.6).unwrap(),
    ))
    .unwrap();
    let path = simulate_mma(&spec, 200_000, RngStream::new(38, 0)).unwrap();
    let th = select_threshold(&path, ThresholdSpec::OrderStatistic(400), &NormSpec::Euclidean).unwrap();
    let tp = empirical_tail_process(&path, &th, -2, 2).unwrap();
    assert!(!tp.is_empty());
    for i in 0..tp.len() {
        assert_eq!(norm(tp.spectral_at(i, 0), &NormSpec::Euclidean), 1.0);
        assert!(tp.radii[i] > 1.0);
    }
}

#[test]
fn estimators_are_functions_of_their_inputs() {
    let path = ma1(1.0, 1.0, 39);
    let again = ma1(1.0, 1.0, 39);
    let (a, b) = (k1000(&path), k1000(&again));
    assert_eq!(a, b);
    assert_eq!(runs_estimator(&path, &a, r()), runs_estimator(&again, &b, r()));
    assert_eq!(blocks_estimator(&path, &a, r()), blocks_estimator(&again, &b, r()));
    assert_eq!(extract_clusters(&path, &a, r()), extract_clusters(&again, &b, r()));
}
