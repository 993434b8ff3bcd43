use std::sync::Arc;

use tailproc_core::estimators::{
    extract_clusters, runs_estimator, select_threshold, BlockSpec, ThresholdSpec,
};
use tailproc_core::linalg::Matrix;
use tailproc_core::models::{
    simulate_mma, simulate_rcar, simulate_rcar_from, AbSampler, CoefficientProcess,
    DiscreteMatrixLaw, MmaSpec, PathMatrix, RcarSpec,
};
use tailproc_core::rv::{NormSpec, RadialLaw, RngStream, RvLaw, SpectralMeasure};
use tailproc_core::stats::{correlation, ks_two_sample};

fn pareto_positive(alpha: f64) -> RvLaw {
    RvLaw::new(RadialLaw::new(alpha).unwrap(), SpectralMeasure::positive_unit())
}

/// MA(1) with `C_0 = 1` and `C_1(t)` iid, equal to 0 or 2 with equal odds.
fn random_ma1() -> MmaSpec {
    let c1 = DiscreteMatrixLaw::new(vec![(Matrix::scalar(0.0), 0.5), (Matrix::scalar(2.0), 0.5)]).unwrap();
    MmaSpec::new(
        1,
        1,
        pareto_positive(1.0),
        CoefficientProcess::IidDiscrete(vec![DiscreteMatrixLaw::point(Matrix::scalar(1.0)), c1]),
        NormSpec::Euclidean,
    )
    .unwrap()
}

fn half_ar(b_law: Option<RvLaw>) -> RcarSpec {
    let ab: AbSampler = Arc::new(move |rng| {
        let b = match &b_law {
            Some(law) => {
                let mut v = vec![0.0];
                law.sample_into(rng, &mut v);
                v
            }
            None => vec![0.0],
        };
        (Matrix::scalar(0.5), b)
    });
    RcarSpec::new(1, ab).unwrap().with_label("a=0.5")
}

fn column(path: &PathMatrix) -> Vec<f64> {
    path.rows().map(|r| r[0]).collect()
}

#[test]
fn mma_marginal_is_stationary() {
    // 10^4 points per window, thinned with stride 10 > m + 1 so they are
    // independent and the two-sample KS law applies exactly
    let (n, w, stride) = (1_000_000, 100_000, 10);
    let xs = column(&simulate_mma(&random_ma1(), n, RngStream::new(5, 0)).unwrap());
    let thin = |lo: usize| -> Vec<f64> { xs[lo..lo + w].iter().step_by(stride).copied().collect() };
    let (start, mid, end) = (thin(0), thin(n / 2 - w / 2), thin(n - w));
    for (a, b) in [(&start, &mid), (&mid, &end), (&start, &end)] {
        let ks = ks_two_sample(a, b).unwrap();
        assert!(ks.passes(0.01), "{ks:?}");
    }
}

#[test]
fn exceedances_decorrelate_beyond_order() {
    let n = 1_000_000;
    let path = simulate_mma(&random_ma1(), n, RngStream::new(6, 0)).unwrap();
    let th = select_threshold(&path, ThresholdSpec::OrderStatistic(10_000), &NormSpec::Euclidean).unwrap();
    let ind: Vec<f64> = th.norms().iter().map(|&v| f64::from(u8::from(v > th.level))).collect();
    for h in [3usize, 5, 10] {
        let rho = correlation(&ind[..n - h], &ind[h..]);
        let se = 1.0 / ((n - h) as f64).sqrt();
        assert!(rho.abs() <= 4.0 * se, "lag {h}: {rho}");
    }
    // and at lag 1 the dependence is plainly there
    assert!(correlation(&ind[..n - 1], &ind[1..]) > 0.1);
}

#[test]
fn same_seed_same_path() {
    let a = simulate_mma(&random_ma1(), 5000, RngStream::new(7, 1)).unwrap();
    let b = simulate_mma(&random_ma1(), 5000, RngStream::new(7, 1)).unwrap();
    assert_eq!(a, b);
    let c = simulate_mma(&random_ma1(), 5000, RngStream::new(7, 2)).unwrap();
    assert_ne!(a.as_slice(), c.as_slice());
    let spec = half_ar(Some(pareto_positive(1.0)));
    assert_eq!(
        simulate_rcar(&spec, 3000, RngStream::new(8, 0)).unwrap().as_slice(),
        simulate_rcar(&spec, 3000, RngStream::new(8, 0)).unwrap().as_slice()
    );
}

#[test]
fn deterministic_halving_recursion() {
    let path = simulate_rcar_from(&half_ar(None), &[1.0], 0, 30, RngStream::new(0, 0)).unwrap();
    for (t, x) in column(&path).iter().enumerate() {
        assert_eq!(*x, 0.5f64.powi(t as i32 + 1));
    }
}

#[test]
fn ma1_marginal_tail_twice_innovation_tail() {
    let n = 1_000_000;
    let spec = MmaSpec::univariate(&[1.0, 1.0], pareto_positive(1.0)).unwrap();
    let xs = column(&simulate_mma(&spec, n, RngStream::new(9, 0)).unwrap());
    let q = RadialLaw::new(1.0).unwrap().quantile_from_uniform(1e-3);
    let ratio = xs.iter().filter(|&&x| x > q).count() as f64 / n as f64 / 1e-3;
    assert!((ratio - 2.0).abs() <= 0.2, "ratio {ratio}");
}

#[test]
fn autoregression_runs_near_half() {
    let path = simulate_rcar(&half_ar(Some(pareto_positive(1.0))), 1_000_000, RngStream::new(10, 0)).unwrap();
    let th = select_threshold(&path, ThresholdSpec::OrderStatistic(1000), &NormSpec::Euclidean).unwrap();
    let r = BlockSpec::Power(0.25).resolve(path.len()).unwrap();
    let est = runs_estimator(&path, &th, r).unwrap();
    assert!((est.value - 0.5).abs() <= 0.05, "{est:?}");
}

#[test]
fn autoregression_with_zero_coefficient_is_iid_innovations() {
    let law = pareto_positive(1.0);
    let ab: AbSampler = {
        let law = law.clone();
        Arc::new(move |rng| {
            let mut v = vec![0.0];
            law.sample_into(rng, &mut v);
            (Matrix::scalar(0.0), v)
        })
    };
    let spec = RcarSpec::new(1, ab).unwrap();
    let xs = column(&simulate_rcar(&spec, 50_000, RngStream::new(12, 0)).unwrap());
    let ks = tailproc_core::stats::ks_one_sample(&xs, |y| RadialLaw::new(1.0).unwrap().cdf(y)).unwrap();
    assert!(ks.passes(0.01), "{ks:?}");
}

#[test]
fn iid_clusters_are_singletons() {
    let spec = MmaSpec::univariate(&[1.0], pareto_positive(1.0)).unwrap();
    let path = simulate_mma(&spec, 1_000_000, RngStream::new(13, 0)).unwrap();
    let th = select_threshold(&path, ThresholdSpec::Quantile(0.999), &NormSpec::Euclidean).unwrap();
    let r = BlockSpec::Power(0.25).resolve(path.len()).unwrap();
    let pmf = extract_clusters(&path, &th, r).unwrap().size_pmf();
    assert!(pmf[0] >= 0.95, "{pmf:?}");
}
