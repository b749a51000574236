use batsvd2::batch_driver::{run_batch, RunConfig};
use batsvd2::batch_layout::Batch2x2;
use batsvd2::svd2_core::{Backscale, Mat2};
use batsvd2::verify::{metrics, oracle_svd2, oracle_svd2_real, Metrics, MetricsError, WideComplex, WideReal};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w(x: f64) -> WideReal {
    WideReal::from(x)
}

fn finite(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let x = f64::from_bits(rng.random());
        if x.is_finite() {
            return x;
        }
    }
}

fn run(b: &Batch2x2, backscale: Backscale) -> Metrics {
    let cfg = RunConfig { threads: 2, backscale, ..RunConfig::default() };
    let (out, _) = run_batch(b, &cfg).unwrap();
    metrics(b, &out).unwrap()
}

#[test]
fn identity_lanes_are_exact() {
    let b = Batch2x2::pack_real(&[Mat2::new(1.0, 0.0, 0.0, 1.0); 13]).unwrap();
    for mode in [Backscale::None, Backscale::Safe, Backscale::Unconditional] {
        let m = run(&b, mode);
        assert_eq!((m.rho, m.delta, m.eta, m.kappa), (w(0.0), w(0.0), w(0.0), w(1.0)), "{mode:?}");
        assert_eq!(m.lanes, 13);
        assert_eq!(m.rho_excluded, 0);
        assert_eq!(m.scaled_lanes, if mode == Backscale::None { 13 } else { 0 });
    }
}

#[test]
fn rank_deficient_lane_has_infinite_kappa() {
    let b = Batch2x2::pack_real(&[Mat2::new(1.0, 0.0, 0.0, 0.0)]).unwrap();
    let m = run(&b, Backscale::Safe);
    assert!(m.kappa.is_infinite());
    assert_eq!(m.rho, w(0.0));
}

#[test]
fn zero_lane_has_zero_rho_and_infinite_kappa() {
    let z = Complex64::new(0.0, 0.0);
    let b = Batch2x2::pack_complex(&[Mat2::new(z, z, z, z)]).unwrap();
    let m = run(&b, Backscale::None);
    assert_eq!(m.rho, w(0.0));
    assert!(m.kappa.is_infinite());
}

#[test]
fn mismatched_output_is_rejected() {
    let a = Batch2x2::pack_real(&[Mat2::new(1.0, 0.0, 0.0, 1.0); 3]).unwrap();
    let b = Batch2x2::pack_real(&[Mat2::new(1.0, 0.0, 0.0, 1.0); 4]).unwrap();
    let (out, _) = run_batch(&b, &RunConfig::default()).unwrap();
    assert_eq!(metrics(&a, &out), Err(MetricsError::Length { batch: 3, out: 4 }));
    let c = Batch2x2::pack_complex(&[Mat2::new(Complex64::new(1.0, 0.0), 0.0.into(), 0.0.into(), 1.0.into()); 4]).unwrap();
    assert!(matches!(metrics(&c, &out), Err(MetricsError::Field { .. })));
}

#[test]
fn union_is_componentwise_max() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ms: Vec<Mat2<f64>> = (0..600).map(|_| Mat2::new(finite(&mut rng), finite(&mut rng), finite(&mut rng), finite(&mut rng))).collect();
    for mode in [Backscale::None, Backscale::Unconditional] {
        let whole = run(&Batch2x2::pack_real(&ms).unwrap(), mode);
        let lo = run(&Batch2x2::pack_real(&ms[..250]).unwrap(), mode);
        let hi = run(&Batch2x2::pack_real(&ms[250..]).unwrap(), mode);
        assert_eq!(whole, lo.merge(hi));
        assert_eq!(whole, hi.merge(lo));
    }
}

#[test]
fn oracle_worked_example() {
    let o = oracle_svd2_real(&Mat2::new(4.0, 3.0, 2.0, -1.0));
    // σ² = 15 ± √125
    let r = w(125.0).sqrt();
    let want_max = (w(15.0) + r).sqrt();
    let want_min = (w(15.0) - r).sqrt();
    let tol = w(2f64.powi(-100));
    assert!(((o.sig_max - want_max) / want_max).abs() <= tol);
    assert!(((o.sig_min - want_min) / want_min).abs() <= tol);
    assert!((o.sig_max.to_f64() - 5.11667274).abs() < 1e-8);
    assert!((o.sig_min.to_f64() - 1.95439508).abs() < 1e-8);
}

#[test]
fn oracle_diagonal_and_rank_one() {
    let id = Mat2::new(WideComplex::ONE, WideComplex::ZERO, WideComplex::ZERO, WideComplex::ONE);
    for (a, b) in [(3.0, 2.0), (5.0, 5.0), (1.0, 0.0), (0.0, 0.0), (f64::MAX, f64::from_bits(1))] {
        let o = oracle_svd2_real(&Mat2::new(a, 0.0, 0.0, b));
        let near = |x: WideReal, y: f64| (x - w(y)).abs() <= w(y) * w(2f64.powi(-100));
        assert!(near(o.sig_max, a) && near(o.sig_min, b), "diag({a:e}, {b:e})");
        let eye = |m: Mat2<WideComplex>| m.entries().iter().zip(id.entries()).all(|(x, y)| (*x - y).abs() <= w(2f64.powi(-100)));
        assert!(eye(o.u) && eye(o.v), "diag({a:e}, {b:e})");
    }
    let o = oracle_svd2_real(&Mat2::new(1.0, 0.0, 1.0, 0.0));
    assert!((o.sig_max - w(2.0).sqrt()).abs() <= w(2f64.powi(-104)));
    assert!(o.sig_min.is_zero());
}

#[test]
fn oracle_residual_is_tiny() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bound = w(2f64.powi(-90));
    for i in 0..20_000 {
        let mut z = || Complex64::new(rng.random_range(-1.0..1.0), if i % 2 == 0 { 0.0 } else { rng.random_range(-1.0..1.0) });
        let a = Mat2::new(z(), z(), z(), z());
        let o = oracle_svd2(&a);
        let kappa = o.sig_max / o.sig_min;
        if kappa > w(1e6) {
            continue;
        }
        assert!(o.residual(&a) <= bound, "{a:?}: {:?}", o.residual(&a));
        assert!(o.sig_min <= o.sig_max);
    }
}

#[test]
fn pipeline_sigma_max_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 50_000;
    let real: Vec<Mat2<f64>> = (0..n).map(|_| Mat2::new(finite(&mut rng), finite(&mut rng), finite(&mut rng), finite(&mut rng))).collect();
    let mut z = || Complex64::new(finite(&mut rng), finite(&mut rng));
    let complex: Vec<Mat2<Complex64>> = (0..n).map(|_| Mat2::new(z(), z(), z(), z())).collect();
    let cfg = RunConfig { backscale: Backscale::Safe, ..RunConfig::default() };
    let tol = w(2f64.powi(-45));
    for (batch, inputs) in [
        (Batch2x2::pack_real(&real).unwrap(), real.iter().map(|a| a.map(|x| Complex64::new(x, 0.0))).collect::<Vec<_>>()),
        (Batch2x2::pack_complex(&complex).unwrap(), complex.clone()),
    ] {
        let (out, _) = run_batch(&batch, &cfg).unwrap();
        for (k, a) in inputs.iter().enumerate() {
            let r = out.record(k);
            let s = if r.s == 0.0 { 0 } else { r.s as i64 };
            let got = w(r.sig_max).scalb(-s);
            let want = oracle_svd2(a).sig_max;
            assert!(((got - want) / want).abs() <= tol, "lane {k}: {got:?} vs {want:?}");
        }
    }
}
