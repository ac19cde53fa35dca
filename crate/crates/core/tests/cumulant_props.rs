//! k-statistic and CGF checks against independent oracles.

use proptest::prelude::*;
use scalefit_core::aggregate::build_dyadic_pyramid;
use scalefit_core::cumulant::*;
use scalefit_core::numeric::fit_line;
use scalefit_core::rng::TraceRng;
use scalefit_core::scaling::{fit_loglog, OctaveRange};
use scalefit_core::synth::{generate_fgn, FgnSpec};

/// Population cumulants from raw moments via
/// `kappa_m = mu'_m - sum_{k<m} C(m-1, k-1) kappa_k mu'_{m-k}`.
fn population_cumulants(support: &[f64], probs: &[f64], max: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..=max)
        .map(|r| support.iter().zip(probs).map(|(x, p)| p * x.powi(r as i32)).sum())
        .collect();
    let binom = |n: usize, k: usize| -> f64 { (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product() };
    let mut kappa = vec![0.0; max + 1];
    for m in 1..=max {
        let mut v = raw[m];
        for k in 1..m {
            v -= binom(m - 1, k - 1) * kappa[k] * raw[m - k];
        }
        kappa[m] = v;
    }
    kappa[1..].to_vec()
}

/// Exact expectation of every k-statistic by enumerating all samples of size
/// `n` from a three-point law. Unbiasedness makes it equal the population
/// cumulant.
#[test]
fn k_statistics_are_unbiased_by_enumeration() {
    let support = [-1.0, 0.0, 2.0];
    let probs = [0.2, 0.5, 0.3];
    let n = 7;
    let mut expected = [0.0f64; 6];
    let total = 3usize.pow(n as u32);
    let mut sample = vec![0.0; n];
    for code in 0..total {
        let mut c = code;
        let mut p = 1.0;
        for slot in sample.iter_mut() {
            *slot = support[c % 3];
            p *= probs[c % 3];
            c /= 3;
        }
        let k = sample_cumulants(&sample, 6).unwrap();
        for (e, v) in expected.iter_mut().zip(&k) {
            *e += p * v;
        }
    }
    let kappa = population_cumulants(&support, &probs, 6);
    for m in 0..6 {
        assert!(
            (expected[m] - kappa[m]).abs() < 1e-10,
            "order {}: E[k] = {} vs kappa = {}",
            m + 1,
            expected[m],
            kappa[m]
        );
    }
}

fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    TraceRng::new(seed).fill_normal(&mut v);
    v
}

#[test]
fn gaussian_higher_cumulants_vanish() {
    let x = gaussian(1_000_000, 2024);
    let k = sample_cumulants(&x, 4).unwrap();
    assert!(k[2].abs() < 0.02, "k3 {}", k[2]);
    assert!(k[3].abs() < 0.02, "k4 {}", k[3]);
    assert!((k[1] - 1.0).abs() < 0.01);
}

#[test]
fn gaussian_cgf() {
    let x = gaussian(1_000_000, 77);
    let g = empirical_cgf(&x, 0.5).unwrap();
    assert!((g - 0.125).abs() < 0.01, "g(0.5) = {g}");
}

/// Central finite differences of the empirical CGF at 0 estimate the plug-in
/// cumulants; at n = 10^4 they agree with the k-statistics to O(1/n).
#[test]
fn cgf_finite_differences_match_k_statistics() {
    let mut rng = TraceRng::new(31);
    let x: Vec<f64> = (0..10_000).map(|_| -rng.uniform_open().ln()).collect();
    let k = sample_cumulants(&x, 3).unwrap();
    let h = 1e-2;
    let g = |t: f64| empirical_cgf(&x, t).unwrap();
    let d1 = (g(h) - g(-h)) / (2.0 * h);
    let d2 = (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h);
    let d3 = (g(2.0 * h) - 2.0 * g(h) + 2.0 * g(-h) - g(-2.0 * h)) / (2.0 * h * h * h);
    for (fd, ks) in [(d1, k[0]), (d2, k[1]), (d3, k[2])] {
        assert!((fd - ks).abs() <= 0.01 * ks.abs() + 1e-4, "fd {fd} vs k {ks}");
    }
}

fn rel_close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shift_invariance(x in prop::collection::vec(-10f64..10.0, 8..120), c in -50f64..50.0) {
        let a = sample_cumulants(&x, 6).unwrap();
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let b = sample_cumulants(&shifted, 6).unwrap();
        let sd = a[1].sqrt();
        prop_assert!((b[0] - a[0] - c).abs() <= 1e-10 * (a[0].abs() + c.abs() + 1.0));
        for m in 2..=6 {
            prop_assert!(rel_close(a[m - 1], b[m - 1], sd.powi(m as i32), 1e-10), "m={} {} {}", m, a[m-1], b[m-1]);
        }
    }

    #[test]
    fn homogeneity(x in prop::collection::vec(-10f64..10.0, 8..120), s in 0.01f64..100.0) {
        let a = sample_cumulants(&x, 6).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * s).collect();
        let b = sample_cumulants(&scaled, 6).unwrap();
        let sd = a[1].sqrt();
        for m in 1..=6 {
            let factor = s.powi(m as i32);
            prop_assert!(rel_close(a[m - 1] * factor, b[m - 1], (sd * s).powi(m as i32), 1e-10));
        }
    }

    #[test]
    fn odd_cumulants_flip_exactly(x in prop::collection::vec(-10f64..10.0, 7..120)) {
        let a = sample_cumulants(&x, 6).unwrap();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let b = sample_cumulants(&neg, 6).unwrap();
        for m in 1..=6 {
            if m % 2 == 1 {
                prop_assert_eq!(b[m - 1], -a[m - 1]);
            } else {
                prop_assert_eq!(b[m - 1], a[m - 1]);
            }
        }
    }
}

#[test]
fn fgn_variance_row_scales_as_n_to_2h() {
    let t = generate_fgn(&FgnSpec::new(0.8, 1 << 16, 1.0, 8).unwrap()).unwrap();
    let table = cumulant_scaling_table(&build_dyadic_pyramid(t.samples()).unwrap(), 4).unwrap();
    let fit = fit_loglog(&table, 2, OctaveRange::new(0, 8).unwrap()).unwrap();
    assert!((fit.slope - 1.6).abs() < 0.1, "slope {}", fit.slope);
    let ratio = table.value(2, 256).unwrap() / table.value(2, 1).unwrap();
    assert!((ratio.log2() / 8.0 - 1.6).abs() < 0.1);
}

#[test]
fn iid_variance_row_has_unit_slope() {
    let x = gaussian(1 << 16, 404);
    let table = cumulant_scaling_table(&build_dyadic_pyramid(&x).unwrap(), 2).unwrap();
    let (xs, ys): (Vec<f64>, Vec<f64>) = table
        .row(2)
        .unwrap()
        .map(|(n, v, _)| ((n as f64).log2(), v.log2()))
        .unzip();
    let slope = fit_line(&xs, &ys).unwrap().slope;
    assert!((slope - 1.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn gaussian_odd_cells_are_flagged() {
    let t = generate_fgn(&FgnSpec::new(0.6, 1 << 16, 1.0, 3).unwrap()).unwrap();
    let table = cumulant_scaling_table(&build_dyadic_pyramid(t.samples()).unwrap(), 4).unwrap();
    let usable3 = table.row(3).unwrap().filter(|c| c.2.is_usable()).count();
    assert!(usable3 < 3, "{usable3} usable third-order cells");
    assert!(table.row(2).unwrap().all(|c| c.2.is_usable()));
}
