//! Statistical checks of the generators against closed-form oracles.

use proptest::prelude::*;
use scalefit_core::numeric::compensated_sum;
use scalefit_core::synth::*;

/// Biased sample autocovariance with known zero mean.
fn sample_autocovariance(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    (0..n - lag).map(|i| x[i] * x[i + lag]).sum::<f64>() / (n - lag) as f64
}

/// Independent oracle for gamma(k), written from the definition of fGn as
/// increments of B_H with Var B_H(t) = |t|^2H.
fn gamma_oracle(h: f64, k: f64) -> f64 {
    let v = |t: f64| t.abs().powf(2.0 * h);
    0.5 * (v(k + 1.0) + v(k - 1.0) - 2.0 * v(k))
}

#[test]
fn closed_form_matches_definition() {
    for &h in &[0.1, 0.3, 0.5, 0.6, 0.75, 0.95] {
        for lag in 0..50u64 {
            let got = fgn_autocovariance(h, 1.0, lag).unwrap();
            let scale = ((lag + 1) as f64).powf(2.0 * h);
            assert!((got - gamma_oracle(h, lag as f64)).abs() < 1e-14 * scale);
        }
    }
    assert!((fgn_autocovariance(0.8, 3.0, 1).unwrap() - 3.0 * gamma_oracle(0.8, 1.0)).abs() < 1e-14);
}

#[test]
fn lag_one_covariance_h08_over_seeds() {
    let oracle = (2f64.powf(1.6) - 2.0) / 2.0;
    let mean: f64 = (1..=20u64)
        .map(|seed| {
            let t = generate_fgn(&FgnSpec::new(0.8, 1 << 16, 1.0, seed).unwrap()).unwrap();
            sample_autocovariance(t.samples(), 1)
        })
        .sum::<f64>()
        / 20.0;
    assert!((mean - oracle).abs() < 0.02, "mean lag-1 {mean} vs {oracle}");
}

#[test]
fn variance_parameter_scales_samples() {
    let spec = FgnSpec::new(0.7, 1 << 12, 1.0, 5).unwrap();
    let a = generate_fgn(&spec).unwrap();
    let b = generate_fgn(&FgnSpec { variance: 4.0, ..spec }).unwrap();
    for (x, y) in a.samples().iter().zip(b.samples()) {
        assert!((2.0 * x - y).abs() < 1e-12 * (1.0 + y.abs()));
    }
}

#[test]
fn composite_preserves_expected_energy() {
    let n = 1usize << 12;
    let energies: Vec<f64> = (0..50u64)
        .map(|seed| {
            let fgn = FgnSpec::new(0.7, n, 1.0, seed).unwrap();
            let cascade = CascadeSpec {
                depth: 12,
                multipliers: Multipliers::Beta { shape: 2.0 },
                total_mass: 1.0,
                seed: 10_000 + seed,
            };
            let t = generate_multifractal(&fgn, &cascade).unwrap();
            t.samples().iter().map(|x| x * x).sum()
        })
        .collect();
    let mean = energies.iter().sum::<f64>() / energies.len() as f64;
    let expected = n as f64;
    assert!(
        (mean - expected).abs() <= 0.1 * expected,
        "mean energy {mean} vs {expected}"
    );
}

#[test]
fn composite_is_deterministic() {
    let fgn = FgnSpec::new(0.7, 1 << 10, 1.0, 3).unwrap();
    let cascade = CascadeSpec {
        depth: 10,
        multipliers: Multipliers::Beta { shape: 2.0 },
        total_mass: 1.0,
        seed: 4,
    };
    let a = generate_multifractal(&fgn, &cascade).unwrap();
    let b = generate_multifractal(&fgn, &cascade).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cascade_conservation(depth in 2u32..14, shape in 0.3f64..20.0, mass in 1e-3f64..1e6, seed: u64) {
        let spec = CascadeSpec { depth, multipliers: Multipliers::Beta { shape }, total_mass: mass, seed };
        let c = generate_cascade(&spec).unwrap();
        prop_assert_eq!(c.len(), 1usize << depth);
        prop_assert!(c.samples().iter().all(|&m| m >= 0.0));
        let total = compensated_sum(c.samples());
        prop_assert!((total - mass).abs() <= mass * 2f64.powi(-40));
    }

    #[test]
    fn differencing_partial_sums_recovers_integers(values in prop::collection::vec(-1000i32..1000, 1..200)) {
        let x: Vec<f64> = values.iter().map(|&v| f64::from(v)).collect();
        let t = Trace::from_samples(x.clone()).unwrap();
        let y = partial_sums(&t);
        prop_assert_eq!(y.len(), x.len());
        prop_assert_eq!(y.samples()[0], x[0]);
        for (w, &xk) in y.samples().windows(2).zip(&x[1..]) {
            prop_assert_eq!(w[1] - w[0], xk);
        }
    }

    #[test]
    fn fgn_reproducible(h in 0.05f64..0.95, seed: u64) {
        let spec = FgnSpec::new(h, 256, 1.0, seed).unwrap();
        let a = generate_fgn(&spec).unwrap();
        let b = generate_fgn(&spec).unwrap();
        prop_assert!(a.samples().iter().zip(b.samples()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
