//! Log-log fits, H(m) spectra, locality curves and knee detection.

use proptest::prelude::*;
use scalefit_core::aggregate::build_dyadic_pyramid;
use scalefit_core::cumulant::{cumulant_scaling_table, CumulantTable, UsabilityRule};
use scalefit_core::scaling::*;
use scalefit_core::synth::*;
use scalefit_core::Error;

fn fgn(h: f64, seed: u64) -> Trace {
    generate_fgn(&FgnSpec::new(h, 1 << 16, 1.0, seed).unwrap()).unwrap()
}

fn table(x: &[f64], orders: u32) -> CumulantTable {
    cumulant_scaling_table(&build_dyadic_pyramid(x).unwrap(), orders).unwrap()
}

fn composite(seed: u64) -> Trace {
    let f = FgnSpec::new(0.7, 1 << 16, 1.0, seed).unwrap();
    let c = CascadeSpec {
        depth: 16,
        multipliers: Multipliers::Beta { shape: 2.0 },
        total_mass: 1.0,
        seed: seed + 1000,
    };
    generate_multifractal(&f, &c).unwrap()
}

/// Textbook OLS written out for the oracle.
fn ols_sse(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    x.iter().zip(y).map(|(xi, yi)| (yi - a - b * xi).powi(2)).sum()
}

#[test]
fn fgn_order_two_hurst() {
    for &h in &[0.6, 0.8] {
        let mean = (1..=10)
            .map(|s| {
                let t = table(fgn(h, s).samples(), 4);
                fit_loglog(&t, 2, default_fit_window(&t)).unwrap().hurst()
            })
            .sum::<f64>()
            / 10.0;
        assert!((mean - h).abs() < 0.05, "H={h}: mean estimate {mean}");
    }
}

#[test]
fn default_window_keeps_256_blocks() {
    let t = table(fgn(0.7, 1).samples(), 2);
    assert_eq!(default_fit_window(&t), OctaveRange::new(0, 8).unwrap());
    assert_eq!(table_octaves(&t), OctaveRange::new(0, 13).unwrap());
}

#[test]
fn variance_time_recovers_h() {
    let p = build_dyadic_pyramid(fgn(0.8, 5).samples()).unwrap();
    let fit = variance_time_hurst(&p, OctaveRange::new(0, 8).unwrap()).unwrap();
    assert!((fit.hurst - 0.8).abs() < 0.07, "{}", fit.hurst);
}

#[test]
fn flagged_odd_order_gives_insufficient_points() {
    let t = table(fgn(0.6, 2).samples(), 4);
    match fit_loglog(&t, 3, default_fit_window(&t)) {
        Err(Error::InsufficientPoints { .. }) => {}
        other => panic!("expected insufficient points, got {other:?}"),
    }
}

#[test]
fn spectrum_omits_first_order() {
    let t = table(fgn(0.6, 2).samples(), 4);
    let curve = hurst_spectrum(&t, default_fit_window(&t)).unwrap();
    assert!(curve.hurst(1).is_none());
    assert!(curve.omitted.iter().any(|(m, _)| *m == 1));
    assert!((curve.hurst(2).unwrap() - 0.6).abs() < 0.1);
}

#[test]
fn composite_hurst_depends_on_order() {
    let mut gap = 0.0;
    let mut multi = 0;
    for seed in 1..=5 {
        let t = table(composite(seed).samples(), 4);
        let curve = hurst_spectrum(&t, default_fit_window(&t)).unwrap();
        gap += curve.hurst(2).unwrap() - curve.hurst(4).unwrap();
        if !classify_monofractal(&curve, 0.02).unwrap().monofractal {
            multi += 1;
        }
    }
    assert!(gap / 5.0 >= 0.03, "mean H(2) - H(4) = {}", gap / 5.0);
    assert!(multi >= 4, "{multi} of 5 classified multifractal");
}

#[test]
fn classify_needs_two_orders() {
    let t = table(fgn(0.6, 2).samples(), 2);
    let curve = hurst_spectrum(&t, default_fit_window(&t)).unwrap();
    assert!(matches!(
        classify_monofractal(&curve, 0.05),
        Err(Error::InsufficientPoints { .. })
    ));
}

/// A pure power law with exponent 2H in order 2 gives an exactly flat
/// locality curve at H.
#[test]
fn exact_power_law_has_flat_locality() {
    let scales: Vec<usize> = (0..12).map(|j| 1 << j).collect();
    let blocks: Vec<usize> = scales.iter().map(|n| (1 << 15) / n).collect();
    let row: Vec<f64> = scales.iter().map(|&n| 3.0 * (n as f64).powf(1.4)).collect();
    let t = CumulantTable::from_values(scales, blocks, vec![(2, row)], UsabilityRule::default()).unwrap();
    let curve = locality_curve(&t, 2, 4).unwrap();
    assert_eq!(curve.points.len(), 9);
    assert_eq!(curve.points[0].0, 1.5);
    for &(_, h) in &curve.points {
        assert!((h - 0.7).abs() < 1e-12);
    }
    assert!(curve.spread() < 1e-12);
}

#[test]
fn locality_width_checked() {
    let t = table(fgn(0.6, 2).samples(), 2);
    assert!(matches!(locality_curve(&t, 2, 2), Err(Error::InvalidParameter { .. })));
    assert!(locality_curve(&t, 2, 3).is_ok());
}

#[test]
fn noiseless_hinge_is_exact() {
    let xs: Vec<f64> = (0..12).map(f64::from).collect();
    let knee_x = 5.0;
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .map(|&x| (x, if x <= knee_x { 0.3 + 0.02 * x } else { 0.3 + 0.02 * knee_x - 0.05 * (x - knee_x) }))
        .collect();
    let k = detect_knee(&pts).unwrap();
    assert!((k.octave - knee_x).abs() < 1e-9);
    assert!((k.left_slope - 0.02).abs() < 1e-9);
    assert!((k.right_slope + 0.05).abs() < 1e-9);
    assert!(k.two_segment_sse < 1e-20);
    assert!(k.is_significant(0.2));
}

#[test]
fn straight_line_has_no_reduction() {
    let pts: Vec<(f64, f64)> = (0..10).map(|i| (f64::from(i), 1.0 + 0.5 * f64::from(i))).collect();
    let k = detect_knee(&pts).unwrap();
    assert!(!k.is_significant(0.2));
}

#[test]
fn knee_needs_six_points() {
    let pts: Vec<(f64, f64)> = (0..5).map(|i| (f64::from(i), 0.0)).collect();
    assert!(matches!(detect_knee(&pts), Err(Error::InsufficientPoints { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn knee_is_minimal_over_all_splits(ys in prop::collection::vec(-1f64..1.0, 6..20), step in 0.1f64..2.0) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64 * step, y)).collect();
        let k = detect_knee(&pts).unwrap();
        let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        for s in 3..=pts.len() - 3 {
            let sse = ols_sse(&x[..s], &y[..s]) + ols_sse(&x[s..], &y[s..]);
            prop_assert!(k.two_segment_sse <= sse + 1e-12 * (1.0 + sse));
        }
        prop_assert!(k.sse_reduction >= 0.0 && k.sse_reduction <= 1.0);
    }

    #[test]
    fn random_hinges_recovered(
        n in 8usize..24,
        at in 0.3f64..0.7,
        a in -1f64..1.0,
        b1 in -1f64..1.0,
        db in 0.2f64..2.0,
    ) {
        let split = ((n as f64 * at) as usize).clamp(3, n - 3);
        let kx = split as f64 - 0.5;
        let b2 = b1 + db;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = i as f64;
                (x, if x < kx { a + b1 * x } else { a + b1 * kx + b2 * (x - kx) })
            })
            .collect();
        let k = detect_knee(&pts).unwrap();
        prop_assert_eq!(k.split, split);
        prop_assert!((k.octave - kx).abs() < 1e-9);
        prop_assert!((k.left_slope - b1).abs() < 1e-9);
        prop_assert!((k.right_slope - b2).abs() < 1e-9);
    }

    /// Multiplying the series by c shifts every log2 |cum_m| by m log2 c,
    /// which leaves every slope unchanged.
    #[test]
    fn scaling_the_series_leaves_h_unchanged(c in 0.01f64..100.0, seed in 0u64..1000) {
        let x = generate_fgn(&FgnSpec::new(0.7, 1 << 12, 1.0, seed).unwrap()).unwrap();
        let y: Vec<f64> = x.samples().iter().map(|v| v * c).collect();
        let ta = table(x.samples(), 2);
        let tb = table(&y, 2);
        let w = default_fit_window(&ta);
        let ha = fit_loglog(&ta, 2, w).unwrap().hurst();
        let hb = fit_loglog(&tb, 2, w).unwrap().hurst();
        prop_assert!((ha - hb).abs() < 1e-9);
    }
}
