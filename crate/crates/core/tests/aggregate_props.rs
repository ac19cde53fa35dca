use proptest::prelude::*;
use scalefit_core::aggregate::*;
use scalefit_core::cumulant::sample_cumulants;
use scalefit_core::numeric::{compensated_sum, fit_line};
use scalefit_core::synth::{generate_fgn, FgnSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mass_is_preserved(x in prop::collection::vec(-1e3f64..1e3, 1..500), n in 1usize..40) {
        prop_assume!(n <= x.len());
        let agg = aggregate(&x, n).unwrap();
        prop_assert_eq!(agg.len(), x.len() / n);
        let used = &x[..n * agg.len()];
        let lhs = compensated_sum(&agg);
        let rhs = compensated_sum(used);
        let scale: f64 = used.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn aggregation_composes(blocks in 1usize..30, a in 1usize..8, b in 1usize..8, seed in any::<u64>()) {
        let len = blocks * a * b;
        let mut state = seed;
        let x: Vec<f64> = (0..len).map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        }).collect();
        let twice = aggregate(&aggregate(&x, a).unwrap(), b).unwrap();
        let once = aggregate(&x, a * b).unwrap();
        prop_assert_eq!(twice.len(), once.len());
        for (p, q) in twice.iter().zip(&once) {
            prop_assert!((p - q).abs() <= 1e-12 * (a * b) as f64);
        }
    }

    #[test]
    fn integer_composition_is_exact(values in prop::collection::vec(-100i32..100, 24..24 * 8)) {
        let x: Vec<f64> = values.iter().map(|&v| f64::from(v)).collect();
        for (a, b) in [(2usize, 3usize), (3, 4), (4, 2)] {
            prop_assert_eq!(aggregate(&aggregate(&x, a).unwrap(), b).unwrap(), aggregate(&x, a * b).unwrap());
        }
    }
}

#[test]
fn variance_scales_as_two_h() {
    for &h in &[0.6, 0.8] {
        let t = generate_fgn(&FgnSpec::new(h, 1 << 16, 1.0, 17).unwrap()).unwrap();
        let (mut xs, mut ys) = (vec![], vec![]);
        for j in 0..=8 {
            let level = aggregate(t.samples(), 1 << j).unwrap();
            xs.push(f64::from(j));
            ys.push(sample_cumulants(&level, 2).unwrap()[1].log2());
        }
        let slope = fit_line(&xs, &ys).unwrap().slope;
        assert!((slope - 2.0 * h).abs() < 0.1, "H={h}: slope {slope}");
    }
}
