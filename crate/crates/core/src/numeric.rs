//! Small numerical kernels shared by the estimators.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of a slice, accumulated left to right.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Least-squares line through `(x, y)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Weighted residual sum of squares.
    pub sse: f64,
    pub points: usize,
}

/// Ordinary least squares. Requires at least two points with distinct `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    fit_line_weighted(x, y, None)
}

/// Weighted least squares with non-negative weights; `None` means unit weights.
///
/// When every `y` is equal the fit is exact and `r_squared` is reported as 1.
pub fn fit_line_weighted(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Option<LineFit> {
    assert_eq!(x.len(), y.len());
    if let Some(w) = weights {
        assert_eq!(w.len(), x.len());
    }
    let n = x.len();
    if n < 2 {
        return None;
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);

    let mut sw = CompensatedSum::new();
    let mut swx = CompensatedSum::new();
    let mut swy = CompensatedSum::new();
    for i in 0..n {
        sw.add(w(i));
        swx.add(w(i) * x[i]);
        swy.add(w(i) * y[i]);
    }
    let total_weight = sw.value();
    if total_weight <= 0.0 {
        return None;
    }
    let x_mean = swx.value() / total_weight;
    let y_mean = swy.value() / total_weight;

    let mut sxx = CompensatedSum::new();
    let mut sxy = CompensatedSum::new();
    let mut syy = CompensatedSum::new();
    for i in 0..n {
        let dx = x[i] - x_mean;
        let dy = y[i] - y_mean;
        sxx.add(w(i) * dx * dx);
        sxy.add(w(i) * dx * dy);
        syy.add(w(i) * dy * dy);
    }
    let sxx = sxx.value();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy.value() / sxx;
    let intercept = y_mean - slope * x_mean;

    let mut sse = CompensatedSum::new();
    for i in 0..n {
        let r = y[i] - (intercept + slope * x[i]);
        sse.add(w(i) * r * r);
    }
    let sse = sse.value().max(0.0);
    let syy = syy.value();
    let r_squared = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
        sse,
        points: n,
    })
}

/// True when `n` is a power of two (and non-zero).
pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(&values), 2.0);
    }

    #[test]
    fn exact_line_is_recovered() {
        let x: Vec<f64> = (0..9).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.6 * v - 0.514573).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope - 1.6).abs() < 1e-12);
        assert!((fit.intercept + 0.514573).abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn weights_pull_the_fit() {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 1.0, 0.0];
        let heavy_ends = fit_line_weighted(&x, &y, Some(&[100.0, 1.0, 100.0])).unwrap();
        let plain = fit_line(&x, &y).unwrap();
        assert!(heavy_ends.intercept < plain.intercept);
        assert!(heavy_ends.slope.abs() < 1e-12);
    }

    #[test]
    fn degenerate_x_has_no_fit() {
        assert!(fit_line(&[1.0, 1.0], &[0.0, 2.0]).is_none());
        assert!(fit_line(&[1.0], &[0.0]).is_none());
    }
}
