//! Unbiased sample cumulants (k-statistics) and the per-scale cumulant table.
//!
//! The k-statistics are evaluated from power sums of the mean-centred data,
//! `S_r = sum (x_i - mean)^r`. With `S_1 = 0` the classical power-sum
//! expressions reduce to
//!
//! ```text
//! k2 = S2 / (n-1)
//! k3 = n S3 / ((n-1)(n-2))
//! k4 = [n(n+1) S4 - 3(n-1) S2^2] / ((n-1)(n-2)(n-3))
//! k5 = n [n(n+5) S5 - 10(n-1) S2 S3] / ((n-1)(n-2)(n-3)(n-4))
//! k6 = [n(n+1)(n^2+15n-4) S6 - 15(n-1)^2(n+4) S2 S4
//!       - 10(n-1)(n^2-n+4) S3^2 + 30(n-1)(n-2) S2^3]
//!      / ((n-1)(n-2)(n-3)(n-4)(n-5))
//! ```
//!
//! Odd statistics change sign exactly under negation of the data, and every
//! statistic of order `m >= 2` is shift invariant and homogeneous of degree
//! `m`.

use crate::aggregate::AggregatePyramid;
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::{Error, Result};

pub const MAX_ORDER: u32 = 6;
pub const DEFAULT_MAX_ORDER: u32 = 4;

/// `|t| * max|x|` bound for [`empirical_cgf`].
pub const CGF_EXPONENT_LIMIT: f64 = 700.0;

/// k-statistics `k_1 ..= k_max_order`; needs at least `max(max_order, 2)` samples.
pub fn sample_cumulants(series: &[f64], max_order: u32) -> Result<Vec<f64>> {
    if !(1..=MAX_ORDER).contains(&max_order) {
        return Err(Error::invalid(
            "cumulant order",
            format!("{max_order} is outside 1..={MAX_ORDER}"),
        ));
    }
    let len = series.len();
    // k_m has the factor (n - m + 1) in its denominator; k2 needs two points.
    let needed = (max_order as usize).max(2);
    if len < needed {
        return Err(Error::TooShort {
            needed,
            actual: len,
        });
    }

    let n = len as f64;
    let mean = compensated_sum(series) / n;
    let mut sums = [CompensatedSum::new(); 5];
    for &x in series {
        let d = x - mean;
        let d2 = d * d;
        let d3 = d2 * d;
        sums[0].add(d2);
        sums[1].add(d3);
        sums[2].add(d2 * d2);
        sums[3].add(d2 * d3);
        sums[4].add(d3 * d3);
    }
    let [s2, s3, s4, s5, s6] = sums.map(|s| s.value());

    let mut out = Vec::with_capacity(max_order as usize);
    out.push(mean);
    if max_order >= 2 {
        out.push(s2 / (n - 1.0));
    }
    if max_order >= 3 {
        out.push(n * s3 / ((n - 1.0) * (n - 2.0)));
    }
    if max_order >= 4 {
        let num = n * (n + 1.0) * s4 - 3.0 * (n - 1.0) * s2 * s2;
        out.push(num / ((n - 1.0) * (n - 2.0) * (n - 3.0)));
    }
    if max_order >= 5 {
        let num = n * (n * (n + 5.0) * s5 - 10.0 * (n - 1.0) * s2 * s3);
        out.push(num / ((n - 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0)));
    }
    if max_order >= 6 {
        let num = n * (n + 1.0) * (n * n + 15.0 * n - 4.0) * s6
            - 15.0 * (n - 1.0) * (n - 1.0) * (n + 4.0) * s2 * s4
            - 10.0 * (n - 1.0) * (n * n - n + 4.0) * s3 * s3
            + 30.0 * (n - 1.0) * (n - 2.0) * s2 * s2 * s2;
        out.push(num / ((n - 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0) * (n - 5.0)));
    }
    Ok(out)
}

/// Empirical cumulant generating function `log mean(exp(t x))`.
///
/// Evaluated as a shifted log-sum-exp, so `t = 0` gives exactly 0 and a
/// constant series `c` gives exactly `t c`. Its derivatives at 0 are the
/// plug-in (biased) cumulants, which differ from the k-statistics by
/// `O(1/n)` relative terms.
pub fn empirical_cgf(series: &[f64], t: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::Empty("empirical CGF of an empty series".into()));
    }
    let max_abs = series.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let product = t.abs() * max_abs;
    if product.is_nan() || product > CGF_EXPONENT_LIMIT {
        return Err(Error::CgfOverflow {
            product,
            limit: CGF_EXPONENT_LIMIT,
        });
    }
    let shift = series
        .iter()
        .map(|&x| t * x)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = CompensatedSum::new();
    for &x in series {
        acc.add((t * x - shift).exp());
    }
    Ok((acc.value() / series.len() as f64).ln() + shift)
}

/// Why a table cell is excluded from log-log regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Usable,
    /// `|k_m| <= zero_tolerance * k2^(m/2)`: numerically zero.
    Zero,
    /// `|k_m|` is within `significance_z` Gaussian-null standard errors of 0.
    NotSignificant,
}

impl CellStatus {
    pub fn is_usable(self) -> bool {
        self == CellStatus::Usable
    }
}

/// Rule deciding which cumulant cells enter log-log fits.
///
/// A cell of order `m` is numerically zero when
/// `|k_m| <= zero_tolerance * k2^(m/2)`. For `m >= 3` it is also rejected when
/// `|k_m| < significance_z * sqrt(m! k2^m / blocks)`, the large-sample
/// standard error of `k_m` under a Gaussian null. Gaussian higher cumulants
/// vanish, so their sample values are pure estimation noise whose logarithm
/// carries no scaling information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsabilityRule {
    pub zero_tolerance: f64,
    pub significance_z: Option<f64>,
}

impl Default for UsabilityRule {
    fn default() -> Self {
        Self {
            zero_tolerance: 1e-12,
            significance_z: Some(4.0),
        }
    }
}

impl UsabilityRule {
    /// Only the numerical-zero test.
    pub fn zero_only() -> Self {
        Self {
            significance_z: None,
            ..Self::default()
        }
    }

    pub fn classify(&self, order: u32, value: f64, k2: Option<f64>, blocks: usize) -> CellStatus {
        if !value.is_finite() || value == 0.0 {
            return CellStatus::Zero;
        }
        let Some(k2) = k2 else {
            return CellStatus::Usable;
        };
        let m = order as i32;
        let scale = k2.max(0.0).powf(f64::from(m) / 2.0);
        if value.abs() <= self.zero_tolerance * scale {
            return CellStatus::Zero;
        }
        if let Some(z) = self.significance_z {
            if order >= 3 && blocks > 0 {
                let factorial: f64 = (1..=m).map(f64::from).product();
                let se = (factorial * k2.max(0.0).powi(m) / blocks as f64).sqrt();
                if value.abs() < z * se {
                    return CellStatus::NotSignificant;
                }
            }
        }
        CellStatus::Usable
    }
}

/// Estimated `cum_m X^(n)` for orders `1..=M` and every pyramid scale.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantTable {
    orders: Vec<u32>,
    scales: Vec<usize>,
    block_counts: Vec<usize>,
    /// `values[order_index][scale_index]`.
    values: Vec<Vec<f64>>,
    status: Vec<Vec<CellStatus>>,
}

impl CumulantTable {
    /// Builds a table from explicit cells and classifies them with `rule`.
    /// The significance test uses the order-2 row when present.
    pub fn from_values(
        scales: Vec<usize>,
        block_counts: Vec<usize>,
        rows: Vec<(u32, Vec<f64>)>,
        rule: UsabilityRule,
    ) -> Result<Self> {
        if scales.is_empty() || rows.is_empty() {
            return Err(Error::Empty("cumulant table has no cells".into()));
        }
        if !scales.windows(2).all(|w| w[0] < w[1]) || scales[0] == 0 {
            return Err(Error::invalid("scales", "must be positive and strictly ascending"));
        }
        if block_counts.len() != scales.len() {
            return Err(Error::LengthMismatch {
                expected: scales.len(),
                actual: block_counts.len(),
            });
        }
        let mut rows = rows;
        rows.sort_by_key(|(m, _)| *m);
        if !rows.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::invalid("orders", "duplicate cumulant order"));
        }
        for (m, row) in &rows {
            if !(1..=MAX_ORDER).contains(m) {
                return Err(Error::invalid("cumulant order", format!("{m} is outside 1..={MAX_ORDER}")));
            }
            if row.len() != scales.len() {
                return Err(Error::LengthMismatch {
                    expected: scales.len(),
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("cumulant table", format!("non-finite value in order {m}")));
            }
        }
        let k2_row = rows.iter().find(|(m, _)| *m == 2).map(|(_, r)| r.clone());
        let status = rows
            .iter()
            .map(|(m, row)| {
                row.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let k2 = k2_row.as_ref().map(|r| r[i]);
                        rule.classify(*m, v, k2, block_counts[i])
                    })
                    .collect()
            })
            .collect();
        let (orders, values) = rows.into_iter().unzip();
        Ok(Self {
            orders,
            scales,
            block_counts,
            values,
            status,
        })
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn block_counts(&self) -> &[usize] {
        &self.block_counts
    }

    fn order_index(&self, order: u32) -> Option<usize> {
        self.orders.iter().position(|&m| m == order)
    }

    pub fn value(&self, order: u32, scale: usize) -> Option<f64> {
        let i = self.order_index(order)?;
        let j = self.scales.iter().position(|&n| n == scale)?;
        Some(self.values[i][j])
    }

    pub fn status(&self, order: u32, scale: usize) -> Option<CellStatus> {
        let i = self.order_index(order)?;
        let j = self.scales.iter().position(|&n| n == scale)?;
        Some(self.status[i][j])
    }

    /// `(scale, value, status)` for one order, ascending in scale.
    pub fn row(&self, order: u32) -> Option<impl Iterator<Item = (usize, f64, CellStatus)> + '_> {
        let i = self.order_index(order)?;
        Some(
            self.scales
                .iter()
                .zip(&self.values[i])
                .zip(&self.status[i])
                .map(|((&n, &v), &s)| (n, v, s)),
        )
    }

    /// Forces a cell out of the regressions.
    pub fn mark_unusable(&mut self, order: u32, scale: usize) -> bool {
        match (
            self.order_index(order),
            self.scales.iter().position(|&n| n == scale),
        ) {
            (Some(i), Some(j)) => {
                self.status[i][j] = CellStatus::NotSignificant;
                true
            }
            _ => false,
        }
    }
}

/// k-statistics of every pyramid level with the default [`UsabilityRule`].
pub fn cumulant_scaling_table(pyramid: &AggregatePyramid, max_order: u32) -> Result<CumulantTable> {
    cumulant_scaling_table_with(pyramid, max_order, UsabilityRule::default())
}

pub fn cumulant_scaling_table_with(
    pyramid: &AggregatePyramid,
    max_order: u32,
    rule: UsabilityRule,
) -> Result<CumulantTable> {
    let mut scales = Vec::with_capacity(pyramid.len());
    let mut block_counts = Vec::with_capacity(pyramid.len());
    let mut columns = Vec::with_capacity(pyramid.len());
    for (n, level) in pyramid.levels() {
        scales.push(n);
        block_counts.push(level.len());
        columns.push(sample_cumulants(level, max_order)?);
    }
    let rows = (1..=max_order)
        .map(|m| (m, columns.iter().map(|c| c[m as usize - 1]).collect()))
        .collect();
    CumulantTable::from_values(scales, block_counts, rows, rule)
}
