//! Log-log power-law fits of `|cum_m X^(n)|` against `n`, the `H(m)`
//! spectrum, sliding-window locality curves and slope-change detection.
//!
//! All logarithms are base 2, so a scale `n = 2^j` sits at octave `j`.
//! For a process whose cumulants scale as
//! `log2 |cum_m X^(n)| = m H(m) log2 n + c(m)`, the fitted slope over an
//! octave window estimates `m H(m)`. A constant `H(m)` across orders is the
//! monofractal (self-similar) case.

use std::collections::BTreeMap;

use crate::aggregate::AggregatePyramid;
use crate::cumulant::CumulantTable;
use crate::numeric::{fit_line, fit_line_weighted, LineFit};
use crate::{Error, Result};

/// Fewest points a log-log fit or a knee segment may use.
pub const MIN_FIT_POINTS: usize = 3;
pub const DEFAULT_WINDOW_WIDTH: u32 = 4;
/// The default fit window stops at the coarsest scale keeping this many blocks.
pub const DEFAULT_FIT_MIN_BLOCKS: usize = 256;
pub const MIN_KNEE_POINTS: usize = 6;

/// Inclusive octave range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OctaveRange {
    pub lo: u32,
    pub hi: u32,
}

impl OctaveRange {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid("octave window", format!("{lo} > {hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, octave: f64) -> bool {
        octave >= f64::from(self.lo) && octave <= f64::from(self.hi)
    }

    pub fn width(&self) -> u32 {
        self.hi - self.lo + 1
    }
}

impl std::fmt::Display for OctaveRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Weighting of the log-log regression points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    #[default]
    Unweighted,
    /// Weight each scale by its number of blocks.
    BlockCount,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub order: u32,
    /// Estimate of `m H(m)`.
    pub slope: f64,
    /// Estimate of `c(m)` (base-2 log units).
    pub intercept: f64,
    pub r_squared: f64,
    pub window: OctaveRange,
    pub points_used: usize,
}

impl ScalingFit {
    pub fn hurst(&self) -> f64 {
        self.slope / f64::from(self.order)
    }

    /// Estimates outside (0, 1) are reported as they are, never clamped.
    pub fn hurst_out_of_range(&self) -> bool {
        let h = self.hurst();
        !(h > 0.0 && h < 1.0)
    }
}

fn octave(scale: usize) -> f64 {
    (scale as f64).log2()
}

/// Octave window from the finest table scale to the coarsest scale that
/// still holds [`DEFAULT_FIT_MIN_BLOCKS`] blocks, or the whole table when
/// that leaves fewer than three scales.
pub fn default_fit_window(table: &CumulantTable) -> OctaveRange {
    let octaves: Vec<f64> = table.scales().iter().map(|&n| octave(n)).collect();
    let lo = octaves[0].floor() as u32;
    let full_hi = octaves[octaves.len() - 1].floor() as u32;
    let hi = table
        .scales()
        .iter()
        .zip(table.block_counts())
        .filter(|(_, &b)| b >= DEFAULT_FIT_MIN_BLOCKS)
        .map(|(&n, _)| octave(n).floor() as u32)
        .max();
    match hi {
        Some(hi) if hi >= lo + MIN_FIT_POINTS as u32 - 1 => OctaveRange { lo, hi },
        _ => OctaveRange { lo, hi: full_hi },
    }
}

/// Octaves spanned by the table's scales.
pub fn table_octaves(table: &CumulantTable) -> OctaveRange {
    let s = table.scales();
    OctaveRange {
        lo: octave(s[0]).floor() as u32,
        hi: octave(s[s.len() - 1]).floor() as u32,
    }
}

/// OLS of `log2 |cum_m|` against `log2 n` over the usable cells in `window`.
pub fn fit_loglog(table: &CumulantTable, order: u32, window: OctaveRange) -> Result<ScalingFit> {
    fit_loglog_with(table, order, window, Weighting::Unweighted)
}

pub fn fit_loglog_with(
    table: &CumulantTable,
    order: u32,
    window: OctaveRange,
    weighting: Weighting,
) -> Result<ScalingFit> {
    let row = table.row(order).ok_or_else(|| {
        Error::invalid("cumulant order", format!("order {order} is not in the table"))
    })?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for ((n, value, status), &blocks) in row.zip(table.block_counts()) {
        let j = octave(n);
        if window.contains(j) && status.is_usable() {
            xs.push(j);
            ys.push(value.abs().log2());
            ws.push(blocks as f64);
        }
    }
    let context = || format!("order {order} in octave window {window}");
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            context: context(),
            needed: MIN_FIT_POINTS,
            found: xs.len(),
        });
    }
    let weights = match weighting {
        Weighting::Unweighted => None,
        Weighting::BlockCount => Some(ws.as_slice()),
    };
    let fit = fit_line_weighted(&xs, &ys, weights).ok_or_else(|| Error::InsufficientPoints {
        context: context(),
        needed: MIN_FIT_POINTS,
        found: 0,
    })?;
    Ok(ScalingFit {
        order,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        window,
        points_used: xs.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HurstCurve {
    /// `m -> fit`, with `H(m) = fit.hurst()`.
    pub entries: BTreeMap<u32, ScalingFit>,
    pub window: OctaveRange,
    /// Orders left out of the spectrum and why.
    pub omitted: Vec<(u32, String)>,
}

impl HurstCurve {
    /// `(m, H(m), r^2)` ascending in `m`.
    pub fn values(&self) -> impl Iterator<Item = (u32, f64, f64)> + '_ {
        self.entries
            .iter()
            .map(|(&m, fit)| (m, fit.hurst(), fit.r_squared))
    }

    pub fn hurst(&self, order: u32) -> Option<f64> {
        self.entries.get(&order).map(ScalingFit::hurst)
    }
}

/// `H(m)` for every fittable order of the table.
///
/// Order 1 is always omitted: the aggregated mean is exactly `n` times the
/// block mean, so its slope is 1 for any trace with a non-zero mean and says
/// nothing about dependence.
pub fn hurst_spectrum(table: &CumulantTable, window: OctaveRange) -> Result<HurstCurve> {
    let mut entries = BTreeMap::new();
    let mut omitted = Vec::new();
    for &m in table.orders() {
        if m == 1 {
            omitted.push((m, "first cumulant is a location parameter".to_string()));
            continue;
        }
        match fit_loglog(table, m, window) {
            Ok(fit) => {
                entries.insert(m, fit);
            }
            Err(e @ Error::InsufficientPoints { .. }) => omitted.push((m, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if entries.is_empty() {
        return Err(Error::Empty(format!(
            "no cumulant order has {MIN_FIT_POINTS} usable scales in octave window {window}"
        )));
    }
    Ok(HurstCurve {
        entries,
        window,
        omitted,
    })
}

/// Hurst estimates from sliding octave windows.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityCurve {
    /// `(window centre octave, H estimate)`, centres strictly increasing.
    pub points: Vec<(f64, f64)>,
    pub order: u32,
    pub window_width: u32,
}

impl LocalityCurve {
    /// Largest minus smallest point estimate.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, h)| {
                (lo.min(h), hi.max(h))
            });
        hi - lo
    }

    pub fn knee(&self) -> Result<KneePoint> {
        detect_knee(&self.points)
    }
}

pub(crate) fn check_window_width(width: u32) -> Result<()> {
    if (width as usize) < MIN_FIT_POINTS {
        return Err(Error::invalid(
            "window width",
            format!("{width} is below the minimum width {MIN_FIT_POINTS}"),
        ));
    }
    Ok(())
}

/// Slides a window of `width` consecutive octaves over the table and fits
/// `H(m)` in each. Windows without three usable cells are skipped.
pub fn locality_curve(table: &CumulantTable, order: u32, width: u32) -> Result<LocalityCurve> {
    check_window_width(width)?;
    let span = table_octaves(table);
    if span.width() < width + 1 {
        return Err(Error::InsufficientPoints {
            context: format!("locality curve of width {width} over octaves {span}"),
            needed: (width + 1) as usize,
            found: span.width() as usize,
        });
    }
    let mut points = Vec::new();
    for start in span.lo..=span.hi + 1 - width {
        let window = OctaveRange {
            lo: start,
            hi: start + width - 1,
        };
        match fit_loglog(table, order, window) {
            Ok(fit) => points.push((f64::from(start) + f64::from(width - 1) / 2.0, fit.hurst())),
            Err(Error::InsufficientPoints { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            context: format!("locality curve of order {order}"),
            needed: 2,
            found: points.len(),
        });
    }
    Ok(LocalityCurve {
        points,
        order,
        window_width: width,
    })
}

/// Best two-segment fit of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KneePoint {
    /// Intersection of the two segment lines, limited to the gap between
    /// the last left point and the first right point.
    pub octave: f64,
    pub left_slope: f64,
    pub right_slope: f64,
    /// `(SSE_single - SSE_two) / SSE_single`, 0 when a single line is exact.
    pub sse_reduction: f64,
    /// Number of points in the left segment.
    pub split: usize,
    pub two_segment_sse: f64,
    pub single_line_sse: f64,
}

impl KneePoint {
    pub fn is_significant(&self, threshold: f64) -> bool {
        self.sse_reduction >= threshold
    }
}

/// Exhaustive breakpoint search: every split leaving at least three points
/// per side is fitted with two independent OLS lines, and the split with the
/// smallest total SSE wins (the first one on ties).
pub fn detect_knee(points: &[(f64, f64)]) -> Result<KneePoint> {
    if points.len() < MIN_KNEE_POINTS {
        return Err(Error::InsufficientPoints {
            context: "knee detection".into(),
            needed: MIN_KNEE_POINTS,
            found: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let single = fit_line(&xs, &ys)
        .ok_or_else(|| Error::invalid("knee input", "x values are not distinct"))?;

    let mut best: Option<(usize, LineFit, LineFit)> = None;
    for split in MIN_FIT_POINTS..=points.len() - MIN_FIT_POINTS {
        let (Some(left), Some(right)) = (
            fit_line(&xs[..split], &ys[..split]),
            fit_line(&xs[split..], &ys[split..]),
        ) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((_, l, r)) => left.sse + right.sse < l.sse + r.sse,
        };
        if better {
            best = Some((split, left, right));
        }
    }
    let (split, left, right) =
        best.ok_or_else(|| Error::invalid("knee input", "no admissible breakpoint"))?;

    let gap_lo = xs[split - 1];
    let gap_hi = xs[split];
    let octave = if left.slope != right.slope {
        let x = (right.intercept - left.intercept) / (left.slope - right.slope);
        if x.is_finite() {
            x.clamp(gap_lo, gap_hi)
        } else {
            (gap_lo + gap_hi) / 2.0
        }
    } else {
        (gap_lo + gap_hi) / 2.0
    };
    let two = left.sse + right.sse;
    let sse_reduction = if single.sse > 0.0 {
        ((single.sse - two) / single.sse).max(0.0)
    } else {
        0.0
    };
    Ok(KneePoint {
        octave,
        left_slope: left.slope,
        right_slope: right.slope,
        sse_reduction,
        split,
        two_segment_sse: two,
        single_line_sse: single.sse,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonofractalReport {
    pub monofractal: bool,
    /// `max H(m) - min H(m)`.
    pub spread: f64,
    pub min_hurst: f64,
    pub max_hurst: f64,
}

/// Constant `H(m)` within `tolerance` means monofractal.
pub fn classify_monofractal(curve: &HurstCurve, tolerance: f64) -> Result<MonofractalReport> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::invalid("tolerance", format!("{tolerance} must be > 0")));
    }
    if curve.entries.len() < 2 {
        return Err(Error::InsufficientPoints {
            context: "monofractal classification (orders with an H(m) estimate)".into(),
            needed: 2,
            found: curve.entries.len(),
        });
    }
    let (min_hurst, max_hurst) = curve
        .entries
        .values()
        .map(ScalingFit::hurst)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), h| {
            (lo.min(h), hi.max(h))
        });
    let spread = max_hurst - min_hurst;
    Ok(MonofractalReport {
        monofractal: spread <= tolerance,
        spread,
        min_hurst,
        max_hurst,
    })
}

/// Variance-time estimate: slope of `log2 Var(X^(n) / n)` against `log2 n`
/// equals `2H - 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceTimeFit {
    pub hurst: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: OctaveRange,
    pub points_used: usize,
}

pub fn variance_time_hurst(
    pyramid: &AggregatePyramid,
    window: OctaveRange,
) -> Result<VarianceTimeFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, level) in pyramid.levels() {
        let j = octave(n);
        if !window.contains(j) || level.len() < 2 {
            continue;
        }
        let means: Vec<f64> = level.iter().map(|s| s / n as f64).collect();
        let mu = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
        if var > 0.0 {
            xs.push(j);
            ys.push(var.log2());
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            context: format!("variance-time fit in octave window {window}"),
            needed: MIN_FIT_POINTS,
            found: xs.len(),
        });
    }
    let fit = fit_line(&xs, &ys).ok_or_else(|| Error::InsufficientPoints {
        context: format!("variance-time fit in octave window {window}"),
        needed: MIN_FIT_POINTS,
        found: 0,
    })?;
    Ok(VarianceTimeFit {
        hurst: 1.0 + fit.slope / 2.0,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        window,
        points_used: xs.len(),
    })
}
