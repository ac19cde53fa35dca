//! Periodic orthonormal discrete wavelet transform and logscale diagrams.
//!
//! One analysis step maps a length-`L` signal to `L/2` approximation and
//! `L/2` detail coefficients,
//!
//! ```text
//! a_k = sum_i h_i x[(2k + i) mod L]
//! d_k = sum_i g_i x[(2k + i) mod L],   g_i = (-1)^i h_{len-1-i}
//! ```
//!
//! For Haar this is `d = (x1 - x2)/sqrt2`, `a = (x1 + x2)/sqrt2`. Octave `j`
//! holds the details of step `j` (octave 1 is the finest). The last
//! coefficients of each octave wrap around the periodic boundary.
//!
//! For a stationary long-range dependent series the mean detail energy obeys
//! `log2 mu_j ~ alpha j + const` with `alpha = 2H - 1`.

use crate::numeric::{fit_line_weighted, is_power_of_two};
use crate::scaling::{check_window_width, LocalityCurve, MIN_FIT_POINTS};
use crate::{Error, Result};

/// Coefficients kept at the coarsest octave: `length >= 2^(levels + 3)`.
pub const MIN_COARSE_COEFFICIENTS: usize = 8;
pub const DEFAULT_FIT_START: u32 = 3;

/// Haar scaling filter, pinned to the same 15 digits as the D4 taps.
#[allow(clippy::approx_constant)]
const HAAR: [f64; 2] = [0.707106781186548, 0.707106781186548];
/// Daubechies 4-tap scaling filter, `sum h = sqrt(2)`, two vanishing moments.
const DAUBECHIES4: [f64; 4] = [
    0.482962913144534,
    0.836516303737808,
    0.224143868042013,
    -0.129409522551260,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaveletFamily {
    Haar,
    #[default]
    Daubechies4,
}

impl WaveletFamily {
    pub fn scaling_filter(self) -> &'static [f64] {
        match self {
            WaveletFamily::Haar => &HAAR,
            WaveletFamily::Daubechies4 => &DAUBECHIES4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WaveletFamily::Haar => "haar",
            WaveletFamily::Daubechies4 => "daubechies4",
        }
    }

    /// One periodic analysis step: `(approximation, detail)`.
    pub fn analyze(self, signal: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let len = signal.len();
        if len < 2 || !len.is_multiple_of(2) {
            return Err(Error::invalid(
                "signal length",
                format!("{len} is not a positive even number"),
            ));
        }
        let h = self.scaling_filter();
        let taps = h.len();
        let half = len / 2;
        let mut approx = Vec::with_capacity(half);
        let mut detail = Vec::with_capacity(half);
        for k in 0..half {
            let mut a = 0.0;
            let mut d = 0.0;
            for (i, &hi) in h.iter().enumerate() {
                let x = signal[(2 * k + i) % len];
                let gi = if i % 2 == 0 { h[taps - 1 - i] } else { -h[taps - 1 - i] };
                a += hi * x;
                d += gi * x;
            }
            approx.push(a);
            detail.push(d);
        }
        Ok((approx, detail))
    }
}

impl std::str::FromStr for WaveletFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(WaveletFamily::Haar),
            "daubechies4" | "db4" | "d4" => Ok(WaveletFamily::Daubechies4),
            other => Err(format!("unknown wavelet family {other:?} (haar, daubechies4)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletSpec {
    pub family: WaveletFamily,
    pub levels: u32,
}

impl WaveletSpec {
    /// Deepest decomposition keeping [`MIN_COARSE_COEFFICIENTS`] coarse details.
    pub fn max_levels(length: usize) -> u32 {
        if length < 2 * MIN_COARSE_COEFFICIENTS {
            0
        } else {
            length.ilog2() - 3
        }
    }

    pub fn with_max_levels(family: WaveletFamily, length: usize) -> Self {
        Self {
            family,
            levels: Self::max_levels(length),
        }
    }

    fn check(&self, length: usize) -> Result<()> {
        if self.levels < 1 {
            return Err(Error::invalid("wavelet levels", "must be >= 1"));
        }
        if !is_power_of_two(length) {
            return Err(Error::invalid(
                "series length",
                format!("{length} is not a power of two"),
            ));
        }
        if self.levels > Self::max_levels(length) {
            return Err(Error::invalid(
                "wavelet levels",
                format!(
                    "{} levels need length >= 2^{}, got {length}",
                    self.levels,
                    self.levels + 3
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// `details[j - 1]` holds octave `j`.
    pub details: Vec<Vec<f64>>,
    pub approximation: Vec<f64>,
}

impl Decomposition {
    pub fn octave(&self, j: u32) -> Option<&[f64]> {
        self.details.get((j as usize).checked_sub(1)?).map(Vec::as_slice)
    }
}

pub fn dwt(series: &[f64], spec: &WaveletSpec) -> Result<Decomposition> {
    spec.check(series.len())?;
    let mut details = Vec::with_capacity(spec.levels as usize);
    let mut current = series.to_vec();
    for _ in 0..spec.levels {
        let (approx, detail) = spec.family.analyze(&current)?;
        details.push(detail);
        current = approx;
    }
    Ok(Decomposition {
        details,
        approximation: current,
    })
}

/// Mean squared detail coefficient per octave.
#[derive(Debug, Clone, PartialEq)]
pub struct LogscaleDiagram {
    pub octaves: Vec<u32>,
    pub energy: Vec<f64>,
    pub counts: Vec<usize>,
}

impl LogscaleDiagram {
    fn index(&self, octave: u32) -> Option<usize> {
        self.octaves.iter().position(|&j| j == octave)
    }

    pub fn energy_at(&self, octave: u32) -> Option<f64> {
        self.index(octave).map(|i| self.energy[i])
    }

    /// Fit range `[3, levels - 1]`, widened to the full diagram when too short.
    pub fn default_fit_range(&self) -> (u32, u32) {
        let first = self.octaves[0];
        let last = *self.octaves.last().expect("non-empty diagram");
        let lo = DEFAULT_FIT_START.max(first);
        let hi = last.saturating_sub(1);
        if hi >= lo + MIN_FIT_POINTS as u32 - 1 {
            (lo, hi)
        } else {
            (first, last)
        }
    }
}

pub fn logscale_diagram(series: &[f64], spec: &WaveletSpec) -> Result<LogscaleDiagram> {
    let dec = dwt(series, spec)?;
    let mut octaves = Vec::with_capacity(dec.details.len());
    let mut energy = Vec::with_capacity(dec.details.len());
    let mut counts = Vec::with_capacity(dec.details.len());
    for (i, d) in dec.details.iter().enumerate() {
        octaves.push(i as u32 + 1);
        energy.push(d.iter().map(|c| c * c).sum::<f64>() / d.len() as f64);
        counts.push(d.len());
    }
    Ok(LogscaleDiagram {
        octaves,
        energy,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletEstimate {
    pub hurst: f64,
    /// Logscale slope `alpha = 2H - 1`.
    pub alpha: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub j1: u32,
    pub j2: u32,
}

/// Weighted (by coefficient count) LS of `log2 mu_j` on `j` over `[j1, j2]`.
pub fn wavelet_hurst(diagram: &LogscaleDiagram, j1: u32, j2: u32) -> Result<WaveletEstimate> {
    if j1 >= j2 {
        return Err(Error::invalid("octave range", format!("j1 = {j1} must be below j2 = {j2}")));
    }
    let (Some(lo), Some(hi)) = (diagram.index(j1), diagram.index(j2)) else {
        return Err(Error::invalid(
            "octave range",
            format!(
                "[{j1}, {j2}] is not inside the diagram octaves 1..={}",
                diagram.octaves.len()
            ),
        ));
    };
    let count = hi - lo + 1;
    if count < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            context: format!("wavelet fit over octaves [{j1}, {j2}]"),
            needed: MIN_FIT_POINTS,
            found: count,
        });
    }
    let mut xs = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    let mut ws = Vec::with_capacity(count);
    for i in lo..=hi {
        let mu = diagram.energy[i];
        if mu.is_nan() || mu <= 0.0 {
            return Err(Error::ZeroEnergy {
                octave: diagram.octaves[i],
            });
        }
        xs.push(f64::from(diagram.octaves[i]));
        ys.push(mu.log2());
        ws.push(diagram.counts[i] as f64);
    }
    let fit = fit_line_weighted(&xs, &ys, Some(&ws)).ok_or_else(|| Error::InsufficientPoints {
        context: format!("wavelet fit over octaves [{j1}, {j2}]"),
        needed: MIN_FIT_POINTS,
        found: 0,
    })?;
    Ok(WaveletEstimate {
        hurst: (fit.slope + 1.0) / 2.0,
        alpha: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        j1,
        j2,
    })
}

/// Sliding-window [`wavelet_hurst`] over consecutive octaves.
pub fn wavelet_locality_curve(diagram: &LogscaleDiagram, width: u32) -> Result<LocalityCurve> {
    check_window_width(width)?;
    let octaves = diagram.octaves.len();
    if octaves < width as usize + 1 {
        return Err(Error::InsufficientPoints {
            context: format!("wavelet locality curve of width {width}"),
            needed: width as usize + 1,
            found: octaves,
        });
    }
    let mut points = Vec::with_capacity(octaves + 1 - width as usize);
    for start in 0..=octaves - width as usize {
        let j1 = diagram.octaves[start];
        let j2 = diagram.octaves[start + width as usize - 1];
        let est = wavelet_hurst(diagram, j1, j2)?;
        points.push((f64::from(j1) + f64::from(width - 1) / 2.0, est.hurst));
    }
    Ok(LocalityCurve {
        points,
        order: 2,
        window_width: width,
    })
}
