//! Trace generators: fractional Gaussian noise, conservative binomial
//! cascades, and the cascade-modulated composite.
//!
//! fGn is synthesised exactly by circulant embedding of its autocovariance
//! (Davies-Harte). The composite multiplies an fGn path by
//! `sqrt(N * mu(k))`, where `mu` is a unit-mass cascade measure: the expected
//! energy and the large-scale second-order scaling are kept while the
//! cascade injects intermittent small-scale variability.

use rustfft::num_complex::Complex;
use rustfft::FftPlannerScalar;
use serde::{Deserialize, Serialize};

use crate::numeric::is_power_of_two;
use crate::rng::TraceRng;
use crate::{Error, Result};

/// Spectral values below `-NEGATIVE_EIGEN_TOLERANCE * max` abort synthesis.
pub const NEGATIVE_EIGEN_TOLERANCE: f64 = 1e-8;

/// Smallest accepted fGn length exponent (`N = 2^4`).
pub const MIN_LENGTH_EXPONENT: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgnSpec {
    pub hurst: f64,
    pub length: usize,
    /// Marginal variance of each increment.
    pub variance: f64,
    pub seed: u64,
}

impl FgnSpec {
    pub fn new(hurst: f64, length: usize, variance: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            hurst,
            length,
            variance,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_hurst(self.hurst)?;
        check_variance(self.variance)?;
        if !is_power_of_two(self.length) || self.length < 1 << MIN_LENGTH_EXPONENT {
            return Err(Error::invalid(
                "length",
                format!(
                    "{} is not a power of two >= {}",
                    self.length,
                    1usize << MIN_LENGTH_EXPONENT
                ),
            ));
        }
        Ok(())
    }
}

/// Law of the left-child multiplier `W` at every cascade split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multipliers {
    /// `W ~ Beta(shape, shape)`, children weighted `(W, 1 - W)`.
    Beta { shape: f64 },
    /// The `shape -> infinity` limit: every split is exactly `(1/2, 1/2)`.
    EqualSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeSpec {
    /// Number of dyadic splits; the measure has `2^depth` cells.
    pub depth: u32,
    pub multipliers: Multipliers,
    pub total_mass: f64,
    pub seed: u64,
}

impl CascadeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.depth < 2 {
            return Err(Error::invalid("depth", format!("{} < 2", self.depth)));
        }
        if self.depth >= usize::BITS - 1 {
            return Err(Error::invalid("depth", format!("{} is too large", self.depth)));
        }
        if let Multipliers::Beta { shape } = self.multipliers {
            if !(shape > 0.0 && shape.is_finite()) {
                return Err(Error::invalid(
                    "multiplier shape",
                    format!("{shape} must be finite and > 0"),
                ));
            }
        }
        if !(self.total_mass > 0.0 && self.total_mass.is_finite()) {
            return Err(Error::invalid(
                "total mass",
                format!("{} must be finite and > 0", self.total_mass),
            ));
        }
        Ok(())
    }

    /// Number of cells, `2^depth`.
    pub fn cells(&self) -> usize {
        1usize << self.depth
    }
}

/// Generation record echoed into trace metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Fgn(FgnSpec),
    Cascade(CascadeSpec),
    Multifractal {
        fgn: FgnSpec,
        cascade: CascadeSpec,
    },
    Aggregate {
        scale: usize,
        source: Option<Box<ModelSpec>>,
    },
    PartialSums {
        source: Option<Box<ModelSpec>>,
    },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Fgn(_) => "fgn",
            ModelSpec::Cascade(_) => "cascade",
            ModelSpec::Multifractal { .. } => "multifractal",
            ModelSpec::Aggregate { .. } => "aggregate",
            ModelSpec::PartialSums { .. } => "partial_sums",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub model: Option<ModelSpec>,
    /// RFC 3339 creation time; stamped by callers, never by the generators.
    pub created: Option<String>,
}

/// A finite, non-empty increment series with its generation record.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    samples: Vec<f64>,
    pub meta: TraceMeta,
}

impl Trace {
    pub fn new(samples: Vec<f64>, meta: TraceMeta) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("trace has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(
                "trace",
                format!("sample {} is not finite ({})", i + 1, samples[i]),
            ));
        }
        Ok(Self { samples, meta })
    }

    /// A trace with empty metadata.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, TraceMeta::default())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

impl AsRef<[f64]> for Trace {
    fn as_ref(&self) -> &[f64] {
        &self.samples
    }
}

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "hurst",
            format!("{hurst} is outside the open interval (0, 1)"),
        ))
    }
}

fn check_variance(variance: f64) -> Result<()> {
    if variance > 0.0 && variance.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "variance",
            format!("{variance} must be finite and > 0"),
        ))
    }
}

/// Autocovariance of fGn at a non-negative lag:
/// `gamma(k) = (variance / 2) (|k+1|^2H - 2|k|^2H + |k-1|^2H)`.
pub fn fgn_autocovariance(hurst: f64, variance: f64, lag: u64) -> Result<f64> {
    check_hurst(hurst)?;
    check_variance(variance)?;
    Ok(autocovariance_unchecked(hurst, variance, lag))
}

fn autocovariance_unchecked(hurst: f64, variance: f64, lag: u64) -> f64 {
    if lag == 0 {
        return variance;
    }
    let two_h = 2.0 * hurst;
    let k = lag as f64;
    0.5 * variance * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h))
}

/// Exact fGn synthesis by circulant embedding.
///
/// The first row of the `2N` circulant is
/// `gamma(0), ..., gamma(N), gamma(N-1), ..., gamma(1)`. Its spectrum
/// `lambda` weights complex Gaussians `A_k + iB_k`; the real part of the
/// transform of `sqrt(lambda_k / 2N) (A_k + iB_k)` restricted to the first
/// `N` entries has exactly the fGn covariance.
pub fn generate_fgn(spec: &FgnSpec) -> Result<Trace> {
    spec.validate()?;
    let n = spec.length;
    let m = 2 * n;

    let mut row: Vec<Complex<f64>> = Vec::with_capacity(m);
    for k in 0..=n {
        row.push(Complex::new(
            autocovariance_unchecked(spec.hurst, spec.variance, k as u64),
            0.0,
        ));
    }
    for k in (1..n).rev() {
        row.push(row[k]);
    }

    let mut planner = FftPlannerScalar::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);

    let max_eigen = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
    let floor = -NEGATIVE_EIGEN_TOLERANCE * max_eigen;
    let mut weights = Vec::with_capacity(m);
    for (k, c) in row.iter().enumerate() {
        if c.re < floor {
            return Err(Error::Synthesis(format!(
                "circulant eigenvalue {k} is {:e}, below tolerance {:e}",
                c.re, floor
            )));
        }
        weights.push((c.re.max(0.0) / m as f64).sqrt());
    }

    let mut rng = TraceRng::new(spec.seed);
    let mut field: Vec<Complex<f64>> = weights
        .iter()
        .map(|&w| {
            let (a, b) = rng.normal_pair();
            Complex::new(w * a, w * b)
        })
        .collect();
    fft.process(&mut field);

    let samples = field[..n].iter().map(|c| c.re).collect();
    Trace::new(
        samples,
        TraceMeta {
            model: Some(ModelSpec::Fgn(*spec)),
            created: None,
        },
    )
}

/// Conservative binomial cascade on `2^depth` dyadic cells.
///
/// Splits proceed level by level, parents left to right; each parent mass
/// `m` becomes `(m W, m - m W)`, so every level partitions its parent mass.
pub fn generate_cascade(spec: &CascadeSpec) -> Result<Trace> {
    spec.validate()?;
    let mut masses = Vec::with_capacity(spec.cells());
    masses.push(spec.total_mass);

    let mut rng = TraceRng::new(spec.seed);
    let beta = match spec.multipliers {
        Multipliers::Beta { shape } => Some(rng.symmetric_beta(shape)?),
        Multipliers::EqualSplit => None,
    };

    for _ in 0..spec.depth {
        let mut next = Vec::with_capacity(masses.len() * 2);
        for &parent in &masses {
            let w = match &beta {
                Some(b) => rng.sample_open_unit(b),
                None => 0.5,
            };
            let left = parent * w;
            next.push(left);
            next.push(parent - left);
        }
        masses = next;
    }

    Trace::new(
        masses,
        TraceMeta {
            model: Some(ModelSpec::Cascade(*spec)),
            created: None,
        },
    )
}

/// Composite trace `X_fgn(k) * sqrt(N * mu(k))` with `mu = cascade / total_mass`.
pub fn generate_multifractal(fgn: &FgnSpec, cascade: &CascadeSpec) -> Result<Trace> {
    fgn.validate()?;
    cascade.validate()?;
    if fgn.length != cascade.cells() {
        return Err(Error::LengthMismatch {
            expected: cascade.cells(),
            actual: fgn.length,
        });
    }
    let base = generate_fgn(fgn)?;
    let measure = generate_cascade(cascade)?;
    let n = fgn.length as f64;

    let samples = base
        .samples()
        .iter()
        .zip(measure.samples())
        .map(|(&x, &mass)| x * (n * (mass / cascade.total_mass)).sqrt())
        .collect();
    Trace::new(
        samples,
        TraceMeta {
            model: Some(ModelSpec::Multifractal {
                fgn: *fgn,
                cascade: *cascade,
            }),
            created: None,
        },
    )
}

/// Cumulative process `Y(k) = X(1) + ... + X(k)`.
pub fn partial_sums(trace: &Trace) -> Trace {
    let mut running = 0.0;
    let samples = trace
        .samples()
        .iter()
        .map(|&x| {
            running += x;
            running
        })
        .collect();
    Trace {
        samples,
        meta: TraceMeta {
            model: Some(ModelSpec::PartialSums {
                source: trace.meta.model.clone().map(Box::new),
            }),
            created: trace.meta.created.clone(),
        },
    }
}
