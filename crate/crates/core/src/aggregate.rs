//! Block aggregation `X^(n)(k)` over non-overlapping blocks of size `n`.
//!
//! Block `k` (1-based) covers source indices `(k-1)n+1 ..= kn`; trailing
//! samples that do not fill a block are dropped. Block sums use compensated
//! accumulation in a fixed left-to-right order.

use std::collections::BTreeMap;

use crate::numeric::CompensatedSum;
use crate::{Error, Result};

/// Fewest blocks a pyramid level may hold.
pub const MIN_BLOCKS: usize = 8;

/// Block sums of `samples` over blocks of size `n`.
pub fn aggregate(samples: &[f64], n: usize) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::invalid("scale", "block size must be >= 1"));
    }
    if n > samples.len() {
        return Err(Error::invalid(
            "scale",
            format!("block size {n} exceeds trace length {}", samples.len()),
        ));
    }
    if n == 1 {
        return Ok(samples.to_vec());
    }
    Ok(samples
        .chunks_exact(n)
        .map(|block| {
            let mut acc = CompensatedSum::new();
            for &x in block {
                acc.add(x);
            }
            acc.value()
        })
        .collect())
}

/// Dyadic scales `2^0 ..= 2^(J-3)` for a trace of length `N >= 2^J`, which
/// keeps at least [`MIN_BLOCKS`] blocks at the coarsest level.
pub fn dyadic_scales(length: usize) -> Vec<usize> {
    let mut scales = Vec::new();
    let mut n = 1usize;
    while length / n >= MIN_BLOCKS {
        scales.push(n);
        match n.checked_mul(2) {
            Some(next) => n = next,
            None => break,
        }
    }
    scales
}

/// The aggregated series for a set of block sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePyramid {
    source_length: usize,
    levels: BTreeMap<usize, Vec<f64>>,
}

impl AggregatePyramid {
    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Ascending block sizes.
    pub fn scales(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.keys().copied()
    }

    pub fn level(&self, n: usize) -> Option<&[f64]> {
        self.levels.get(&n).map(Vec::as_slice)
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.levels.iter().map(|(&n, v)| (n, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Aggregates `samples` at every requested scale. Duplicate scales collapse.
pub fn build_pyramid(samples: &[f64], scales: &[usize]) -> Result<AggregatePyramid> {
    if scales.is_empty() {
        return Err(Error::Empty("no aggregation scales requested".into()));
    }
    let mut levels = BTreeMap::new();
    for &n in scales {
        if n < 1 {
            return Err(Error::invalid("scale", "block size must be >= 1"));
        }
        let blocks = samples.len() / n;
        if blocks < MIN_BLOCKS {
            return Err(Error::invalid(
                "scale",
                format!(
                    "block size {n} leaves {blocks} blocks of a length-{} trace; at least {MIN_BLOCKS} required",
                    samples.len()
                ),
            ));
        }
        levels.entry(n).or_insert(aggregate(samples, n)?);
    }
    Ok(AggregatePyramid {
        source_length: samples.len(),
        levels,
    })
}

/// Pyramid over [`dyadic_scales`].
pub fn build_dyadic_pyramid(samples: &[f64]) -> Result<AggregatePyramid> {
    let scales = dyadic_scales(samples.len());
    if scales.is_empty() {
        return Err(Error::TooShort {
            needed: MIN_BLOCKS,
            actual: samples.len(),
        });
    }
    build_pyramid(samples, &scales)
}
