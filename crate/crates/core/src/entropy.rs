//! Information entropy of a partition and the payload measures built on it.
//!
//! A partition of `N` points into clusters of sizes `k_i` has proportions
//! `p_i = k_i / N` and entropy `H = -Σ p_i log_a p_i`. The entropy payload is
//! `H / n` for `n` clusters; the self entropy payload of one cluster is
//! `-p log_a p`. Every function takes the logarithm base explicitly.

use std::fmt;

use crate::error::{Error, Result};

/// Logarithm base used for every entropy computation. Always `> 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBase(f64);

impl LogBase {
    pub const TWO: LogBase = LogBase(2.0);
    pub const E: LogBase = LogBase(std::f64::consts::E);

    pub fn new(base: f64) -> Result<Self> {
        if base.is_finite() && base > 1.0 {
            Ok(LogBase(base))
        } else {
            Err(Error::InvalidLogBase(base))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `log_base(x)`.
    #[inline]
    pub fn log(self, x: f64) -> f64 {
        if self.0 == 2.0 {
            x.log2()
        } else if self.0 == std::f64::consts::E {
            x.ln()
        } else {
            x.ln() / self.0.ln()
        }
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::TWO
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == std::f64::consts::E {
            f.write_str("e")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Cluster sizes of a partition, validated on construction.
///
/// Every size is at least 1, the list is non-empty, and the sizes sum to the
/// total number of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSizes {
    sizes: Vec<usize>,
    total: usize,
}

impl ClusterSizes {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        let total = sizes.iter().sum();
        Self::with_total(sizes, total)
    }

    pub fn with_total(sizes: Vec<usize>, total: usize) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidClusterSizes("no clusters".into()));
        }
        if let Some(pos) = sizes.iter().position(|&k| k == 0) {
            return Err(Error::InvalidClusterSizes(format!(
                "cluster {pos} has zero members"
            )));
        }
        let sum: usize = sizes.iter().sum();
        if sum != total {
            return Err(Error::InvalidClusterSizes(format!(
                "sizes sum to {sum} but total is {total}"
            )));
        }
        Ok(ClusterSizes { sizes, total })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of clusters.
    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Information entropy `-Σ p_i log_base p_i` of the partition.
pub fn entropy(sizes: &ClusterSizes, base: LogBase) -> f64 {
    entropy_of_counts(sizes.sizes.iter().copied(), sizes.total, base)
}

/// Sums the entropy terms in iteration order. Callers that must agree
/// bit-for-bit with [`entropy`] feed sizes in the same order.
pub(crate) fn entropy_of_counts(
    counts: impl IntoIterator<Item = usize>,
    total: usize,
    base: LogBase,
) -> f64 {
    let total = total as f64;
    counts
        .into_iter()
        .fold(0.0, |acc, k| acc + proportion_term(k as f64 / total, base))
}

/// Average entropy per cluster: `entropy / n`.
pub fn entropy_payload(sizes: &ClusterSizes, base: LogBase) -> f64 {
    entropy(sizes, base) / sizes.len() as f64
}

/// Entropy payload carried by a single cluster of `k` out of `total` points.
pub fn self_entropy_payload(k: usize, total: usize, base: LogBase) -> Result<f64> {
    if k == 0 || k > total {
        return Err(Error::OutOfDomain(format!(
            "cluster size {k} must lie in 1..={total}"
        )));
    }
    Ok(proportion_term(k as f64 / total as f64, base))
}

/// Entropy payload of a dataset split into `n` equal clusters, `log_base(n) / n`.
pub fn equal_partition_ep(n: f64, base: LogBase) -> Result<f64> {
    if !n.is_finite() || n < 1.0 {
        return Err(Error::OutOfDomain(format!(
            "cluster count {n} must be a finite real >= 1"
        )));
    }
    Ok(base.log(n) / n)
}

/// Self entropy payload as a function of the proportion `p`, `-p log_base p`.
pub fn sep_curve(p: f64, base: LogBase) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::OutOfDomain(format!(
            "proportion {p} must lie in (0, 1]"
        )));
    }
    Ok(proportion_term(p, base))
}

#[inline]
fn proportion_term(p: f64, base: LogBase) -> f64 {
    if p == 1.0 {
        0.0
    } else {
        -p * base.log(p)
    }
}

/// Closed-form maxima of the equal-partition and self entropy payload curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticMaxima {
    pub ep_argmax: f64,
    pub ep_max: f64,
    pub sep_argmax: f64,
    pub sep_max: f64,
}

/// Both curves peak at the same height `log_base(e) / e`, at `n = e` and
/// `p = 1/e` respectively, whatever the base.
pub fn analytic_maxima(base: LogBase) -> AnalyticMaxima {
    let e = std::f64::consts::E;
    let peak = base.log(e) / e;
    AnalyticMaxima {
        ep_argmax: e,
        ep_max: peak,
        sep_argmax: 1.0 / e,
        sep_max: peak,
    }
}
