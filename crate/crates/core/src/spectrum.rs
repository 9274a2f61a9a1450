//! Harmonic/nonharmonic split of a Laplacian spectrum and the eight
//! statistics recorded per filtration snapshot.

use serde::{Deserialize, Serialize};

/// Zero-eigenvalue rule: `λ` counts as zero iff
/// `λ <= abs + rel * max(λ_max, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroTolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for ZeroTolerance {
    fn default() -> Self {
        ZeroTolerance { rel: 1e-8, abs: 1e-12 }
    }
}

impl ZeroTolerance {
    pub fn threshold(&self, lambda_max: f64) -> f64 {
        self.abs + self.rel * lambda_max.max(1.0)
    }
}

/// Statistics of the nonzero eigenvalues, in the fixed feature order
/// `(max, min, mean, median, sum, std, var, count)`. Standard deviation and
/// variance are population (divide by `count`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumStats {
    pub max: f64,
    pub min: f64,
    pub mean: f64,
    pub median: f64,
    pub sum: f64,
    pub std: f64,
    pub var: f64,
    pub count: f64,
}

pub const STAT_NAMES: [&str; 8] = ["max", "min", "mean", "median", "sum", "std", "var", "count"];

impl SpectrumStats {
    /// `values` must be sorted ascending.
    pub fn from_sorted(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return SpectrumStats::default();
        }
        let sum: f64 = values.iter().sum();
        let mean = sum / n as f64;
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let median = if n % 2 == 1 {
            values[n / 2]
        } else {
            0.5 * (values[n / 2 - 1] + values[n / 2])
        };
        SpectrumStats {
            max: values[n - 1],
            min: values[0],
            mean,
            median,
            sum,
            std: var.sqrt(),
            var,
            count: n as f64,
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.max,
            self.min,
            self.mean,
            self.median,
            self.sum,
            self.std,
            self.var,
            self.count,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    /// Multiplicity of the zero eigenvalue (persistent sheaf Betti number).
    pub betti: usize,
    /// Nonzero eigenvalues, ascending.
    pub nonzero_eigs: Vec<f64>,
    pub lambda_min_nonzero: Option<f64>,
    pub stats: SpectrumStats,
    pub zero_tolerance_used: f64,
    /// True when the operator has no rows (no `q`-simplices in `K`).
    pub empty: bool,
}

impl SpectrumSummary {
    pub fn empty(tol: ZeroTolerance) -> Self {
        SpectrumSummary {
            betti: 0,
            nonzero_eigs: Vec::new(),
            lambda_min_nonzero: None,
            stats: SpectrumStats::default(),
            zero_tolerance_used: tol.threshold(0.0),
            empty: true,
        }
    }

    /// Splits a full eigenvalue list into harmonic and nonharmonic parts.
    pub fn from_eigenvalues(eigs: &[f64], tol: ZeroTolerance) -> Self {
        if eigs.is_empty() {
            return Self::empty(tol);
        }
        let mut sorted = eigs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let lambda_max = *sorted.last().unwrap();
        let cut = tol.threshold(lambda_max);
        let split = sorted.partition_point(|&x| x <= cut);
        let nonzero_eigs = sorted.split_off(split);
        SpectrumSummary {
            betti: split,
            lambda_min_nonzero: nonzero_eigs.first().copied(),
            stats: SpectrumStats::from_sorted(&nonzero_eigs),
            nonzero_eigs,
            zero_tolerance_used: cut,
            empty: false,
        }
    }

    pub fn dimension(&self) -> usize {
        self.betti + self.nonzero_eigs.len()
    }
}
