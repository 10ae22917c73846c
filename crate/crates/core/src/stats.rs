//! Paired nonparametric statistics: the exact two-sided Wilcoxon signed-rank
//! test, Bonferroni correction and type-7 sample quartiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of non-zero differences the exact null distribution is
/// built for.
pub const MAX_EXACT_N: usize = 64;

/// Per-unit values of one quantity under two conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    pub units: Vec<String>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl PairedSample {
    pub fn new(units: Vec<String>, first: Vec<f64>, second: Vec<f64>) -> Result<Self> {
        if units.is_empty() || units.len() != first.len() || units.len() != second.len() {
            return Err(Error::InvalidArgument(
                "paired sample needs the same non-zero number of units in both conditions".into(),
            ));
        }
        Ok(PairedSample {
            units,
            first,
            second,
        })
    }

    /// `second - first` per unit.
    pub fn differences(&self) -> Vec<f64> {
        self.first
            .iter()
            .zip(&self.second)
            .map(|(a, b)| b - a)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Differences left after dropping exact zeros.
    pub n: usize,
    pub zeros_dropped: usize,
    /// Whether any absolute differences were tied (mid-ranks used).
    pub ties: bool,
    /// Sum of the ranks of the positive differences.
    pub w_plus: f64,
    pub p_value: f64,
}

/// Twice the mid-rank of each `|d|`, so tied ranks stay integral.
fn doubled_ranks(abs: &[f64]) -> (Vec<u64>, bool) {
    let n = abs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| abs[i].total_cmp(&abs[j]));
    let mut ranks = vec![0; n];
    let mut ties = false;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && abs[order[end]] == abs[order[start]] {
            end += 1;
        }
        ties |= end - start > 1;
        // positions start+1 ..= end, mid-rank doubled = start + 1 + end
        let r = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    (ranks, ties)
}

/// Exact two-sided signed-rank test of zero median.
///
/// Zeros are dropped, tied magnitudes get mid-ranks, and the p-value is the
/// share of all `2^n` sign assignments whose rank sum lies at least as far
/// from its null mean as the observed one. The count is built by dynamic
/// programming over attainable rank sums, which tallies the same `2^n`
/// assignments without listing them.
pub fn wilcoxon_exact(diffs: &[f64]) -> Result<WilcoxonResult> {
    if let Some(&value) = diffs.iter().find(|d| !d.is_finite()) {
        return Err(Error::NonFinite {
            field: "difference",
            value,
        });
    }
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return Err(Error::NoTestPossible);
    }
    if n > MAX_EXACT_N {
        return Err(Error::TooManyForEnumeration { n, max: MAX_EXACT_N });
    }
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = doubled_ranks(&abs);
    let total: u64 = ranks.iter().sum();
    let observed: u64 = ranks
        .iter()
        .zip(&nonzero)
        .filter(|(_, &d)| d > 0.0)
        .map(|(r, _)| r)
        .sum();

    // counts[s] = number of sign assignments with doubled positive-rank sum s.
    let mut counts = vec![0u128; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in &ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            let c = counts[s];
            if c > 0 {
                counts[s + r] += c;
            }
        }
        reach += r;
    }
    // |2 s - total| measures distance from the null mean (scaled by 2).
    let dist = |s: u64| (2 * s).abs_diff(total);
    let threshold = dist(observed);
    let extreme: u128 = counts
        .iter()
        .enumerate()
        .filter(|&(s, _)| dist(s as u64) >= threshold)
        .map(|(_, &c)| c)
        .sum();
    let p_value = (extreme as f64 / 2f64.powi(n as i32)).min(1.0);
    Ok(WilcoxonResult {
        n,
        zeros_dropped: diffs.len() - n,
        ties,
        w_plus: observed as f64 / 2.0,
        p_value,
    })
}

/// `min(m p, 1)`.
pub fn bonferroni(p: f64, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p-value {p} outside [0, 1]")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("family size must be at least 1".into()));
    }
    Ok((p * m as f64).min(1.0))
}

/// Type-7 sample quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub lower: f64,
    pub median: f64,
    pub upper: f64,
}

/// Lower quartile, median and upper quartile by linear interpolation of the
/// order statistics.
pub fn median_quartiles(values: &[f64]) -> Result<Quartiles> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no values to summarize"));
    }
    if let Some(&value) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            field: "sample value",
            value,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Quartiles {
        lower: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        upper: quantile_sorted(&sorted, 0.75),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_positive_five() {
        let r = wilcoxon_exact(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(r.p_value, 2.0 / 32.0);
        assert_eq!(r.w_plus, 15.0);
    }

    #[test]
    fn single_difference() {
        assert_eq!(wilcoxon_exact(&[-0.3]).unwrap().p_value, 1.0);
    }

    #[test]
    fn zeros_dropped_and_all_zero_rejected() {
        let r = wilcoxon_exact(&[0.0, 1.0, 2.0, 0.0]).unwrap();
        assert_eq!((r.n, r.zeros_dropped), (2, 2));
        assert!(matches!(wilcoxon_exact(&[0.0, 0.0]), Err(Error::NoTestPossible)));
    }

    #[test]
    fn ties_use_mid_ranks() {
        let r = wilcoxon_exact(&[1.0, -1.0, 2.0]).unwrap();
        assert!(r.ties);
        assert_eq!(r.w_plus, 1.5 + 3.0);
    }

    #[test]
    fn bonferroni_values() {
        assert!((bonferroni(0.0001, 3).unwrap() - 0.0003).abs() < 1e-18);
        assert_eq!(bonferroni(0.5, 3).unwrap(), 1.0);
        assert_eq!(bonferroni(0.037, 1).unwrap(), 0.037);
        assert!(bonferroni(1.2, 2).is_err());
        assert!(bonferroni(0.1, 0).is_err());
    }

    #[test]
    fn quartiles() {
        let q = median_quartiles(&[5.0, 1.0, 4.0, 2.0, 3.0]).unwrap();
        assert_eq!((q.lower, q.median, q.upper), (2.0, 3.0, 4.0));
        let q = median_quartiles(&[1.0]).unwrap();
        assert_eq!((q.lower, q.median, q.upper), (1.0, 1.0, 1.0));
        let q = median_quartiles(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((q.lower, q.median, q.upper), (1.75, 2.5, 3.25));
        assert!(median_quartiles(&[]).is_err());
    }

    #[test]
    fn paired_differences() {
        let s = PairedSample::new(vec!["a".into(), "b".into()], vec![1.0, 2.0], vec![1.5, 1.0]).unwrap();
        assert_eq!(s.differences(), vec![0.5, -1.0]);
        assert!(PairedSample::new(vec!["a".into()], vec![], vec![1.0]).is_err());
    }
}
