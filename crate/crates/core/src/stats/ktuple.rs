use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Largest number of cells `g^k` a k-tuple test may allocate.
pub const KTUPLE_CELL_LIMIT: u64 = 1_000_000;

/// Chi-square quantile used as the pass threshold.
pub const KTUPLE_CONFIDENCE: f64 = 0.999;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KTupleReport {
    pub k: usize,
    pub g: usize,
    pub windows: u64,
    pub chi_square: f64,
    pub degrees_of_freedom: u64,
    pub threshold: f64,
    pub pass: bool,
}

/// Chi-square test of the overlapping windows `(x_n, …, x_{n+k−1})` over
/// the `g^k` equal boxes of `[0,1)^k`.
pub fn ktuple_test(xs: &[f64], k: usize, g: usize) -> Result<KTupleReport> {
    if k == 0 || g < 2 {
        return Err(Error::InvalidArgument(format!(
            "need k >= 1 and g >= 2, got k={k}, g={g}"
        )));
    }
    let cells = (g as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
    if cells > KTUPLE_CELL_LIMIT {
        return Err(Error::BudgetExceeded {
            cells,
            limit: KTUPLE_CELL_LIMIT,
        });
    }
    if xs.len() < k {
        return Err(Error::TooFewPoints {
            needed: k,
            have: xs.len(),
        });
    }
    let mut bins = Vec::with_capacity(xs.len());
    for &x in xs {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!("value {x} outside [0, 1)")));
        }
        bins.push(((x * g as f64) as usize).min(g - 1) as u64);
    }
    let mut counts = vec![0u64; cells as usize];
    let windows = bins.len() - k + 1;
    for w in bins.windows(k) {
        let cell = w.iter().fold(0u64, |acc, &b| acc * g as u64 + b);
        counts[cell as usize] += 1;
    }
    let expected = windows as f64 / cells as f64;
    let chi_square: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let df = cells - 1;
    let threshold = ChiSquared::new(df as f64)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .inverse_cdf(KTUPLE_CONFIDENCE);
    Ok(KTupleReport {
        k,
        g,
        windows: windows as u64,
        chi_square,
        degrees_of_freedom: df,
        threshold,
        pass: chi_square < threshold,
    })
}

/// Replaces each value by `(rank + 1/2) / N` (ties broken by position), so a
/// feature of any continuous law becomes uniform on `[0, 1)` while keeping
/// the sequential dependence structure.
pub fn rank_uniformize(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let n = values.len() as f64;
    let mut out = vec![0.0; values.len()];
    for (rank, &i) in idx.iter().enumerate() {
        out[i] = (rank as f64 + 0.5) / n;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ScalarSource;

    #[test]
    fn pseudo_pairs_pass() {
        let mut s = ScalarSource::pseudo(2024);
        let xs: Vec<f64> = (0..1_000_000).map(|_| s.next_unit()).collect();
        let r = ktuple_test(&xs, 2, 8).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.degrees_of_freedom, 63);
        assert_eq!(r.windows, 999_999);
    }

    #[test]
    fn duplicated_stream_fails_pairs_only() {
        let mut s = ScalarSource::pseudo(5);
        let mut xs = Vec::new();
        for _ in 0..50_000 {
            let x = s.next_unit();
            xs.push(x);
            xs.push(x);
        }
        assert!(ktuple_test(&xs, 1, 8).unwrap().pass);
        assert!(!ktuple_test(&xs, 2, 8).unwrap().pass);
    }

    #[test]
    fn van_der_corput_single_cells() {
        let mut s = ScalarSource::van_der_corput(2).unwrap();
        let xs: Vec<f64> = (0..1 << 16).map(|_| s.next_unit()).collect();
        let r = ktuple_test(&xs, 1, 16).unwrap();
        assert!(r.pass);
        assert_eq!(r.chi_square, 0.0);
    }

    #[test]
    fn budget_enforced() {
        match ktuple_test(&[0.5; 10], 3, 101) {
            Err(Error::BudgetExceeded {
                cells: 1_030_301, ..
            }) => {}
            other => panic!("{other:?}"),
        }
        assert!(ktuple_test(&[0.5; 10], 2, 1000).is_ok());
    }

    #[test]
    fn ranks() {
        assert_eq!(
            rank_uniformize(&[3.0, 1.0, 2.0, 1.0]),
            vec![0.875, 0.125, 0.625, 0.375]
        );
    }
}
