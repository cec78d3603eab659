use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::ScalarSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BenchMethod {
    MonteCarlo,
    Midpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: BenchMethod,
    /// Budget the row was computed for.
    pub budget: u64,
    /// Function evaluations actually used.
    pub evaluations: u64,
    /// Root-mean-square error over seeds (Monte Carlo) or absolute error.
    pub error: f64,
    /// Mean signed error over seeds (Monte Carlo) or the signed error.
    pub bias: f64,
    pub seeds: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub dim: usize,
    pub truth: f64,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log RMS error against log N for Monte Carlo
    /// rows with nonzero error; `None` if fewer than two such rows.
    pub mc_slope: Option<f64>,
}

/// Mean of `f` over `n` pseudo-random points of `[0,1]^dim`.
pub fn monte_carlo_mean<F: Fn(&[f64]) -> f64>(
    f: &F,
    dim: usize,
    n: u64,
    src: &mut ScalarSource,
) -> f64 {
    let mut x = vec![0.0; dim];
    let mut sum = 0.0;
    for _ in 0..n {
        src.fill(&mut x);
        sum += f(&x);
    }
    sum / n as f64
}

/// Midpoint rule on the `k^dim` grid of `[0,1]^dim`.
pub fn midpoint_rule<F: Fn(&[f64]) -> f64>(f: &F, dim: usize, k: usize) -> f64 {
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let total = k.pow(dim as u32);
    let mut sum = 0.0;
    for _ in 0..total {
        for (xi, &i) in x.iter_mut().zip(&idx) {
            *xi = (i as f64 + 0.5) / k as f64;
        }
        sum += f(&x);
        for d in idx.iter_mut() {
            *d += 1;
            if *d < k {
                break;
            }
            *d = 0;
        }
    }
    sum / total as f64
}

/// Largest `k` with `k^dim ≤ budget`.
fn grid_side(budget: u64, dim: usize) -> usize {
    let mut k = (budget as f64).powf(1.0 / dim as f64).round() as u64 + 1;
    while k > 0 && k.checked_pow(dim as u32).is_none_or(|v| v > budget) {
        k -= 1;
    }
    k as usize
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Tabulates the error of Monte Carlo (over `seeds` independent streams) and
/// of the midpoint rule on the largest grid within each budget.
pub fn curse_benchmark<F: Fn(&[f64]) -> f64>(
    f: F,
    dim: usize,
    truth: f64,
    budgets: &[u64],
    seeds: u32,
    base_seed: u64,
) -> Result<BenchTable> {
    if dim == 0 || seeds == 0 {
        return Err(Error::InvalidArgument(
            "need dim >= 1 and seeds >= 1".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut fit = Vec::new();
    for &budget in budgets {
        if budget == 0 {
            return Err(Error::InvalidArgument("budgets must be positive".into()));
        }
        let (mut sq, mut signed) = (0.0, 0.0);
        for s in 0..seeds {
            let seed = base_seed
                .wrapping_add((s as u64) << 32)
                .wrapping_add(budget);
            let e = monte_carlo_mean(&f, dim, budget, &mut ScalarSource::pseudo(seed)) - truth;
            sq += e * e;
            signed += e;
        }
        let rms = (sq / seeds as f64).sqrt();
        if rms > 0.0 {
            fit.push(((budget as f64).ln(), rms.ln()));
        }
        rows.push(BenchRow {
            method: BenchMethod::MonteCarlo,
            budget,
            evaluations: budget,
            error: rms,
            bias: signed / seeds as f64,
            seeds,
        });

        let k = grid_side(budget, dim);
        if k >= 1 {
            let e = midpoint_rule(&f, dim, k) - truth;
            rows.push(BenchRow {
                method: BenchMethod::Midpoint,
                budget,
                evaluations: (k as u64).pow(dim as u32),
                error: e.abs(),
                bias: e,
                seeds: 1,
            });
        }
    }
    Ok(BenchTable {
        dim,
        truth,
        rows,
        mc_slope: slope(&fit),
    })
}

impl BenchTable {
    pub fn to_text(&self) -> String {
        let mut s = format!("dim {}  truth {}\n", self.dim, self.truth);
        s.push_str(&format!(
            "{:<12} {:>10} {:>12} {:>14}\n",
            "method", "budget", "evaluations", "error"
        ));
        for r in &self.rows {
            let m = match r.method {
                BenchMethod::MonteCarlo => "monte-carlo",
                BenchMethod::Midpoint => "midpoint",
            };
            s.push_str(&format!(
                "{:<12} {:>10} {:>12} {:>14.6e}\n",
                m, r.budget, r.evaluations, r.error
            ));
        }
        if let Some(sl) = self.mc_slope {
            s.push_str(&format!("monte-carlo log-error slope {sl:.4}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos_product(x: &[f64]) -> f64 {
        x.iter().map(|v| v.cos()).product()
    }

    #[test]
    fn grid_side_is_exact() {
        assert_eq!(grid_side(4096, 6), 4);
        assert_eq!(grid_side(4095, 6), 3);
        assert_eq!(grid_side(1_000_000, 6), 10);
        assert_eq!(grid_side(100, 2), 10);
        assert_eq!(grid_side(1, 3), 1);
    }

    #[test]
    fn midpoint_error_quarters_when_grid_doubles() {
        let truth = 1f64.sin().powi(6);
        let e4 = (midpoint_rule(&cos_product, 6, 4) - truth).abs();
        let e8 = (midpoint_rule(&cos_product, 6, 8) - truth).abs();
        let ratio = e4 / e8;
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn constant_integrand_is_exact() {
        let t = curse_benchmark(|_| 2.5, 3, 2.5, &[10, 1000], 4, 0).unwrap();
        assert!(t.rows.iter().all(|r| r.error == 0.0));
        assert_eq!(t.mc_slope, None);
    }

    #[test]
    fn monte_carlo_slope_small() {
        let truth = 1f64.sin().powi(6);
        let t = curse_benchmark(cos_product, 6, truth, &[100, 1000, 10_000], 16, 1).unwrap();
        let s = t.mc_slope.unwrap();
        assert!((s + 0.5).abs() < 0.15, "{s}");
        assert!(t.to_text().contains("slope"));
    }
}
