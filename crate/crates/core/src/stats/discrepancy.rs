use crate::error::{Error, Result};

fn check_unit(xs: &[f64]) -> Result<()> {
    for &x in xs {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!("value {x} outside [0, 1)")));
        }
    }
    if xs.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, have: 0 });
    }
    Ok(())
}

/// `sup_t |#{x_i < t}/N − t|` over `t ∈ [0, 1]`, from the sorted sample:
/// `max_i max(i/N − x_(i), x_(i) − (i−1)/N)`.
pub fn star_discrepancy_1d(xs: &[f64]) -> Result<f64> {
    check_unit(xs)?;
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        d = d.max((i + 1) as f64 / n - x).max(x - i as f64 / n);
    }
    Ok(d)
}

/// Quadratic-time reference: evaluates the counting error just below and at
/// every sample value.
pub fn star_discrepancy_brute(xs: &[f64]) -> Result<f64> {
    check_unit(xs)?;
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for &t in xs {
        let below = xs.iter().filter(|&&x| x < t).count();
        let upto = xs.iter().filter(|&&x| x <= t).count();
        d = d.max(t - below as f64 / n).max(upto as f64 / n - t);
    }
    Ok(d)
}
