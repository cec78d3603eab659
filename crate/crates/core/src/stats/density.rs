use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::ScalarSource;
use crate::samplers::find_interval;
use crate::vector::Vec3;

pub const DEFAULT_BOOTSTRAP_REPS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub counts: Vec<u64>,
    pub areas: Vec<f64>,
    /// `count / area` for each bin.
    pub densities: Vec<f64>,
    /// Points that fell in no bin.
    pub unbinned: u64,
    pub max_bin: usize,
    pub min_bin: usize,
    /// Largest over smallest bin density.
    pub ratio: f64,
    /// Bootstrap standard error of `ratio`.
    pub ratio_se: f64,
    bootstrap: Vec<Vec<u64>>,
}

impl DensityReport {
    /// Pooled density of bins `num` over pooled density of bins `den`.
    pub fn group_ratio(&self, num: &[usize], den: &[usize]) -> f64 {
        group_ratio(&self.counts, &self.areas, num, den)
    }

    /// Bootstrap standard error of [`DensityReport::group_ratio`].
    pub fn group_ratio_se(&self, num: &[usize], den: &[usize]) -> f64 {
        let vals: Vec<f64> = self
            .bootstrap
            .iter()
            .map(|c| group_ratio(c, &self.areas, num, den))
            .collect();
        std_dev(&vals)
    }
}

fn group_ratio(counts: &[u64], areas: &[f64], num: &[usize], den: &[usize]) -> f64 {
    let pooled = |ix: &[usize]| {
        let c: u64 = ix.iter().map(|&i| counts[i]).sum();
        let a: f64 = ix.iter().map(|&i| areas[i]).sum();
        c as f64 / a
    };
    pooled(num) / pooled(den)
}

fn max_min(counts: &[u64], areas: &[f64]) -> (usize, usize, f64) {
    let d: Vec<f64> = counts
        .iter()
        .zip(areas)
        .map(|(&c, &a)| c as f64 / a)
        .collect();
    let (mut hi, mut lo) = (0, 0);
    for i in 1..d.len() {
        if d[i] > d[hi] {
            hi = i;
        }
        if d[i] < d[lo] {
            lo = i;
        }
    }
    (hi, lo, d[hi] / d[lo])
}

fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Bins points with `classify`, divides counts by the bin areas and reports
/// the spread of local densities. The standard error comes from `reps`
/// bootstrap resamples of the binned points drawn with `seed`.
pub fn density_variation<F>(
    points: &[Vec3],
    classify: F,
    areas: &[f64],
    reps: usize,
    seed: u64,
) -> Result<DensityReport>
where
    F: Fn(Vec3) -> Option<usize>,
{
    if areas.len() < 2 {
        return Err(Error::InvalidArgument("need at least two bins".into()));
    }
    if let Some(a) = areas.iter().find(|a| !(**a > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "bin area {a} must be positive"
        )));
    }
    let mut counts = vec![0u64; areas.len()];
    let mut unbinned = 0;
    for &p in points {
        match classify(p) {
            Some(b) if b < areas.len() => counts[b] += 1,
            _ => unbinned += 1,
        }
    }
    if let Some(bin) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyBin { bin });
    }
    let (max_bin, min_bin, ratio) = max_min(&counts, areas);

    // Resampling binned points with replacement only changes the bin counts.
    let binned: u64 = counts.iter().sum();
    let mut cum = Vec::with_capacity(counts.len());
    let mut acc = 0.0;
    for &c in &counts {
        acc += c as f64;
        cum.push(acc);
    }
    let mut src = ScalarSource::pseudo(seed);
    let mut bootstrap = Vec::with_capacity(reps);
    let mut ratios = Vec::with_capacity(reps);
    for _ in 0..reps {
        let mut c = vec![0u64; counts.len()];
        for _ in 0..binned {
            c[find_interval(&cum, acc * src.next_unit())?] += 1;
        }
        if c.iter().all(|&x| x > 0) {
            ratios.push(max_min(&c, areas).2);
        }
        bootstrap.push(c);
    }

    Ok(DensityReport {
        densities: counts
            .iter()
            .zip(areas)
            .map(|(&c, &a)| c as f64 / a)
            .collect(),
        counts,
        areas: areas.to_vec(),
        unbinned,
        max_bin,
        min_bin,
        ratio,
        ratio_se: std_dev(&ratios),
        bootstrap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_bins_give_unit_ratio() {
        let mut src = ScalarSource::pseudo(1);
        let pts: Vec<Vec3> = (0..40_000)
            .map(|_| Vec3::new(src.next_unit(), 0.0, 0.0))
            .collect();
        let r =
            density_variation(&pts, |p| Some((p.x * 4.0) as usize), &[0.25; 4], 100, 2).unwrap();
        assert!((r.ratio - 1.0).abs() < 0.1);
        assert!(r.ratio_se > 0.0 && r.ratio_se < 0.05);
        assert!(
            (r.group_ratio(&[0, 1], &[2, 3]) - 1.0).abs()
                < 4.0 * r.group_ratio_se(&[0, 1], &[2, 3])
        );
    }

    #[test]
    fn empty_bin_is_an_error() {
        let pts = vec![Vec3::ZERO; 10];
        match density_variation(&pts, |_| Some(0), &[1.0, 1.0], 10, 0) {
            Err(Error::EmptyBin { bin: 1 }) => {}
            other => panic!("{other:?}"),
        }
    }
}
