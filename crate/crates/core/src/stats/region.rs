use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regions pass when `|z| < Z_THRESHOLD`.
pub const Z_THRESHOLD: f64 = 3.0;

/// A test region: membership predicate and its exact measure fraction.
pub struct Region<'a, T: ?Sized> {
    pub name: String,
    pub p: f64,
    pub contains: Box<dyn Fn(&T) -> bool + 'a>,
}

impl<'a, T: ?Sized> Region<'a, T> {
    pub fn new(name: impl Into<String>, p: f64, contains: impl Fn(&T) -> bool + 'a) -> Self {
        Region {
            name: name.into(),
            p,
            contains: Box::new(contains),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionResult {
    pub name: String,
    pub p: f64,
    pub n: u64,
    pub count: u64,
    pub z: f64,
    pub pass: bool,
}

/// Binomial z-score `(count − Np) / √(Np(1−p))`.
pub fn region_z(count: u64, n: u64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateProbability { p });
    }
    let np = n as f64 * p;
    Ok((count as f64 - np) / (np * (1.0 - p)).sqrt())
}

/// Counts how many sequence elements fall in each region and scores them.
pub fn region_test<T>(seq: &[T], regions: &[Region<'_, T>]) -> Result<Vec<RegionResult>> {
    let n = seq.len() as u64;
    regions
        .iter()
        .map(|r| {
            let count = seq.iter().filter(|x| (r.contains)(x)).count() as u64;
            let z = region_z(count, n, r.p)?;
            Ok(RegionResult {
                name: r.name.clone(),
                p: r.p,
                n,
                count,
                z,
                pass: z.abs() < Z_THRESHOLD,
            })
        })
        .collect()
}
