//! Monte Carlo estimates of area and surface integrals from line crossings.
//!
//! For lines drawn from the normalized kinematic measure on lines meeting the
//! ball of radius `r` in `R^3`,
//!
//! ```text
//! ∫_Σ f dA = C · E[ Σ_{p ∈ ℓ∩Σ} f(p) ],   C = kinematic_mass(3, r) / (2κ₂) = 2πr²
//! ```
//!
//! and area is the case `f ≡ 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{kinematic_mass, sample_line};
use crate::rng::{unit_ball_volume, ScalarSource};
use crate::samplers::{Hit, LineIntersector};
use crate::vector::Vec3;

/// Hits this close to the clip sphere (relative) trigger a truncation warning.
pub const EDGE_WARNING_REL: f64 = 1e-9;

pub const TRUNCATION_WARNING: &str = "clip radius may truncate surface";

/// `kinematic_mass(n, r) / (2κ_{n−1})`.
pub fn crofton_constant(n: usize, r: f64) -> Result<f64> {
    Ok(kinematic_mass(n, r)? / (2.0 * unit_ball_volume(n as i32 - 1)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CroftonEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub lines_used: u64,
    /// Independent samples of the line statistic (lines, or line pairs).
    pub samples: u64,
    /// Factor turning the mean statistic into the estimate.
    pub normalization: f64,
    pub mean: f64,
    /// Unbiased sample variance of the line statistic.
    pub variance: f64,
    /// Lines by number of crossings.
    pub histogram: BTreeMap<usize, u64>,
    pub warnings: Vec<String>,
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

impl CroftonEstimate {
    fn from_parts(
        moments: Moments,
        normalization: f64,
        lines_used: u64,
        histogram: BTreeMap<usize, u64>,
        warnings: Vec<String>,
    ) -> Self {
        let variance = moments.variance();
        let se = if moments.n == 0 {
            0.0
        } else {
            normalization * (variance / moments.n as f64).sqrt()
        };
        CroftonEstimate {
            value: normalization * moments.mean,
            standard_error: se,
            lines_used,
            samples: moments.n,
            normalization,
            mean: moments.mean,
            variance,
            histogram,
            warnings,
        }
    }

    /// Mean crossings per line, from the histogram.
    pub fn mean_hits(&self) -> f64 {
        let total: u64 = self.histogram.values().sum();
        if total == 0 {
            return 0.0;
        }
        let s: u64 = self.histogram.iter().map(|(&k, &c)| k as u64 * c).sum();
        s as f64 / total as f64
    }

    /// Pools estimates computed from independent streams with the same
    /// normalization, in the given order.
    pub fn merge(parts: &[CroftonEstimate]) -> Result<CroftonEstimate> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("nothing to merge".into()))?;
        let mut acc = Moments::default();
        let mut lines = 0;
        let mut hist = BTreeMap::new();
        let mut warnings: Vec<String> = Vec::new();
        for p in parts {
            if p.normalization != first.normalization {
                return Err(Error::InvalidArgument(
                    "estimates use different normalizations".into(),
                ));
            }
            let b = Moments {
                n: p.samples,
                mean: p.mean,
                m2: p.variance * p.samples.saturating_sub(1) as f64,
            };
            let n = acc.n + b.n;
            if n > 0 {
                let d = b.mean - acc.mean;
                let mean = acc.mean + d * b.n as f64 / n as f64;
                let m2 = acc.m2 + b.m2 + d * d * acc.n as f64 * b.n as f64 / n as f64;
                acc = Moments { n, mean, m2 };
            }
            lines += p.lines_used;
            for (&k, &c) in &p.histogram {
                *hist.entry(k).or_insert(0) += c;
            }
            for w in &p.warnings {
                if !warnings.contains(w) {
                    warnings.push(w.clone());
                }
            }
        }
        Ok(CroftonEstimate::from_parts(
            acc,
            first.normalization,
            lines,
            hist,
            warnings,
        ))
    }
}

fn check_lines(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one line".into()));
    }
    Ok(())
}

fn near_clip(hits: &[Hit], r: f64) -> bool {
    hits.iter()
        .any(|h| h.point.norm() >= r * (1.0 - EDGE_WARNING_REL))
}

/// Estimates `∫_Σ f dA` from `m` kinematic lines meeting the ball of radius
/// `r`, which must contain the surface.
pub fn estimate_surface_integral<I, F>(
    surface: &I,
    f: F,
    src: &mut ScalarSource,
    m: u64,
    r: f64,
) -> Result<CroftonEstimate>
where
    I: LineIntersector + ?Sized,
    F: Fn(Vec3) -> f64,
{
    check_lines(m)?;
    let c = crofton_constant(3, r)?;
    let mut moments = Moments::default();
    let mut hist = BTreeMap::new();
    let mut truncated = false;
    for _ in 0..m {
        let line = sample_line(src, r)?;
        let hits = surface.intersect(&line)?;
        truncated |= near_clip(&hits, r);
        *hist.entry(hits.len()).or_insert(0) += 1;
        moments.push(hits.iter().map(|h| f(h.point)).sum());
    }
    let warnings = if truncated {
        vec![TRUNCATION_WARNING.to_string()]
    } else {
        Vec::new()
    };
    Ok(CroftonEstimate::from_parts(moments, c, m, hist, warnings))
}

/// Area estimate: the surface integral of `f ≡ 1`.
pub fn estimate_area<I>(
    surface: &I,
    src: &mut ScalarSource,
    m: u64,
    r: f64,
) -> Result<CroftonEstimate>
where
    I: LineIntersector + ?Sized,
{
    estimate_surface_integral(surface, |_| 1.0, src, m, r)
}

/// Estimates `∫_Σ ∫_Σ f(x, y) dA(x) dA(y)` from `m` pairs of independent
/// lines. Each pair contributes `Σ_{p ∈ ℓ₁∩Σ} Σ_{q ∈ ℓ₂∩Σ} f(p, q)`; the
/// histogram covers all `2m` lines.
pub fn estimate_double_integral<I, F>(
    surface: &I,
    f: F,
    src: &mut ScalarSource,
    m: u64,
    r: f64,
) -> Result<CroftonEstimate>
where
    I: LineIntersector + ?Sized,
    F: Fn(Vec3, Vec3) -> f64,
{
    check_lines(m)?;
    let c = crofton_constant(3, r)?;
    let mut moments = Moments::default();
    let mut hist = BTreeMap::new();
    let mut truncated = false;
    for _ in 0..m {
        let l1 = sample_line(src, r)?;
        let l2 = sample_line(src, r)?;
        let h1 = surface.intersect(&l1)?;
        let h2 = surface.intersect(&l2)?;
        truncated |= near_clip(&h1, r) || near_clip(&h2, r);
        *hist.entry(h1.len()).or_insert(0) += 1;
        *hist.entry(h2.len()).or_insert(0) += 1;
        let mut s = 0.0;
        for p in &h1 {
            for q in &h2 {
                s += f(p.point, q.point);
            }
        }
        moments.push(s);
    }
    let warnings = if truncated {
        vec![TRUNCATION_WARNING.to_string()]
    } else {
        Vec::new()
    };
    Ok(CroftonEstimate::from_parts(
        moments,
        c * c,
        2 * m,
        hist,
        warnings,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{ImplicitIntersector, ImplicitSamplerConfig, MeshIntersector};
    use crate::surfaces::{catalog, ImplicitSurface};
    use std::f64::consts::PI;

    fn sphere() -> ImplicitIntersector {
        ImplicitIntersector::new(
            catalog::sphere_implicit(1.0, 2.0),
            ImplicitSamplerConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn constant_is_two_pi_r_squared() {
        for r in [0.5, 1.0, 2.0, 3.0] {
            assert!((crofton_constant(3, r).unwrap() - 2.0 * PI * r * r).abs() < 1e-12 * r * r);
        }
    }

    #[test]
    fn projection_jacobian_integrates_to_two_kappa() {
        // ∫_{S²} |⟨v, e3⟩| dσ(v) = ∫_0^π |cos θ| 2π sin θ dθ = 2π = 2κ₂.
        let k = 200_000;
        let h = PI / k as f64;
        let s: f64 = (0..k)
            .map(|i| {
                let th = (i as f64 + 0.5) * h;
                th.cos().abs() * 2.0 * PI * th.sin() * h
            })
            .sum();
        assert!((s - 2.0 * unit_ball_volume(2).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn sphere_area() {
        let e = estimate_area(&sphere(), &mut ScalarSource::pseudo(1), 200_000, 2.0).unwrap();
        assert!((e.value - 4.0 * PI).abs() < 3.0 * e.standard_error, "{e:?}");
        assert!(e.warnings.is_empty());
        let k: u64 = e.histogram.values().sum();
        assert_eq!(k, e.lines_used);
        assert!((e.mean_hits() - e.mean).abs() < 1e-12);
        assert!(e.histogram.keys().all(|&k| k == 0 || k == 2));
    }

    #[test]
    fn area_is_integral_of_one_bit_for_bit() {
        let a = estimate_area(&sphere(), &mut ScalarSource::pseudo(3), 5000, 2.0).unwrap();
        let b =
            estimate_surface_integral(&sphere(), |_| 1.0, &mut ScalarSource::pseudo(3), 5000, 2.0)
                .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn sphere_moments() {
        let s = sphere();
        let e = estimate_surface_integral(
            &s,
            |p| p.z * p.z,
            &mut ScalarSource::pseudo(5),
            200_000,
            2.0,
        )
        .unwrap();
        assert!((e.value - 4.0 * PI / 3.0).abs() < 3.0 * e.standard_error);
        let e = estimate_surface_integral(&s, |p| p.z, &mut ScalarSource::pseudo(6), 200_000, 2.0)
            .unwrap();
        assert!(e.value.abs() < 3.0 * e.standard_error);
    }

    #[test]
    fn double_integrals() {
        let s = sphere();
        let e =
            estimate_double_integral(&s, |_, _| 1.0, &mut ScalarSource::pseudo(7), 100_000, 2.0)
                .unwrap();
        assert!(
            (e.value - 16.0 * PI * PI).abs() < 3.0 * e.standard_error,
            "{e:?}"
        );
        assert_eq!(e.lines_used, 200_000);
        let e = estimate_double_integral(
            &s,
            |x, y| x.dot(y),
            &mut ScalarSource::pseudo(8),
            100_000,
            2.0,
        )
        .unwrap();
        assert!(e.value.abs() < 3.0 * e.standard_error);
    }

    #[test]
    fn flat_patch_area() {
        let m = MeshIntersector::new(catalog::plane_patch_mesh());
        let e = estimate_area(&m, &mut ScalarSource::pseudo(9), 200_000, 2.0).unwrap();
        assert!((e.value - 1.0).abs() < 3.0 * e.standard_error, "{e:?}");
    }

    #[test]
    fn empty_surface_gives_zero() {
        let s = ImplicitIntersector::new(
            ImplicitSurface::new(|_| 1.0, 1.0).unwrap(),
            ImplicitSamplerConfig {
                scan_steps: 4,
                ..Default::default()
            },
        )
        .unwrap();
        let e = estimate_area(&s, &mut ScalarSource::pseudo(0), 1000, 1.0).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.standard_error, 0.0);
        assert_eq!(e.histogram.len(), 1);
        assert_eq!(e.histogram[&0], 1000);
    }

    #[test]
    fn small_radius_warns() {
        let s = ImplicitIntersector::new(
            catalog::plane_implicit(1.0),
            ImplicitSamplerConfig::default(),
        )
        .unwrap();
        let e = estimate_area(&s, &mut ScalarSource::pseudo(0), 1000, 1.0).unwrap();
        assert!(e.warnings.is_empty());
        let s = ImplicitIntersector::new(
            catalog::sphere_implicit(1.0, 1.0),
            ImplicitSamplerConfig::default(),
        )
        .unwrap();
        let e = estimate_area(&s, &mut ScalarSource::pseudo(0), 20_000, 1.0).unwrap();
        assert_eq!(e.warnings, vec![TRUNCATION_WARNING.to_string()]);
    }

    #[test]
    fn merge_matches_single_pass() {
        let s = sphere();
        let mut src = ScalarSource::pseudo(12);
        let a = estimate_area(&s, &mut src, 3000, 2.0).unwrap();
        let b = estimate_area(&s, &mut src, 5000, 2.0).unwrap();
        let whole = estimate_area(&s, &mut ScalarSource::pseudo(12), 8000, 2.0).unwrap();
        let merged = CroftonEstimate::merge(&[a, b]).unwrap();
        assert_eq!(merged.histogram, whole.histogram);
        assert!((merged.value - whole.value).abs() < 1e-12);
        assert!((merged.standard_error - whole.standard_error).abs() < 1e-12);
    }
}
