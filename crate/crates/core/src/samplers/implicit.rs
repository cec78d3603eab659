use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::OrientedLine;
use crate::samplers::{Hit, LineIntersector};
use crate::surfaces::ImplicitSurface;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootMethod {
    Bisection,
    /// Regula falsi with the Illinois modification.
    RegulaFalsi,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicitSamplerConfig {
    /// Number of equal subintervals of the chord scanned for sign changes.
    pub scan_steps: usize,
    /// Absolute tolerance on `t` for refined roots.
    pub root_tol: f64,
    pub max_iter: usize,
    pub method: RootMethod,
}

impl Default for ImplicitSamplerConfig {
    fn default() -> Self {
        ImplicitSamplerConfig {
            scan_steps: 256,
            root_tol: 1e-10,
            max_iter: 200,
            method: RootMethod::Bisection,
        }
    }
}

impl ImplicitSamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scan_steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "scan steps must be >= 2, got {}",
                self.scan_steps
            )));
        }
        if !(self.root_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "root tolerance must be positive, got {}",
                self.root_tol
            )));
        }
        Ok(())
    }
}

/// An implicit surface paired with its scan configuration.
#[derive(Clone, Debug)]
pub struct ImplicitIntersector {
    surface: ImplicitSurface,
    cfg: ImplicitSamplerConfig,
}

impl ImplicitIntersector {
    pub fn new(surface: ImplicitSurface, cfg: ImplicitSamplerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(ImplicitIntersector { surface, cfg })
    }

    pub fn surface(&self) -> &ImplicitSurface {
        &self.surface
    }
}

impl LineIntersector for ImplicitIntersector {
    fn intersect(&self, line: &OrientedLine) -> Result<Vec<Hit>> {
        intersect_line_implicit(&self.surface, line, &self.cfg)
    }
}

/// Positive values are one side, zero and negative values the other.
#[inline]
fn side(g: f64) -> bool {
    g > 0.0
}

/// Crossings of `line` with the level set inside the clip ball, sorted by `t`.
///
/// The chord is split into `scan_steps` equal pieces; every piece whose
/// endpoint values lie on opposite sides is refined to `root_tol`. Tangential
/// touches without a sign change are not reported.
pub fn intersect_line_implicit(
    s: &ImplicitSurface,
    line: &OrientedLine,
    cfg: &ImplicitSamplerConfig,
) -> Result<Vec<Hit>> {
    cfg.validate()?;
    let Some((t0, t1)) = line.chord(s.clip_radius()) else {
        return Ok(Vec::new());
    };
    let g = |t: f64| -> Result<f64> {
        let v = s.value(line.at(t));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteField { t })
        }
    };
    let k = cfg.scan_steps;
    let step = (t1 - t0) / k as f64;
    let mut hits = Vec::new();
    let (mut ta, mut ga) = (t0, g(t0)?);
    for i in 1..=k {
        let tb = if i == k { t1 } else { t0 + i as f64 * step };
        let gb = g(tb)?;
        if side(ga) != side(gb) {
            let t = match cfg.method {
                RootMethod::Bisection => bisect(&g, ta, ga, tb, cfg)?,
                RootMethod::RegulaFalsi => regula_falsi(&g, ta, ga, tb, gb, cfg)?,
            };
            let point = line.at(t);
            let normal = s.gradient(point).normalized();
            hits.push(Hit {
                t,
                point,
                normal,
                triangle: None,
            });
        }
        ta = tb;
        ga = gb;
    }
    Ok(hits)
}

fn bisect<G>(g: &G, mut lo: f64, glo: f64, mut hi: f64, cfg: &ImplicitSamplerConfig) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    if glo == 0.0 {
        return Ok(lo);
    }
    let s_lo = side(glo);
    for _ in 0..cfg.max_iter {
        if hi - lo < cfg.root_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if side(gm) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn regula_falsi<G>(
    g: &G,
    mut a: f64,
    mut ga: f64,
    mut b: f64,
    mut gb: f64,
    cfg: &ImplicitSamplerConfig,
) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    if ga == 0.0 {
        return Ok(a);
    }
    // Which endpoint was retained on the previous step (-1 = a, 1 = b).
    let mut kept = 0i8;
    for _ in 0..cfg.max_iter {
        if b - a < cfg.root_tol {
            break;
        }
        let mut c = b - gb * (b - a) / (gb - ga);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let gc = g(c)?;
        if gc == 0.0 {
            return Ok(c);
        }
        if side(gc) == side(ga) {
            a = c;
            ga = gc;
            if kept == 1 {
                gb *= 0.5;
            }
            kept = 1;
        } else {
            b = c;
            gb = gc;
            if kept == -1 {
                ga *= 0.5;
            }
            kept = -1;
        }
    }
    Ok(0.5 * (a + b))
}
