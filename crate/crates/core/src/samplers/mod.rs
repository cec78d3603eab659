//! Point-cloud generation on implicit, parametric and triangulated surfaces.

mod cloud;
mod implicit;
mod triangle;

pub use cloud::{
    cloud_axis_aligned, cloud_implicit, cloud_lines, cloud_parametric, cloud_parametric_with,
    cloud_triangulated, Cloud, CloudPoint, LineKind, Provenance, DEFAULT_LINE_BUDGET,
};
pub use implicit::{
    intersect_line_implicit, ImplicitIntersector, ImplicitSamplerConfig, RootMethod,
};
pub use triangle::{intersect_line_triangle, MeshIntersector, EDGE_DEDUP_TOL};

use crate::error::{Error, Result};
use crate::geometry::OrientedLine;
use crate::surfaces::Surface;
use crate::vector::Vec3;

/// One crossing of a line with a surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
    /// Unit surface normal at the hit, when one is defined.
    pub normal: Option<Vec3>,
    /// Index of the triangle hit, for meshes.
    pub triangle: Option<usize>,
}

/// Anything a line can be intersected with. Hits are returned sorted by `t`.
pub trait LineIntersector {
    fn intersect(&self, line: &OrientedLine) -> Result<Vec<Hit>>;
}

impl<T: LineIntersector + ?Sized> LineIntersector for &T {
    fn intersect(&self, line: &OrientedLine) -> Result<Vec<Hit>> {
        (**self).intersect(line)
    }
}

impl<T: LineIntersector + ?Sized> LineIntersector for Box<T> {
    fn intersect(&self, line: &OrientedLine) -> Result<Vec<Hit>> {
        (**self).intersect(line)
    }
}

/// Line intersector for any surface. Parametric surfaces are intersected
/// through their grid triangulation.
pub fn intersector_for(
    surface: &Surface,
    cfg: ImplicitSamplerConfig,
) -> Result<Box<dyn LineIntersector + Send + Sync>> {
    Ok(match surface {
        Surface::Implicit(s) => Box::new(ImplicitIntersector::new(s.clone(), cfg)?),
        Surface::Parametric(p) => Box::new(MeshIntersector::new(p.triangulate()?.mesh)),
        Surface::Triangulated(m) => Box::new(MeshIntersector::new(m.clone())),
    })
}

/// Smallest `j` with `x < cumulative[j]`, found by bisection.
///
/// `cumulative` must be nondecreasing with a positive last entry. `x` is
/// clamped to `last·(1 − 2⁻⁵²)` so that rounding in `total·ξ` cannot push it
/// onto the excluded upper bound; values outside `[0, last]` are errors.
pub fn find_interval(cumulative: &[f64], x: f64) -> Result<usize> {
    let last = *cumulative.last().ok_or(Error::ZeroArea)?;
    if !(x >= 0.0 && x <= last) || !(last > 0.0) {
        return Err(Error::OutOfRange { x, last });
    }
    let x = x.min(last * (1.0 - f64::EPSILON));
    let (mut lo, mut hi) = (0usize, cumulative.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if x < cumulative[mid] {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}
