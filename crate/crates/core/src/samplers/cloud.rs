use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_axis_line, sample_line, OrientedLine};
use crate::rng::{sample_rejection, BoxDomain, ScalarSource, DEFAULT_REJECTION_CAP};
use crate::samplers::{find_interval, ImplicitIntersector, ImplicitSamplerConfig, LineIntersector};
use crate::surfaces::{
    ImplicitSurface, ParametricSurface, ParametricTriangulation, TriangulatedSurface,
};
use crate::vector::Vec3;

/// Lines drawn without a single hit before giving up on finding the surface.
pub const DEFAULT_LINE_BUDGET: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    /// Crossing number `line` (zero-based) at parameter `t`.
    LineHit {
        line: u64,
        t: f64,
    },
    TriangleHit {
        triangle: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub position: Vec3,
    pub normal: Option<Vec3>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Cloud {
    pub points: Vec<CloudPoint>,
    /// Lines drawn (zero for area-weighted triangle samplers).
    pub lines_used: u64,
    /// Number of crossings contributed by each line, in draw order.
    pub hits_per_line: Vec<u32>,
}

impl Cloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| p.position).collect()
    }

    /// Mean crossings per line, `N_m / m`.
    pub fn mean_hits(&self) -> f64 {
        if self.lines_used == 0 {
            0.0
        } else {
            self.points.len() as f64 / self.lines_used as f64
        }
    }
}

/// How lines are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineKind {
    /// Uniform direction on the sphere, uniform foot in the orthogonal disk.
    Kinematic,
    /// Direction uniform over `±e1, ±e2, ±e3`.
    AxisAligned,
}

impl LineKind {
    pub fn sample(self, src: &mut ScalarSource, r: f64) -> Result<OrientedLine> {
        match self {
            LineKind::Kinematic => sample_line(src, r),
            LineKind::AxisAligned => sample_axis_line(src, r),
        }
    }
}

/// Draws lines meeting the ball of radius `r` and appends their crossings,
/// in order along each line, until at least `target` points exist.
pub fn cloud_lines<I: LineIntersector + ?Sized>(
    surface: &I,
    src: &mut ScalarSource,
    target: usize,
    r: f64,
    kind: LineKind,
    line_budget: u64,
) -> Result<Cloud> {
    if target == 0 {
        return Err(Error::InvalidArgument(
            "target point count must be >= 1".into(),
        ));
    }
    let mut cloud = Cloud::default();
    while cloud.points.len() < target {
        if cloud.points.is_empty() && cloud.lines_used >= line_budget {
            return Err(Error::SurfaceNotFound {
                lines: cloud.lines_used,
            });
        }
        let line = kind.sample(src, r)?;
        let hits = surface.intersect(&line)?;
        let idx = cloud.lines_used;
        cloud.lines_used += 1;
        cloud.hits_per_line.push(hits.len() as u32);
        cloud.points.extend(hits.into_iter().map(|h| CloudPoint {
            position: h.point,
            normal: h.normal,
            provenance: Provenance::LineHit { line: idx, t: h.t },
        }));
    }
    Ok(cloud)
}

/// Kinematic-line cloud on an implicit surface, using its clip radius.
pub fn cloud_implicit(
    s: &ImplicitSurface,
    src: &mut ScalarSource,
    target: usize,
    cfg: &ImplicitSamplerConfig,
) -> Result<Cloud> {
    let isect = ImplicitIntersector::new(s.clone(), *cfg)?;
    cloud_lines(
        &isect,
        src,
        target,
        s.clip_radius(),
        LineKind::Kinematic,
        DEFAULT_LINE_BUDGET,
    )
}

/// Cloud from lines parallel to the coordinate axes. Density on a patch with
/// normal `ν` is proportional to `|ν₁| + |ν₂| + |ν₃|`.
pub fn cloud_axis_aligned<I: LineIntersector + ?Sized>(
    surface: &I,
    src: &mut ScalarSource,
    target: usize,
    r: f64,
) -> Result<Cloud> {
    cloud_lines(
        surface,
        src,
        target,
        r,
        LineKind::AxisAligned,
        DEFAULT_LINE_BUDGET,
    )
}

/// Area-weighted triangle choice followed by a uniform point of the simplex.
fn sample_simplex_point(
    cumulative: &[f64],
    src: &mut ScalarSource,
    unit_square: &BoxDomain,
) -> Result<(usize, f64, f64)> {
    let total = *cumulative.last().ok_or(Error::ZeroArea)?;
    let j = find_interval(cumulative, total * src.next_unit())?;
    let a = sample_rejection(
        src,
        unit_square,
        |p| p[0] + p[1] <= 1.0,
        DEFAULT_REJECTION_CAP,
    )?;
    Ok((j, a.point[0], a.point[1]))
}

/// `target` points drawn uniformly by area over the triangles.
pub fn cloud_triangulated(
    s: &TriangulatedSurface,
    src: &mut ScalarSource,
    target: usize,
) -> Result<Cloud> {
    let square = BoxDomain::new(vec![0.0, 0.0], vec![1.0, 1.0])?;
    let tris = s.triangles();
    let mut points = Vec::with_capacity(target);
    for _ in 0..target {
        let (j, u, v) = sample_simplex_point(s.cumulative_areas(), src, &square)?;
        points.push(CloudPoint {
            position: tris[j].barycentric_unchecked(u, v),
            normal: tris[j].normal(),
            provenance: Provenance::TriangleHit { triangle: j },
        });
    }
    Ok(Cloud {
        points,
        ..Default::default()
    })
}

/// Points on the surface itself: triangles are chosen by the area of their
/// piecewise-linear images, and the simplex point is mapped through Φ from
/// the matching parameter triangle.
pub fn cloud_parametric(
    s: &ParametricSurface,
    src: &mut ScalarSource,
    target: usize,
) -> Result<Cloud> {
    let tri = s.triangulate()?;
    cloud_parametric_with(s, &tri, src, target)
}

/// As [`cloud_parametric`], reusing an existing triangulation of `s`.
pub fn cloud_parametric_with(
    s: &ParametricSurface,
    tri: &ParametricTriangulation,
    src: &mut ScalarSource,
    target: usize,
) -> Result<Cloud> {
    let square = BoxDomain::new(vec![0.0, 0.0], vec![1.0, 1.0])?;
    let mut points = Vec::with_capacity(target);
    for _ in 0..target {
        let (j, u, v) = sample_simplex_point(tri.mesh.cumulative_areas(), src, &square)?;
        let [a, b, c] = tri.param_triangles[j];
        let w = 1.0 - u - v;
        let (pu, pv) = (
            u * a[0] + v * b[0] + w * c[0],
            u * a[1] + v * b[1] + w * c[1],
        );
        let position = s.eval(pu, pv);
        if !position.is_finite() {
            return Err(Error::NonFiniteMap {
                i: j,
                j: 0,
                u: pu,
                v: pv,
            });
        }
        points.push(CloudPoint {
            position,
            normal: s.normal(pu, pv),
            provenance: Provenance::TriangleHit { triangle: j },
        });
    }
    Ok(Cloud {
        points,
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::catalog;
    use crate::surfaces::Triangle;

    #[test]
    fn sphere_cloud_points_on_surface() {
        let s = catalog::sphere_implicit(1.0, 2.0);
        let mut src = ScalarSource::pseudo(1);
        let c = cloud_implicit(&s, &mut src, 2000, &ImplicitSamplerConfig::default()).unwrap();
        assert!(c.len() >= 2000);
        assert_eq!(c.hits_per_line.len() as u64, c.lines_used);
        assert_eq!(
            c.hits_per_line.iter().map(|&h| h as usize).sum::<usize>(),
            c.len()
        );
        for p in &c.points {
            assert!(s.value(p.position).abs() < 1e-9);
            assert!(p.position.norm() <= 2.0);
            let n = p.normal.unwrap();
            assert!((n.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn hits_are_ordered_along_each_line() {
        let s = catalog::torus_implicit(2.0, 0.5, 3.0);
        let mut src = ScalarSource::pseudo(2);
        let c = cloud_implicit(&s, &mut src, 3000, &ImplicitSamplerConfig::default()).unwrap();
        for w in c.points.windows(2) {
            if let (
                Provenance::LineHit { line: a, t: ta },
                Provenance::LineHit { line: b, t: tb },
            ) = (w[0].provenance, w[1].provenance)
            {
                assert!(a < b || (a == b && ta < tb));
            }
        }
    }

    #[test]
    fn empty_surface_errors_after_budget() {
        let s = ImplicitSurface::new(|_| 1.0, 1.0).unwrap();
        let isect = ImplicitIntersector::new(
            s,
            ImplicitSamplerConfig {
                scan_steps: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let mut src = ScalarSource::pseudo(0);
        match cloud_lines(&isect, &mut src, 10, 1.0, LineKind::Kinematic, 500) {
            Err(Error::SurfaceNotFound { lines: 500 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_triangle_points_inside() {
        let t = Triangle::new(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(2.0, 0.0, 1.0),
            Vec3::new(0.0, 3.0, 1.0),
        );
        let m = TriangulatedSurface::new(vec![t]).unwrap();
        let mut src = ScalarSource::pseudo(4);
        let c = cloud_triangulated(&m, &mut src, 5000).unwrap();
        assert_eq!(c.len(), 5000);
        for p in &c.points {
            let q = p.position;
            assert_eq!(q.z, 1.0);
            assert!(q.x >= 0.0 && q.y >= 0.0 && q.x / 2.0 + q.y / 3.0 <= 1.0 + 1e-15);
            assert_eq!(p.normal, Some(Vec3::Z));
        }
    }

    #[test]
    fn parametric_points_on_sphere() {
        let s = catalog::sphere_parametric(1.0, 64, 64);
        let mut src = ScalarSource::pseudo(5);
        let c = cloud_parametric(&s, &mut src, 10_000).unwrap();
        for p in &c.points {
            assert!((p.position.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn patch_parametric_equals_triangulated() {
        let s = catalog::plane_patch_parametric(5, 5);
        let tri = s.triangulate().unwrap();
        let a = cloud_parametric_with(&s, &tri, &mut ScalarSource::pseudo(9), 1000).unwrap();
        let b = cloud_triangulated(&tri.mesh, &mut ScalarSource::pseudo(9), 1000).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert!((p.position - q.position).norm() < 1e-14);
            assert_eq!(p.provenance, q.provenance);
        }
    }

    #[test]
    fn determinism() {
        let s = catalog::sphere_implicit(1.0, 2.0);
        let cfg = ImplicitSamplerConfig::default();
        let a = cloud_implicit(&s, &mut ScalarSource::pseudo(11), 500, &cfg).unwrap();
        let b = cloud_implicit(&s, &mut ScalarSource::pseudo(11), 500, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
