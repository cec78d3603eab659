use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::BoxDomain;
use crate::surfaces::mesh::{Triangle, TriangulatedSurface};
use crate::vector::Vec3;

pub type SurfaceMap = Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>;

/// Image of a parameter rectangle under a map `(u, v) ↦ R^3`, with the grid
/// resolution used to triangulate it.
#[derive(Clone)]
pub struct ParametricSurface {
    map: SurfaceMap,
    domain: BoxDomain,
    u_res: usize,
    v_res: usize,
}

impl fmt::Debug for ParametricSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricSurface")
            .field("domain", &self.domain)
            .field("u_res", &self.u_res)
            .field("v_res", &self.v_res)
            .finish()
    }
}

/// Grid triangulation of a parametric surface. `param_triangles[k]` is the
/// parameter-space triangle whose image vertices form `mesh.triangles()[k]`.
#[derive(Clone, Debug)]
pub struct ParametricTriangulation {
    pub mesh: TriangulatedSurface,
    pub param_triangles: Vec<[[f64; 2]; 3]>,
}

impl ParametricSurface {
    pub fn new<F>(map: F, domain: BoxDomain, u_res: usize, v_res: usize) -> Result<Self>
    where
        F: Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
    {
        if domain.dim() != 2 {
            return Err(Error::InvalidDomain(format!(
                "parameter domain must be 2-dimensional, got {}",
                domain.dim()
            )));
        }
        if u_res < 2 || v_res < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be at least 2x2, got {u_res}x{v_res}"
            )));
        }
        Ok(ParametricSurface {
            map: Arc::new(map),
            domain,
            u_res,
            v_res,
        })
    }

    pub fn with_resolution(&self, u_res: usize, v_res: usize) -> Result<Self> {
        if u_res < 2 || v_res < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be at least 2x2, got {u_res}x{v_res}"
            )));
        }
        Ok(ParametricSurface {
            u_res,
            v_res,
            ..self.clone()
        })
    }

    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> Vec3 {
        (self.map)(u, v)
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.u_res, self.v_res)
    }

    /// Parameter grid point `(u_i, v_j)`, zero-based.
    pub fn grid_point(&self, i: usize, j: usize) -> (f64, f64) {
        let (lo, hi) = (self.domain.lows(), self.domain.highs());
        let du = (hi[0] - lo[0]) / (self.u_res - 1) as f64;
        let dv = (hi[1] - lo[1]) / (self.v_res - 1) as f64;
        // Pin the last grid line to the exact upper bound.
        let u = if i + 1 == self.u_res {
            hi[0]
        } else {
            lo[0] + i as f64 * du
        };
        let v = if j + 1 == self.v_res {
            hi[1]
        } else {
            lo[1] + j as f64 * dv
        };
        (u, v)
    }

    /// Central-difference partial derivatives `(Φ_u, Φ_v)`.
    pub fn partials(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        let hu = 1e-6 * (1.0 + u.abs());
        let hv = 1e-6 * (1.0 + v.abs());
        let pu = (self.eval(u + hu, v) - self.eval(u - hu, v)) / (2.0 * hu);
        let pv = (self.eval(u, v + hv) - self.eval(u, v - hv)) / (2.0 * hv);
        (pu, pv)
    }

    /// Unit normal `Φ_u × Φ_v / ‖·‖`, or `None` where the differential drops rank.
    pub fn normal(&self, u: f64, v: f64) -> Option<Vec3> {
        let (pu, pv) = self.partials(u, v);
        let c = pu.cross(pv);
        let scale = pu.norm().max(pv.norm());
        if !(c.norm() > 1e-10 * scale * scale) {
            return None;
        }
        c.normalized()
    }

    /// Splits every grid rectangle into `δ+ = (g_ij, g_i+1,j+1, g_i,j+1)` and
    /// `δ- = (g_ij, g_i+1,j, g_i+1,j+1)` and maps their vertices through Φ.
    pub fn triangulate(&self) -> Result<ParametricTriangulation> {
        let (nu, nv) = (self.u_res, self.v_res);
        let mut grid = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                let (u, v) = self.grid_point(i, j);
                let x = self.eval(u, v);
                if !x.is_finite() {
                    return Err(Error::NonFiniteMap { i, j, u, v });
                }
                grid.push(((u, v), x));
            }
        }
        let at = |i: usize, j: usize| grid[i * nv + j];
        let mut triangles = Vec::with_capacity(2 * (nu - 1) * (nv - 1));
        let mut param_triangles = Vec::with_capacity(triangles.capacity());
        for i in 0..nu - 1 {
            for j in 0..nv - 1 {
                let (g00, g10, g11, g01) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
                for tri in [[g00, g11, g01], [g00, g10, g11]] {
                    triangles.push(Triangle::new(tri[0].1, tri[1].1, tri[2].1));
                    param_triangles.push([
                        [tri[0].0 .0, tri[0].0 .1],
                        [tri[1].0 .0, tri[1].0 .1],
                        [tri[2].0 .0, tri[2].0 .1],
                    ]);
                }
            }
        }
        Ok(ParametricTriangulation {
            mesh: TriangulatedSurface::new(triangles)?,
            param_triangles,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::catalog;
    use std::f64::consts::PI;

    fn plane() -> ParametricSurface {
        let dom = BoxDomain::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        ParametricSurface::new(|u, v| Vec3::new(u, v, 0.0), dom, 2, 2).unwrap()
    }

    #[test]
    fn single_patch_gives_two_triangles() {
        let t = plane().triangulate().unwrap();
        assert_eq!(t.mesh.len(), 2);
        assert!((t.mesh.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plane_area_any_resolution() {
        for (a, b) in [(3, 7), (10, 10), (33, 2)] {
            let t = plane()
                .with_resolution(a, b)
                .unwrap()
                .triangulate()
                .unwrap();
            assert_eq!(t.mesh.len(), 2 * (a - 1) * (b - 1));
            assert!((t.mesh.total_area() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vertices_are_surface_grid_points() {
        let s = catalog::sphere_parametric(1.0, 17, 9);
        let t = s.triangulate().unwrap();
        for (tri, par) in t.mesh.triangles().iter().zip(&t.param_triangles) {
            for (x, uv) in tri.vertices().iter().zip(par) {
                assert_eq!(*x, s.eval(uv[0], uv[1]));
            }
        }
    }

    #[test]
    fn sphere_chart_area_converges() {
        // Piecewise-linear area increases toward 4π from below.
        let mut last = 0.0;
        for res in [32usize, 128, 512] {
            let a = catalog::sphere_parametric(1.0, res, res)
                .triangulate()
                .unwrap()
                .mesh
                .total_area();
            assert!(a > last && a < 4.0 * PI);
            last = a;
        }
        assert!((last - 4.0 * PI).abs() / (4.0 * PI) < 1e-3);
    }

    #[test]
    fn non_finite_map_is_reported() {
        let dom = BoxDomain::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let s = ParametricSurface::new(|u, v| Vec3::new(u, v, 1.0 / (u - 1.0)), dom, 3, 3).unwrap();
        match s.triangulate() {
            Err(Error::NonFiniteMap { i: 2, j: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn resolution_must_exceed_one() {
        let dom = BoxDomain::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(ParametricSurface::new(|u, v| Vec3::new(u, v, 0.0), dom, 1, 5).is_err());
    }
}
