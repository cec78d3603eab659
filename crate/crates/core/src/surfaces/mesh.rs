use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub v1: Vec3,
    pub v2: Vec3,
    pub v3: Vec3,
}

impl Triangle {
    pub fn new(v1: Vec3, v2: Vec3, v3: Vec3) -> Self {
        Triangle { v1, v2, v3 }
    }

    /// `(v2 - v1) × (v3 - v2)`: twice the area, oriented by vertex order.
    pub fn cross(&self) -> Vec3 {
        (self.v2 - self.v1).cross(self.v3 - self.v2)
    }

    pub fn area(&self) -> f64 {
        0.5 * self.cross().norm()
    }

    /// Unit normal following the vertex order; `None` for degenerate triangles.
    pub fn normal(&self) -> Option<Vec3> {
        self.cross().normalized()
    }

    pub fn vertices(&self) -> [Vec3; 3] {
        [self.v1, self.v2, self.v3]
    }

    /// `u·v1 + v·v2 + (1-u-v)·v3` for `(u, v)` in the standard simplex.
    pub fn barycentric_point(&self, u: f64, v: f64) -> Result<Vec3> {
        if !(u >= 0.0 && v >= 0.0 && u + v <= 1.0) {
            return Err(Error::OutsideSimplex { u, v });
        }
        Ok(self.barycentric_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn barycentric_unchecked(&self, u: f64, v: f64) -> Vec3 {
        u * self.v1 + v * self.v2 + (1.0 - u - v) * self.v3
    }
}

/// A surface given as an ordered triangle list, with the running sum of
/// triangle areas used for area-weighted selection.
#[derive(Clone, Debug)]
pub struct TriangulatedSurface {
    triangles: Vec<Triangle>,
    cumulative_areas: Vec<f64>,
}

impl TriangulatedSurface {
    pub fn new(triangles: Vec<Triangle>) -> Result<Self> {
        let mut acc = 0.0;
        let mut cumulative_areas = Vec::with_capacity(triangles.len());
        for t in &triangles {
            if !(t.v1.is_finite() && t.v2.is_finite() && t.v3.is_finite()) {
                return Err(Error::InvalidArgument(
                    "triangle has non-finite vertex".into(),
                ));
            }
            acc += t.area();
            cumulative_areas.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::ZeroArea);
        }
        Ok(TriangulatedSurface {
            triangles,
            cumulative_areas,
        })
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn cumulative_areas(&self) -> &[f64] {
        &self.cumulative_areas
    }

    pub fn total_area(&self) -> f64 {
        *self.cumulative_areas.last().expect("non-empty")
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Largest vertex distance from the origin.
    pub fn bounding_radius(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| t.vertices())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        let tris = self
            .triangles
            .iter()
            .map(|t| Triangle::new(t.v1 + offset, t.v2 + offset, t.v3 + offset))
            .collect();
        TriangulatedSurface::new(tris).expect("translation preserves area")
    }
}
