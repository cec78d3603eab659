//! Implicit, parametric and triangulated surfaces.

pub mod catalog;
pub mod expr;
pub mod implicit;
pub mod mesh;
pub mod mesh_io;
pub mod parametric;
pub mod validate;

pub use expr::Expr;
pub use implicit::{fd_step, GradientField, ImplicitSurface, ScalarField};
pub use mesh::{Triangle, TriangulatedSurface};
pub use mesh_io::{read_mesh_file, read_off, read_stl};
pub use parametric::{ParametricSurface, ParametricTriangulation, SurfaceMap};

use crate::error::Result;

/// Any of the three supported surface representations.
#[derive(Clone, Debug)]
pub enum Surface {
    Implicit(ImplicitSurface),
    Parametric(ParametricSurface),
    Triangulated(TriangulatedSurface),
}

impl From<ImplicitSurface> for Surface {
    fn from(s: ImplicitSurface) -> Self {
        Surface::Implicit(s)
    }
}

impl From<ParametricSurface> for Surface {
    fn from(s: ParametricSurface) -> Self {
        Surface::Parametric(s)
    }
}

impl From<TriangulatedSurface> for Surface {
    fn from(s: TriangulatedSurface) -> Self {
        Surface::Triangulated(s)
    }
}

impl ImplicitSurface {
    /// Level set of a parsed expression, clipped to radius `clip`.
    pub fn from_expr(src: &str, clip: f64) -> Result<Self> {
        let e = Expr::parse(src)?;
        ImplicitSurface::new(move |p| e.eval(p), clip)
    }
}
