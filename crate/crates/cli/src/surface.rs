//! Resolution of `--surface` arguments: catalog name, mesh file or expression.

use std::path::Path;

use crofton_core::samplers::{
    ImplicitIntersector, ImplicitSamplerConfig, LineIntersector, MeshIntersector,
};
use crofton_core::surfaces::{
    catalog, read_mesh_file, ImplicitSurface, ParametricSurface, TriangulatedSurface,
};

use crate::error::{CliError, Result};

/// Default clip radius for expressions and small meshes.
pub const DEFAULT_RADIUS: f64 = 2.0;

/// Which sampler generates a cloud.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Sampler {
    /// Kinematic lines through the ball.
    Crofton,
    /// Area-weighted points on triangles.
    Triangulated,
    /// Triangulated selection mapped back onto the chart.
    Parametric,
    /// Lines parallel to the coordinate axes.
    AxisAligned,
}

impl Sampler {
    pub fn name(self) -> &'static str {
        match self {
            Sampler::Crofton => "crofton",
            Sampler::Triangulated => "triangulated",
            Sampler::Parametric => "parametric",
            Sampler::AxisAligned => "axis-aligned",
        }
    }
}

/// Every representation available for one `--surface` argument.
#[derive(Clone, Debug)]
pub struct ResolvedSurface {
    pub label: String,
    /// Catalog name, when the argument named a catalog entry.
    pub catalog: Option<&'static str>,
    pub implicit: Option<ImplicitSurface>,
    pub parametric: Option<ParametricSurface>,
    pub mesh: Option<TriangulatedSurface>,
    pub radius: f64,
}

fn is_mesh_path(spec: &str) -> bool {
    let lower = spec.to_ascii_lowercase();
    lower.ends_with(".off") || lower.ends_with(".stl")
}

/// Resolves `spec`. `radius` overrides the default clip radius, and
/// `chart_res` the grid resolution of parametric charts.
pub fn resolve(
    spec: &str,
    radius: Option<f64>,
    chart_res: Option<usize>,
) -> Result<ResolvedSurface> {
    if let Some(r) = radius {
        if !(r > 0.0 && r.is_finite()) {
            return Err(CliError::Usage(format!("--r must be positive, got {r}")));
        }
    }
    let mut out = if let Some(c) = catalog::lookup(spec) {
        ResolvedSurface {
            label: c.name.to_string(),
            catalog: Some(c.name),
            implicit: c.implicit,
            parametric: c.parametric,
            mesh: c.mesh,
            radius: c.radius,
        }
    } else if is_mesh_path(spec) {
        let path = Path::new(spec);
        let mesh = read_mesh_file(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })??;
        let radius = DEFAULT_RADIUS.max(1.01 * mesh.bounding_radius());
        ResolvedSurface {
            label: spec.to_string(),
            catalog: None,
            implicit: None,
            parametric: None,
            mesh: Some(mesh),
            radius,
        }
    } else {
        ResolvedSurface {
            label: spec.to_string(),
            catalog: None,
            implicit: Some(ImplicitSurface::from_expr(spec, DEFAULT_RADIUS)?),
            parametric: None,
            mesh: None,
            radius: DEFAULT_RADIUS,
        }
    };
    if let Some(r) = radius {
        out.radius = r;
        out.implicit = out.implicit.map(|s| s.with_clip_radius(r)).transpose()?;
    }
    if let Some(res) = chart_res {
        out.parametric = out
            .parametric
            .map(|p| p.with_resolution(res, res))
            .transpose()?;
    }
    Ok(out)
}

impl ResolvedSurface {
    /// Line intersector used by line-based samplers and estimators. Meshes
    /// are preferred since their crossings are exact, then level sets, then
    /// the chart triangulation.
    pub fn line_intersector(
        &self,
        cfg: ImplicitSamplerConfig,
    ) -> Result<Box<dyn LineIntersector + Send + Sync>> {
        if let Some(m) = &self.mesh {
            return Ok(Box::new(MeshIntersector::new(m.clone())));
        }
        if let Some(s) = &self.implicit {
            return Ok(Box::new(ImplicitIntersector::new(s.clone(), cfg)?));
        }
        if let Some(p) = &self.parametric {
            return Ok(Box::new(MeshIntersector::new(p.triangulate()?.mesh)));
        }
        Err(CliError::Usage(format!(
            "surface {} has no usable representation",
            self.label
        )))
    }

    /// Triangles for the area-weighted sampler: the mesh itself, or the
    /// chart triangulation.
    pub fn triangles(&self) -> Result<TriangulatedSurface> {
        if let Some(m) = &self.mesh {
            return Ok(m.clone());
        }
        if let Some(p) = &self.parametric {
            return Ok(p.triangulate()?.mesh);
        }
        Err(CliError::Usage(format!(
            "surface {} has no triangulated form; use --sampler crofton",
            self.label
        )))
    }

    pub fn chart(&self) -> Result<&ParametricSurface> {
        self.parametric.as_ref().ok_or_else(|| {
            CliError::Usage(format!("surface {} has no parametric chart", self.label))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_names_resolve() {
        for name in catalog::NAMES {
            let s = resolve(name, None, None).unwrap();
            assert_eq!(s.catalog, Some(*name));
        }
    }

    #[test]
    fn expressions_become_level_sets() {
        let s = resolve("x^2+y^2+z^2-1", Some(1.5), None).unwrap();
        let f = s.implicit.unwrap();
        assert_eq!(f.clip_radius(), 1.5);
        assert_eq!(f.value(crofton_core::Vec3::X), 0.0);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(
            resolve("x^^2", None, None),
            Err(CliError::Core(_))
        ));
        assert!(matches!(
            resolve("missing.off", None, None),
            Err(CliError::Read { .. })
        ));
        assert!(matches!(
            resolve("sphere", Some(-1.0), None),
            Err(CliError::Usage(_))
        ));
        let s = resolve("sphere", None, None).unwrap();
        assert!(s.triangles().is_ok());
        assert!(resolve("plane", None, None).unwrap().triangles().is_err());
    }
}
