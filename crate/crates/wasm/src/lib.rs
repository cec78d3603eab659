//! Browser bindings: sample a catalog surface, estimate its area, and
//! measure the density defect of axis-aligned lines on the corner pyramid.

use crofton_core::crofton::estimate_area;
use crofton_core::rng::ScalarSource;
use crofton_core::samplers::{
    cloud_lines, cloud_parametric, cloud_triangulated, Cloud, ImplicitIntersector,
    ImplicitSamplerConfig, LineIntersector, LineKind, MeshIntersector, DEFAULT_LINE_BUDGET,
};
use crofton_core::stats::density_variation;
use crofton_core::surfaces::{catalog, ImplicitSurface};
use crofton_core::{Error, Result};
use wasm_bindgen::prelude::*;

/// Largest cloud the page may request.
pub const MAX_POINTS: u32 = 200_000;
/// Largest line count for one area estimate.
pub const MAX_LINES: u32 = 2_000_000;

const BOOTSTRAP_REPS: usize = 100;

struct Target {
    surface: catalog::CatalogSurface,
}

fn lookup(name: &str) -> Result<Target> {
    if let Some(surface) = catalog::lookup(name) {
        return Ok(Target { surface });
    }
    let implicit = ImplicitSurface::from_expr(name, 2.0)?;
    Ok(Target {
        surface: catalog::CatalogSurface {
            name: "expression",
            implicit: Some(implicit),
            parametric: None,
            mesh: None,
            area: None,
            radius: 2.0,
        },
    })
}

impl Target {
    fn intersector(&self) -> Result<Box<dyn LineIntersector>> {
        let s = &self.surface;
        if let Some(m) = &s.mesh {
            return Ok(Box::new(MeshIntersector::new(m.clone())));
        }
        if let Some(i) = &s.implicit {
            return Ok(Box::new(ImplicitIntersector::new(
                i.clone(),
                ImplicitSamplerConfig::default(),
            )?));
        }
        let p = s.parametric.as_ref().ok_or(Error::ZeroArea)?;
        Ok(Box::new(MeshIntersector::new(p.triangulate()?.mesh)))
    }
}

fn check_count(n: u32, max: u32, what: &str) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::InvalidArgument(format!(
            "{what} must be between 1 and {max}, got {n}"
        )));
    }
    Ok(())
}

/// Flat `[x0, y0, z0, x1, ...]` positions of a cloud.
pub fn cloud_positions(surface: &str, sampler: &str, n: u32, seed: u32) -> Result<Vec<f64>> {
    check_count(n, MAX_POINTS, "point count")?;
    let t = lookup(surface)?;
    let mut src = ScalarSource::pseudo(seed as u64);
    let n = n as usize;
    let cloud: Cloud = match sampler {
        "crofton" | "axis-aligned" => {
            let kind = if sampler == "crofton" {
                LineKind::Kinematic
            } else {
                LineKind::AxisAligned
            };
            cloud_lines(
                &t.intersector()?,
                &mut src,
                n,
                t.surface.radius,
                kind,
                DEFAULT_LINE_BUDGET,
            )?
        }
        "triangulated" => {
            let mesh = match (&t.surface.mesh, &t.surface.parametric) {
                (Some(m), _) => m.clone(),
                (None, Some(p)) => p.triangulate()?.mesh,
                (None, None) => {
                    return Err(Error::InvalidArgument(format!(
                        "{surface} has no triangles"
                    )))
                }
            };
            cloud_triangulated(&mesh, &mut src, n)?
        }
        "parametric" => match &t.surface.parametric {
            Some(p) => cloud_parametric(p, &mut src, n)?,
            None => {
                return Err(Error::InvalidArgument(format!(
                    "{surface} has no parametric chart"
                )))
            }
        },
        other => return Err(Error::InvalidArgument(format!("unknown sampler '{other}'"))),
    };
    Ok(cloud
        .points
        .iter()
        .flat_map(|p| p.position.to_array())
        .collect())
}

/// `[estimate, standard error, exact area or NaN]`.
pub fn area(surface: &str, m: u32, seed: u32) -> Result<Vec<f64>> {
    check_count(m, MAX_LINES, "line count")?;
    let t = lookup(surface)?;
    let e = estimate_area(
        &t.intersector()?,
        &mut ScalarSource::pseudo(seed as u64),
        m as u64,
        t.surface.radius,
    )?;
    Ok(vec![
        e.value,
        e.standard_error,
        t.surface.area.unwrap_or(f64::NAN),
    ])
}

/// Density on the slanted pyramid face over density on the coordinate
/// faces, `[ratio, bootstrap standard error]`.
pub fn pyramid_density(sampler: &str, n: u32, seed: u32) -> Result<Vec<f64>> {
    let flat = cloud_positions("pyramid", sampler, n, seed)?;
    let points: Vec<_> = flat
        .chunks(3)
        .map(|c| crofton_core::Vec3::new(c[0], c[1], c[2]))
        .collect();
    let areas = [0.5, 0.5, 0.5, 3f64.sqrt() / 2.0];
    let d = density_variation(
        &points,
        |p| Some(catalog::pyramid_face(p)),
        &areas,
        BOOTSTRAP_REPS,
        seed as u64,
    )?;
    Ok(vec![
        d.group_ratio(&[3], &[0, 1, 2]),
        d.group_ratio_se(&[3], &[0, 1, 2]),
    ])
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = generateCloud)]
pub fn generate_cloud(
    surface: &str,
    sampler: &str,
    n: u32,
    seed: u32,
) -> std::result::Result<Vec<f64>, JsError> {
    cloud_positions(surface, sampler, n, seed).map_err(js)
}

#[wasm_bindgen(js_name = estimateArea)]
pub fn estimate_area_js(
    surface: &str,
    m: u32,
    seed: u32,
) -> std::result::Result<Vec<f64>, JsError> {
    area(surface, m, seed).map_err(js)
}

#[wasm_bindgen(js_name = densityRatio)]
pub fn density_ratio(sampler: &str, n: u32, seed: u32) -> std::result::Result<Vec<f64>, JsError> {
    pyramid_density(sampler, n, seed).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clouds_have_three_coordinates_per_point() {
        for sampler in ["crofton", "axis-aligned", "triangulated", "parametric"] {
            let v = cloud_positions("torus", sampler, 500, 1).unwrap();
            assert_eq!(v.len() % 3, 0);
            assert!(v.len() >= 1500, "{sampler}");
        }
        assert!(cloud_positions("sphere", "spiral", 10, 1).is_err());
        assert!(cloud_positions("plane", "parametric", 10, 1).is_err());
        assert!(cloud_positions("sphere", "crofton", MAX_POINTS + 1, 1).is_err());
    }

    #[test]
    fn expressions_are_surfaces() {
        let v = cloud_positions("x^2+y^2+z^2-1", "crofton", 200, 2).unwrap();
        for p in v.chunks(3) {
            assert!((p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn area_brackets_truth() {
        let a = area("tetrahedron", 200_000, 3).unwrap();
        assert!((a[0] - a[2]).abs() < 3.0 * a[1]);
        assert!(area("x^2+y^2+z^2-1", 1000, 3).unwrap()[2].is_nan());
    }

    #[test]
    fn pyramid_ratios() {
        let kin = pyramid_density("crofton", 50_000, 4).unwrap();
        let axis = pyramid_density("axis-aligned", 50_000, 4).unwrap();
        assert!((kin[0] - 1.0).abs() < 0.05, "{kin:?}");
        assert!(
            (axis[0] - 3f64.sqrt()).abs() < 0.05 * 3f64.sqrt(),
            "{axis:?}"
        );
    }
}
