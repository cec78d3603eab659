//! Built-in surfaces with known areas, used by tests, the CLI and the demo.

use std::f64::consts::PI;

use crate::rng::BoxDomain;
use crate::surfaces::{ImplicitSurface, ParametricSurface, Triangle, TriangulatedSurface};
use crate::vector::Vec3;

/// Resolution used for catalog parametric charts unless overridden.
pub const DEFAULT_CHART_RES: usize = 256;

/// A named catalog entry with whichever representations it supports.
#[derive(Clone, Debug)]
pub struct CatalogSurface {
    pub name: &'static str,
    pub implicit: Option<ImplicitSurface>,
    pub parametric: Option<ParametricSurface>,
    pub mesh: Option<TriangulatedSurface>,
    /// Exact area of the surface (of its part inside the clip ball, for
    /// unbounded level sets).
    pub area: Option<f64>,
    /// Clip radius large enough to contain the whole surface.
    pub radius: f64,
}

pub const NAMES: &[&str] = &[
    "sphere",
    "torus",
    "ellipsoid",
    "plane",
    "patch",
    "tetrahedron",
    "pyramid",
];

pub fn lookup(name: &str) -> Option<CatalogSurface> {
    let entry = match name {
        "sphere" => CatalogSurface {
            name: "sphere",
            implicit: Some(sphere_implicit(1.0, 2.0)),
            parametric: Some(sphere_parametric(1.0, DEFAULT_CHART_RES, DEFAULT_CHART_RES)),
            mesh: None,
            area: Some(4.0 * PI),
            radius: 2.0,
        },
        "torus" => CatalogSurface {
            name: "torus",
            implicit: Some(torus_implicit(2.0, 0.5, 3.0)),
            parametric: Some(torus_parametric(
                2.0,
                0.5,
                DEFAULT_CHART_RES,
                DEFAULT_CHART_RES,
            )),
            mesh: None,
            area: Some(4.0 * PI * PI * 2.0 * 0.5),
            radius: 3.0,
        },
        "ellipsoid" => CatalogSurface {
            name: "ellipsoid",
            implicit: Some(ellipsoid_implicit(1.0, 0.75, 0.5, 2.0)),
            parametric: Some(ellipsoid_parametric(
                1.0,
                0.75,
                0.5,
                DEFAULT_CHART_RES,
                DEFAULT_CHART_RES,
            )),
            mesh: None,
            area: None,
            radius: 2.0,
        },
        "plane" => CatalogSurface {
            name: "plane",
            implicit: Some(plane_implicit(2.0)),
            parametric: None,
            mesh: None,
            // The level set z = 0 clipped to the ball is a disk of radius 2.
            area: Some(PI * 4.0),
            radius: 2.0,
        },
        "patch" => CatalogSurface {
            name: "patch",
            implicit: None,
            parametric: Some(plane_patch_parametric(DEFAULT_CHART_RES, DEFAULT_CHART_RES)),
            mesh: Some(plane_patch_mesh()),
            area: Some(1.0),
            radius: 2.0,
        },
        "tetrahedron" => CatalogSurface {
            name: "tetrahedron",
            implicit: None,
            parametric: None,
            mesh: Some(tetrahedron()),
            area: Some(8.0 / 3f64.sqrt()),
            radius: 2.0,
        },
        "pyramid" => CatalogSurface {
            name: "pyramid",
            implicit: Some(pyramid_implicit(2.0)),
            parametric: None,
            mesh: Some(pyramid()),
            area: Some(1.5 + 3f64.sqrt() / 2.0),
            radius: 2.0,
        },
        _ => return None,
    };
    Some(entry)
}

/// `‖x‖² − R² = 0` with gradient `2x`.
pub fn sphere_implicit(radius: f64, clip: f64) -> ImplicitSurface {
    let r2 = radius * radius;
    ImplicitSurface::new(move |x| x.norm_squared() - r2, clip)
        .expect("positive clip radius")
        .with_gradient(|x| 2.0 * x)
}

/// Latitude `u ∈ [−π/2, π/2]`, longitude `v ∈ [−π, π]`.
pub fn sphere_parametric(radius: f64, u_res: usize, v_res: usize) -> ParametricSurface {
    let dom = BoxDomain::new(vec![-PI / 2.0, -PI], vec![PI / 2.0, PI]).expect("valid");
    ParametricSurface::new(
        move |u, v| radius * Vec3::new(u.cos() * v.cos(), u.cos() * v.sin(), u.sin()),
        dom,
        u_res,
        v_res,
    )
    .expect("valid resolution")
}

/// Torus about the z axis: `(‖x‖² + R² − ρ²)² − 4R²(x² + y²) = 0`.
pub fn torus_implicit(major: f64, minor: f64, clip: f64) -> ImplicitSurface {
    let (r2, c) = (major * major, major * major - minor * minor);
    ImplicitSurface::new(
        move |p| {
            let s = p.norm_squared() + c;
            s * s - 4.0 * r2 * (p.x * p.x + p.y * p.y)
        },
        clip,
    )
    .expect("positive clip radius")
    .with_gradient(move |p| {
        let s = p.norm_squared() + c;
        Vec3::new(
            4.0 * p.x * s - 8.0 * r2 * p.x,
            4.0 * p.y * s - 8.0 * r2 * p.y,
            4.0 * p.z * s,
        )
    })
}

/// `u` around the axis, `v` around the tube, both over `[0, 2π]`.
pub fn torus_parametric(major: f64, minor: f64, u_res: usize, v_res: usize) -> ParametricSurface {
    let dom = BoxDomain::new(vec![0.0, 0.0], vec![2.0 * PI, 2.0 * PI]).expect("valid");
    ParametricSurface::new(
        move |u, v| {
            let w = major + minor * v.cos();
            Vec3::new(w * u.cos(), w * u.sin(), minor * v.sin())
        },
        dom,
        u_res,
        v_res,
    )
    .expect("valid resolution")
}

pub fn ellipsoid_implicit(a: f64, b: f64, c: f64, clip: f64) -> ImplicitSurface {
    ImplicitSurface::new(
        move |p| (p.x / a).powi(2) + (p.y / b).powi(2) + (p.z / c).powi(2) - 1.0,
        clip,
    )
    .expect("positive clip radius")
    .with_gradient(move |p| {
        Vec3::new(
            2.0 * p.x / (a * a),
            2.0 * p.y / (b * b),
            2.0 * p.z / (c * c),
        )
    })
}

pub fn ellipsoid_parametric(
    a: f64,
    b: f64,
    c: f64,
    u_res: usize,
    v_res: usize,
) -> ParametricSurface {
    let dom = BoxDomain::new(vec![0.0, 0.0], vec![2.0 * PI, PI]).expect("valid");
    ParametricSurface::new(
        move |u, v| Vec3::new(a * u.cos() * v.sin(), b * u.sin() * v.sin(), c * v.cos()),
        dom,
        u_res,
        v_res,
    )
    .expect("valid resolution")
}

/// The plane `z = 0`, clipped to the ball of radius `clip`.
pub fn plane_implicit(clip: f64) -> ImplicitSurface {
    ImplicitSurface::new(|p| p.z, clip)
        .expect("positive clip radius")
        .with_gradient(|_| Vec3::Z)
}

/// Unit square `[0,1]² × {0}` as a chart.
pub fn plane_patch_parametric(u_res: usize, v_res: usize) -> ParametricSurface {
    let dom = BoxDomain::new(vec![0.0, 0.0], vec![1.0, 1.0]).expect("valid");
    ParametricSurface::new(|u, v| Vec3::new(u, v, 0.0), dom, u_res, v_res)
        .expect("valid resolution")
}

pub fn plane_patch_mesh() -> TriangulatedSurface {
    plane_patch_parametric(2, 2)
        .triangulate()
        .expect("finite")
        .mesh
}

/// Regular tetrahedron inscribed in the unit sphere, faces oriented outward.
pub fn tetrahedron() -> TriangulatedSurface {
    let s = 1.0 / 3f64.sqrt();
    let a = s * Vec3::new(1.0, 1.0, 1.0);
    let b = s * Vec3::new(1.0, -1.0, -1.0);
    let c = s * Vec3::new(-1.0, 1.0, -1.0);
    let d = s * Vec3::new(-1.0, -1.0, 1.0);
    let faces = [[a, b, c], [a, d, b], [a, c, d], [b, d, c]];
    let tris = faces
        .iter()
        .map(|f| {
            let t = Triangle::new(f[0], f[1], f[2]);
            let centroid = (f[0] + f[1] + f[2]) / 3.0;
            if t.cross().dot(centroid) < 0.0 {
                Triangle::new(f[0], f[2], f[1])
            } else {
                t
            }
        })
        .collect();
    TriangulatedSurface::new(tris).expect("non-degenerate")
}

/// The corner pyramid with vertices `O, e1, e2, e3`. Faces are ordered
/// `x = 0`, `y = 0`, `z = 0`, then the slanted face `x + y + z = 1`.
pub fn pyramid() -> TriangulatedSurface {
    let (o, e1, e2, e3) = (Vec3::ZERO, Vec3::X, Vec3::Y, Vec3::Z);
    TriangulatedSurface::new(vec![
        Triangle::new(o, e3, e2),
        Triangle::new(o, e1, e3),
        Triangle::new(o, e2, e1),
        Triangle::new(e1, e2, e3),
    ])
    .expect("non-degenerate")
}

/// Boundary of the corner pyramid as the zero set of
/// `max(−x, −y, −z, x + y + z − 1)`.
pub fn pyramid_implicit(clip: f64) -> ImplicitSurface {
    ImplicitSurface::new(
        |p| (-p.x).max(-p.y).max(-p.z).max(p.x + p.y + p.z - 1.0),
        clip,
    )
    .expect("positive clip radius")
}

/// Index of the pyramid face nearest to `p` (same order as [`pyramid`]).
pub fn pyramid_face(p: Vec3) -> usize {
    let d = [
        p.x.abs(),
        p.y.abs(),
        p.z.abs(),
        (p.x + p.y + p.z - 1.0).abs() / 3f64.sqrt(),
    ];
    let mut best = 0;
    for i in 1..4 {
        if d[i] < d[best] {
            best = i;
        }
    }
    best
}
