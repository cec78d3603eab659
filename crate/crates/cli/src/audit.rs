//! Statistical audit of a point cloud against the area measure of a known
//! surface.

use std::f64::consts::PI;

use crofton_core::stats::{
    density_variation, ktuple_test, rank_uniformize, region_test, Region, Report,
    DEFAULT_BOOTSTRAP_REPS, Z_THRESHOLD,
};
use crofton_core::surfaces::catalog;
use crofton_core::{Error, Result, Vec3};

/// Half-angle of the region-test caps, in degrees.
pub const REGION_CAP_DEG: f64 = 20.0;
/// Half-angle of the density-test caps, in degrees.
pub const DENSITY_CAP_DEG: f64 = 10.0;
/// Counter resolution per coordinate for the pair test.
pub const PAIR_GRID: usize = 8;

type Classifier = Box<dyn Fn(Vec3) -> Option<usize>>;

/// Bins with known areas and the two groups whose pooled densities are
/// compared.
pub struct DensityCheck {
    pub label: &'static str,
    pub classify: Classifier,
    pub areas: Vec<f64>,
    pub num: Vec<usize>,
    pub den: Vec<usize>,
}

/// Region tests and density comparison for one catalog surface.
pub struct SurfaceChecks {
    pub regions: Vec<Region<'static, Vec3>>,
    pub density: Option<DensityCheck>,
}

/// Six axis directions followed by the eight diagonals.
pub fn cap_axes() -> Vec<Vec3> {
    let mut v = Vec::with_capacity(14);
    for i in 0..3 {
        v.push(Vec3::axis(i));
        v.push(-1.0 * Vec3::axis(i));
    }
    for o in 0..8 {
        let s = |b: usize| if o & b != 0 { -1.0 } else { 1.0 };
        v.push(Vec3::new(s(1), s(2), s(4)) / 3f64.sqrt());
    }
    v
}

fn octants() -> Vec<Region<'static, Vec3>> {
    (0..8)
        .map(|o| {
            let s = [o & 1 != 0, o & 2 != 0, o & 4 != 0];
            Region::new(format!("octant {o}"), 0.125, move |p: &Vec3| {
                (p.x > 0.0) == s[0] && (p.y > 0.0) == s[1] && (p.z > 0.0) == s[2]
            })
        })
        .collect()
}

fn nearest_face(normals: Vec<(Vec3, f64)>) -> Classifier {
    Box::new(move |p: Vec3| {
        let d: Vec<f64> = normals.iter().map(|(n, c)| (n.dot(p) - c).abs()).collect();
        (0..d.len()).min_by(|&a, &b| d[a].total_cmp(&d[b]))
    })
}

/// Checks for a catalog surface; `None` for names without known regions.
pub fn surface_checks(name: &str) -> Option<SurfaceChecks> {
    let checks = match name {
        "sphere" => {
            let cos_r = REGION_CAP_DEG.to_radians().cos();
            let mut regions = octants();
            for (k, a) in cap_axes().into_iter().enumerate() {
                regions.push(Region::new(
                    format!("cap {k}"),
                    (1.0 - cos_r) / 2.0,
                    move |p: &Vec3| p.dot(a) > cos_r * p.norm(),
                ));
            }
            let cos_d = DENSITY_CAP_DEG.to_radians().cos();
            let axes = cap_axes();
            SurfaceChecks {
                regions,
                density: Some(DensityCheck {
                    label: "diagonal/axis caps",
                    classify: Box::new(move |p: Vec3| {
                        axes.iter().position(|a| p.dot(*a) > cos_d * p.norm())
                    }),
                    areas: vec![2.0 * PI * (1.0 - cos_d); 14],
                    num: (6..14).collect(),
                    den: (0..6).collect(),
                }),
            }
        }
        "torus" => {
            let (big, small) = (2.0, 0.5);
            let mut regions = octants();
            regions.push(Region::new(
                "band |z| < rho/2",
                1.0 / 3.0,
                move |p: &Vec3| p.z.abs() < small / 2.0,
            ));
            let outer = 0.5 + small / (PI * big);
            regions.push(Region::new("outer half", outer, move |p: &Vec3| {
                p.x.hypot(p.y) > big
            }));
            let total = 4.0 * PI * PI * big * small;
            SurfaceChecks {
                regions,
                density: Some(DensityCheck {
                    label: "outer/inner half",
                    classify: Box::new(move |p: Vec3| Some(usize::from(p.x.hypot(p.y) <= big))),
                    areas: vec![outer * total, (1.0 - outer) * total],
                    num: vec![0],
                    den: vec![1],
                }),
            }
        }
        "ellipsoid" => SurfaceChecks {
            regions: octants(),
            density: None,
        },
        "plane" => SurfaceChecks {
            regions: vec![
                Region::new("x > 0", 0.5, |p: &Vec3| p.x > 0.0),
                Region::new("y > 0", 0.5, |p: &Vec3| p.y > 0.0),
                Region::new("inner disk", 0.25, |p: &Vec3| p.x.hypot(p.y) < 1.0),
            ],
            density: Some(DensityCheck {
                label: "inner disk/annulus",
                classify: Box::new(|p: Vec3| Some(usize::from(p.x.hypot(p.y) >= 1.0))),
                areas: vec![PI, 3.0 * PI],
                num: vec![0],
                den: vec![1],
            }),
        },
        "patch" => {
            let quarter = |q: usize| {
                let (ax, ay) = ((q & 1) as f64 * 0.5, (q >> 1) as f64 * 0.5);
                move |p: &Vec3| p.x >= ax && p.x < ax + 0.5 && p.y >= ay && p.y < ay + 0.5
            };
            SurfaceChecks {
                regions: (0..4)
                    .map(|q| Region::new(format!("quarter {q}"), 0.25, quarter(q)))
                    .collect(),
                density: Some(DensityCheck {
                    label: "left/right half",
                    classify: Box::new(|p: Vec3| Some(usize::from(p.x >= 0.5))),
                    areas: vec![0.5, 0.5],
                    num: vec![0],
                    den: vec![1],
                }),
            }
        }
        "tetrahedron" => {
            let faces: Vec<(Vec3, f64)> = catalog::tetrahedron()
                .triangles()
                .iter()
                .map(|t| {
                    let n = t.normal().expect("non-degenerate");
                    (n, n.dot(t.v1))
                })
                .collect();
            let regions = (0..4)
                .map(|f| {
                    let classify = nearest_face(faces.clone());
                    Region::new(format!("face {f}"), 0.25, move |p: &Vec3| {
                        classify(*p) == Some(f)
                    })
                })
                .collect();
            let area = 2.0 / 3f64.sqrt();
            SurfaceChecks {
                regions,
                density: Some(DensityCheck {
                    label: "faces 0,1/faces 2,3",
                    classify: nearest_face(faces),
                    areas: vec![area; 4],
                    num: vec![0, 1],
                    den: vec![2, 3],
                }),
            }
        }
        "pyramid" => {
            let areas = vec![0.5, 0.5, 0.5, 3f64.sqrt() / 2.0];
            let total: f64 = areas.iter().sum();
            let regions = (0..4)
                .map(|f| {
                    Region::new(format!("face {f}"), areas[f] / total, move |p: &Vec3| {
                        catalog::pyramid_face(*p) == f
                    })
                })
                .collect();
            SurfaceChecks {
                regions,
                density: Some(DensityCheck {
                    label: "slant/coordinate faces",
                    classify: Box::new(|p: Vec3| Some(catalog::pyramid_face(p))),
                    areas,
                    num: vec![3],
                    den: vec![0, 1, 2],
                }),
            }
        }
        _ => return None,
    };
    Some(checks)
}

/// Pooled density ratio of a check and its bootstrap standard error.
pub fn density_ratio(points: &[Vec3], check: &DensityCheck, seed: u64) -> Result<(f64, f64)> {
    let classify = &check.classify;
    let d = density_variation(points, classify, &check.areas, DEFAULT_BOOTSTRAP_REPS, seed)?;
    Ok((
        d.group_ratio(&check.num, &check.den),
        d.group_ratio_se(&check.num, &check.den),
    ))
}

/// Overlapping pair test on the rank-uniformized coordinate sequences.
/// Coordinates that are constant over the cloud are skipped.
pub fn pair_tests(points: &[Vec3], report: &mut Report) -> Result<()> {
    for (axis, label) in ["x", "y", "z"].iter().enumerate() {
        let vals: Vec<f64> = points.iter().map(|p| p[axis]).collect();
        let (lo, hi) = vals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        if !(hi > lo) {
            continue;
        }
        let r = ktuple_test(&rank_uniformize(&vals), 2, PAIR_GRID)?;
        report.push(
            "ktuple",
            format!("pairs of {label} ranks"),
            r.chi_square,
            r.threshold,
            r.pass,
        );
    }
    Ok(())
}

/// Runs every applicable test. Without a known surface only the pair tests
/// run.
pub fn audit(points: &[Vec3], surface: Option<&str>, seed: u64) -> Result<Report> {
    let mut report = Report::default();
    if let Some(checks) = surface.and_then(surface_checks) {
        for r in region_test(points, &checks.regions)? {
            report.push("region", r.name, r.z, Z_THRESHOLD, r.pass);
        }
        if let Some(d) = &checks.density {
            match density_ratio(points, d, seed) {
                Ok((ratio, se)) => {
                    let pass = (ratio - 1.0).abs() < Z_THRESHOLD * se;
                    report.push("density", d.label, ratio, 1.0 + Z_THRESHOLD * se, pass);
                }
                Err(Error::EmptyBin { .. }) => {
                    report.push("density", d.label, f64::INFINITY, f64::NAN, false)
                }
                Err(e) => return Err(e),
            }
        }
    }
    pair_tests(points, &mut report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crofton_core::rng::{sample_sphere, ScalarSource};

    fn sphere_points(n: usize, seed: u64) -> Vec<Vec3> {
        let mut src = ScalarSource::pseudo(seed);
        (0..n)
            .map(|_| {
                let v = sample_sphere(&mut src, 3).unwrap();
                Vec3::new(v[0], v[1], v[2])
            })
            .collect()
    }

    #[test]
    fn cap_axes_are_unit() {
        let a = cap_axes();
        assert_eq!(a.len(), 14);
        for v in a {
            assert!((v.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn independent_sphere_points_pass() {
        let r = audit(&sphere_points(100_000, 3), Some("sphere"), 1).unwrap();
        assert!(r.all_pass(), "{}", r.to_text());
        assert_eq!(r.records.len(), 8 + 14 + 1 + 3);
    }

    #[test]
    fn hemisphere_fails() {
        let pts: Vec<Vec3> = sphere_points(20_000, 4)
            .into_iter()
            .map(|p| Vec3::new(p.x, p.y, p.z.abs()))
            .collect();
        assert!(!audit(&pts, Some("sphere"), 1).unwrap().all_pass());
    }

    #[test]
    fn unknown_surface_runs_pairs_only() {
        let r = audit(&sphere_points(10_000, 5), None, 1).unwrap();
        assert_eq!(r.records.len(), 3);
        assert!(r.records.iter().all(|t| t.test == "ktuple"));
    }
}
