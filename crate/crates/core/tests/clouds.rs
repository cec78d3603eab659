//! Distribution of generated clouds against exact area fractions.

use std::f64::consts::PI;

use crofton_core::normals::{normal_cloud, NeighborIndex};
use crofton_core::rng::ScalarSource;
use crofton_core::samplers::*;
use crofton_core::stats::{region_test, region_z, Region};
use crofton_core::surfaces::{catalog, Triangle, TriangulatedSurface};
use crofton_core::Vec3;

const N: usize = 100_000;

fn octants() -> Vec<Region<'static, Vec3>> {
    (0..8)
        .map(|o| {
            let s = [(o & 1) != 0, (o & 2) != 0, (o & 4) != 0];
            Region::new(format!("octant {o}"), 0.125, move |p: &Vec3| {
                (p.x > 0.0) == s[0] && (p.y > 0.0) == s[1] && (p.z > 0.0) == s[2]
            })
        })
        .collect()
}

fn assert_regions(points: &[Vec3], regions: &[Region<'_, Vec3>]) {
    for r in region_test(points, regions).unwrap() {
        assert!(r.pass, "{} z = {}", r.name, r.z);
    }
}

#[test]
fn sphere_kinematic_cloud() {
    let s = catalog::sphere_implicit(1.0, 2.0);
    let c = cloud_implicit(
        &s,
        &mut ScalarSource::pseudo(21),
        N,
        &ImplicitSamplerConfig::default(),
    )
    .unwrap();
    let pts = c.positions();
    assert_regions(&pts, &octants());
    assert_regions(
        &pts,
        &[Region::new("cap z>1/2", 0.25, |p: &Vec3| p.z > 0.5)],
    );
    // Each line through the unit ball crosses twice; a quarter of lines do.
    assert!((c.mean_hits() - 0.5).abs() < 0.01, "{}", c.mean_hits());
    for p in &c.points {
        assert!(s.value(p.position).abs() < 1e-6);
    }
}

#[test]
fn sphere_consecutive_pairs_factorize() {
    let s = catalog::sphere_implicit(1.0, 2.0);
    let c = cloud_implicit(
        &s,
        &mut ScalarSource::pseudo(22),
        N,
        &ImplicitSamplerConfig::default(),
    )
    .unwrap();
    let pts = c.positions();
    for a in 0..3 {
        for b in 0..3 {
            let prods: Vec<f64> = pts.windows(2).map(|w| w[0][a] * w[1][b]).collect();
            let n = prods.len() as f64;
            let mean = prods.iter().sum::<f64>() / n;
            let sd =
                (prods.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
            assert!(mean.abs() < 3.0 * sd / n.sqrt(), "E[x{a} y{b}] = {mean}");
        }
    }
}

#[test]
fn two_triangles_split_by_area() {
    let a = Triangle::new(Vec3::ZERO, Vec3::X, 2.0 * Vec3::Y);
    let b = Triangle::new(Vec3::Z, Vec3::Z + 3.0 * Vec3::X, Vec3::Z + 2.0 * Vec3::Y);
    let m = TriangulatedSurface::new(vec![a, b]).unwrap();
    assert_eq!(m.cumulative_areas(), &[1.0, 4.0]);
    let c = cloud_triangulated(&m, &mut ScalarSource::pseudo(23), 1_000_000).unwrap();
    let second = c
        .points
        .iter()
        .filter(|p| p.provenance == Provenance::TriangleHit { triangle: 1 })
        .count();
    assert!(region_z(second as u64, 1_000_000, 0.75).unwrap().abs() < 3.0);
}

#[test]
fn tetrahedron_faces_by_area() {
    let m = catalog::tetrahedron();
    let c = cloud_triangulated(&m, &mut ScalarSource::pseudo(24), 400_000).unwrap();
    for f in 0..4 {
        let k = c
            .points
            .iter()
            .filter(|p| p.provenance == Provenance::TriangleHit { triangle: f })
            .count();
        assert!(
            region_z(k as u64, 400_000, 0.25).unwrap().abs() < 3.0,
            "face {f}: {k}"
        );
    }
}

#[test]
fn parametric_sphere_cloud() {
    let s = catalog::sphere_parametric(1.0, 256, 256);
    let c = cloud_parametric(&s, &mut ScalarSource::pseudo(25), N).unwrap();
    let pts = c.positions();
    for p in &pts {
        assert!((p.norm() - 1.0).abs() < 1e-12);
    }
    assert_regions(
        &pts,
        &[Region::new("cap z>1/2", 0.25, |p: &Vec3| p.z > 0.5)],
    );
    assert_regions(&pts, &octants());
}

#[test]
fn torus_clouds() {
    let t = catalog::lookup("torus").unwrap();
    // By symmetry each octant holds 1/8 of the area; the band |z| < ρ/2 holds 1/3
    // (area element ∝ R + ρ cos v, v ∈ [−π/6, π/6] ∪ [5π/6, 7π/6]).
    let kin = cloud_implicit(
        t.implicit.as_ref().unwrap(),
        &mut ScalarSource::pseudo(26),
        N,
        &ImplicitSamplerConfig::default(),
    )
    .unwrap();
    let par = cloud_parametric(
        t.parametric.as_ref().unwrap(),
        &mut ScalarSource::pseudo(27),
        N,
    )
    .unwrap();
    for c in [kin, par] {
        let pts = c.positions();
        assert_regions(&pts, &octants());
        assert_regions(
            &pts,
            &[Region::new("band |z| < 1/4", 1.0 / 3.0, |p: &Vec3| {
                p.z.abs() < 0.25
            })],
        );
    }
}

#[test]
fn plane_patch_samplers_agree() {
    let s = catalog::plane_patch_parametric(8, 8);
    let quads: Vec<Region<Vec3>> = (0..4)
        .map(|q| {
            let (ax, ay) = ((q & 1) as f64 * 0.5, (q >> 1) as f64 * 0.5);
            Region::new(format!("quarter {q}"), 0.25, move |p: &Vec3| {
                p.x >= ax && p.x < ax + 0.5 && p.y >= ay && p.y < ay + 0.5
            })
        })
        .collect();
    let a = cloud_parametric(&s, &mut ScalarSource::pseudo(28), N).unwrap();
    let b = cloud_triangulated(
        &catalog::plane_patch_mesh(),
        &mut ScalarSource::pseudo(29),
        N,
    )
    .unwrap();
    assert_regions(&a.positions(), &quads);
    assert_regions(&b.positions(), &quads);
}

#[test]
fn axis_aligned_density_on_plane_is_flat() {
    let s = ImplicitIntersector::new(
        catalog::plane_implicit(2.0),
        ImplicitSamplerConfig::default(),
    )
    .unwrap();
    let c = cloud_axis_aligned(&s, &mut ScalarSource::pseudo(30), N, 2.0).unwrap();
    let pts = c.positions();
    let halves = [
        Region::new("x > 0", 0.5, |p: &Vec3| p.x > 0.0),
        Region::new("inner disk", 0.25, |p: &Vec3| p.x.hypot(p.y) < 1.0),
    ];
    assert_regions(&pts, &halves);
}

#[test]
fn axis_aligned_density_on_sphere_varies_by_root_three() {
    let s = ImplicitIntersector::new(
        catalog::sphere_implicit(1.0, 2.0),
        ImplicitSamplerConfig::default(),
    )
    .unwrap();
    let c = cloud_axis_aligned(&s, &mut ScalarSource::pseudo(31), 400_000, 2.0).unwrap();
    let cap = 5f64.to_radians().cos();
    let count = |dir: Vec3| {
        c.points
            .iter()
            .filter(|p| p.position.dot(dir) > cap)
            .count() as f64
    };
    let axes: f64 = (0..3)
        .map(|i| count(Vec3::axis(i)) + count(-1.0 * Vec3::axis(i)))
        .sum::<f64>()
        / 6.0;
    let mut diag = 0.0;
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                diag += count(Vec3::new(sx, sy, sz).normalized().unwrap());
            }
        }
    }
    let ratio = (diag / 8.0) / axes;
    // Density is proportional to |n1| + |n2| + |n3|, which runs from 1 on the
    // axes to √3 on the diagonals; average it over each cap.
    let expected = cap_mean_l1(Vec3::new(1.0, 1.0, 1.0).normalized().unwrap(), cap)
        / cap_mean_l1(Vec3::Z, cap);
    assert!(expected > 1.5 && expected < 3f64.sqrt());
    assert!(
        (ratio - expected).abs() < 0.03 * expected,
        "{ratio} vs {expected}"
    );
}

fn cap_mean_l1(axis: Vec3, cos_max: f64) -> f64 {
    let (e1, e2) = crofton_core::normals::tangent_frame(
        crofton_core::geometry::UnitVector::new(axis).unwrap(),
    );
    let (e1, e2) = (e1.get(), e2.get());
    let (nt, np) = (400, 400);
    let t_max = cos_max.acos();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..nt {
        let t = (i as f64 + 0.5) * t_max / nt as f64;
        for j in 0..np {
            let ph = (j as f64 + 0.5) * 2.0 * PI / np as f64;
            let n = t.cos() * axis + t.sin() * (ph.cos() * e1 + ph.sin() * e2);
            num += t.sin() * (n.x.abs() + n.y.abs() + n.z.abs());
            den += t.sin();
        }
    }
    num / den
}

#[test]
fn cloud_normals_on_sphere() {
    let s = catalog::sphere_implicit(1.0, 2.0);
    let c = cloud_implicit(
        &s,
        &mut ScalarSource::pseudo(32),
        N,
        &ImplicitSamplerConfig::default(),
    )
    .unwrap();
    let idx = NeighborIndex::new(c.positions());
    let good = (0..idx.len())
        .filter(|&i| {
            let n = normal_cloud(&idx, i, 12, 8).unwrap().get();
            n.dot(idx.points()[i]).abs().min(1.0).acos() < 5f64.to_radians()
        })
        .count();
    assert!(good as f64 >= 0.99 * idx.len() as f64, "{good}");
}

#[test]
fn mesh_and_implicit_pyramid_agree() {
    let mesh = MeshIntersector::new(catalog::pyramid());
    let imp = ImplicitIntersector::new(
        catalog::pyramid_implicit(2.0),
        ImplicitSamplerConfig::default(),
    )
    .unwrap();
    let mut src = ScalarSource::pseudo(33);
    let mut checked = 0;
    for _ in 0..20_000 {
        let l = crofton_core::geometry::sample_line(&mut src, 2.0).unwrap();
        let a = mesh.intersect(&l).unwrap();
        let b = imp.intersect(&l).unwrap();
        // The scan resolves crossings separated by more than one step.
        let step = 2.0 * l.chord(2.0).map_or(0.0, |(t0, t1)| t1 - t0) / 256.0;
        if a.len() == 2 && (a[1].t - a[0].t) < step {
            continue;
        }
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.t - y.t).abs() < 1e-9);
        }
        checked += 1;
    }
    assert!(checked > 19_000);
}
