use crate::error::Result;
use crate::geometry::OrientedLine;
use crate::samplers::{Hit, LineIntersector};
use crate::surfaces::{Triangle, TriangulatedSurface};
use crate::vector::Vec3;

/// Hits closer than this in `t` are merged, so a line through a shared edge
/// or vertex counts once.
pub const EDGE_DEDUP_TOL: f64 = 1e-9;

const LEAF_SIZE: usize = 4;

/// Line/triangle intersection by solving for barycentric coordinates.
/// Edges and vertices count as inside. Returns `(t, u, v)` where the hit is
/// `(1-u-v)·v1 + u·v2 + v·v3`; lines parallel to the triangle plane miss.
pub fn intersect_line_triangle(line: &OrientedLine, tri: &Triangle) -> Option<(f64, f64, f64)> {
    let d = line.direction();
    let o = line.foot();
    let e1 = tri.v2 - tri.v1;
    let e2 = tri.v3 - tri.v1;
    let pvec = d.cross(e2);
    let det = e1.dot(pvec);
    if det.abs() <= 1e-14 * e1.norm() * e2.norm() || det == 0.0 {
        return None;
    }
    let inv = 1.0 / det;
    let tvec = o - tri.v1;
    let u = tvec.dot(pvec) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(e1);
    let v = d.dot(qvec) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    Some((e2.dot(qvec) * inv, u, v))
}

#[derive(Clone, Copy, Debug)]
struct Aabb {
    lo: Vec3,
    hi: Vec3,
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            lo: Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            hi: Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: Vec3) {
        self.lo = self.lo.min(p);
        self.hi = self.hi.max(p);
    }

    /// Whether the infinite line meets the box (closed slabs).
    fn meets(&self, o: Vec3, d: Vec3) -> bool {
        let (mut tmin, mut tmax) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..3 {
            let (oi, di, lo, hi) = (o[i], d[i], self.lo[i], self.hi[i]);
            if di == 0.0 {
                if oi < lo || oi > hi {
                    return false;
                }
                continue;
            }
            let (mut a, mut b) = ((lo - oi) / di, (hi - oi) / di);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            // Pad so rounding never drops a box the line grazes.
            let pad = 1e-12 * (1.0 + a.abs().max(b.abs()));
            tmin = tmin.max(a - pad);
            tmax = tmax.min(b + pad);
            if tmin > tmax {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        bounds: Aabb,
        start: usize,
        end: usize,
    },
    Inner {
        bounds: Aabb,
        left: usize,
        right: usize,
    },
}

/// A triangulated surface with a bounding-volume hierarchy for line queries.
#[derive(Clone, Debug)]
pub struct MeshIntersector {
    mesh: TriangulatedSurface,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl MeshIntersector {
    pub fn new(mesh: TriangulatedSurface) -> Self {
        let tris = mesh.triangles();
        let centroids: Vec<Vec3> = tris.iter().map(|t| (t.v1 + t.v2 + t.v3) / 3.0).collect();
        let mut order: Vec<usize> = (0..tris.len()).collect();
        let mut nodes = Vec::new();
        build(tris, &centroids, &mut order, 0, tris.len(), &mut nodes);
        MeshIntersector { mesh, order, nodes }
    }

    pub fn mesh(&self) -> &TriangulatedSurface {
        &self.mesh
    }
}

fn build(
    tris: &[Triangle],
    centroids: &[Vec3],
    order: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let mut bounds = Aabb::empty();
    let mut cb = Aabb::empty();
    for &i in &order[start..end] {
        for v in tris[i].vertices() {
            bounds.grow(v);
        }
        cb.grow(centroids[i]);
    }
    let id = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { bounds, start, end });
        return id;
    }
    let ext = cb.hi - cb.lo;
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = start + (end - start) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        centroids[a][axis]
            .total_cmp(&centroids[b][axis])
            .then(a.cmp(&b))
    });
    nodes.push(Node::Leaf {
        bounds,
        start: 0,
        end: 0,
    });
    let left = build(tris, centroids, order, start, mid, nodes);
    let right = build(tris, centroids, order, mid, end, nodes);
    nodes[id] = Node::Inner {
        bounds,
        left,
        right,
    };
    id
}

impl LineIntersector for MeshIntersector {
    fn intersect(&self, line: &OrientedLine) -> Result<Vec<Hit>> {
        let (o, d) = (line.foot(), line.direction());
        let tris = self.mesh.triangles();
        let mut raw: Vec<(f64, usize)> = Vec::new();
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Leaf { bounds, start, end } => {
                    if !bounds.meets(o, d) {
                        continue;
                    }
                    for &i in &self.order[*start..*end] {
                        if let Some((t, _, _)) = intersect_line_triangle(line, &tris[i]) {
                            raw.push((t, i));
                        }
                    }
                }
                Node::Inner {
                    bounds,
                    left,
                    right,
                } => {
                    if bounds.meets(o, d) {
                        stack.push(*right);
                        stack.push(*left);
                    }
                }
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut hits: Vec<Hit> = Vec::with_capacity(raw.len());
        for (t, i) in raw {
            if let Some(prev) = hits.last() {
                if t - prev.t < EDGE_DEDUP_TOL {
                    continue;
                }
            }
            hits.push(Hit {
                t,
                point: line.at(t),
                normal: tris[i].normal(),
                triangle: Some(i),
            });
        }
        Ok(hits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_line;
    use crate::surfaces::catalog;

    #[test]
    fn hits_interior_and_misses_outside() {
        let t = Triangle::new(Vec3::ZERO, Vec3::X, Vec3::Y);
        let l = make_line(Vec3::Z, Vec3::new(0.2, 0.2, 5.0)).unwrap();
        let (tt, u, v) = intersect_line_triangle(&l, &t).unwrap();
        assert!(tt.abs() < 1e-15 && (u - 0.2).abs() < 1e-15 && (v - 0.2).abs() < 1e-15);
        let miss = make_line(Vec3::Z, Vec3::new(0.8, 0.8, 0.0)).unwrap();
        assert!(intersect_line_triangle(&miss, &t).is_none());
        let parallel = make_line(Vec3::X, Vec3::new(0.0, 0.2, 0.0)).unwrap();
        assert!(intersect_line_triangle(&parallel, &t).is_none());
    }

    #[test]
    fn shared_edge_counts_once() {
        let m = catalog::plane_patch_mesh();
        let bvh = MeshIntersector::new(m);
        // Through the diagonal shared by both triangles.
        let l = make_line(Vec3::Z, Vec3::new(0.5, 0.5, 0.0)).unwrap();
        assert_eq!(bvh.intersect(&l).unwrap().len(), 1);
        // Through a vertex of the tetrahedron shared by three faces.
        let tet = MeshIntersector::new(catalog::tetrahedron());
        let s = 1.0 / 3f64.sqrt();
        let l = make_line(Vec3::new(1.0, 1.0, 1.0).normalized().unwrap(), Vec3::ZERO).unwrap();
        let hits = tet.intersect(&l).unwrap();
        assert_eq!(hits.len(), 2, "{hits:?}");
        assert!((hits[1].point - s * Vec3::new(1.0, 1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn bvh_matches_brute_force() {
        let mesh = catalog::sphere_parametric(1.0, 24, 24)
            .triangulate()
            .unwrap()
            .mesh;
        let bvh = MeshIntersector::new(mesh.clone());
        let mut src = crate::rng::ScalarSource::pseudo(3);
        for _ in 0..2000 {
            let l = crate::geometry::sample_line(&mut src, 1.5).unwrap();
            let mut brute: Vec<f64> = mesh
                .triangles()
                .iter()
                .filter_map(|t| intersect_line_triangle(&l, t).map(|h| h.0))
                .collect();
            brute.sort_by(f64::total_cmp);
            brute.dedup_by(|b, a| *b - *a < EDGE_DEDUP_TOL);
            let got: Vec<f64> = bvh.intersect(&l).unwrap().iter().map(|h| h.t).collect();
            assert_eq!(got, brute);
        }
    }
}
