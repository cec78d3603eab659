//! Advisory checks that a surface is a genuine surface: nonvanishing gradient
//! for level sets, full-rank differential for charts, and edge/vertex
//! conditions for triangle lists. Samplers never depend on these.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::sample_line;
use crate::rng::ScalarSource;
use crate::samplers::{intersect_line_implicit, ImplicitSamplerConfig};
use crate::surfaces::{ImplicitSurface, ParametricSurface, Surface, TriangulatedSurface};
use crate::vector::Vec3;

/// Gradient norms below this are flagged.
pub const GRADIENT_FLOOR: f64 = 1e-8;

/// Brute-force vertex-on-edge search is skipped above this many
/// vertex/edge pairs.
pub const T_JUNCTION_PAIR_LIMIT: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Finding {
    VanishingGradient { point: Vec3, norm: f64 },
    RankDrop { u: f64, v: f64 },
    BoundaryEdge { a: Vec3, b: Vec3 },
    NonManifoldEdge { a: Vec3, b: Vec3, triangles: usize },
    VertexOnEdge { vertex: Vec3, a: Vec3, b: Vec3 },
    BoundaryVertex { vertex: Vec3, boundary_edges: usize },
    DuplicateTriangle { first: usize, second: usize },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::VanishingGradient { point, norm } => write!(
                f,
                "gradient nearly vanishes at ({}, {}, {}): |grad f| = {norm:e}",
                point.x, point.y, point.z
            ),
            Finding::RankDrop { u, v } => {
                write!(f, "chart differential drops rank at (u, v) = ({u}, {v})")
            }
            Finding::BoundaryEdge { a, b } => write!(f, "boundary edge {a:?} - {b:?}"),
            Finding::NonManifoldEdge { a, b, triangles } => {
                write!(f, "edge {a:?} - {b:?} shared by {triangles} triangles")
            }
            Finding::VertexOnEdge { vertex, a, b } => {
                write!(f, "vertex {vertex:?} lies inside edge {a:?} - {b:?}")
            }
            Finding::BoundaryVertex {
                vertex,
                boundary_edges,
            } => write!(
                f,
                "boundary vertex {vertex:?} touches {boundary_edges} boundary edges (expected 2)"
            ),
            Finding::DuplicateTriangle { first, second } => {
                write!(f, "triangles {first} and {second} have the same vertices")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    /// Points, grid nodes or edges examined.
    pub probes: usize,
    /// Set when a check was skipped for size.
    pub skipped: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn boundary_edges(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| matches!(f, Finding::BoundaryEdge { .. }))
            .count()
    }

    pub fn count<P: Fn(&Finding) -> bool>(&self, pred: P) -> usize {
        self.findings.iter().filter(|f| pred(f)).count()
    }
}

pub fn validate(surface: &Surface) -> ValidationReport {
    match surface {
        Surface::Implicit(s) => validate_implicit(s, 2000, 0),
        Surface::Parametric(p) => validate_parametric(p),
        Surface::Triangulated(m) => validate_triangulated(m),
    }
}

/// Probes the gradient at points of the level set: crossings of `lines`
/// random lines, plus nodes of a 17³ lattice over the clip cube where the
/// field is exactly zero.
pub fn validate_implicit(s: &ImplicitSurface, lines: usize, seed: u64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let r = s.clip_radius();
    let mut probes: Vec<Vec3> = Vec::new();
    let steps = 16;
    for i in 0..=steps {
        for j in 0..=steps {
            for k in 0..=steps {
                let c = |n: usize| -r + 2.0 * r * n as f64 / steps as f64;
                let p = Vec3::new(c(i), c(j), c(k));
                if p.norm() <= r && s.value(p) == 0.0 {
                    probes.push(p);
                }
            }
        }
    }
    let mut src = ScalarSource::pseudo(seed);
    let cfg = ImplicitSamplerConfig::default();
    for _ in 0..lines {
        let Ok(line) = sample_line(&mut src, r) else {
            break;
        };
        match intersect_line_implicit(s, &line, &cfg) {
            Ok(hits) => probes.extend(hits.iter().map(|h| h.point)),
            Err(e) => report.skipped.push(e.to_string()),
        }
    }
    for p in &probes {
        let norm = s.gradient(*p).norm();
        if !(norm >= GRADIENT_FLOOR) {
            report
                .findings
                .push(Finding::VanishingGradient { point: *p, norm });
        }
    }
    report.probes = probes.len();
    report
}

/// Rank of the chart differential at every grid node.
pub fn validate_parametric(s: &ParametricSurface) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (nu, nv) = s.resolution();
    for i in 0..nu {
        for j in 0..nv {
            let (u, v) = s.grid_point(i, j);
            if s.normal(u, v).is_none() {
                report.findings.push(Finding::RankDrop { u, v });
            }
        }
    }
    report.probes = nu * nv;
    report
}

fn key(v: Vec3) -> [u64; 3] {
    // Normalise -0.0 so it matches 0.0.
    [
        (v.x + 0.0).to_bits(),
        (v.y + 0.0).to_bits(),
        (v.z + 0.0).to_bits(),
    ]
}

/// Combinatorial checks with vertices identified by exact coordinates:
/// every edge lies on one (boundary) or two triangles, no vertex sits inside
/// an edge, every boundary vertex touches exactly two boundary edges, and no
/// triangle is repeated. Overlap of triangle interiors is only detected in
/// the repeated-triangle case.
pub fn validate_triangulated(m: &TriangulatedSurface) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut ids: HashMap<[u64; 3], usize> = HashMap::new();
    let mut verts: Vec<Vec3> = Vec::new();
    let mut id = |v: Vec3| {
        *ids.entry(key(v)).or_insert_with(|| {
            verts.push(v);
            verts.len() - 1
        })
    };
    let tri_ids: Vec<[usize; 3]> = m
        .triangles()
        .iter()
        .map(|t| [id(t.v1), id(t.v2), id(t.v3)])
        .collect();

    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
    for (k, t) in tri_ids.iter().enumerate() {
        let mut sorted = *t;
        sorted.sort_unstable();
        if sorted[0] == sorted[1] || sorted[1] == sorted[2] {
            continue;
        }
        if let Some(&first) = seen.get(&sorted) {
            report
                .findings
                .push(Finding::DuplicateTriangle { first, second: k });
        } else {
            seen.insert(sorted, k);
        }
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }

    let mut edge_list: Vec<((usize, usize), usize)> = edges.into_iter().collect();
    edge_list.sort_unstable();
    let mut boundary_degree = vec![0usize; verts.len()];
    for &((a, b), n) in &edge_list {
        match n {
            1 => {
                boundary_degree[a] += 1;
                boundary_degree[b] += 1;
                report.findings.push(Finding::BoundaryEdge {
                    a: verts[a],
                    b: verts[b],
                });
            }
            2 => {}
            _ => report.findings.push(Finding::NonManifoldEdge {
                a: verts[a],
                b: verts[b],
                triangles: n,
            }),
        }
    }
    for (v, &d) in boundary_degree.iter().enumerate() {
        if d != 0 && d != 2 {
            report.findings.push(Finding::BoundaryVertex {
                vertex: verts[v],
                boundary_edges: d,
            });
        }
    }

    if verts.len().saturating_mul(edge_list.len()) <= T_JUNCTION_PAIR_LIMIT {
        for &((a, b), _) in &edge_list {
            let (pa, pb) = (verts[a], verts[b]);
            let e = pb - pa;
            let len2 = e.norm_squared();
            for (v, &pv) in verts.iter().enumerate() {
                if v == a || v == b {
                    continue;
                }
                let s = (pv - pa).dot(e) / len2;
                if s <= 0.0 || s >= 1.0 {
                    continue;
                }
                let off = (pv - pa - s * e).norm();
                if off <= 1e-12 * len2.sqrt() {
                    report.findings.push(Finding::VertexOnEdge {
                        vertex: pv,
                        a: pa,
                        b: pb,
                    });
                }
            }
        }
    } else {
        report
            .skipped
            .push("vertex-on-edge search skipped for large mesh".into());
    }
    report.probes = edge_list.len();
    report
}
