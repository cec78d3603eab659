//! Surface normals: from gradients of level sets, and from a bare cloud by
//! averaging cross products over nearby point pairs.

use crate::error::{Error, Result};
use crate::geometry::UnitVector;
use crate::rng::ScalarSource;
use crate::surfaces::ImplicitSurface;
use crate::vector::Vec3;

/// Gradient norms at or below this are treated as critical points.
pub const CRITICAL_GRADIENT: f64 = 1e-8;

pub const DEFAULT_NEIGHBORS: usize = 12;
pub const DEFAULT_PAIRS: usize = 8;

/// `∇f / ‖∇f‖` at `x`.
pub fn normal_implicit(s: &ImplicitSurface, x: Vec3) -> Result<UnitVector> {
    let g = s.gradient(x);
    let n = g.norm();
    if !(n > CRITICAL_GRADIENT) {
        return Err(Error::CriticalPoint {
            x: x.x,
            y: x.y,
            z: x.z,
        });
    }
    Ok(UnitVector::new_unchecked(g / n))
}

/// Orthonormal tangent vectors completing `nu`, from Gram-Schmidt on the two
/// coordinate axes least aligned with `nu`.
pub fn tangent_frame(nu: UnitVector) -> (UnitVector, UnitVector) {
    let n = nu.get();
    let mut axes = [0usize, 1, 2];
    axes.sort_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()).then(a.cmp(&b)));
    let (f1, f2) = (Vec3::axis(axes[0]), Vec3::axis(axes[1]));
    let e1 = (f1 - f1.dot(n) * n)
        .normalized()
        .expect("axis not parallel to nu");
    let mut e2 = f2 - f2.dot(n) * n - f2.dot(e1) * e1;
    // A second pass keeps the frame orthonormal to rounding.
    e2 = e2 - e2.dot(n) * n - e2.dot(e1) * e1;
    let e2 = e2.normalized().expect("independent axes");
    (UnitVector::new_unchecked(e1), UnitVector::new_unchecked(e2))
}

/// Uniform grid over a point set for nearest-neighbor queries.
#[derive(Clone, Debug)]
pub struct NeighborIndex {
    points: Vec<Vec3>,
    lo: Vec3,
    h: f64,
    dims: [usize; 3],
    /// `cell_start[c]..cell_start[c+1]` indexes `sorted` for cell `c`.
    cell_start: Vec<usize>,
    sorted: Vec<usize>,
}

impl NeighborIndex {
    /// Cell size `(bounding-box volume / N)^{1/3}`, falling back to the
    /// area or length of the box for flat or collinear clouds.
    pub fn new(points: Vec<Vec3>) -> Self {
        let n = points.len().max(1);
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for &p in &points {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        if points.is_empty() {
            lo = Vec3::ZERO;
            hi = Vec3::ZERO;
        }
        let ext = hi - lo;
        let mut sides: Vec<f64> = [ext.x, ext.y, ext.z]
            .into_iter()
            .filter(|e| *e > 0.0)
            .collect();
        sides.sort_by(|a, b| b.total_cmp(a));
        let mut h = match sides.len() {
            3 => (sides[0] * sides[1] * sides[2] / n as f64).cbrt(),
            2 => (sides[0] * sides[1] / n as f64).sqrt(),
            1 => sides[0] / n as f64,
            _ => 1.0,
        };
        let cells_for = |h: f64| {
            let d = |e: f64| (e / h).floor() as usize + 1;
            [d(ext.x), d(ext.y), d(ext.z)]
        };
        let mut dims = cells_for(h);
        while dims.iter().map(|&d| d as f64).product::<f64>() > 8.0 * n as f64 + 8.0 {
            h *= 1.5;
            dims = cells_for(h);
        }
        let mut idx = NeighborIndex {
            points,
            lo,
            h,
            dims,
            cell_start: Vec::new(),
            sorted: Vec::new(),
        };
        let ncell = dims[0] * dims[1] * dims[2];
        let cells: Vec<usize> = idx
            .points
            .iter()
            .map(|&p| idx.flat(idx.cell_of(p)))
            .collect();
        let mut start = vec![0usize; ncell + 1];
        for &c in &cells {
            start[c + 1] += 1;
        }
        for c in 0..ncell {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut sorted = vec![0usize; idx.points.len()];
        for (i, &c) in cells.iter().enumerate() {
            sorted[fill[c]] = i;
            fill[c] += 1;
        }
        idx.cell_start = start;
        idx.sorted = sorted;
        idx
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn cell_size(&self) -> f64 {
        self.h
    }

    fn cell_of(&self, p: Vec3) -> [usize; 3] {
        let c =
            |v: f64, lo: f64, d: usize| (((v - lo) / self.h).floor().max(0.0) as usize).min(d - 1);
        [
            c(p.x, self.lo.x, self.dims[0]),
            c(p.y, self.lo.y, self.dims[1]),
            c(p.z, self.lo.z, self.dims[2]),
        ]
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[0] * self.dims[1] + c[1]) * self.dims[2] + c[2]
    }

    /// The `k` points nearest to point `i`, excluding `i`, ordered by
    /// distance and then index.
    pub fn knn(&self, i: usize, k: usize) -> Vec<usize> {
        self.knn_point(self.points[i], k, Some(i))
    }

    /// The `k` points nearest to `q` (ties by index), optionally skipping one.
    pub fn knn_point(&self, q: Vec3, k: usize, exclude: Option<usize>) -> Vec<usize> {
        let available = self.points.len() - usize::from(exclude.is_some());
        let k = k.min(available);
        if k == 0 {
            return Vec::new();
        }
        let home = self.cell_of(q);
        let max_shell = *self.dims.iter().max().expect("three dims");
        let mut best: Vec<(f64, usize)> = Vec::new();
        for s in 0..=max_shell {
            self.visit_shell(home, s, |j| {
                if Some(j) != exclude {
                    best.push((self.points[j].distance_squared(q), j));
                }
            });
            if best.len() >= k {
                best.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                best.truncate(k);
                // Unvisited cells lie at least s·h away from q.
                let reach = s as f64 * self.h * (1.0 - 1e-9);
                if best[k - 1].0.sqrt() < reach {
                    break;
                }
            }
        }
        best.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        best.truncate(k);
        best.into_iter().map(|(_, j)| j).collect()
    }

    /// Calls `f` for every point in cells at Chebyshev distance exactly `s`
    /// from `home`.
    fn visit_shell<F: FnMut(usize)>(&self, home: [usize; 3], s: usize, mut f: F) {
        let s = s as isize;
        let range = |c: usize, d: usize| {
            let lo = (c as isize - s).max(0);
            let hi = (c as isize + s).min(d as isize - 1);
            lo..=hi
        };
        for x in range(home[0], self.dims[0]) {
            let dx = (x - home[0] as isize).abs();
            for y in range(home[1], self.dims[1]) {
                let dy = (y - home[1] as isize).abs();
                for z in range(home[2], self.dims[2]) {
                    let dz = (z - home[2] as isize).abs();
                    if dx.max(dy).max(dz) != s {
                        continue;
                    }
                    let c = self.flat([x as usize, y as usize, z as usize]);
                    for &j in &self.sorted[self.cell_start[c]..self.cell_start[c + 1]] {
                        f(j);
                    }
                }
            }
        }
    }
}

/// Normal at point `i` of a cloud: the normalized sum of cross products
/// `(q − p) × (r − p)` over `pairs` distinct neighbor pairs chosen among the
/// `k` nearest neighbors, each flipped to agree with the first nonzero one.
/// The pair choice is seeded by `i`, so results are reproducible.
pub fn normal_cloud(index: &NeighborIndex, i: usize, k: usize, pairs: usize) -> Result<UnitVector> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need k >= 2 neighbors, got {k}"
        )));
    }
    if index.len() < k + 1 {
        return Err(Error::TooFewPoints {
            needed: k + 1,
            have: index.len(),
        });
    }
    let p = index.points()[i];
    let nb = index.knn(i, k);
    let mut all: Vec<(usize, usize)> = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..nb.len() {
        for b in a + 1..nb.len() {
            all.push((nb[a], nb[b]));
        }
    }
    let q = pairs.max(1).min(all.len());
    let mut src = ScalarSource::pseudo(i as u64);
    // Partial Fisher-Yates: the first q entries become a uniform choice.
    for j in 0..q {
        let pick = j + ((src.next_unit() * (all.len() - j) as f64) as usize).min(all.len() - j - 1);
        all.swap(j, pick);
    }
    let mut reference: Option<Vec3> = None;
    let mut sum = Vec3::ZERO;
    for &(a, b) in &all[..q] {
        let (u, v) = (index.points()[a] - p, index.points()[b] - p);
        let mut c = u.cross(v);
        if !(c.norm() > 1e-12 * u.norm() * v.norm()) {
            continue;
        }
        match reference {
            None => reference = Some(c),
            Some(r) => {
                if c.dot(r) < 0.0 {
                    c = -c;
                }
            }
        }
        sum += c;
    }
    sum.normalized()
        .map(UnitVector::new_unchecked)
        .ok_or(Error::DegenerateNeighborhood { index: i })
}
