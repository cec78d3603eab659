//! Oriented lines, the two-reflection rotation taking one unit vector to
//! another, and line sampling with respect to kinematic measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{sample_ball, sample_sphere, unit_ball_volume, unit_sphere_area, ScalarSource};
use crate::vector::Vec3;

/// Tolerance on `|‖v‖ - 1|` accepted for unit vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// Lower bound on `⟨s, s⟩` (with `s = uI + uF`) below which the rotation
/// from `uI` to `uF` is treated as undefined.
pub const ANTIPODAL_TOL: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitVector(Vec3);

impl UnitVector {
    /// Accepts `v` only if it is already unit length within [`UNIT_TOL`].
    pub fn new(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_TOL || !norm.is_finite() {
            return Err(Error::NotUnit { norm });
        }
        Ok(UnitVector(v))
    }

    pub fn normalize(v: Vec3) -> Option<Self> {
        v.normalized().map(UnitVector)
    }

    pub(crate) fn new_unchecked(v: Vec3) -> Self {
        UnitVector(v)
    }

    #[inline]
    pub fn get(self) -> Vec3 {
        self.0
    }
}

/// Oriented line `t ↦ t·dir + foot` with `foot ⊥ dir`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedLine {
    dir: UnitVector,
    foot: Vec3,
}

impl OrientedLine {
    /// Canonical form of the line through `q` with direction `v`.
    pub fn through(v: UnitVector, q: Vec3) -> Self {
        let d = v.get();
        OrientedLine {
            dir: v,
            foot: q - q.dot(d) * d,
        }
    }

    pub fn direction(&self) -> Vec3 {
        self.dir.get()
    }

    pub fn unit_direction(&self) -> UnitVector {
        self.dir
    }

    /// Point of the line nearest the origin.
    pub fn foot(&self) -> Vec3 {
        self.foot
    }

    #[inline]
    pub fn at(&self, t: f64) -> Vec3 {
        self.foot + t * self.dir.get()
    }

    /// Parameter interval on which the line lies inside the closed ball of
    /// radius `r`, or `None` if it misses the open ball.
    pub fn chord(&self, r: f64) -> Option<(f64, f64)> {
        let p2 = self.foot.norm_squared();
        if p2 >= r * r {
            return None;
        }
        let h = (r * r - p2).sqrt();
        Some((-h, h))
    }
}

/// Builds the canonical line through `q` with direction `v`; `v` must be unit.
pub fn make_line(v: Vec3, q: Vec3) -> Result<OrientedLine> {
    Ok(OrientedLine::through(UnitVector::new(v)?, q))
}

/// Oriented line in `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedLineN {
    pub dir: Vec<f64>,
    pub foot: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix3 {
    pub m: [[f64; 3]; 3],
}

impl RotationMatrix3 {
    pub const IDENTITY: RotationMatrix3 = RotationMatrix3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn transpose(&self) -> RotationMatrix3 {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = self.m[j][i];
            }
        }
        RotationMatrix3 { m: t }
    }

    pub fn mul(&self, o: &RotationMatrix3) -> RotationMatrix3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        RotationMatrix3 { m: r }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entry of `|RᵀR - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.transpose().mul(self);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.m[i][j] - target).abs());
            }
        }
        worst
    }
}

/// Rotation taking `ui` to `uf` and fixing the orthogonal complement of their
/// span: `R = I + 2·uF·uIᵀ − (2/⟨s,s⟩)·s·sᵀ` with `s = uI + uF`.
pub fn rotation_from_to(ui: UnitVector, uf: UnitVector) -> Result<RotationMatrix3> {
    let (a, b) = (ui.get().to_array(), uf.get().to_array());
    let s = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
    let two_b = [2.0 * b[0], 2.0 * b[1], 2.0 * b[2]];
    let s_dot_s = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
    if !(s_dot_s > ANTIPODAL_TOL) {
        return Err(Error::AntipodalRotation);
    }
    let k = 2.0 / s_dot_s;
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let id = if i == j { 1.0 } else { 0.0 };
            *c = id + two_b[i] * a[j] - k * s[i] * s[j];
        }
    }
    Ok(RotationMatrix3 { m })
}

/// Random oriented line in `R^3` meeting the ball of radius `r`, distributed by
/// normalized kinematic measure: a uniform direction, then a uniform foot in
/// the radius-`r` disk orthogonal to it.
pub fn sample_line(src: &mut ScalarSource, r: f64) -> Result<OrientedLine> {
    check_radius(r)?;
    let (v, rot) = loop {
        let s = sample_sphere(src, 3)?;
        let v = UnitVector::new_unchecked(Vec3::new(s[0], s[1], s[2]));
        // v = -e3 has probability zero; draw again if it happens.
        if let Ok(rot) = rotation_from_to(UnitVector::new_unchecked(Vec3::Z), v) {
            break (v, rot);
        }
    };
    let d = sample_ball(src, 2)?;
    let q = rot.apply(Vec3::new(r * d[0], r * d[1], 0.0));
    // Project once more to remove the rotation's rounding along v.
    Ok(OrientedLine::through(v, q))
}

/// Foot point drawn in the radius-`r` disk of `v⊥` for a line with fixed
/// direction `v` (one of the coordinate axes, up to sign).
pub(crate) fn sample_axis_line(src: &mut ScalarSource, r: f64) -> Result<OrientedLine> {
    check_radius(r)?;
    let pick = ((src.next_unit() * 6.0) as usize).min(5);
    let axis = pick / 2;
    let sign = if pick.is_multiple_of(2) { 1.0 } else { -1.0 };
    let d = sample_ball(src, 2)?;
    let mut foot = [0.0; 3];
    foot[(axis + 1) % 3] = r * d[0];
    foot[(axis + 2) % 3] = r * d[1];
    Ok(OrientedLine {
        dir: UnitVector::new_unchecked(sign * Vec3::axis(axis)),
        foot: Vec3::from_array(foot),
    })
}

/// Kinematic line sample in `R^n`; the disk basis of `v⊥` comes from
/// Gram-Schmidt on the coordinate axes least aligned with `v`.
pub fn sample_line_n(src: &mut ScalarSource, n: usize, r: f64) -> Result<OrientedLineN> {
    if n < 2 {
        return Err(Error::InvalidArgument("line space needs n >= 2".into()));
    }
    if n == 3 {
        let l = sample_line(src, r)?;
        return Ok(OrientedLineN {
            dir: l.direction().to_array().to_vec(),
            foot: l.foot().to_array().to_vec(),
        });
    }
    check_radius(r)?;
    let v = sample_sphere(src, n)?;
    let basis = orthonormal_complement(&v);
    let b = sample_ball(src, n - 1)?;
    let mut foot = vec![0.0; n];
    for (coef, e) in b.iter().zip(&basis) {
        for (f, c) in foot.iter_mut().zip(e) {
            *f += r * coef * c;
        }
    }
    Ok(OrientedLineN { dir: v, foot })
}

/// Orthonormal basis of `v⊥` for a unit `v`, seeded by the axes in
/// increasing order of `|v_i|`.
pub fn orthonormal_complement(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()).then(i.cmp(&j)));
    let mut frame: Vec<Vec<f64>> = vec![v.to_vec()];
    for &axis in order.iter().take(n - 1) {
        let mut e = vec![0.0; n];
        e[axis] = 1.0;
        // Two passes of modified Gram-Schmidt keep the basis orthogonal to 1e-15.
        for _ in 0..2 {
            for q in &frame {
                let d: f64 = e.iter().zip(q).map(|(a, b)| a * b).sum();
                for (x, y) in e.iter_mut().zip(q) {
                    *x -= d * y;
                }
            }
        }
        let norm = e.iter().map(|c| c * c).sum::<f64>().sqrt();
        for x in &mut e {
            *x /= norm;
        }
        frame.push(e);
    }
    frame.remove(0);
    frame
}

/// Total kinematic measure of the lines meeting the radius-`r` ball in `R^n`:
/// `area(S^{n-1}) · κ_{n-1} · r^{n-1}`.
pub fn kinematic_mass(n: usize, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument("line space needs n >= 2".into()));
    }
    check_radius(r)?;
    Ok(unit_sphere_area(n) * unit_ball_volume(n as i32 - 1)? * r.powi(n as i32 - 1))
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "clip radius must be positive, got {r}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit(x: f64, y: f64, z: f64) -> UnitVector {
        UnitVector::normalize(Vec3::new(x, y, z)).unwrap()
    }

    #[test]
    fn make_line_drops_direction_component() {
        let l = make_line(Vec3::Z, Vec3::new(1.0, 2.0, 5.0)).unwrap();
        assert_eq!(l.foot(), Vec3::new(1.0, 2.0, 0.0));
        let l = make_line(Vec3::X, Vec3::new(7.0, 0.0, 0.0)).unwrap();
        assert_eq!(l.foot(), Vec3::ZERO);
        assert!(make_line(Vec3::new(2.0, 0.0, 0.0), Vec3::ZERO).is_err());
    }

    #[test]
    fn make_line_is_idempotent() {
        let mut src = ScalarSource::pseudo(11);
        for _ in 0..1000 {
            let l = sample_line(&mut src, 5.0).unwrap();
            let again = OrientedLine::through(l.unit_direction(), l.foot());
            let delta = (again.foot() - l.foot()).norm();
            assert!(
                delta <= 1e-15 * l.foot().norm().max(1e-300),
                "delta {delta}"
            );
        }
    }

    #[test]
    fn identity_rotation() {
        let r = rotation_from_to(unit(0.0, 0.0, 1.0), unit(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(r, RotationMatrix3::IDENTITY);
    }

    #[test]
    fn e3_to_e1() {
        // s = (1,0,1): R = I + 2 e1 e3ᵀ - s sᵀ.
        let r = rotation_from_to(unit(0.0, 0.0, 1.0), unit(1.0, 0.0, 0.0)).unwrap();
        let want = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]];
        for (row, want_row) in r.m.iter().zip(&want) {
            for (a, b) in row.iter().zip(want_row) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        assert_eq!(r.apply(Vec3::Y), Vec3::Y);
    }

    #[test]
    fn antipodal_rejected() {
        let e = unit(0.3, -0.4, 0.5);
        let err = rotation_from_to(e, UnitVector::new_unchecked(-e.get())).unwrap_err();
        assert_eq!(err, Error::AntipodalRotation);
    }

    #[test]
    fn reverse_rotation_is_transpose() {
        let mut src = ScalarSource::pseudo(2);
        for _ in 0..1000 {
            let a = sample_line(&mut src, 1.0).unwrap().unit_direction();
            let b = sample_line(&mut src, 1.0).unwrap().unit_direction();
            let Ok(fwd) = rotation_from_to(a, b) else {
                continue;
            };
            let back = rotation_from_to(b, a).unwrap().transpose();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((fwd.m[i][j] - back.m[i][j]).abs() < 1e-12);
                }
            }
            assert!((fwd.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_lines_are_canonical() {
        let mut src = ScalarSource::pseudo(3);
        for r in [0.5, 2.0, 1e3] {
            for _ in 0..10_000 {
                let l = sample_line(&mut src, r).unwrap();
                let p = l.foot();
                assert!(p.norm() < r);
                assert!(p.dot(l.direction()).abs() < 1e-10 * (1.0 + p.norm()));
                assert!((l.direction().norm() - 1.0).abs() < 1e-12);
            }
        }
        assert!(sample_line(&mut src, 0.0).is_err());
        assert!(sample_line(&mut src, -1.0).is_err());
    }

    #[test]
    fn general_dimension_lines() {
        let mut src = ScalarSource::pseudo(4);
        for n in [2usize, 4, 5, 7] {
            for _ in 0..2000 {
                let l = sample_line_n(&mut src, n, 1.5).unwrap();
                let dot: f64 = l.dir.iter().zip(&l.foot).map(|(a, b)| a * b).sum();
                let pn = l.foot.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!(pn < 1.5);
                assert!(dot.abs() < 1e-10 * (1.0 + pn));
            }
        }
    }

    #[test]
    fn complement_is_orthonormal() {
        let v = [0.6, 0.0, 0.8, 0.0];
        let b = orthonormal_complement(&v);
        assert_eq!(b.len(), 3);
        let mut all = vec![v.to_vec()];
        all.extend(b);
        for i in 0..4 {
            for j in 0..4 {
                let d: f64 = all[i].iter().zip(&all[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kinematic_masses() {
        assert!((kinematic_mass(3, 1.0).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        assert!((kinematic_mass(3, 2.0).unwrap() - 16.0 * PI * PI).abs() < 1e-12);
        assert!((kinematic_mass(2, 1.0).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!(kinematic_mass(1, 1.0).is_err());
    }

    #[test]
    fn chord_limits() {
        let l = make_line(Vec3::Z, Vec3::new(0.5, 0.0, 0.0)).unwrap();
        let (a, b) = l.chord(1.0).unwrap();
        assert!((b - 0.75f64.sqrt()).abs() < 1e-15 && a == -b);
        let far = make_line(Vec3::Z, Vec3::new(2.0, 0.0, 0.0)).unwrap();
        assert!(far.chord(1.0).is_none());
    }
}
