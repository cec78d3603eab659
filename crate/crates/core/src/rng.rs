//! Scalar sources on `[0, 1)` and the combinators that turn them into
//! equidistributed samples on boxes, unions, balls and spheres.
//!
//! Every source is a pure function of its kind and seed (or radix), so all
//! downstream samplers are reproducible bit-for-bit.

use crate::error::{Error, Result};
use crate::samplers::find_interval;

/// Attempts allowed per rejection sample before giving up.
pub const DEFAULT_REJECTION_CAP: usize = 10_000;

/// Dimension from which balls and spheres are sampled through Gaussian
/// deviates instead of rejection from the enclosing cube.
pub const GAUSSIAN_ROUTE_MIN_DIM: usize = 5;

const TWO_POW_MINUS_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    /// splitmix64 stream.
    Pseudo { seed: u64 },
    /// Radical-inverse sequence in the given radix, starting at index 1.
    VanDerCorput { radix: u32 },
    /// Binary van der Corput values reordered so each block of odd
    /// numerators over `2^k` comes out in increasing order. Not equidistributed;
    /// kept as a negative fixture.
    VanDerCorputRearranged,
}

#[derive(Clone, Debug)]
enum State {
    SplitMix(u64),
    Radical { index: u64 },
    Rearranged { level: u32, numerator: u64 },
}

/// A deterministic stream of values in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct ScalarSource {
    kind: SourceKind,
    state: State,
}

impl ScalarSource {
    pub fn new(kind: SourceKind) -> Result<Self> {
        let state = match kind {
            SourceKind::Pseudo { seed } => State::SplitMix(seed),
            SourceKind::VanDerCorput { radix } => {
                if radix < 2 {
                    return Err(Error::InvalidArgument(format!(
                        "van der Corput radix must be >= 2, got {radix}"
                    )));
                }
                State::Radical { index: 1 }
            }
            SourceKind::VanDerCorputRearranged => State::Rearranged {
                level: 1,
                numerator: 1,
            },
        };
        Ok(ScalarSource { kind, state })
    }

    pub fn pseudo(seed: u64) -> Self {
        ScalarSource {
            kind: SourceKind::Pseudo { seed },
            state: State::SplitMix(seed),
        }
    }

    pub fn van_der_corput(radix: u32) -> Result<Self> {
        Self::new(SourceKind::VanDerCorput { radix })
    }

    pub fn van_der_corput_rearranged() -> Self {
        ScalarSource {
            kind: SourceKind::VanDerCorputRearranged,
            state: State::Rearranged {
                level: 1,
                numerator: 1,
            },
        }
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    /// Raw 64-bit output of the splitmix64 step. Only meaningful for `Pseudo`.
    fn next_splitmix(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Next value in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        match &mut self.state {
            State::SplitMix(s) => (Self::next_splitmix(s) >> 11) as f64 * TWO_POW_MINUS_53,
            State::Radical { index } => {
                let radix = match self.kind {
                    SourceKind::VanDerCorput { radix } => radix as u64,
                    _ => unreachable!(),
                };
                let v = radical_inverse(*index, radix);
                *index += 1;
                v
            }
            State::Rearranged { level, numerator } => {
                let denom = (1u64 << *level) as f64;
                let v = *numerator as f64 / denom;
                *numerator += 2;
                if *numerator >= 1u64 << *level {
                    // Past 2^53 the values are no longer distinct doubles; saturate.
                    if *level < 53 {
                        *level += 1;
                    }
                    *numerator = 1;
                }
                v
            }
        }
    }

    /// Fills `out` with consecutive draws.
    pub fn fill(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.next_unit();
        }
    }
}

/// Radical inverse of `index` in `radix`, clamped below 1.
fn radical_inverse(mut index: u64, radix: u64) -> f64 {
    let inv_radix = 1.0 / radix as f64;
    let mut value = 0.0;
    let mut scale = inv_radix;
    while index > 0 {
        value += (index % radix) as f64 * scale;
        index /= radix;
        scale *= inv_radix;
    }
    if value >= 1.0 {
        1.0 - f64::EPSILON / 2.0
    } else {
        value
    }
}

/// Axis-aligned product of half-open intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    lows: Vec<f64>,
    highs: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lows: Vec<f64>, highs: Vec<f64>) -> Result<Self> {
        if lows.is_empty() || lows.len() != highs.len() {
            return Err(Error::InvalidDomain(format!(
                "bounds have lengths {} and {}",
                lows.len(),
                highs.len()
            )));
        }
        for (i, (lo, hi)) in lows.iter().zip(&highs).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidDomain(format!(
                    "axis {i}: need finite low < high, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(BoxDomain { lows, highs })
    }

    /// `[-1, 1]^n`.
    pub fn symmetric_cube(n: usize) -> Result<Self> {
        Self::new(vec![-1.0; n], vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.lows.len()
    }

    pub fn lows(&self) -> &[f64] {
        &self.lows
    }

    pub fn highs(&self) -> &[f64] {
        &self.highs
    }

    pub fn volume(&self) -> f64 {
        self.lows
            .iter()
            .zip(&self.highs)
            .map(|(lo, hi)| hi - lo)
            .product()
    }

    fn map_into(&self, src: &mut ScalarSource, out: &mut [f64]) {
        for ((o, lo), hi) in out.iter_mut().zip(&self.lows).zip(&self.highs) {
            *o = lo + (hi - lo) * src.next_unit();
        }
    }
}

/// One point of `dom`; consumes exactly `dom.dim()` scalars.
pub fn sample_box(src: &mut ScalarSource, dom: &BoxDomain) -> Vec<f64> {
    let mut out = vec![0.0; dom.dim()];
    dom.map_into(src, &mut out);
    out
}

/// A rejection sample together with the number of discarded candidates.
#[derive(Clone, Debug, PartialEq)]
pub struct Accepted {
    pub point: Vec<f64>,
    pub rejections: usize,
}

/// First box sample satisfying `accept`, with at most `cap` attempts.
pub fn sample_rejection<F>(
    src: &mut ScalarSource,
    dom: &BoxDomain,
    mut accept: F,
    cap: usize,
) -> Result<Accepted>
where
    F: FnMut(&[f64]) -> bool,
{
    let mut point = vec![0.0; dom.dim()];
    for rejections in 0..cap {
        dom.map_into(src, &mut point);
        if accept(&point) {
            return Ok(Accepted { point, rejections });
        }
    }
    Err(Error::RejectionCapExceeded { attempts: cap })
}

/// Cumulative weights for picking one part of a disjoint union with
/// probability proportional to its measure.
#[derive(Clone, Debug)]
pub struct WeightedChoice {
    cumulative: Vec<f64>,
}

impl WeightedChoice {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let mut total = 0.0;
        let mut cumulative = Vec::with_capacity(weights.len());
        for &w in weights {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!("weight {w} is not >= 0")));
            }
            total += w;
            cumulative.push(total);
        }
        if total <= 0.0 {
            return Err(Error::ZeroWeights);
        }
        Ok(WeightedChoice { cumulative })
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("non-empty by construction")
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Index of the chosen part; consumes one scalar.
    pub fn choose(&self, src: &mut ScalarSource) -> usize {
        let x = self.total() * src.next_unit();
        find_interval(&self.cumulative, x).expect("x lies in [0, total)")
    }
}

/// A part of a union: its measure and a sampler for it.
pub type UnionPart<'a, T> = (f64, Box<dyn FnMut(&mut ScalarSource) -> T + 'a>);

/// Samples a disjoint union: selects a part by relative weight, then delegates.
/// Returns the selected part index alongside the sample.
pub fn sample_union<T>(
    src: &mut ScalarSource,
    parts: &mut [UnionPart<'_, T>],
) -> Result<(usize, T)> {
    let weights: Vec<f64> = parts.iter().map(|(w, _)| *w).collect();
    let choice = WeightedChoice::new(&weights)?;
    let idx = choice.choose(src);
    let value = (parts[idx].1)(src);
    Ok((idx, value))
}

/// Uniform point of the punctured open unit ball in `R^n`.
pub fn sample_ball(src: &mut ScalarSource, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("ball dimension must be >= 1".into()));
    }
    if n < GAUSSIAN_ROUTE_MIN_DIM {
        let cube = BoxDomain::symmetric_cube(n)?;
        let acc = sample_rejection(
            src,
            &cube,
            |x| {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                r2 > 0.0 && r2 < 1.0
            },
            DEFAULT_REJECTION_CAP,
        )?;
        return Ok(acc.point);
    }
    let mut s = sample_sphere(src, n)?;
    let mut u = src.next_unit();
    while u == 0.0 {
        u = src.next_unit();
    }
    let scale = u.powf(1.0 / n as f64);
    for c in &mut s {
        *c *= scale;
    }
    Ok(s)
}

/// Uniform unit vector on `S^{n-1}`.
pub fn sample_sphere(src: &mut ScalarSource, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument("sphere needs n >= 2".into()));
    }
    let mut x = if n < GAUSSIAN_ROUTE_MIN_DIM {
        sample_ball(src, n)?
    } else {
        loop {
            let mut g = Vec::with_capacity(n + 1);
            while g.len() < n {
                let (a, b) = sample_normal_pair(src)?;
                g.push(a);
                g.push(b);
            }
            g.truncate(n);
            if g.iter().any(|c| *c != 0.0) {
                break g;
            }
        }
    };
    let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut x {
        *c /= norm;
    }
    Ok(x)
}

/// Two independent standard normal deviates (Marsaglia polar method).
pub fn sample_normal_pair(src: &mut ScalarSource) -> Result<(f64, f64)> {
    let square = BoxDomain::symmetric_cube(2)?;
    let acc = sample_rejection(
        src,
        &square,
        |p| {
            let s = p[0] * p[0] + p[1] * p[1];
            s > 0.0 && s < 1.0
        },
        DEFAULT_REJECTION_CAP,
    )?;
    let (u, v) = (acc.point[0], acc.point[1]);
    let s = u * u + v * v;
    let factor = (-2.0 * s.ln() / s).sqrt();
    Ok((u * factor, v * factor))
}

/// Volume of the unit `n`-ball, `pi^{n/2} / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: i32) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!(
            "ball dimension must be >= 0, got {n}"
        )));
    }
    // kappa_n = kappa_{n-2} * 2 pi / n, seeded with kappa_0 = 1, kappa_1 = 2.
    let mut k = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut m = if n % 2 == 0 { 2 } else { 3 };
    while m <= n {
        k *= 2.0 * std::f64::consts::PI / m as f64;
        m += 2;
    }
    Ok(k)
}

/// Area of the unit sphere `S^{n-1}` in `R^n`, i.e. `n * kappa_n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n as i32).expect("n fits and is non-negative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn van_der_corput_binary_prefix() {
        let mut src = ScalarSource::van_der_corput(2).unwrap();
        let got: Vec<f64> = (0..7).map(|_| src.next_unit()).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875]);
    }

    #[test]
    fn rearranged_prefix() {
        let mut src = ScalarSource::van_der_corput_rearranged();
        let got: Vec<f64> = (0..7).map(|_| src.next_unit()).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn radix_three() {
        let mut src = ScalarSource::van_der_corput(3).unwrap();
        let got: Vec<f64> = (0..4).map(|_| src.next_unit()).collect();
        let want = [1.0 / 3.0, 2.0 / 3.0, 1.0 / 9.0, 4.0 / 9.0];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn bad_radix_rejected() {
        assert!(ScalarSource::van_der_corput(1).is_err());
    }

    #[test]
    fn splitmix_known_outputs() {
        // Reference values of splitmix64 seeded with 0.
        let mut s = 0u64;
        assert_eq!(ScalarSource::next_splitmix(&mut s), 0xE220_A839_7B1D_CDAF);
        assert_eq!(ScalarSource::next_splitmix(&mut s), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(ScalarSource::next_splitmix(&mut s), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn pseudo_is_reproducible() {
        let mut a = ScalarSource::pseudo(42);
        let mut b = ScalarSource::pseudo(42);
        for _ in 0..1_000_000 {
            let x = a.next_unit();
            assert!((0.0..1.0).contains(&x));
            assert_eq!(x.to_bits(), b.next_unit().to_bits());
        }
    }

    #[test]
    fn box_examples() {
        let mut src = ScalarSource::pseudo(1);
        let dom = BoxDomain::new(vec![2.0], vec![4.0]).unwrap();
        let mut probe = src.clone();
        let xi = probe.next_unit();
        assert_eq!(sample_box(&mut src, &dom), vec![2.0 + 2.0 * xi]);

        assert!(BoxDomain::new(vec![1.0], vec![1.0]).is_err());
        assert!(BoxDomain::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn always_accept_takes_first_sample() {
        let dom = BoxDomain::symmetric_cube(3).unwrap();
        let mut a = ScalarSource::pseudo(3);
        let mut b = ScalarSource::pseudo(3);
        let acc = sample_rejection(&mut a, &dom, |_| true, 10).unwrap();
        assert_eq!(acc.rejections, 0);
        assert_eq!(acc.point, sample_box(&mut b, &dom));
    }

    #[test]
    fn never_accept_hits_cap() {
        let dom = BoxDomain::symmetric_cube(2).unwrap();
        let mut a = ScalarSource::pseudo(3);
        let err = sample_rejection(&mut a, &dom, |_| false, 50).unwrap_err();
        assert_eq!(err, Error::RejectionCapExceeded { attempts: 50 });
    }

    #[test]
    fn union_with_zero_weight_part() {
        let mut src = ScalarSource::pseudo(9);
        let mut parts: Vec<UnionPart<'_, u8>> =
            vec![(1.0, Box::new(|_| 0u8)), (0.0, Box::new(|_| 1u8))];
        for _ in 0..1000 {
            assert_eq!(sample_union(&mut src, &mut parts).unwrap(), (0, 0));
        }
        let mut zero: Vec<UnionPart<'_, u8>> = vec![(0.0, Box::new(|_| 0u8))];
        assert_eq!(
            sample_union(&mut src, &mut zero).unwrap_err(),
            Error::ZeroWeights
        );
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0).unwrap(), 1.0);
        assert!((unit_ball_volume(2).unwrap() - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(1).unwrap() - 2.0).abs() < 1e-15);
        // kappa_10 = pi^5 / 5!
        assert!((unit_ball_volume(10).unwrap() - PI.powi(5) / 120.0).abs() < 1e-13);
        assert!(unit_ball_volume(-1).is_err());
    }

    #[test]
    fn ball_and_sphere_norms() {
        let mut src = ScalarSource::pseudo(5);
        for n in 1..=8 {
            for _ in 0..2000 {
                let b = sample_ball(&mut src, n).unwrap();
                let r = b.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!(r > 0.0 && r < 1.0, "n={n} r={r}");
            }
        }
        for n in 2..=12 {
            for _ in 0..2000 {
                let s = sample_sphere(&mut src, n).unwrap();
                let r = s.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!((r - 1.0).abs() < 1e-12);
            }
        }
        assert!(sample_sphere(&mut src, 1).is_err());
        assert!(sample_ball(&mut src, 0).is_err());
    }
}
