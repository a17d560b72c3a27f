//! Counter-based random streams and the jump-law value type.
//!
//! Every random quantity in the crate is read from a [`Stream`] addressed by a
//! [`StreamKey`]: `(master seed, level, cell, tag)`. A stream is a pure
//! function of its key, so an environment can be re-queried anywhere, in any
//! order, from any thread, and always answer with the same law.

use serde::Serialize;
use smallvec::SmallVec;
use thiserror::Error;

use crate::linalg::{Matrix, Vector, MAX_DIM};

/// Absolute tolerance for atom weights summing to one.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stafford "mix13" finalizer, as used by SplitMix64.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, word: u64) -> u64 {
    mix64(h.wrapping_add(GOLDEN_GAMMA) ^ mix64(word))
}

/// Purpose discriminator of a stream. Distinct tags never share variates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamTag(pub u16);

impl StreamTag {
    /// Site law of an environment cell.
    pub const SITE: StreamTag = StreamTag(1);
    /// Uniform offset `U` of the lattice embedding.
    pub const OFFSET: StreamTag = StreamTag(2);
    /// Jumps of a walker.
    pub const WALK: StreamTag = StreamTag(3);
    /// Environment replica seeds.
    pub const ENV_REPLICA: StreamTag = StreamTag(4);
    /// Seeds of the independent companion environment (the `Y-bar` walk).
    pub const ENV_COMPANION: StreamTag = StreamTag(5);
    /// Walker seeds.
    pub const WALK_SEED: StreamTag = StreamTag(6);
    /// Bootstrap resampling.
    pub const BOOTSTRAP: StreamTag = StreamTag(7);
    /// Synthetic data for calibration harnesses.
    pub const SYNTHETIC: StreamTag = StreamTag(8);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub level: i64,
    cell_len: u8,
    cell: [i64; MAX_DIM],
    pub tag: StreamTag,
}

impl StreamKey {
    pub fn new(master_seed: u64, level: i64, cell: &[i64], tag: StreamTag) -> Self {
        assert!(cell.len() <= MAX_DIM, "cell index has more than {MAX_DIM} coordinates");
        let mut c = [0i64; MAX_DIM];
        c[..cell.len()].copy_from_slice(cell);
        Self {
            master_seed,
            level,
            cell_len: cell.len() as u8,
            cell: c,
            tag,
        }
    }

    pub fn cell(&self) -> &[i64] {
        &self.cell[..self.cell_len as usize]
    }

    fn digest(&self) -> u64 {
        let mut h = mix64(self.master_seed ^ 0x5851_F42D_4C95_7F2D);
        h = absorb(h, self.level as u64);
        h = absorb(h, u64::from(self.cell_len) | (u64::from(self.tag.0) << 8));
        for &c in self.cell() {
            h = absorb(h, c as u64);
        }
        h
    }
}

/// Replayable uniform-variate stream. `at(i)` is the `i`-th variate and does
/// not depend on how many variates were drawn before; `next_*` walk a cursor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stream {
    base: u64,
    gamma: u64,
    cursor: u64,
}

impl Stream {
    pub fn new(key: StreamKey) -> Self {
        let base = key.digest();
        Self {
            base,
            gamma: mix64(base ^ 0xD134_2543_DE82_EF95) | 1,
            cursor: 0,
        }
    }

    #[inline]
    pub fn u64_at(&self, index: u64) -> u64 {
        mix64(self.base.wrapping_add(index.wrapping_add(1).wrapping_mul(self.gamma)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn at(&self, index: u64) -> f64 {
        (self.u64_at(index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = self.u64_at(self.cursor);
        self.cursor += 1;
        out
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        let out = self.at(self.cursor);
        self.cursor += 1;
        out
    }

    /// Uniform integer in `0..bound`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }

    /// Pair of independent standard normals via Box-Muller on two
    /// consecutive variates `(u1, u2)`: `r = sqrt(-2 ln(1 - u1))`,
    /// returning `(r cos 2 pi u2, r sin 2 pi u2)`.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }

    /// `d` standard normals, consuming `ceil(d / 2)` Box-Muller pairs; the
    /// sine half of the last pair is discarded when `d` is odd.
    pub fn next_normals(&mut self, d: usize) -> Vector {
        let mut z = Vector::zeros(d);
        let mut i = 0;
        while i < d {
            let (a, b) = self.next_normal_pair();
            z[i] = a;
            if i + 1 < d {
                z[i + 1] = b;
            }
            i += 2;
        }
        z
    }

    pub fn next_normal(&mut self) -> f64 {
        self.next_normal_pair().0
    }

    pub fn position(&self) -> u64 {
        self.cursor
    }
}

/// Stream for `key`, positioned at its first variate.
pub fn derive_stream(key: StreamKey) -> Stream {
    Stream::new(key)
}

/// A 64-bit seed derived from `(master, tag, indices)`; used to give every
/// replica its own environment and walk seeds.
pub fn derive_seed(master_seed: u64, tag: StreamTag, indices: &[i64]) -> u64 {
    Stream::new(StreamKey::new(master_seed, 0, indices, tag)).u64_at(0)
}

#[derive(Debug, Error, PartialEq)]
pub enum LawError {
    #[error("atomic law needs at least one atom")]
    Empty,
    #[error("atom weight {0} is negative or not finite")]
    BadWeight(f64),
    #[error("atom weights sum to {0}, not 1 within {WEIGHT_TOLERANCE}")]
    NotNormalized(f64),
    #[error("points of dimension {found} in a law of dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("law parameters are not finite")]
    NotFinite,
    #[error("covariance is not symmetric positive semi-definite")]
    NotPsd,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub point: Vector,
    pub weight: f64,
}

pub type Atoms = SmallVec<[Atom; 4]>;

/// A probability measure on `R^d`: the jump distribution at one space-time point.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpLaw {
    /// Finitely many atoms in a fixed order; the order drives inverse-CDF sampling.
    Atomic { atoms: Atoms },
    Gaussian { mean: Vector, covariance: Matrix },
    Dirac { point: Vector },
}

impl JumpLaw {
    /// Validated atomic law. Weights within [`WEIGHT_TOLERANCE`] of summing to
    /// one are renormalized; anything further off is rejected.
    pub fn atomic(atoms: impl IntoIterator<Item = (Vector, f64)>) -> Result<Self, LawError> {
        let mut list: Atoms = atoms
            .into_iter()
            .map(|(point, weight)| Atom { point, weight })
            .collect();
        let first = list.first().ok_or(LawError::Empty)?;
        let d = first.point.dim();
        let mut total = 0.0;
        for a in &list {
            if a.point.dim() != d {
                return Err(LawError::DimensionMismatch {
                    expected: d,
                    found: a.point.dim(),
                });
            }
            if !a.point.is_finite() {
                return Err(LawError::NotFinite);
            }
            if !(a.weight >= 0.0) || !a.weight.is_finite() {
                return Err(LawError::BadWeight(a.weight));
            }
            total += a.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(LawError::NotNormalized(total));
        }
        if total != 1.0 {
            for a in list.iter_mut() {
                a.weight /= total;
            }
        }
        Ok(JumpLaw::Atomic { atoms: list })
    }

    /// Atomic law from parts already known to be valid (hot path of the
    /// environment models).
    pub(crate) fn atomic_unchecked(atoms: Atoms) -> Self {
        debug_assert!(
            (atoms.iter().map(|a| a.weight).sum::<f64>() - 1.0).abs() <= WEIGHT_TOLERANCE
        );
        JumpLaw::Atomic { atoms }
    }

    pub fn gaussian(mean: Vector, covariance: Matrix) -> Result<Self, LawError> {
        if mean.dim() != covariance.dim() {
            return Err(LawError::DimensionMismatch {
                expected: mean.dim(),
                found: covariance.dim(),
            });
        }
        if !mean.is_finite() || !covariance.is_finite() {
            return Err(LawError::NotFinite);
        }
        if !covariance.is_symmetric(1e-12) || covariance.cholesky_psd(1e-12).is_none() {
            return Err(LawError::NotPsd);
        }
        Ok(JumpLaw::Gaussian { mean, covariance })
    }

    pub fn dirac(point: Vector) -> Self {
        JumpLaw::Dirac { point }
    }

    pub fn dim(&self) -> usize {
        match self {
            JumpLaw::Atomic { atoms } => atoms[0].point.dim(),
            JumpLaw::Gaussian { mean, .. } => mean.dim(),
            JumpLaw::Dirac { point } => point.dim(),
        }
    }

    pub fn mean(&self) -> Vector {
        match self {
            JumpLaw::Atomic { atoms } => {
                let mut m = Vector::zeros(atoms[0].point.dim());
                for a in atoms {
                    m += a.point * a.weight;
                }
                m
            }
            JumpLaw::Gaussian { mean, .. } => *mean,
            JumpLaw::Dirac { point } => *point,
        }
    }

    /// Centered covariance matrix.
    pub fn covariance(&self) -> Matrix {
        match self {
            JumpLaw::Atomic { atoms } => {
                let mean = self.mean();
                let mut c = Matrix::zeros(mean.dim());
                for a in atoms {
                    let dev = a.point - mean;
                    c = c + dev.outer(&dev).scale(a.weight);
                }
                c
            }
            JumpLaw::Gaussian { covariance, .. } => *covariance,
            JumpLaw::Dirac { point } => Matrix::zeros(point.dim()),
        }
    }

    /// `E|X|^2` under the law.
    pub fn second_moment(&self) -> f64 {
        match self {
            JumpLaw::Atomic { atoms } => atoms.iter().map(|a| a.weight * a.point.norm_sq()).sum(),
            JumpLaw::Gaussian { mean, covariance } => mean.norm_sq() + covariance.trace(),
            JumpLaw::Dirac { point } => point.norm_sq(),
        }
    }

    pub fn is_point_mass(&self) -> bool {
        match self {
            JumpLaw::Dirac { .. } => true,
            JumpLaw::Atomic { atoms } => atoms.iter().filter(|a| a.weight > 0.0).count() == 1,
            JumpLaw::Gaussian { covariance, .. } => covariance.trace() == 0.0,
        }
    }

    /// One draw. Atomic laws use inverse-CDF over the stored atom order with a
    /// single variate; Gaussians use `mean + L z` with `L` the Cholesky factor
    /// and `z` from [`Stream::next_normals`]; Dirac consumes nothing.
    pub fn sample(&self, stream: &mut Stream) -> Vector {
        match self {
            JumpLaw::Atomic { atoms } => {
                let u = stream.next_f64();
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.weight;
                    if u < acc {
                        return a.point;
                    }
                }
                // Rounding left `acc` a hair below one; take the last atom with mass.
                atoms
                    .iter()
                    .rev()
                    .find(|a| a.weight > 0.0)
                    .map_or(atoms[atoms.len() - 1].point, |a| a.point)
            }
            JumpLaw::Gaussian { mean, covariance } => {
                let z = stream.next_normals(mean.dim());
                let l = covariance
                    .cholesky_psd(1e-12)
                    .expect("gaussian covariance validated at construction");
                *mean + l.mul_vec(&z)
            }
            JumpLaw::Dirac { point } => *point,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin() -> JumpLaw {
        JumpLaw::atomic([
            (Vector::from_slice(&[1.0]), 0.5),
            (Vector::from_slice(&[-1.0]), 0.5),
        ])
        .unwrap()
    }

    #[test]
    fn same_key_same_stream() {
        let key = StreamKey::new(7, 3, &[1, -2], StreamTag::SITE);
        let mut a = derive_stream(key);
        let mut b = derive_stream(key);
        let xs: Vec<f64> = (0..8).map(|_| a.next_f64()).collect();
        let ys: Vec<f64> = (0..8).map(|_| b.next_f64()).collect();
        assert_eq!(xs, ys);
        assert_eq!(derive_stream(key).at(5), xs[5]);
    }

    #[test]
    fn every_key_field_matters() {
        let base = StreamKey::new(7, 3, &[1, -2], StreamTag::SITE);
        let variants = [
            StreamKey::new(8, 3, &[1, -2], StreamTag::SITE),
            StreamKey::new(7, 4, &[1, -2], StreamTag::SITE),
            StreamKey::new(7, 3, &[1, -1], StreamTag::SITE),
            StreamKey::new(7, 3, &[1], StreamTag::SITE),
            StreamKey::new(7, 3, &[1, -2], StreamTag::WALK),
        ];
        let x = derive_stream(base).u64_at(0);
        for v in variants {
            assert_ne!(derive_stream(v).u64_at(0), x, "{v:?}");
        }
    }

    #[test]
    fn interleaving_does_not_change_streams() {
        let k1 = StreamKey::new(1, 0, &[0], StreamTag::WALK);
        let k2 = StreamKey::new(1, 0, &[1], StreamTag::WALK);
        let mut solo = derive_stream(k1);
        let alone: Vec<u64> = (0..16).map(|_| solo.next_u64()).collect();
        let mut s1 = derive_stream(k1);
        let mut s2 = derive_stream(k2);
        let mut mixed = Vec::new();
        for i in 0..16 {
            mixed.push(s1.next_u64());
            for _ in 0..i % 3 {
                s2.next_u64();
            }
        }
        assert_eq!(alone, mixed);
    }

    #[test]
    fn coin_moments() {
        let law = coin();
        assert_eq!(law.mean()[0], 0.0);
        assert_eq!(law.covariance().get(0, 0), 1.0);
        assert_eq!(law.second_moment(), 1.0);
    }

    #[test]
    fn dirac_moments_and_samples() {
        let z = Vector::from_slice(&[0.5, -2.0]);
        let law = JumpLaw::dirac(z);
        assert_eq!(law.mean(), z);
        assert_eq!(law.covariance(), Matrix::zeros(2));
        let mut s = derive_stream(StreamKey::new(0, 0, &[], StreamTag::WALK));
        for _ in 0..10 {
            assert_eq!(law.sample(&mut s), z);
        }
        assert_eq!(s.position(), 0);
    }

    #[test]
    fn gaussian_moments() {
        let mu = Vector::from_slice(&[1.0, -1.0]);
        let sigma = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
        let law = JumpLaw::gaussian(mu, sigma).unwrap();
        assert_eq!(law.mean(), mu);
        assert_eq!(law.covariance(), sigma);
        assert_eq!(law.second_moment(), 2.0 + 3.0);
    }

    #[test]
    fn weight_tolerance_renormalizes_or_rejects() {
        let p = Vector::from_slice(&[1.0]);
        let q = Vector::from_slice(&[-1.0]);
        let near = JumpLaw::atomic([(p, 0.5 + 4e-13), (q, 0.5)]).unwrap();
        if let JumpLaw::Atomic { atoms } = &near {
            let total: f64 = atoms.iter().map(|a| a.weight).sum();
            assert!((total - 1.0).abs() < 1e-15);
        }
        assert!(matches!(
            JumpLaw::atomic([(p, 0.5 + 1e-9), (q, 0.5)]),
            Err(LawError::NotNormalized(_))
        ));
        assert!(matches!(
            JumpLaw::atomic([(p, 1.5), (q, -0.5)]),
            Err(LawError::BadWeight(_))
        ));
        assert_eq!(JumpLaw::atomic(Vec::new()), Err(LawError::Empty));
    }

    #[test]
    fn gaussian_rejects_indefinite() {
        let bad = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_eq!(
            JumpLaw::gaussian(Vector::zeros(2), bad),
            Err(LawError::NotPsd)
        );
    }

    #[test]
    fn coin_sample_mean() {
        let law = coin();
        let mut s = derive_stream(StreamKey::new(99, 0, &[], StreamTag::WALK));
        let n = 100_000;
        let mean = (0..n).map(|_| law.sample(&mut s)[0]).sum::<f64>() / n as f64;
        assert!(mean.abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn inverse_cdf_follows_atom_order() {
        let law = JumpLaw::atomic([
            (Vector::from_slice(&[10.0]), 0.25),
            (Vector::from_slice(&[20.0]), 0.75),
        ])
        .unwrap();
        let mut s = derive_stream(StreamKey::new(5, 0, &[], StreamTag::WALK));
        let u = s.at(0);
        let x = law.sample(&mut s)[0];
        assert_eq!(x, if u < 0.25 { 10.0 } else { 20.0 });
    }
}
