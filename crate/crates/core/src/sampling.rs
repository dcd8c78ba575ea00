//! Seeded sampling and deterministic chunked parallelism.
//!
//! Every randomized sweep is split into fixed-size chunks. Chunk `i` draws
//! from a ChaCha8 stream keyed by `(seed, i)`, chunks run on the rayon pool,
//! and results are reduced in chunk order. Output is therefore identical
//! for any thread count.

use std::ops::Range;

use num::bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::group::{Point, RationalGroup, RealGroup};
use crate::scalar::Rational;

pub const CHUNK: usize = 4096;

pub type SeededRng = ChaCha8Rng;

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Derive an independent sub-seed, e.g. one per criterion or per dimension.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut rng = chunk_rng(seed, tag.wrapping_add(1 << 32));
    rng.random()
}

/// Run `f` over `n` items split into chunks and return the per-chunk
/// results in chunk order.
pub fn par_chunks<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SeededRng, Range<usize>) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c as u64);
            let start = c * CHUNK;
            f(&mut rng, start..n.min(start + CHUNK))
        })
        .collect()
}

/// Running maximum with the index where it was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxAt {
    pub value: f64,
    pub index: Option<usize>,
}

impl Default for MaxAt {
    fn default() -> Self {
        MaxAt {
            value: 0.0,
            index: None,
        }
    }
}

impl MaxAt {
    pub fn push(&mut self, value: f64, index: usize) {
        // NaN counts as a maximal deviation.
        let better = match self.index {
            None => true,
            Some(_) => value > self.value || (value.is_nan() && !self.value.is_nan()),
        };
        if better {
            self.value = value;
            self.index = Some(index);
        }
    }

    pub fn merge(mut self, other: MaxAt) -> MaxAt {
        if let Some(i) = other.index {
            self.push(other.value, i);
        }
        self
    }

    pub fn merge_all(parts: impl IntoIterator<Item = MaxAt>) -> MaxAt {
        parts.into_iter().fold(MaxAt::default(), MaxAt::merge)
    }
}

/// Draw a member of `G_rho` with `eta >= min_eta`, coordinates in
/// `[-scale, scale]`. One of `x`, `-x` always has `eta >= 1`, so reflection
/// makes rejection rare.
pub fn real_member<R: Rng>(rng: &mut R, group: &RealGroup, scale: f64, min_eta: f64) -> Point<f64> {
    let d = group.dim();
    loop {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-scale..=scale)).collect();
        let eta = group.eta_slice(&x);
        if eta >= min_eta {
            return Point::new(x).expect("finite sample");
        }
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        if group.eta_slice(&neg) >= min_eta {
            return Point::new(neg).expect("finite sample");
        }
    }
}

/// Random member whose `eta` lies in `[e^{-spread}, e^{spread}]`: a random
/// null-space component plus a multiple of `rho` fixing `rho(x)`.
pub fn real_member_log_eta<R: Rng>(rng: &mut R, group: &RealGroup, spread: f64) -> Point<f64> {
    let d = group.dim();
    let rho = group.rho().coeffs();
    let dir: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let target = rng.random_range(-spread..=spread).exp_m1();
    let n2 = crate::numerics::dot(rho, rho);
    if n2 == 0.0 {
        return Point::new(dir).expect("finite sample");
    }
    let shift = (target - crate::numerics::dot(rho, &dir)) / n2;
    let x: Vec<f64> = dir.iter().zip(rho).map(|(a, c)| a + shift * c).collect();
    Point::new(x).expect("finite sample")
}

/// Random small rational `p/q` with `|p| <= num_bound`, `1 <= q <= den_bound`.
pub fn small_rational<R: Rng>(rng: &mut R, num_bound: i64, den_bound: i64) -> Rational {
    let p = rng.random_range(-num_bound..=num_bound);
    let q = rng.random_range(1..=den_bound);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rational_member<R: Rng>(rng: &mut R, group: &RationalGroup) -> Point<Rational> {
    loop {
        let x: Vec<Rational> = (0..group.dim()).map(|_| small_rational(rng, 12, 7)).collect();
        let x = Point::new(x).expect("rationals are finite");
        if group.is_member(&x).expect("dimension matches") {
            return x;
        }
        let neg = x.neg();
        if group.is_member(&neg).expect("dimension matches") {
            return neg;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_streams_are_reproducible_and_distinct() {
        let a: u64 = chunk_rng(7, 0).random();
        let b: u64 = chunk_rng(7, 0).random();
        let c: u64 = chunk_rng(7, 1).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_seed(7, 1), derive_seed(7, 2));
    }

    #[test]
    fn par_chunks_is_thread_count_independent() {
        let run = || -> Vec<f64> {
            par_chunks(10_000, 3, |rng, range| {
                range.map(|_| rng.random::<f64>()).sum::<f64>()
            })
        };
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(serial, run());
        assert_eq!(serial.len(), 3);
    }

    #[test]
    fn max_at_keeps_first_maximum() {
        let mut m = MaxAt::default();
        m.push(1.0, 3);
        m.push(1.0, 5);
        m.push(0.5, 6);
        assert_eq!(m, MaxAt { value: 1.0, index: Some(3) });
        let merged = MaxAt::merge_all([MaxAt::default(), m, MaxAt { value: 2.0, index: Some(9) }]);
        assert_eq!(merged.index, Some(9));
    }

    #[test]
    fn sampled_members_are_members() {
        let g = RealGroup::real(&[3.0, -2.0, 0.5]).unwrap();
        let mut rng = chunk_rng(1, 0);
        for _ in 0..1000 {
            let x = real_member(&mut rng, &g, 2.0, 0.1);
            assert!(g.eta(&x).unwrap() >= 0.1);
            let y = real_member_log_eta(&mut rng, &g, 1.0);
            let e = g.eta(&y).unwrap();
            assert!(e > (-1.0f64).exp() - 1e-12 && e < 1.0f64.exp() + 1e-12, "{e}");
        }
    }
}
