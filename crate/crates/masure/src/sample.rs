//! Seeded random masures, points and directions.

use crate::masure::{ApartmentId, Masure, MasureConfig, MasureError, MasurePoint};
use crate::rat::{self, Vector, Q};
use crate::rootsys::{GcmRealization, SectorGermId, Sign, WeylWord};
use rand::seq::SliceRandom;
use rand::Rng;

/// Registers `chains` random parallel chains of length at most the depth bound.
/// Branch directions are positive roots of height at most 2.
pub fn random_masure<R: Rng>(
    real: &GcmRealization,
    h: i64,
    depth: usize,
    thickness: u32,
    chains: usize,
    rng: &mut R,
) -> Result<Masure, MasureError> {
    let mut m = Masure::new(MasureConfig::new(real.clone(), h, thickness, depth)?);
    let dirs: Vec<usize> = (0..m.table().positive.len())
        .filter(|&i| m.table().positive_root(i).unwrap().height() <= 2)
        .collect();
    for _ in 0..chains {
        let beta = *dirs.choose(rng).unwrap();
        let len = rng.gen_range(1..=depth);
        let mut w = ApartmentId::root();
        for _ in 0..len {
            let k = rng.gen_range(-3..=3);
            let sheet = rng.gen_range(1..thickness);
            let child = w.child(crate::masure::FoldingLetter { root: beta, k, sheet });
            if !m.is_registered(&child) {
                m.branch(&w, beta, &rat::q(k), sheet)?;
            }
            w = child;
        }
    }
    m.freeze();
    Ok(m)
}

/// Rational in `[-r, r]` with denominator 1 or 2.
pub fn random_q<R: Rng>(rng: &mut R, r: i64) -> Q {
    let den = rng.gen_range(1..=2);
    rat::qf(rng.gen_range(-r * den..=r * den), den)
}

pub fn random_vector<R: Rng>(rng: &mut R, d: usize, r: i64) -> Vector {
    (0..d).map(|_| random_q(rng, r)).collect()
}

/// A canonical point: about a third of the time in the root apartment.
pub fn random_point<R: Rng>(m: &Masure, rng: &mut R) -> MasurePoint {
    let words: Vec<&ApartmentId> = m.apartments().collect();
    let w = if rng.gen_bool(0.3) { words[0] } else { *words.choose(rng).unwrap() };
    let b = random_vector(rng, m.d(), 3);
    m.canonicalize(w, &b).expect("registered word")
}

/// A dominant vector with small integer or half-integer entries.
pub fn random_dominant<R: Rng>(real: &GcmRealization, rng: &mut R, regular: bool) -> Vector {
    for _ in 0..10_000 {
        let v = random_vector(rng, real.d, 6);
        if real.is_regular_dominant(&v) || !regular && real.is_dominant(&v) && !rat::is_zero_vec(&v) {
            return v;
        }
    }
    real.regular_lattice_vector()
}

/// A random sector-germ `(sign, w)` with `l(w) <= max_len`.
pub fn random_germ<R: Rng>(real: &GcmRealization, rng: &mut R, max_len: usize) -> SectorGermId {
    let elems: Vec<WeylWord> = real.elements_up_to(max_len);
    let w = elems.choose(rng).unwrap().clone();
    let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    SectorGermId { sign, w }
}
