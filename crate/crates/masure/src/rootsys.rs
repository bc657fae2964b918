//! Generalized Cartan matrices, realizations, real roots and Weyl words.

use crate::rat::{self, q, Vector, Q};
use num_traits::Signed;
use std::collections::{HashMap, VecDeque};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootError {
    #[error("matrix violates the Cartan axioms: {axiom} at entry ({i},{j})")]
    ViolatesGcmAxioms { axiom: &'static str, i: usize, j: usize },
    #[error("matrix is not square or is empty")]
    NotSquare,
    #[error("root {0:?} lies outside the height-bounded table")]
    RootOutsideTable(Vec<i64>),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("letter s{0} outside the index set")]
    LetterOutOfRange(usize),
    #[error("cannot parse germ literal {0:?}")]
    BadGerm(String),
}

/// A generalized Cartan matrix with a rational realization.
///
/// Coroots are the first `n` standard basis vectors of `Q^d`; the simple roots are
/// covectors with `alpha_j(e_i) = c_ij`, completed on the extra coordinates so they
/// stay independent.
#[derive(Clone, Debug)]
pub struct GcmRealization {
    pub matrix: Vec<Vec<i64>>,
    pub n: usize,
    pub d: usize,
    pub roots: Vec<Vector>,
    pub coroots: Vec<Vector>,
    finite: bool,
}

pub fn validate_gcm(matrix: &[Vec<i64>]) -> Result<GcmRealization, RootError> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|r| r.len() != n) {
        return Err(RootError::NotSquare);
    }
    for i in 0..n {
        if matrix[i][i] != 2 {
            return Err(RootError::ViolatesGcmAxioms { axiom: "diagonal entries equal 2", i, j: i });
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if matrix[i][j] > 0 {
                return Err(RootError::ViolatesGcmAxioms { axiom: "off-diagonal entries are <= 0", i, j });
            }
            if (matrix[i][j] == 0) != (matrix[j][i] == 0) {
                return Err(RootError::ViolatesGcmAxioms { axiom: "c_ij = 0 iff c_ji = 0", i, j });
            }
        }
    }
    // rows of `cols` are the columns of the n x d matrix (alpha_j(e_i))_{j,i}
    let mut cols: Vec<Vector> = (0..n).map(|i| (0..n).map(|j| q(matrix[i][j])).collect()).collect();
    let mut l = 0;
    while rat::rank(&cols) < n {
        let mut extra = rat::zeros(n);
        extra[l] = q(1);
        let mut trial = cols.clone();
        trial.push(extra);
        if rat::rank(&trial) > rat::rank(&cols) {
            cols = trial;
        }
        l += 1;
    }
    let d = cols.len();
    let roots: Vec<Vector> = (0..n).map(|j| cols.iter().map(|c| c[j].clone()).collect()).collect();
    let coroots: Vec<Vector> = (0..n).map(|i| rat::unit(d, i)).collect();
    let mut real = GcmRealization { matrix: matrix.to_vec(), n, d, roots, coroots, finite: false };
    real.finite = real.detect_finite();
    Ok(real)
}

pub fn preset(name: &str) -> Result<GcmRealization, RootError> {
    let m: Vec<Vec<i64>> = match name {
        "a1" => vec![vec![2]],
        "affine-a1" => vec![vec![2, -2], vec![-2, 2]],
        "hyp23" => vec![vec![2, -3], vec![-3, 2]],
        _ => return Err(RootError::UnknownPreset(name.to_string())),
    };
    validate_gcm(&m)
}

pub const PRESETS: [&str; 3] = ["a1", "affine-a1", "hyp23"];

impl GcmRealization {
    /// `c_ij = alpha_j(alpha_i^vee)`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    pub fn is_finite(&self) -> bool {
        self.finite
    }

    /// True when the Dynkin diagram is connected.
    pub fn is_indecomposable(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..self.n {
                if !seen[j] && self.matrix[i][j] != 0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    // Finite root systems of rank n have all heights below 2n + 30; an infinite
    // one always has a simple-reflection step from height <= B to height > B.
    fn detect_finite(&self) -> bool {
        let bound = 2 * self.n as i64 + 30;
        let mut seen = std::collections::HashSet::new();
        let mut queue = VecDeque::new();
        for i in 0..self.n {
            let mut e = vec![0; self.n];
            e[i] = 1;
            seen.insert(e.clone());
            queue.push_back(e);
        }
        while let Some(b) = queue.pop_front() {
            for j in 0..self.n {
                let r = self.reflect_root(j, &b);
                let h: i64 = r.iter().sum();
                if h > bound {
                    return false;
                }
                if h > 0 && seen.insert(r.clone()) {
                    queue.push_back(r);
                }
            }
        }
        true
    }

    /// `<beta, alpha_j^vee>` for beta in alpha-coordinates.
    pub fn pair_coroot(&self, beta: &[i64], j: usize) -> i64 {
        beta.iter().enumerate().map(|(i, &ni)| ni * self.matrix[j][i]).sum()
    }

    /// `s_j(beta) = beta - <beta, alpha_j^vee> alpha_j` in alpha-coordinates.
    pub fn reflect_root(&self, j: usize, beta: &[i64]) -> Vec<i64> {
        let c = self.pair_coroot(beta, j);
        let mut r = beta.to_vec();
        r[j] -= c;
        r
    }

    /// The covector `sum n_i alpha_i`.
    pub fn covector(&self, beta: &[i64]) -> Vector {
        let mut v = rat::zeros(self.d);
        for (i, &ni) in beta.iter().enumerate() {
            if ni != 0 {
                v = rat::axpy(&v, &q(ni), &self.roots[i]);
            }
        }
        v
    }

    /// `r_i(v) = v - alpha_i(v) alpha_i^vee`.
    pub fn reflect_vec(&self, i: usize, v: &[Q]) -> Vector {
        let a = rat::dot(&self.roots[i], v);
        rat::axpy(v, &-a, &self.coroots[i])
    }

    /// Applies `w = s_{i1} ... s_{ik}` to a root (rightmost letter first).
    pub fn act_root(&self, w: &WeylWord, beta: &[i64]) -> Vec<i64> {
        w.letters.iter().rev().fold(beta.to_vec(), |b, &i| self.reflect_root(i, &b))
    }

    pub fn act_root_inverse(&self, w: &WeylWord, beta: &[i64]) -> Vec<i64> {
        w.letters.iter().fold(beta.to_vec(), |b, &i| self.reflect_root(i, &b))
    }

    pub fn act_vec(&self, w: &WeylWord, v: &[Q]) -> Vector {
        w.letters.iter().rev().fold(v.to_vec(), |x, &i| self.reflect_vec(i, &x))
    }

    pub fn act_vec_inverse(&self, w: &WeylWord, v: &[Q]) -> Vector {
        w.letters.iter().fold(v.to_vec(), |x, &i| self.reflect_vec(i, &x))
    }

    /// The `d x d` matrix of `w` acting on vectors.
    pub fn matrix_of(&self, w: &WeylWord) -> Vec<Vector> {
        let cols: Vec<Vector> = (0..self.d).map(|k| self.act_vec(w, &rat::unit(self.d, k))).collect();
        (0..self.d).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
    }

    pub fn check_word(&self, letters: &[usize]) -> Result<(), RootError> {
        match letters.iter().find(|&&i| i >= self.n) {
            Some(&i) => Err(RootError::LetterOutOfRange(i + 1)),
            None => Ok(()),
        }
    }

    /// Reduces a word and returns the lexicographically least reduced word of the
    /// same element.
    pub fn weyl_reduce(&self, letters: &[usize]) -> WeylWord {
        let red = self.weyl_reduce_noncanonical(letters).letters;
        // canonical form: repeatedly strip the smallest left descent
        let mut rest = WeylWord { letters: red };
        let mut out = Vec::with_capacity(rest.letters.len());
        while !rest.letters.is_empty() {
            let i = (0..self.n)
                .find(|&i| {
                    let mut e = vec![0; self.n];
                    e[i] = 1;
                    !is_positive(&self.act_root_inverse(&rest, &e))
                })
                .expect("nontrivial element has a left descent");
            out.push(i);
            let mut l = vec![i];
            l.extend_from_slice(&rest.letters);
            rest = self.weyl_reduce_noncanonical(&l);
        }
        WeylWord { letters: out }
    }

    fn weyl_reduce_noncanonical(&self, letters: &[usize]) -> WeylWord {
        let mut red: Vec<usize> = Vec::new();
        for &i in letters {
            let mut e = vec![0; self.n];
            e[i] = 1;
            if is_positive(&self.act_root(&WeylWord { letters: red.clone() }, &e)) {
                red.push(i);
                continue;
            }
            let mut beta = e;
            for p in (0..red.len()).rev() {
                let jp = red[p];
                if beta.iter().enumerate().all(|(k, &c)| c == i64::from(k == jp)) {
                    red.remove(p);
                    break;
                }
                beta = self.reflect_root(jp, &beta);
            }
        }
        WeylWord { letters: red }
    }

    pub fn length(&self, w: &WeylWord) -> usize {
        self.weyl_reduce_noncanonical(&w.letters).letters.len()
    }

    /// Product `a b` in canonical form.
    pub fn mul(&self, a: &WeylWord, b: &WeylWord) -> WeylWord {
        let mut l = a.letters.clone();
        l.extend_from_slice(&b.letters);
        self.weyl_reduce(&l)
    }

    pub fn inverse(&self, w: &WeylWord) -> WeylWord {
        let l: Vec<usize> = w.letters.iter().rev().copied().collect();
        self.weyl_reduce(&l)
    }

    /// All canonical elements of length at most `l`, in order of length then word.
    pub fn elements_up_to(&self, l: usize) -> Vec<WeylWord> {
        let mut out = vec![WeylWord::identity()];
        let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
        seen.insert(Vec::new());
        let mut frontier = vec![WeylWord::identity()];
        for _ in 0..l {
            let mut next = Vec::new();
            for w in &frontier {
                for i in 0..self.n {
                    let mut lw = w.letters.clone();
                    lw.push(i);
                    let r = self.weyl_reduce(&lw);
                    if r.letters.len() == w.letters.len() + 1 && seen.insert(r.letters.clone()) {
                        next.push(r);
                    }
                }
            }
            next.sort();
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Longest element, for finite Weyl groups.
    pub fn longest_element(&self) -> Option<WeylWord> {
        if !self.finite {
            return None;
        }
        let mut w = WeylWord::identity();
        loop {
            let ext = (0..self.n).find(|&i| {
                let mut e = vec![0; self.n];
                e[i] = 1;
                is_positive(&self.act_root(&w, &e))
            });
            match ext {
                None => return Some(w),
                Some(i) => {
                    let mut l = w.letters.clone();
                    l.push(i);
                    w = self.weyl_reduce(&l);
                }
            }
        }
    }

    /// Applies descent reflections (smallest `i` with `alpha_i(v) < 0`) until `v`
    /// is dominant or `max_steps` is spent. Returns the final vector and whether it
    /// is dominant.
    pub fn descend(&self, v: &[Q], max_steps: usize) -> (Vector, bool) {
        let mut v = v.to_vec();
        for _ in 0..=max_steps {
            match (0..self.n).find(|&i| rat::dot(&self.roots[i], &v).is_negative()) {
                None => return (v, true),
                Some(i) => v = self.reflect_vec(i, &v),
            }
        }
        let dom = (0..self.n).all(|i| !rat::dot(&self.roots[i], &v).is_negative());
        (v, dom)
    }

    pub fn is_dominant(&self, v: &[Q]) -> bool {
        self.roots.iter().all(|a| !rat::dot(a, v).is_negative())
    }

    pub fn is_regular_dominant(&self, v: &[Q]) -> bool {
        self.roots.iter().all(|a| rat::dot(a, v).is_positive())
    }

    /// An integral vector with every `alpha_i` value positive.
    pub fn regular_lattice_vector(&self) -> Vector {
        let ones = vec![q(1); self.n];
        let v = rat::solve_any(&self.roots, &ones).expect("simple roots are independent");
        let l = rat::lcm_denominators(&v);
        rat::scale(&Q::from_integer(l), &v)
    }
}

pub fn is_positive(beta: &[i64]) -> bool {
    beta.iter().all(|&c| c >= 0) && beta.iter().any(|&c| c > 0)
}

pub fn height(beta: &[i64]) -> i64 {
    beta.iter().sum()
}

#[derive(Clone, Debug)]
pub struct RealRoot {
    /// Coordinates in the simple-root basis.
    pub coeffs: Vec<i64>,
    pub covector: Vector,
    pub coroot: Vector,
    pub positive: bool,
}

impl RealRoot {
    pub fn height(&self) -> i64 {
        height(&self.coeffs)
    }
}

/// Real roots of height at most `h` in absolute value.
#[derive(Clone, Debug)]
pub struct RealRootTable {
    pub h: i64,
    pub roots: Vec<RealRoot>,
    index: HashMap<Vec<i64>, usize>,
    /// Positions of the positive roots, in table order.
    pub positive: Vec<usize>,
}

pub fn enumerate_real_roots(real: &GcmRealization, h: i64) -> RealRootTable {
    let mut coroots: HashMap<Vec<i64>, Vector> = HashMap::new();
    let mut queue = VecDeque::new();
    for i in 0..real.n {
        for s in [1i64, -1] {
            let mut e = vec![0; real.n];
            e[i] = s;
            let cr = rat::scale(&q(s), &real.coroots[i]);
            if coroots.insert(e.clone(), cr).is_none() {
                queue.push_back(e);
            }
        }
    }
    while let Some(b) = queue.pop_front() {
        let cb = coroots[&b].clone();
        for j in 0..real.n {
            let r = real.reflect_root(j, &b);
            if height(&r).abs() > h || coroots.contains_key(&r) {
                continue;
            }
            coroots.insert(r.clone(), real.reflect_vec(j, &cb));
            queue.push_back(r);
        }
    }
    let mut keys: Vec<Vec<i64>> = coroots.keys().cloned().collect();
    keys.sort_by(|a, b| height(a).cmp(&height(b)).then_with(|| b.cmp(a)));
    let roots: Vec<RealRoot> = keys
        .iter()
        .map(|k| RealRoot {
            coeffs: k.clone(),
            covector: real.covector(k),
            coroot: coroots[k].clone(),
            positive: is_positive(k),
        })
        .collect();
    let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    let positive = (0..roots.len()).filter(|&i| roots[i].positive).collect();
    RealRootTable { h, roots, index, positive }
}

impl RealRootTable {
    pub fn lookup(&self, coeffs: &[i64]) -> Option<usize> {
        self.index.get(coeffs).copied()
    }

    pub fn get(&self, coeffs: &[i64]) -> Result<&RealRoot, RootError> {
        self.lookup(coeffs)
            .map(|i| &self.roots[i])
            .ok_or_else(|| RootError::RootOutsideTable(coeffs.to_vec()))
    }

    /// The `k`-th positive root (the numbering used by folding letters).
    pub fn positive_root(&self, k: usize) -> Option<&RealRoot> {
        self.positive.get(k).map(|&i| &self.roots[i])
    }

    pub fn positive_index(&self, coeffs: &[i64]) -> Option<usize> {
        let i = self.lookup(coeffs)?;
        self.positive.iter().position(|&p| p == i)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// A Weyl group element as a word in the simple reflections (0-based letters).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WeylWord {
    pub letters: Vec<usize>,
}

impl WeylWord {
    pub fn identity() -> Self {
        WeylWord { letters: Vec::new() }
    }

    pub fn new(letters: Vec<usize>) -> Self {
        WeylWord { letters }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for i in &self.letters {
            write!(f, "s{}", i + 1)?;
        }
        Ok(())
    }
}

/// An element `v -> w v + t` of the affine Weyl group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineWeyl {
    pub w: WeylWord,
    pub t: Vector,
}

pub fn weyl_act(real: &GcmRealization, a: &AffineWeyl, v: &[Q]) -> Vector {
    rat::add(&real.act_vec(&a.w, v), &a.t)
}

/// Image of 0 under the reflection across the wall `beta + k = 0`.
pub fn wall_reflection(root: &RealRoot, k: &Q, v: &[Q]) -> Vector {
    let c = rat::dot(&root.covector, v) + k;
    rat::axpy(v, &-c, &root.coroot)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn as_q(self) -> Q {
        match self {
            Sign::Plus => q(1),
            Sign::Minus => q(-1),
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Sector-germ `sigma w C_f` of the root apartment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorGermId {
    pub sign: Sign,
    pub w: WeylWord,
}

impl SectorGermId {
    pub fn plus_infinity() -> Self {
        SectorGermId { sign: Sign::Plus, w: WeylWord::identity() }
    }

    pub fn minus_infinity() -> Self {
        SectorGermId { sign: Sign::Minus, w: WeylWord::identity() }
    }

    /// Builds a germ with its word put in canonical form.
    pub fn new(real: &GcmRealization, sign: Sign, letters: &[usize]) -> Result<Self, RootError> {
        real.check_word(letters)?;
        Ok(SectorGermId { sign, w: real.weyl_reduce(letters) })
    }

    /// Parses `"+e"`, `"-e"`, `"+s1s2"`.
    pub fn parse(real: &GcmRealization, s: &str) -> Result<Self, RootError> {
        let bad = || RootError::BadGerm(s.to_string());
        let s = s.trim();
        let (sign, rest) = match s.chars().next() {
            Some('+') => (Sign::Plus, &s[1..]),
            Some('-') => (Sign::Minus, &s[1..]),
            _ => return Err(bad()),
        };
        let mut letters = Vec::new();
        if rest != "e" {
            if rest.is_empty() {
                return Err(bad());
            }
            for part in rest.split('s').skip(1) {
                let i: usize = part.parse().map_err(|_| bad())?;
                if i == 0 {
                    return Err(bad());
                }
                letters.push(i - 1);
            }
            if !rest.starts_with('s') {
                return Err(bad());
            }
        }
        Self::new(real, sign, &letters)
    }

    /// The direction `sigma w u` of the sector for a dominant `u`.
    pub fn direction(&self, real: &GcmRealization, u: &[Q]) -> Vector {
        rat::scale(&self.sign.as_q(), &real.act_vec(&self.w, u))
    }

    /// Solves `direction(u) = v` for `u`.
    pub fn undirect(&self, real: &GcmRealization, v: &[Q]) -> Vector {
        real.act_vec_inverse(&self.w, &rat::scale(&self.sign.as_q(), v))
    }
}

impl fmt::Display for SectorGermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Plus { '+' } else { '-' };
        write!(f, "{s}{}", self.w)
    }
}

/// Side of the wall direction of `beta` on which the germ lies: `+1` when `beta`
/// is positive on the sector.
pub fn germ_side(
    real: &GcmRealization,
    table: &RealRootTable,
    beta: &[i64],
    g: &SectorGermId,
) -> Result<i64, RootError> {
    let img = real.act_root_inverse(&g.w, beta);
    table.get(&img)?;
    let pos = is_positive(&img);
    Ok(if pos == (g.sign == Sign::Plus) { 1 } else { -1 })
}

/// Number of positive roots sent to negative roots by `w`, counted by brute force
/// over the table (exact when every inversion has height at most `table.h`).
pub fn inversion_count(real: &GcmRealization, table: &RealRootTable, w: &WeylWord) -> usize {
    table
        .positive
        .iter()
        .filter(|&&i| !is_positive(&real.act_root(w, &table.roots[i].coeffs)))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::from_ints;

    #[test]
    fn validate_examples() {
        assert_eq!(preset("a1").unwrap().d, 1);
        assert_eq!(preset("hyp23").unwrap().d, 2);
        let aff = preset("affine-a1").unwrap();
        assert_eq!(aff.d, 3);
        assert_eq!(aff.roots[0], from_ints(&[2, -2, 1]));
        assert_eq!(aff.roots[1], from_ints(&[-2, 2, 0]));
        assert!(matches!(
            validate_gcm(&[vec![2, 1], vec![1, 2]]),
            Err(RootError::ViolatesGcmAxioms { i: 0, j: 1, .. })
        ));
        assert!(validate_gcm(&[vec![2, 0], vec![-1, 2]]).is_err());
        assert!(validate_gcm(&[vec![3]]).is_err());
    }

    #[test]
    fn pairing_matches_matrix() {
        for name in PRESETS {
            let r = preset(name).unwrap();
            for i in 0..r.n {
                for j in 0..r.n {
                    assert_eq!(rat::dot(&r.roots[j], &r.coroots[i]), q(r.cartan(i, j)));
                }
            }
            assert_eq!(rat::rank(&r.roots), r.n);
        }
    }

    #[test]
    fn finiteness() {
        assert!(preset("a1").unwrap().is_finite());
        assert!(!preset("affine-a1").unwrap().is_finite());
        assert!(!preset("hyp23").unwrap().is_finite());
        let b2 = validate_gcm(&[vec![2, -2], vec![-1, 2]]).unwrap();
        assert!(b2.is_finite());
        let g2 = validate_gcm(&[vec![2, -3], vec![-1, 2]]).unwrap();
        assert!(g2.is_finite());
        assert_eq!(enumerate_real_roots(&g2, 100).len(), 12);
    }

    #[test]
    fn a1_roots() {
        let r = preset("a1").unwrap();
        let t = enumerate_real_roots(&r, 5);
        let c: Vec<_> = t.roots.iter().map(|x| x.coeffs.clone()).collect();
        assert_eq!(c, vec![vec![-1], vec![1]]);
    }

    #[test]
    fn hyp23_reflection() {
        let r = preset("hyp23").unwrap();
        assert_eq!(r.reflect_root(1, &[1, 0]), vec![1, 3]);
        let t = enumerate_real_roots(&r, 4);
        assert!(t.lookup(&[1, 3]).is_some());
        assert!(enumerate_real_roots(&r, 3).lookup(&[1, 3]).is_none());
        for root in &t.roots {
            assert_eq!(rat::dot(&root.covector, &root.coroot), q(2));
        }
    }

    #[test]
    fn affine_roots_closed_form() {
        let r = preset("affine-a1").unwrap();
        let t = enumerate_real_roots(&r, 5);
        // real roots are +-alpha_1 + k delta and +-alpha_2 + k delta with delta = (1,1)
        let mut expected = Vec::new();
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                if (a - b).abs() == 1 && (a + b).abs() <= 5 {
                    expected.push(vec![a, b]);
                }
            }
        }
        let mut got: Vec<_> = t.roots.iter().map(|x| x.coeffs.clone()).collect();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn reduce_examples() {
        let a1 = preset("a1").unwrap();
        assert!(a1.weyl_reduce(&[0, 0]).is_identity());
        let h = preset("hyp23").unwrap();
        assert_eq!(h.weyl_reduce(&[0, 1, 0]).letters, vec![0, 1, 0]);
        let c = validate_gcm(&[vec![2, 0], vec![0, 2]]).unwrap();
        let a = c.weyl_reduce(&[0, 1, 0, 1]);
        let b = c.weyl_reduce(&[1, 0, 1, 0]);
        assert!(a.is_identity() && b.is_identity());
        let x = c.weyl_reduce(&[1, 0]);
        assert_eq!(x.letters, vec![0, 1]);
        assert_eq!(c.matrix_of(&x), c.matrix_of(&WeylWord::new(vec![1, 0])));
    }

    #[test]
    fn reduced_matrix_equals_word_matrix() {
        let h = preset("hyp23").unwrap();
        let words = [vec![0, 1, 1, 0, 1], vec![1, 0, 1, 0, 0, 1], vec![0, 1, 0, 1, 0, 1, 0]];
        for w in words {
            let r = h.weyl_reduce(&w);
            assert_eq!(h.matrix_of(&r), h.matrix_of(&WeylWord::new(w.clone())));
        }
    }

    #[test]
    fn length_is_inversion_count() {
        for name in ["hyp23", "affine-a1"] {
            let r = preset(name).unwrap();
            let t = enumerate_real_roots(&r, 200);
            for w in r.elements_up_to(5) {
                assert_eq!(inversion_count(&r, &t, &w), w.letters.len(), "{name} {w}");
            }
        }
    }

    #[test]
    fn act_examples() {
        let a1 = preset("a1").unwrap();
        assert_eq!(a1.reflect_vec(0, &a1.coroots[0]), from_ints(&[-1]));
        let v = from_ints(&[3]);
        assert_eq!(a1.act_vec(&WeylWord::identity(), &v), v);
        let t = enumerate_real_roots(&a1, 1);
        let root = &t.roots[1];
        assert_eq!(wall_reflection(root, &q(3), &from_ints(&[0])), from_ints(&[-3]));
    }

    #[test]
    fn germ_side_examples() {
        let a1 = preset("a1").unwrap();
        let t = enumerate_real_roots(&a1, 5);
        let plus = SectorGermId::parse(&a1, "+e").unwrap();
        let minus = SectorGermId::parse(&a1, "-e").unwrap();
        let s1 = SectorGermId::parse(&a1, "+s1").unwrap();
        assert_eq!(germ_side(&a1, &t, &[1], &plus).unwrap(), 1);
        assert_eq!(germ_side(&a1, &t, &[1], &minus).unwrap(), -1);
        assert_eq!(germ_side(&a1, &t, &[1], &s1).unwrap(), -1);
        let h = preset("hyp23").unwrap();
        let th = enumerate_real_roots(&h, 3);
        let g = SectorGermId::parse(&h, "+s2").unwrap();
        assert!(matches!(germ_side(&h, &th, &[1, 0], &g), Err(RootError::RootOutsideTable(_))));
    }

    #[test]
    fn germ_literals() {
        let h = preset("hyp23").unwrap();
        let g = SectorGermId::parse(&h, "-s2s1s1s2s1").unwrap();
        assert_eq!(g.to_string(), "-s1");
        assert!(SectorGermId::parse(&h, "s1").is_err());
        assert!(SectorGermId::parse(&h, "+s3").is_err());
        assert!(SectorGermId::parse(&h, "+").is_err());
    }

    #[test]
    fn longest_element_of_a1() {
        let a1 = preset("a1").unwrap();
        assert_eq!(a1.longest_element().unwrap().letters, vec![0]);
        assert!(preset("hyp23").unwrap().longest_element().is_none());
    }

    #[test]
    fn regular_vector() {
        for name in PRESETS {
            let r = preset(name).unwrap();
            let v = r.regular_lattice_vector();
            assert!(r.is_regular_dominant(&v));
            assert!(v.iter().all(|x| x.is_integer()));
        }
    }
}
