//! The branched masure simulator.
//!
//! Apartments are named by folding words. A child apartment `parent·(beta,k,j)`
//! shares with its parent exactly the closed half `{beta + k >= 0}` and is new on
//! the other side; `j` numbers the sheet. Every letter of one word uses the same
//! positive root, so a word describes a chain of parallel branchings and the walls
//! of different chains never cross inside a single apartment.

use crate::apartment::{ApartmentError, HalfSpaceSpec};
use crate::rat::{self, Vector, Q};
use crate::rootsys::{
    germ_side, is_positive, GcmRealization, RealRoot, RealRootTable, RootError, SectorGermId, Sign,
    WeylWord,
};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MasureError {
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Apartment(#[from] ApartmentError),
    #[error("folding depth bound {0} exceeded")]
    DepthExceeded(usize),
    #[error("wall level {0} is not an integer")]
    NotTrueWall(String),
    #[error("sheet {sheet} outside 1..={max}")]
    SheetOutOfRange { sheet: u32, max: u32 },
    #[error("apartment {0} is not registered")]
    UnregisteredApartment(String),
    #[error("positive root index {0} is not in the table")]
    UnknownRoot(usize),
    #[error("branch wall is not parallel to the walls of apartment {0}")]
    NonParallelBranch(String),
    #[error("the registry is frozen")]
    Frozen,
    #[error("the germ already lies in the apartment")]
    GermContained,
    #[error("germs of opposite signs")]
    MixedSigns,
    #[error("translated point leaves every chart piece")]
    ChartExit,
    #[error("wall image lies outside the table or on the wrong side of +infinity")]
    WallImageOutsideTable,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FoldingLetter {
    /// Index into the table's list of positive roots.
    pub root: usize,
    pub k: i64,
    pub sheet: u32,
}

/// An apartment id: the folding word from the root apartment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ApartmentId(pub Vec<FoldingLetter>);

impl ApartmentId {
    pub fn root() -> Self {
        ApartmentId(Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, m: usize) -> ApartmentId {
        ApartmentId(self.0[..m].to_vec())
    }

    pub fn child(&self, l: FoldingLetter) -> ApartmentId {
        let mut v = self.0.clone();
        v.push(l);
        ApartmentId(v)
    }

    /// Positive-root index shared by all letters, if any.
    pub fn chain_root(&self) -> Option<usize> {
        self.0.first().map(|l| l.root)
    }

    /// The level `max(-k_i)` of the wall where this chain leaves the root apartment.
    pub fn exit_level(&self) -> Option<i64> {
        self.0.iter().map(|l| -l.k).max()
    }

    /// Length of the prefix owning the point at `beta`-level `h`.
    pub fn owner_len(&self, h: &Q) -> usize {
        let mut m = self.0.len();
        while m > 0 && !(h + Q::from_integer(self.0[m - 1].k.into())).is_negative() {
            m -= 1;
        }
        m
    }
}

impl fmt::Display for ApartmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[{},{},{}]", l.root, l.k, l.sheet)?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MasurePoint {
    pub word: ApartmentId,
    pub b: Vector,
}

impl MasurePoint {
    pub fn root(b: Vector) -> Self {
        MasurePoint { word: ApartmentId::root(), b }
    }

    pub fn in_root(&self) -> bool {
        self.word.is_root()
    }
}

#[derive(Clone, Debug)]
pub struct MasureConfig {
    pub real: GcmRealization,
    pub table: RealRootTable,
    pub thickness: u32,
    pub max_depth: usize,
}

impl MasureConfig {
    pub fn new(real: GcmRealization, h: i64, thickness: u32, max_depth: usize) -> Result<Self, MasureError> {
        if thickness < 2 {
            return Err(MasureError::ConfigInvalid("thickness must be at least 2".into()));
        }
        if h < 1 {
            return Err(MasureError::ConfigInvalid("height bound must be at least 1".into()));
        }
        let table = crate::rootsys::enumerate_real_roots(&real, h);
        Ok(MasureConfig { real, table, thickness, max_depth })
    }
}

/// Closed half-space `a·x + c >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinIneq {
    pub a: Vector,
    pub c: Q,
}

impl LinIneq {
    pub fn holds(&self, x: &[Q]) -> bool {
        !(rat::dot(&self.a, x) + &self.c).is_negative()
    }
}

pub fn region_contains(region: &[LinIneq], x: &[Q]) -> bool {
    region.iter().all(|h| h.holds(x))
}

/// Affine map `x -> m x + t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub m: Vec<Vector>,
    pub t: Vector,
}

impl Affine {
    pub fn identity(d: usize) -> Self {
        Affine { m: rat::identity(d), t: rat::zeros(d) }
    }

    /// Reflection across `{beta = level}`: `x - (beta(x) - level) beta^vee`.
    pub fn wall_reflection(root: &RealRoot, level: &Q) -> Self {
        let d = root.covector.len();
        let m = (0..d)
            .map(|r| (0..d).map(|c| rat::unit(d, r)[c].clone() - &root.coroot[r] * &root.covector[c]).collect())
            .collect();
        Affine { m, t: rat::scale(level, &root.coroot) }
    }

    pub fn apply(&self, x: &[Q]) -> Vector {
        rat::add(&rat::mat_vec(&self.m, x), &self.t)
    }

    pub fn is_identity(&self) -> bool {
        self.m == rat::identity(self.m.len()) && rat::is_zero_vec(&self.t)
    }
}

/// One piece of an unfolded chart: chart points in `region` are the points of
/// `host` with coordinates `map(c)`.
#[derive(Clone, Debug)]
pub struct ChartPiece {
    pub region: Vec<LinIneq>,
    pub host: ApartmentId,
    pub map: Affine,
    pub inverse: Affine,
}

/// The chart of the apartment containing a given apartment's new points and a
/// sector-germ of the root apartment. Chart coordinates agree with the retraction
/// onto the root apartment centered at the germ.
#[derive(Clone, Debug)]
pub struct UnfoldedChart {
    pub germ: SectorGermId,
    pub word: ApartmentId,
    pub pieces: Vec<ChartPiece>,
}

impl UnfoldedChart {
    /// Chart coordinates of `x`, if `x` lies in this chart.
    pub fn locate(&self, x: &MasurePoint) -> Option<Vector> {
        for p in &self.pieces {
            if p.host != x.word {
                continue;
            }
            let c = p.inverse.apply(&x.b);
            if region_contains(&p.region, &c) {
                return Some(c);
            }
        }
        None
    }

    pub fn piece_at(&self, c: &[Q]) -> Option<&ChartPiece> {
        self.pieces.iter().find(|p| region_contains(&p.region, c))
    }
}

/// Host of a split piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Host {
    /// A registered apartment that contains the piece and the germ.
    Registered(ApartmentId),
    /// The unfolded chart of the given apartment toward the germ.
    Unfolded(ApartmentId),
}

#[derive(Clone, Debug)]
pub struct SplitPiece {
    /// In the coordinates of the split apartment.
    pub region: Vec<LinIneq>,
    pub host: Host,
    /// Apartment coordinates to retraction coordinates.
    pub to_root: Affine,
}

#[derive(Clone, Debug)]
pub struct Split {
    pub pieces: Vec<SplitPiece>,
    pub n: usize,
}

/// An automorphism of the simulator: `x -> w x + lambda` on every chart, plus a
/// permutation of sheets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub w: WeylWord,
    pub lambda: Vector,
    pub sheets: BTreeMap<u32, u32>,
}

impl Automorphism {
    pub fn translation(lambda: Vector) -> Self {
        Automorphism { w: WeylWord::identity(), lambda, sheets: BTreeMap::new() }
    }

    pub fn identity(d: usize) -> Self {
        Self::translation(rat::zeros(d))
    }

    pub fn sheet(&self, j: u32) -> u32 {
        self.sheets.get(&j).copied().unwrap_or(j)
    }
}

#[derive(Clone, Debug)]
pub struct Masure {
    pub config: MasureConfig,
    registry: BTreeSet<ApartmentId>,
    frozen: bool,
}

impl Masure {
    pub fn new(config: MasureConfig) -> Self {
        let mut registry = BTreeSet::new();
        registry.insert(ApartmentId::root());
        Masure { config, registry, frozen: false }
    }

    pub fn real(&self) -> &GcmRealization {
        &self.config.real
    }

    pub fn table(&self) -> &RealRootTable {
        &self.config.table
    }

    pub fn d(&self) -> usize {
        self.config.real.d
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn apartments(&self) -> impl Iterator<Item = &ApartmentId> {
        self.registry.iter()
    }

    pub fn is_registered(&self, a: &ApartmentId) -> bool {
        self.registry.contains(a)
    }

    pub fn root_of(&self, positive_index: usize) -> Result<&RealRoot, MasureError> {
        self.table().positive_root(positive_index).ok_or(MasureError::UnknownRoot(positive_index))
    }

    /// Registers `parent·(beta,k,sheet)`; `beta` is a positive-root index.
    pub fn branch(&mut self, parent: &ApartmentId, beta: usize, k: &Q, sheet: u32) -> Result<ApartmentId, MasureError> {
        if self.frozen {
            return Err(MasureError::Frozen);
        }
        if !self.is_registered(parent) {
            return Err(MasureError::UnregisteredApartment(parent.to_string()));
        }
        if !k.is_integer() {
            return Err(MasureError::NotTrueWall(rat::fmt_q(k)));
        }
        self.root_of(beta)?;
        let max = self.config.thickness - 1;
        if sheet < 1 || sheet > max {
            return Err(MasureError::SheetOutOfRange { sheet, max });
        }
        if parent.depth() >= self.config.max_depth {
            return Err(MasureError::DepthExceeded(self.config.max_depth));
        }
        if let Some(r) = parent.chain_root() {
            if r != beta {
                return Err(MasureError::NonParallelBranch(parent.to_string()));
            }
        }
        let k: i64 = k.to_integer().try_into().map_err(|_| MasureError::NotTrueWall(rat::fmt_q(k)))?;
        let child = parent.child(FoldingLetter { root: beta, k, sheet });
        self.registry.insert(child.clone());
        Ok(child)
    }

    /// Registers a whole word, prefix by prefix.
    pub fn register_word(&mut self, word: &ApartmentId) -> Result<(), MasureError> {
        for m in 0..word.depth() {
            let l = word.0[m];
            let child = word.prefix(m + 1);
            if !self.is_registered(&child) {
                self.branch(&word.prefix(m), l.root, &Q::from_integer(l.k.into()), l.sheet)?;
            }
        }
        Ok(())
    }

    fn check_word(&self, word: &ApartmentId) -> Result<(), MasureError> {
        if self.is_registered(word) {
            Ok(())
        } else {
            Err(MasureError::UnregisteredApartment(word.to_string()))
        }
    }

    /// Level `beta(b)` of a point of a chain apartment.
    pub fn level(&self, word: &ApartmentId, b: &[Q]) -> Result<Q, MasureError> {
        match word.chain_root() {
            None => Ok(Q::zero()),
            Some(r) => Ok(rat::dot(&self.root_of(r)?.covector, b)),
        }
    }

    /// Canonical form of the point with coordinates `b` in apartment `word`.
    pub fn canonicalize(&self, word: &ApartmentId, b: &[Q]) -> Result<MasurePoint, MasureError> {
        self.check_word(word)?;
        self.canonical_form(word, b)
    }

    /// Canonicalization without the registry check (used for automorphism images).
    pub fn canonical_form(&self, word: &ApartmentId, b: &[Q]) -> Result<MasurePoint, MasureError> {
        if b.len() != self.d() {
            return Err(MasureError::ConfigInvalid(format!("expected {} coordinates", self.d())));
        }
        let h = self.level(word, b)?;
        let m = word.owner_len(&h);
        Ok(MasurePoint { word: word.prefix(m), b: b.to_vec() })
    }

    pub fn points_equal(&self, x: &MasurePoint, y: &MasurePoint) -> Result<bool, MasureError> {
        let cx = self.canonical_form(&x.word, &x.b)?;
        let cy = self.canonical_form(&y.word, &y.b)?;
        Ok(cx == cy)
    }

    /// Side of the chain wall direction on which the germ lies.
    pub fn chain_side(&self, word: &ApartmentId, g: &SectorGermId) -> Result<i64, MasureError> {
        match word.chain_root() {
            None => Ok(1),
            Some(r) => {
                let coeffs = &self.root_of(r)?.coeffs;
                Ok(germ_side(self.real(), self.table(), coeffs, g)?)
            }
        }
    }

    /// Chart of the apartment through the new points of `word` and the germ `g`.
    pub fn chart(&self, word: &ApartmentId, g: &SectorGermId) -> Result<UnfoldedChart, MasureError> {
        let d = self.d();
        let id = Affine::identity(d);
        let Some(r) = word.chain_root() else {
            return Ok(UnfoldedChart {
                germ: g.clone(),
                word: word.clone(),
                pieces: vec![ChartPiece { region: vec![], host: ApartmentId::root(), map: id.clone(), inverse: id }],
            });
        };
        let root = self.root_of(r)?.clone();
        let side = self.chain_side(word, g)?;
        let lvl = |a: Option<&Q>, b: Option<&Q>, flip: Option<&Q>| -> Vec<LinIneq> {
            // region {a <= beta(c) <= b}, optionally in the reflected level 2L - beta(c)
            let mut v = Vec::new();
            match flip {
                None => {
                    if let Some(a) = a {
                        v.push(LinIneq { a: root.covector.clone(), c: -a.clone() });
                    }
                    if let Some(b) = b {
                        v.push(LinIneq { a: rat::neg(&root.covector), c: b.clone() });
                    }
                }
                Some(l2) => {
                    // a <= 2L - beta(c) <= b  <=>  2L - b <= beta(c) <= 2L - a
                    if let Some(b) = b {
                        v.push(LinIneq { a: root.covector.clone(), c: b - l2 });
                    }
                    if let Some(a) = a {
                        v.push(LinIneq { a: rat::neg(&root.covector), c: l2 - a });
                    }
                }
            }
            v
        };
        let mut breaks: Vec<Q> = word.0.iter().map(|l| Q::from_integer((-l.k).into())).collect();
        breaks.sort();
        breaks.dedup();
        let sample = |lo: Option<&Q>, hi: Option<&Q>| -> Q {
            match (lo, hi) {
                (Some(a), Some(b)) => (a + b) / Q::from_integer(2.into()),
                (Some(a), None) => a + Q::one(),
                (None, Some(b)) => b - Q::one(),
                (None, None) => Q::zero(),
            }
        };
        // intervals of constant owner over the levels up to `top` (or all levels)
        let intervals = |top: Option<&Q>| -> Vec<(Option<Q>, Option<Q>, usize)> {
            let bs: Vec<Q> = breaks.iter().filter(|b| top.map_or(true, |t| *b < t)).cloned().collect();
            let mut out: Vec<(Option<Q>, Option<Q>, usize)> = Vec::new();
            let mut lo: Option<Q> = None;
            let mut edges: Vec<Option<Q>> = bs.into_iter().map(Some).collect();
            edges.push(top.cloned());
            for hi in edges {
                let m = word.owner_len(&sample(lo.as_ref(), hi.as_ref()));
                match out.last_mut() {
                    Some(last) if last.2 == m => last.1 = hi.clone(),
                    _ => out.push((lo.clone(), hi.clone(), m)),
                }
                lo = hi;
            }
            out
        };
        let mut pieces = Vec::new();
        if side > 0 {
            for (lo, hi, m) in intervals(None).into_iter().rev() {
                pieces.push(ChartPiece {
                    region: lvl(lo.as_ref(), hi.as_ref(), None),
                    host: word.prefix(m),
                    map: id.clone(),
                    inverse: id.clone(),
                });
            }
        } else {
            let l0 = Q::from_integer(word.exit_level().unwrap().into());
            pieces.push(ChartPiece {
                region: lvl(None, Some(&l0), None),
                host: ApartmentId::root(),
                map: id.clone(),
                inverse: id.clone(),
            });
            let refl = Affine::wall_reflection(&root, &l0);
            let l2 = &l0 + &l0;
            for (lo, hi, m) in intervals(Some(&l0)).into_iter().rev() {
                debug_assert!(m > 0);
                pieces.push(ChartPiece {
                    region: lvl(lo.as_ref(), hi.as_ref(), Some(&l2)),
                    host: word.prefix(m),
                    map: refl.clone(),
                    inverse: refl.clone(),
                });
            }
        }
        Ok(UnfoldedChart { germ: g.clone(), word: word.clone(), pieces })
    }

    /// The unfolded chart at `x` together with the chart coordinates of `x`.
    pub fn unfold(&self, x: &MasurePoint, g: &SectorGermId) -> Result<(UnfoldedChart, Vector), MasureError> {
        let chart = self.chart(&x.word, g)?;
        let c = chart.locate(x).ok_or(MasureError::ChartExit)?;
        Ok((chart, c))
    }

    /// Retraction onto the root apartment centered at `g`.
    pub fn retract(&self, x: &MasurePoint, g: &SectorGermId) -> Result<Vector, MasureError> {
        Ok(self.unfold(x, g)?.1)
    }

    /// Reads chart coordinates back as a canonical masure point.
    pub fn chart_point(&self, chart: &UnfoldedChart, c: &[Q]) -> Result<MasurePoint, MasureError> {
        let p = chart.piece_at(c).ok_or(MasureError::ChartExit)?;
        self.canonical_form(&p.host, &p.map.apply(c))
    }

    /// `x +_g u` for a dominant `u`.
    pub fn translate(&self, x: &MasurePoint, g: &SectorGermId, u: &[Q]) -> Result<MasurePoint, MasureError> {
        let (chart, c) = self.unfold(x, g)?;
        let target = rat::add(&c, &g.direction(self.real(), u));
        self.chart_point(&chart, &target)
    }

    /// The two opposite half-apartments of `a` lying with `g` in a common apartment.
    pub fn sundial_split(
        &self,
        a: &ApartmentId,
        g: &SectorGermId,
    ) -> Result<((HalfSpaceSpec, Host), (HalfSpaceSpec, Host)), MasureError> {
        let Some(r) = a.chain_root() else {
            return Err(MasureError::GermContained);
        };
        if self.chain_side(a, g)? > 0 {
            return Err(MasureError::GermContained);
        }
        let coeffs = self.root_of(r)?.coeffs.clone();
        let l0 = Q::from_integer(a.exit_level().unwrap().into());
        let d1 = HalfSpaceSpec { root: coeffs.clone(), k: -l0.clone() };
        let d2 = HalfSpaceSpec { root: coeffs.iter().map(|c| -c).collect(), k: l0 };
        Ok(((d1, Host::Registered(ApartmentId::root())), (d2, Host::Unfolded(a.clone()))))
    }

    /// Gallery distance from `g` to the nearest germ of the apartment `a`.
    pub fn germ_distance_to_apartment(&self, a: &ApartmentId, g: &SectorGermId) -> Result<usize, MasureError> {
        let Some(r) = a.chain_root() else {
            return Ok(0);
        };
        if self.chain_side(a, g)? > 0 {
            return Ok(0);
        }
        let beta = self.root_of(r)?.coeffs.clone();
        let img = self.real().act_root_inverse(&g.w, &beta);
        let gamma: Vec<i64> = match g.sign {
            Sign::Plus => img.iter().map(|c| -c).collect(),
            Sign::Minus => img,
        };
        Ok(root_depth(self.real(), &gamma))
    }

    /// Covers `a` by closed convex pieces, each lying in an apartment with `g`.
    pub fn split_apartment(&self, a: &ApartmentId, g: &SectorGermId) -> Result<Split, MasureError> {
        self.check_word(a)?;
        let d = self.d();
        let n = self.germ_distance_to_apartment(a, g)?;
        match self.sundial_split(a, g) {
            Err(MasureError::GermContained) => Ok(Split {
                pieces: vec![SplitPiece { region: vec![], host: Host::Registered(a.clone()), to_root: Affine::identity(d) }],
                n,
            }),
            Err(e) => Err(e),
            Ok(((d1, h1), (d2, h2))) => {
                let real = self.real();
                let root = self.root_of(a.chain_root().unwrap())?;
                let l0 = Q::from_integer(a.exit_level().unwrap().into());
                let piece = |h: &HalfSpaceSpec| LinIneq { a: real.covector(&h.root), c: h.k.clone() };
                Ok(Split {
                    pieces: vec![
                        SplitPiece { region: vec![piece(&d1)], host: h1, to_root: Affine::identity(d) },
                        SplitPiece { region: vec![piece(&d2)], host: h2, to_root: Affine::wall_reflection(root, &l0) },
                    ],
                    n,
                })
            }
        }
    }

    /// Points `x = x_1, ..., x_k = y` of the segment `[x,y]` of apartment `a` such
    /// that consecutive points lie in a common split piece.
    pub fn split_segment(&self, a: &ApartmentId, x: &[Q], y: &[Q], g: &SectorGermId) -> Result<Vec<Vector>, MasureError> {
        let split = self.split_apartment(a, g)?;
        let mut out = vec![x.to_vec()];
        if split.pieces.len() == 2 {
            let h = &split.pieces[0].region[0];
            let fx = rat::dot(&h.a, x) + &h.c;
            let fy = rat::dot(&h.a, y) + &h.c;
            if fx.is_negative() && fy.is_positive() || fx.is_positive() && fy.is_negative() {
                let t = &fx / (&fx - &fy);
                out.push(rat::axpy(x, &t, &rat::sub(y, x)));
            }
        }
        out.push(y.to_vec());
        Ok(out)
    }

    /// Image of a canonical point under an automorphism.
    pub fn automorphism_apply(&self, aut: &Automorphism, x: &MasurePoint) -> Result<MasurePoint, MasureError> {
        let word = self.transport_word(aut, &x.word)?;
        let b = rat::add(&self.real().act_vec(&aut.w, &x.b), &aut.lambda);
        self.canonical_form(&word, &b)
    }

    pub fn transport_word(&self, aut: &Automorphism, word: &ApartmentId) -> Result<ApartmentId, MasureError> {
        let real = self.real();
        let mut out = Vec::with_capacity(word.depth());
        for l in &word.0 {
            let beta = &self.root_of(l.root)?.coeffs;
            let img = real.act_root(&aut.w, beta);
            if !is_positive(&img) {
                return Err(MasureError::WallImageOutsideTable);
            }
            let idx = self.table().positive_index(&img).ok_or(MasureError::WallImageOutsideTable)?;
            let shift = rat::dot(&real.covector(&img), &aut.lambda);
            if !shift.is_integer() {
                return Err(MasureError::WallImageOutsideTable);
            }
            let k = l.k - i64::try_from(shift.to_integer()).map_err(|_| MasureError::WallImageOutsideTable)?;
            out.push(FoldingLetter { root: idx, k, sheet: aut.sheet(l.sheet) });
        }
        Ok(ApartmentId(out))
    }

    /// The masure whose registry is the image of this one.
    pub fn image(&self, aut: &Automorphism) -> Result<Masure, MasureError> {
        let mut m = Masure::new(self.config.clone());
        for a in &self.registry {
            let img = self.transport_word(aut, a)?;
            m.register_word(&img)?;
        }
        if self.frozen {
            m.freeze();
        }
        Ok(m)
    }

    pub fn germ_image(&self, aut: &Automorphism, g: &SectorGermId) -> SectorGermId {
        SectorGermId { sign: g.sign, w: self.real().mul(&aut.w, &g.w) }
    }
}

/// Least `l(v)` with `v(gamma) < 0` for a positive real root `gamma`.
pub fn root_depth(real: &GcmRealization, gamma: &[i64]) -> usize {
    let mut g = gamma.to_vec();
    let mut depth = 1;
    while g.iter().sum::<i64>() > 1 {
        let j = (0..real.n)
            .find(|&j| real.pair_coroot(&g, j) > 0)
            .expect("a non-simple positive root has a descent");
        g = real.reflect_root(j, &g);
        depth += 1;
    }
    depth
}

/// Gallery distance between two germs of the same sign.
pub fn gallery_distance(real: &GcmRealization, g1: &SectorGermId, g2: &SectorGermId) -> Result<usize, MasureError> {
    if g1.sign != g2.sign {
        return Err(MasureError::MixedSigns);
    }
    let inv = real.inverse(&g1.w);
    Ok(real.mul(&inv, &g2.w).letters.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{from_ints, q, qf};
    use crate::rootsys::preset;

    fn a1_masure() -> Masure {
        Masure::new(MasureConfig::new(preset("a1").unwrap(), 20, 2, 4).unwrap())
    }

    fn letter(k: i64) -> FoldingLetter {
        FoldingLetter { root: 0, k, sheet: 1 }
    }

    #[test]
    fn canonicalize_examples() {
        let mut m = a1_masure();
        let child = m.branch(&ApartmentId::root(), 0, &q(0), 1).unwrap();
        let p = m.canonicalize(&child, &[q(-1)]).unwrap();
        assert_eq!(p.word, child);
        assert!(m.canonicalize(&child, &[q(2)]).unwrap().in_root());
        assert!(m.canonicalize(&child, &[q(0)]).unwrap().in_root());
        let stray = ApartmentId(vec![letter(5)]);
        assert!(matches!(m.canonicalize(&stray, &[q(0)]), Err(MasureError::UnregisteredApartment(_))));
    }

    #[test]
    fn branch_errors() {
        let mut m = Masure::new(MasureConfig::new(preset("hyp23").unwrap(), 20, 2, 2).unwrap());
        let r = ApartmentId::root();
        let c = m.branch(&r, 0, &q(0), 1).unwrap();
        assert_eq!(c.depth(), 1);
        assert!(matches!(m.branch(&r, 0, &qf(1, 2), 1), Err(MasureError::NotTrueWall(_))));
        assert!(matches!(m.branch(&r, 0, &q(0), 2), Err(MasureError::SheetOutOfRange { .. })));
        // the third positive root has height 4 here
        assert!(matches!(m.branch(&c, 2, &q(-5), 1), Err(MasureError::NonParallelBranch(_))));
        let g = m.branch(&c, 0, &q(-5), 1).unwrap();
        assert_eq!(g.depth(), 2);
        assert!(matches!(m.branch(&g, 0, &q(1), 1), Err(MasureError::DepthExceeded(2))));
        m.freeze();
        assert!(matches!(m.branch(&r, 1, &q(0), 1), Err(MasureError::Frozen)));
    }

    #[test]
    fn a1_charts() {
        let mut m = a1_masure();
        let child = m.branch(&ApartmentId::root(), 0, &q(0), 1).unwrap();
        let x = m.canonicalize(&child, &[q(-1)]).unwrap();
        let plus = SectorGermId::plus_infinity();
        let minus = SectorGermId::minus_infinity();
        let (cp, c) = m.unfold(&x, &plus).unwrap();
        assert_eq!(c, vec![q(-1)]);
        assert!(cp.pieces.iter().all(|p| p.map.is_identity()));
        assert_eq!(cp.pieces.last().unwrap().host, child);
        let (cm, c) = m.unfold(&x, &minus).unwrap();
        assert_eq!(c, vec![q(1)]);
        assert_eq!(cm.pieces.len(), 2);
        assert_eq!(cm.pieces[0].host, ApartmentId::root());
        assert!(region_contains(&cm.pieces[0].region, &[q(0)]));
        assert!(!region_contains(&cm.pieces[0].region, &[qf(1, 10)]));
        assert_eq!(cm.pieces[1].host, child);
        assert_eq!(m.retract(&x, &plus).unwrap(), vec![q(-1)]);
        assert_eq!(m.retract(&x, &minus).unwrap(), vec![q(1)]);
        let r = MasurePoint::root(vec![q(3)]);
        assert_eq!(m.retract(&r, &minus).unwrap(), vec![q(3)]);
    }

    #[test]
    fn a1_translate() {
        let mut m = a1_masure();
        let child = m.branch(&ApartmentId::root(), 0, &q(0), 1).unwrap();
        let x = m.canonicalize(&child, &[q(-1)]).unwrap();
        let plus = SectorGermId::plus_infinity();
        let minus = SectorGermId::minus_infinity();
        assert_eq!(m.translate(&x, &plus, &[q(2)]).unwrap(), MasurePoint::root(vec![q(1)]));
        let r = MasurePoint::root(vec![q(-1)]);
        assert_eq!(m.translate(&r, &minus, &[q(1)]).unwrap(), MasurePoint::root(vec![q(-2)]));
        assert_eq!(m.translate(&r, &plus, &[q(1)]).unwrap(), MasurePoint::root(vec![q(0)]));
        // toward -infinity the branch point folds back into the root at 0
        assert_eq!(m.translate(&x, &minus, &[qf(1, 2)]).unwrap(), m.canonicalize(&child, &[qf(-1, 2)]).unwrap());
        assert_eq!(m.translate(&x, &minus, &[q(3)]).unwrap(), MasurePoint::root(vec![q(-2)]));
    }

    #[test]
    fn nested_chain_tree_retractions() {
        // branch at 1/2 then at -1: points deep in the second sheet retract toward
        // -infinity across the first wall only
        let mut m = a1_masure();
        let c1 = m.branch(&ApartmentId::root(), 0, &q(-1), 1).unwrap();
        let c2 = m.branch(&c1, 0, &q(2), 1).unwrap();
        let x = m.canonicalize(&c2, &[q(-3)]).unwrap();
        assert_eq!(x.word, c2);
        let minus = SectorGermId::minus_infinity();
        assert_eq!(m.retract(&x, &minus).unwrap(), vec![q(4)]);
        let y = m.canonicalize(&c2, &[qf(-1, 2)]).unwrap();
        assert_eq!(y.word, c1);
        assert_eq!(m.retract(&y, &minus).unwrap(), vec![qf(3, 2)]);
    }

    #[test]
    fn split_examples() {
        let mut m = a1_masure();
        let child = m.branch(&ApartmentId::root(), 0, &q(0), 1).unwrap();
        let minus = SectorGermId::minus_infinity();
        let plus = SectorGermId::plus_infinity();
        let s = m.split_apartment(&child, &minus).unwrap();
        assert_eq!((s.pieces.len(), s.n), (2, 1));
        assert_eq!(s.pieces[0].host, Host::Registered(ApartmentId::root()));
        assert_eq!(s.pieces[1].host, Host::Unfolded(child.clone()));
        assert!(matches!(m.sundial_split(&child, &plus), Err(MasureError::GermContained)));
        let t = m.split_apartment(&child, &plus).unwrap();
        assert_eq!((t.pieces.len(), t.n), (1, 0));
        let seg = m.split_segment(&child, &[q(-2)], &[q(3)], &minus).unwrap();
        assert_eq!(seg, vec![vec![q(-2)], vec![q(0)], vec![q(3)]]);
    }

    #[test]
    fn depth_two_split_wall() {
        let mut m = a1_masure();
        let c1 = m.branch(&ApartmentId::root(), 0, &q(0), 1).unwrap();
        let c2 = m.branch(&c1, 0, &q(-4), 1).unwrap();
        let ((d1, _), _) = m.sundial_split(&c2, &SectorGermId::minus_infinity()).unwrap();
        // the leaf wall (alpha_1 - 4 = 0) is the one reaching the root apartment
        assert_eq!(d1, HalfSpaceSpec { root: vec![1], k: q(-4) });
    }

    #[test]
    fn gallery_distances() {
        let h = preset("hyp23").unwrap();
        let e = SectorGermId::plus_infinity();
        assert_eq!(gallery_distance(&h, &e, &e).unwrap(), 0);
        let s1 = SectorGermId::parse(&h, "+s1").unwrap();
        assert_eq!(gallery_distance(&h, &e, &s1).unwrap(), 1);
        let s121 = SectorGermId::parse(&h, "+s1s2s1").unwrap();
        assert_eq!(gallery_distance(&h, &e, &s121).unwrap(), 3);
        assert!(matches!(
            gallery_distance(&h, &e, &SectorGermId::minus_infinity()),
            Err(MasureError::MixedSigns)
        ));
    }

    #[test]
    fn depth_matches_brute_force() {
        for name in ["hyp23", "affine-a1"] {
            let r = preset(name).unwrap();
            let t = crate::rootsys::enumerate_real_roots(&r, 30);
            let elems = r.elements_up_to(6);
            for &i in &t.positive {
                let g = &t.roots[i].coeffs;
                let brute = elems.iter().find(|w| !is_positive(&r.act_root(w, g))).map(|w| w.letters.len());
                if let Some(b) = brute {
                    assert_eq!(root_depth(&r, g), b, "{name} {g:?}");
                }
            }
        }
    }

    #[test]
    fn automorphisms() {
        let mut m = a1_masure();
        let child = m.branch(&ApartmentId::root(), 0, &q(0), 1).unwrap();
        let lam = from_ints(&[2]);
        let t = Automorphism::translation(lam.clone());
        let r = MasurePoint::root(vec![q(1)]);
        assert_eq!(m.automorphism_apply(&t, &r).unwrap(), MasurePoint::root(vec![q(3)]));
        let x = m.canonicalize(&child, &[q(-1)]).unwrap();
        let y = m.automorphism_apply(&t, &x).unwrap();
        assert_eq!(y.word, ApartmentId(vec![letter(-4)]));
        assert_eq!(y.b, vec![q(1)]);
        let id = Automorphism::identity(1);
        assert_eq!(m.automorphism_apply(&id, &x).unwrap(), x);
        let refl = Automorphism { w: WeylWord::new(vec![0]), lambda: rat::zeros(1), sheets: BTreeMap::new() };
        assert!(matches!(m.automorphism_apply(&refl, &x), Err(MasureError::WallImageOutsideTable)));
        assert_eq!(m.automorphism_apply(&refl, &r).unwrap(), MasurePoint::root(vec![q(-1)]));
        let img = m.image(&t).unwrap();
        assert!(img.is_registered(&y.word));
    }

    #[test]
    fn shared_segment_points_agree() {
        // a segment inside the glued half read in the child and in the root
        let mut m = Masure::new(MasureConfig::new(preset("affine-a1").unwrap(), 20, 2, 4).unwrap());
        let child = m.branch(&ApartmentId::root(), 1, &q(2), 1).unwrap();
        let x = from_ints(&[0, 0, 0]);
        let y = from_ints(&[1, 0, 3]);
        for i in 0..=8 {
            let p = rat::axpy(&x, &qf(i, 8), &rat::sub(&y, &x));
            assert_eq!(m.canonicalize(&child, &p).unwrap(), m.canonicalize(&ApartmentId::root(), &p).unwrap());
        }
    }
}
