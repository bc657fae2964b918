//! Signed and mixed distances on the simulator, germ translations, ray exits,
//! geodesics and the contraction onto the root apartment.

use crate::apartment::{norm_eval, PolyNorm};
use crate::lp::{min_norm_pair, PairRow};
use crate::masure::{ApartmentId, ChartPiece, Masure, MasureError, MasurePoint, UnfoldedChart};
use crate::rat::{self, Vector, Q};
use crate::rootsys::{SectorGermId, Sign};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error(transparent)]
    Masure(#[from] MasureError),
    #[error("direction is not in the closed dominant chamber")]
    NotDominant,
    #[error("direction is not in the open dominant chamber")]
    NotRegular,
    #[error("witness pair has a zero component")]
    DegenerateWitness,
    #[error("germs of the two norms have the same sign")]
    SameSigns,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, MetricError>;

/// A polyhedral norm together with the sector-germ it is centered at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSpec {
    pub norm: PolyNorm,
    pub germ: SectorGermId,
}

impl ThetaSpec {
    pub fn new(norm: PolyNorm, germ: SectorGermId) -> Self {
        ThetaSpec { norm, germ }
    }

    pub fn plus(norm: PolyNorm) -> Self {
        ThetaSpec::new(norm, SectorGermId::plus_infinity())
    }

    pub fn minus(norm: PolyNorm) -> Self {
        ThetaSpec::new(norm, SectorGermId::minus_infinity())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiSpec {
    pub plus: ThetaSpec,
    pub minus: ThetaSpec,
}

impl XiSpec {
    pub fn new(plus: ThetaSpec, minus: ThetaSpec) -> Result<Self> {
        if plus.germ.sign != Sign::Plus || minus.germ.sign != Sign::Minus {
            return Err(MetricError::SameSigns);
        }
        Ok(XiSpec { plus, minus })
    }

    pub fn standard(norm: PolyNorm) -> Self {
        XiSpec { plus: ThetaSpec::plus(norm), minus: ThetaSpec::minus(norm) }
    }
}

/// Dominant pair `(u,u')` with `x +_g u = x' +_g u'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConePair {
    pub u: Vector,
    pub u2: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distance {
    pub value: Q,
    pub witness: ConePair,
    /// Apartment holding the meeting point.
    pub host: ApartmentId,
}

fn check_dominant(m: &Masure, u: &[Q]) -> Result<()> {
    if m.real().is_dominant(u) {
        Ok(())
    } else {
        Err(MetricError::NotDominant)
    }
}

/// Columns of `u -> sigma w u`.
fn direction_matrix(m: &Masure, g: &SectorGermId) -> Vec<Vector> {
    let d = m.d();
    let cols: Vec<Vector> = (0..d).map(|j| g.direction(m.real(), &rat::unit(d, j))).collect();
    (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect()
}

/// `x +_g u`.
pub fn translate(m: &Masure, x: &MasurePoint, g: &SectorGermId, u: &[Q]) -> Result<MasurePoint> {
    check_dominant(m, u)?;
    Ok(m.translate(x, g, u)?)
}

struct Side<'a> {
    chart: &'a UnfoldedChart,
    c: Vector,
}

/// LP rows for a meeting point in the pieces `p1` (reached from the first point)
/// and `p2` (from the second).
fn pair_rows(m: &Masure, dm: &[Vector], s1: &Side, p1: &ChartPiece, s2: &Side, p2: &ChartPiece) -> (Vec<PairRow>, Vec<PairRow>) {
    let d = m.d();
    let z = || rat::zeros(d);
    let join = |a: Vector, b: Vector| -> Vector { a.into_iter().chain(b).collect() };
    let mut ge = Vec::new();
    for a in &m.real().roots {
        ge.push((join(a.clone(), z()), Q::zero()));
        ge.push((join(z(), a.clone()), Q::zero()));
    }
    // a·(c + D u) + k >= 0
    let through = |a: &Vector| -> Vector { (0..d).map(|j| (0..d).map(|r| &a[r] * &dm[r][j]).sum()).collect() };
    for h in &p1.region {
        ge.push((join(through(&h.a), z()), -(&h.c) - rat::dot(&h.a, &s1.c)));
    }
    for h in &p2.region {
        ge.push((join(z(), through(&h.a)), -(&h.c) - rat::dot(&h.a, &s2.c)));
    }
    // M1 (c1 + D u) + t1 = M2 (c2 + D u') + t2
    let m1d = rat::mat_mul(&p1.map.m, dm);
    let m2d = rat::mat_mul(&p2.map.m, dm);
    let rhs = rat::sub(&p2.map.apply(&s2.c), &p1.map.apply(&s1.c));
    let eq = (0..d)
        .map(|r| (join(m1d[r].clone(), rat::neg(&m2d[r])), rhs[r].clone()))
        .collect();
    (eq, ge)
}

fn distance_impl(m: &Masure, x: &MasurePoint, x2: &MasurePoint, th: &ThetaSpec, lexicographic: bool) -> Result<Distance> {
    let g = &th.germ;
    let (c1, a) = m.unfold(x, g)?;
    let (c2, b) = m.unfold(x2, g)?;
    let s1 = Side { chart: &c1, c: a };
    let s2 = Side { chart: &c2, c: b };
    let dm = direction_matrix(m, g);
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (i, p) in s1.chart.pieces.iter().enumerate() {
        for (j, p2) in s2.chart.pieces.iter().enumerate() {
            if p.host == p2.host {
                pairs.push((p.host.depth(), i, j));
            }
        }
    }
    pairs.sort();
    let mut best: Option<Distance> = None;
    for (_, i, j) in pairs {
        let p1 = &s1.chart.pieces[i];
        let p2 = &s2.chart.pieces[j];
        let (eq, ge) = pair_rows(m, &dm, &s1, p1, &s2, p2);
        let Some((value, u, u2)) = min_norm_pair(m.d(), th.norm, &eq, &ge, lexicographic) else {
            continue;
        };
        let cand = Distance { value, witness: ConePair { u, u2 }, host: p1.host.clone() };
        let better = match &best {
            None => true,
            Some(b) => {
                cand.value < b.value
                    || lexicographic
                        && cand.value == b.value
                        && (&cand.witness.u, &cand.witness.u2) < (&b.witness.u, &b.witness.u2)
            }
        };
        if better {
            best = Some(cand);
        }
    }
    let best = best.ok_or_else(|| MetricError::Internal("no common host between the charts".into()))?;
    let y1 = m.translate(x, g, &best.witness.u)?;
    let y2 = m.translate(x2, g, &best.witness.u2)?;
    if y1 != y2 {
        return Err(MetricError::Internal(format!("witness does not meet: {y1:?} vs {y2:?}")));
    }
    Ok(best)
}

/// Exact `d_theta(x,x')` with the lexicographically least optimal witness.
pub fn distance(m: &Masure, x: &MasurePoint, x2: &MasurePoint, th: &ThetaSpec) -> Result<Distance> {
    distance_impl(m, x, x2, th, true)
}

/// Exact `d_theta(x,x')` without the witness tie-break.
pub fn distance_value(m: &Masure, x: &MasurePoint, x2: &MasurePoint, th: &ThetaSpec) -> Result<Q> {
    Ok(distance_impl(m, x, x2, th, false)?.value)
}

/// `d_xi = d_{theta+} + d_{theta-}`.
pub fn distance_mixed(m: &Masure, x: &MasurePoint, x2: &MasurePoint, xi: &XiSpec) -> Result<Q> {
    Ok(distance_value(m, x, x2, &xi.plus)? + distance_value(m, x, x2, &xi.minus)?)
}

/// Brute-force upper bound for `d_theta`: `u` runs over `(1/n) Z^d` inside the
/// closed chamber, and `u'` is recovered exactly from the meeting point.
pub fn distance_oracle(m: &Masure, x: &MasurePoint, x2: &MasurePoint, th: &ThetaSpec, n: u32) -> Result<Q> {
    if n == 0 {
        return Err(MetricError::OutOfRange("resolution must be positive".into()));
    }
    let g = &th.germ;
    let d = m.d();
    let (c2, cx2) = m.unfold(x2, g)?;
    let mut best = feasible_bound(m, x, x2, th)?;
    let step = Q::new(1.into(), n.into());
    let try_u = |u: &Vector, best: &mut Q| -> Result<()> {
        let y = m.translate(x, g, u)?;
        for p in c2.pieces.iter().filter(|p| p.host == y.word) {
            let c = p.inverse.apply(&y.b);
            if !crate::masure::region_contains(&p.region, &c) {
                continue;
            }
            let u2 = g.undirect(m.real(), &rat::sub(&c, &cx2));
            if !m.real().is_dominant(&u2) || m.translate(x2, g, &u2)? != y {
                continue;
            }
            let v = norm_eval(th.norm, u) + norm_eval(th.norm, &u2);
            if v < *best {
                *best = v;
            }
        }
        Ok(())
    };
    let mut r: i64 = 0;
    loop {
        let layer_norm = Q::from_integer(r.into()) * &step;
        if layer_norm >= best {
            return Ok(best);
        }
        for z in lattice_layer(d, r, th.norm) {
            let u = rat::scale(&step, &rat::from_ints(&z));
            if m.real().is_dominant(&u) {
                try_u(&u, &mut best)?;
            }
        }
        r += 1;
    }
}

/// Integer vectors of norm exactly `r`.
fn lattice_layer(d: usize, r: i64, norm: PolyNorm) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; d];
    fn rec(i: usize, cur: &mut Vec<i64>, budget: i64, r: i64, norm: PolyNorm, hit: bool, out: &mut Vec<Vec<i64>>) {
        let d = cur.len();
        if i == d {
            let ok = match norm {
                PolyNorm::L1 => budget == 0,
                PolyNorm::LInf => hit,
            };
            if ok {
                out.push(cur.clone());
            }
            return;
        }
        let lim = match norm {
            PolyNorm::L1 => budget,
            PolyNorm::LInf => r,
        };
        for v in -lim..=lim {
            cur[i] = v;
            let nb = match norm {
                PolyNorm::L1 => budget - v.abs(),
                PolyNorm::LInf => budget,
            };
            rec(i + 1, cur, nb, r, norm, hit || v.abs() == r, out);
        }
    }
    rec(0, &mut cur, r, r, norm, false, &mut out);
    out
}

/// Value of an explicit feasible pair: push both points into the root
/// apartment along a regular direction, then close the gap inside it.
fn feasible_bound(m: &Masure, x: &MasurePoint, x2: &MasurePoint, th: &ThetaSpec) -> Result<Q> {
    let g = &th.germ;
    let real = m.real();
    let v = real.regular_lattice_vector();
    let into_root = |p: &MasurePoint| -> Result<(Vector, Vector)> {
        let mut t = Q::zero();
        loop {
            let u = rat::scale(&t, &v);
            let y = m.translate(p, g, &u)?;
            if y.in_root() {
                return Ok((u, y.b));
            }
            t = if t.is_zero() { Q::one() } else { &t + &t };
        }
    };
    let (u1, a1) = into_root(x)?;
    let (u2, a2) = into_root(x2)?;
    let w = g.undirect(real, &rat::sub(&a2, &a1));
    let mut s = Q::zero();
    while !real.is_dominant(&rat::axpy(&w, &s, &v)) {
        s = if s.is_zero() { Q::one() } else { &s + &s };
    }
    let ua = rat::add(&u1, &rat::axpy(&w, &s, &v));
    let ub = rat::add(&u2, &rat::scale(&s, &v));
    debug_assert_eq!(m.translate(x, g, &ua)?, m.translate(x2, g, &ub)?);
    Ok(norm_eval(th.norm, &ua) + norm_eval(th.norm, &ub))
}

/// `T_{sigma u}(x)` and `y_{sigma u}(x)`: the time the ray toward `sigma infinity`
/// enters the root apartment and its entry point.
pub fn ray_exit(m: &Masure, x: &MasurePoint, u: &[Q], sign: Sign) -> Result<(Q, Vector)> {
    if !m.real().is_regular_dominant(u) {
        return Err(MetricError::NotRegular);
    }
    if x.in_root() {
        return Ok((Q::zero(), x.b.clone()));
    }
    let g = match sign {
        Sign::Plus => SectorGermId::plus_infinity(),
        Sign::Minus => SectorGermId::minus_infinity(),
    };
    let rho = m.retract(x, &g)?;
    let root = m.root_of(x.word.chain_root().unwrap())?;
    let l0 = Q::from_integer(x.word.exit_level().unwrap().into());
    let h = rat::dot(&root.covector, &rho);
    let gap = match sign {
        Sign::Plus => &l0 - &h,
        Sign::Minus => &h - &l0,
    };
    let t = if gap.is_positive() { gap / rat::dot(&root.covector, u) } else { Q::zero() };
    let y = rat::axpy(&rho, &(sign.as_q() * &t), u);
    Ok((t, y))
}

/// Point `gamma(t)` of the two-leg geodesic through the witness of `d_theta(x,x')`.
pub fn geodesic(m: &Masure, x: &MasurePoint, x2: &MasurePoint, th: &ThetaSpec, t: &Q) -> Result<MasurePoint> {
    geodesic_with(m, x, x2, th, &distance(m, x, x2, th)?, t)
}

/// As [`geodesic`], reusing a computed distance.
pub fn geodesic_with(m: &Masure, x: &MasurePoint, x2: &MasurePoint, th: &ThetaSpec, dist: &Distance, t: &Q) -> Result<MasurePoint> {
    if t.is_negative() || t > &Q::one() {
        return Err(MetricError::OutOfRange("t must lie in [0,1]".into()));
    }
    let g = &th.germ;
    let canon = |p: &MasurePoint| m.canonical_form(&p.word, &p.b);
    if dist.value.is_zero() {
        return Ok(canon(x)?);
    }
    let n1 = norm_eval(th.norm, &dist.witness.u);
    let a1 = &n1 / &dist.value;
    if t <= &a1 && !a1.is_zero() {
        Ok(m.translate(x, g, &rat::scale(&(t / &a1), &dist.witness.u))?)
    } else {
        let s = (Q::one() - t) / (Q::one() - &a1);
        Ok(m.translate(x2, g, &rat::scale(&s, &dist.witness.u2))?)
    }
}

/// Three-leg geodesic `gamma_z` from `0` to the root point `x'` through `z u_1`,
/// in root coordinates; `t` is the arclength fraction.
pub fn geodesic_family(m: &Masure, x2: &[Q], th: &ThetaSpec, z: &Q, t: &Q) -> Result<Vector> {
    let zero = MasurePoint::root(rat::zeros(m.d()));
    let dist = distance(m, &zero, &MasurePoint::root(x2.to_vec()), th)?;
    geodesic_family_with(m, th, &dist, z, t)
}

pub fn geodesic_family_with(m: &Masure, th: &ThetaSpec, dist: &Distance, z: &Q, t: &Q) -> Result<Vector> {
    for (s, name) in [(z, "z"), (t, "t")] {
        if s.is_negative() || s > &Q::one() {
            return Err(MetricError::OutOfRange(format!("{name} must lie in [0,1]")));
        }
    }
    let (u1, u2) = (&dist.witness.u, &dist.witness.u2);
    if rat::is_zero_vec(u1) || rat::is_zero_vec(u2) {
        return Err(MetricError::DegenerateWitness);
    }
    let g = &th.germ;
    let real = m.real();
    let n1 = norm_eval(th.norm, u1);
    let n2 = norm_eval(th.norm, u2);
    // (direction, norm of its dominant preimage, leg length)
    let legs: [(Vector, &Q, Q); 3] = [
        (g.direction(real, u1), &n1, z * &n1),
        (rat::neg(&g.direction(real, u2)), &n2, n2.clone()),
        (g.direction(real, u1), &n1, (Q::one() - z) * &n1),
    ];
    let mut left = t * &dist.value;
    let mut p = rat::zeros(m.d());
    for (dir, full, len) in legs {
        if left.is_zero() {
            break;
        }
        let s = if left < len { left.clone() } else { len };
        p = rat::axpy(&p, &(&s / full), &dir);
        left -= s;
    }
    Ok(p)
}

/// `chi_u(x,t)`: follow `x +_{+infinity} (t/(1-t)) u` until the root apartment.
pub fn chi(m: &Masure, x: &MasurePoint, t: &Q, u: &[Q]) -> Result<MasurePoint> {
    if t.is_negative() || t > &Q::one() {
        return Err(MetricError::OutOfRange("t must lie in [0,1]".into()));
    }
    let (big_t, y) = ray_exit(m, x, u, Sign::Plus)?;
    if t < &Q::one() {
        let s = t / (Q::one() - t);
        if s < big_t {
            return Ok(m.translate(x, &SectorGermId::plus_infinity(), &rat::scale(&s, u))?);
        }
    }
    Ok(MasurePoint::root(y))
}

/// `Upsilon_u(x,t)`: `chi_u(x,2t)` then the straight contraction of `y_u(x)` to `0`.
pub fn upsilon(m: &Masure, x: &MasurePoint, t: &Q, u: &[Q]) -> Result<MasurePoint> {
    if t.is_negative() || t > &Q::one() {
        return Err(MetricError::OutOfRange("t must lie in [0,1]".into()));
    }
    let half = Q::new(1.into(), 2.into());
    if t <= &half {
        return chi(m, x, &(t + t), u);
    }
    let (_, y) = ray_exit(m, x, u, Sign::Plus)?;
    let two = Q::from_integer(2.into());
    Ok(MasurePoint::root(rat::scale(&(&two - &two * t), &y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masure::MasureConfig;
    use crate::rat::{from_ints, q, qf};
    use crate::rootsys::preset;

    fn a1_branch() -> (Masure, MasurePoint) {
        let mut m = Masure::new(MasureConfig::new(preset("a1").unwrap(), 20, 2, 4).unwrap());
        let c = m.branch(&ApartmentId::root(), 0, &q(0), 1).unwrap();
        let x = m.canonicalize(&c, &[q(-1)]).unwrap();
        m.freeze();
        (m, x)
    }

    #[test]
    fn tree_distances() {
        let (m, x) = a1_branch();
        let r = MasurePoint::root(vec![q(-1)]);
        let l1 = PolyNorm::L1;
        assert_eq!(distance(&m, &x, &r, &ThetaSpec::plus(l1)).unwrap().value, q(2));
        assert_eq!(distance(&m, &x, &r, &ThetaSpec::minus(l1)).unwrap().value, q(2));
        assert_eq!(distance_mixed(&m, &x, &r, &XiSpec::standard(l1)).unwrap(), q(4));
        assert_eq!(distance(&m, &x, &x, &ThetaSpec::plus(l1)).unwrap().value, q(0));
        assert_eq!(distance_oracle(&m, &x, &r, &ThetaSpec::plus(l1), 1).unwrap(), q(2));
    }

    #[test]
    fn hyp23_root_witness() {
        let m = Masure::new(MasureConfig::new(preset("hyp23").unwrap(), 20, 2, 4).unwrap());
        let th = ThetaSpec::plus(PolyNorm::L1);
        let d = distance(&m, &MasurePoint::root(from_ints(&[0, 0])), &MasurePoint::root(from_ints(&[-1, -1])), &th).unwrap();
        assert_eq!(d.value, q(2));
        assert_eq!(d.witness, ConePair { u: from_ints(&[-1, -1]), u2: from_ints(&[0, 0]) });
    }

    #[test]
    fn translate_semigroup_and_errors() {
        let (m, x) = a1_branch();
        let g = SectorGermId::minus_infinity();
        let a = translate(&m, &translate(&m, &x, &g, &[qf(1, 3)]).unwrap(), &g, &[qf(5, 3)]).unwrap();
        assert_eq!(a, translate(&m, &x, &g, &[q(2)]).unwrap());
        assert_eq!(translate(&m, &x, &g, &[q(-1)]), Err(MetricError::NotDominant));
    }

    #[test]
    fn ray_exit_examples() {
        let (m, x) = a1_branch();
        assert_eq!(ray_exit(&m, &x, &[q(1)], Sign::Plus).unwrap(), (q(1), vec![q(0)]));
        assert_eq!(ray_exit(&m, &x, &[q(1)], Sign::Minus).unwrap(), (q(1), vec![q(0)]));
        let r = MasurePoint::root(vec![q(5)]);
        assert_eq!(ray_exit(&m, &r, &[q(1)], Sign::Plus).unwrap(), (q(0), vec![q(5)]));
        assert_eq!(ray_exit(&m, &x, &[q(0)], Sign::Plus), Err(MetricError::NotRegular));
    }

    #[test]
    fn geodesic_endpoints_and_apex() {
        let (m, x) = a1_branch();
        let r = MasurePoint::root(vec![q(-1)]);
        let th = ThetaSpec::plus(PolyNorm::L1);
        assert_eq!(geodesic(&m, &x, &r, &th, &q(0)).unwrap(), x);
        assert_eq!(geodesic(&m, &x, &r, &th, &q(1)).unwrap(), r);
        assert_eq!(geodesic(&m, &x, &r, &th, &qf(1, 2)).unwrap(), MasurePoint::root(vec![q(0)]));
    }

    #[test]
    fn geodesic_family_hyp23() {
        let m = Masure::new(MasureConfig::new(preset("hyp23").unwrap(), 20, 2, 4).unwrap());
        let th = ThetaSpec::plus(PolyNorm::L1);
        let x2 = from_ints(&[1, 0]);
        let zero = MasurePoint::root(from_ints(&[0, 0]));
        let dist = distance(&m, &zero, &MasurePoint::root(x2.clone()), &th).unwrap();
        let a1 = norm_eval(th.norm, &dist.witness.u) / &dist.value;
        let half = qf(1, 2);
        let p0 = geodesic_family_with(&m, &th, &dist, &q(0), &(&a1 * &half)).unwrap();
        let p1 = geodesic_family_with(&m, &th, &dist, &half, &(&a1 * &half)).unwrap();
        assert_ne!(p0, p1);
        assert_eq!(geodesic_family_with(&m, &th, &dist, &half, &q(1)).unwrap(), x2);
        for (t, s) in [(qf(1, 5), qf(4, 5)), (q(0), qf(1, 3))] {
            let a = MasurePoint::root(geodesic_family_with(&m, &th, &dist, &half, &t).unwrap());
            let b = MasurePoint::root(geodesic_family_with(&m, &th, &dist, &half, &s).unwrap());
            assert_eq!(distance_value(&m, &a, &b, &th).unwrap(), (&s - &t).abs() * &dist.value);
        }
    }

    #[test]
    fn contraction_endpoints() {
        let (m, x) = a1_branch();
        let u = [q(1)];
        assert_eq!(chi(&m, &x, &q(0), &u).unwrap(), x);
        assert_eq!(chi(&m, &x, &q(1), &u).unwrap(), MasurePoint::root(vec![q(0)]));
        let r = MasurePoint::root(vec![q(3)]);
        assert_eq!(chi(&m, &r, &qf(2, 7), &u).unwrap(), r);
        assert_eq!(upsilon(&m, &x, &q(1), &u).unwrap(), MasurePoint::root(vec![q(0)]));
        assert_eq!(upsilon(&m, &r, &q(1), &u).unwrap(), MasurePoint::root(vec![q(0)]));
    }
}
