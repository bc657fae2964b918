//! Checks of the global statements: equivalence constants, the discreteness
//! probe, retracted segments, the mixed-distance bound and continuity tables.

use crate::apartment::{cone_ball_vertices, find_dense_direction, is_u_path, norm_eval, ApartmentError, PolyNorm, UPathVerdict, DEFAULT_MAX_STEPS};
use crate::masure::{ApartmentId, Masure, MasureConfig, MasureError, MasurePoint};
use crate::metrics::{chi, distance_mixed, distance_value, ray_exit, MetricError, Result, ThetaSpec, XiSpec};
use crate::rat::{self, Vector, Q};
use crate::rootsys::{GcmRealization, SectorGermId, Sign, WeylWord};
use num_traits::{One, Signed, Zero};

/// Largest norm-2 value on the unit ball of norm 1 restricted to the closed chamber.
fn norm_change(real: &GcmRealization, from: PolyNorm, to: PolyNorm) -> Q {
    cone_ball_vertices(real, from)
        .iter()
        .map(|v| norm_eval(to, v))
        .max()
        .unwrap_or_else(Q::one)
        .max(Q::one())
}

fn root_distance(m: &Masure, p: &[Q], th: &ThetaSpec) -> Result<Q> {
    distance_value(m, &MasurePoint::root(rat::zeros(m.d())), &MasurePoint::root(p.to_vec()), th)
}

/// `(l0, l1)` for passing from the germ `(sign, w)` to `(sign, w s_i)`.
pub fn adjacent_constants(m: &Masure, norm: PolyNorm, sign: Sign, w: &WeylWord, i: usize) -> Result<(Q, Q)> {
    let real = m.real();
    let g = SectorGermId { sign, w: w.clone() };
    let g2 = SectorGermId { sign, w: real.mul(w, &WeylWord::new(vec![i])) };
    let th2 = ThetaSpec::new(norm, g2);
    let gamma = real.covector(&real.act_root(w, &simple(real.n, i)));
    let gamma_co = real.act_vec(w, &real.coroots[i]);
    let mut l0 = Q::zero();
    let mut l1 = Q::zero();
    for v in cone_ball_vertices(real, norm) {
        let p = g.direction(real, &v);
        for p in [p.clone(), rat::neg(&p)] {
            l0 = l0.max(root_distance(m, &p, &th2)?);
            let r = rat::axpy(&p, &-rat::dot(&gamma, &p), &gamma_co);
            l1 = l1.max(root_distance(m, &r, &th2)?);
        }
    }
    Ok((l0, l1))
}

fn simple(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// A-priori constant `L` with `d_th2 <= L d_th1`: a norm change at the first germ,
/// then a factor `l0 l1` per step of a minimal gallery.
pub fn apriori_constant(m: &Masure, th1: &ThetaSpec, th2: &ThetaSpec) -> Result<(Q, usize)> {
    let real = m.real();
    if th1.germ.sign != th2.germ.sign {
        return Err(MasureError::MixedSigns.into());
    }
    let mut c = if th1.norm == th2.norm { Q::one() } else { norm_change(real, th1.norm, th2.norm) };
    let path = real.mul(&real.inverse(&th1.germ.w), &th2.germ.w);
    let mut cur = th1.germ.w.clone();
    for &i in &path.letters {
        let (l0, l1) = adjacent_constants(m, th2.norm, th1.germ.sign, &cur, i)?;
        c *= l0 * l1;
        cur = real.mul(&cur, &WeylWord::new(vec![i]));
    }
    Ok((c, path.letters.len()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub forward: Q,
    pub backward: Q,
    pub apriori_forward: Q,
    pub apriori_backward: Q,
    pub gallery_distance: usize,
    /// Sample indices attaining the empirical ratios.
    pub witnesses: (Option<usize>, Option<usize>),
    pub ok: bool,
}

/// Empirical ratios `d_th2/d_th1` and `d_th1/d_th2` over the sample against the
/// a-priori constants.
pub fn equivalence_constant(
    m: &Masure,
    th1: &ThetaSpec,
    th2: &ThetaSpec,
    samples: &[(MasurePoint, MasurePoint)],
) -> Result<EquivalenceReport> {
    let (af, n) = apriori_constant(m, th1, th2)?;
    let (ab, _) = apriori_constant(m, th2, th1)?;
    let mut forward = Q::one();
    let mut backward = Q::one();
    let mut wf = None;
    let mut wb = None;
    let mut zero_mismatch = false;
    for (k, (x, y)) in samples.iter().enumerate() {
        let d1 = distance_value(m, x, y, th1)?;
        let d2 = distance_value(m, x, y, th2)?;
        if d1.is_zero() || d2.is_zero() {
            zero_mismatch |= d1.is_zero() != d2.is_zero();
            continue;
        }
        let f = &d2 / &d1;
        if f > forward {
            forward = f;
            wf = Some(k);
        }
        let b = &d1 / &d2;
        if b > backward {
            backward = b;
            wb = Some(k);
        }
    }
    let ok = !zero_mismatch && forward <= af && backward <= ab;
    Ok(EquivalenceReport {
        forward,
        backward,
        apriori_forward: af,
        apriori_backward: ab,
        gallery_distance: n,
        witnesses: (wf, wb),
        ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeStep {
    pub m: usize,
    pub root: Vec<i64>,
    /// Spacing of consecutive true walls of this direction.
    pub gap: Q,
    pub point: MasurePoint,
    pub d_plus: Q,
    pub d_xi: Q,
    pub rho_minus: Vector,
    pub rho_minus_norm: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscretenessReport {
    pub discrete: bool,
    /// Least positive distance from `0` over a small sample of `Y`, when discrete.
    pub min_spacing: Option<Q>,
    pub steps: Vec<ProbeStep>,
    /// Root height bound actually used.
    pub height: i64,
}

/// Cap for the automatic height increase of the probe.
pub const PROBE_HEIGHT_CAP: i64 = 1024;

/// Builds `lambda_1..lambda_n` in the orbit of `0` approaching `0` for `d_+` while
/// their `rho_-` images escape, or reports the spacing when the Weyl group is finite.
pub fn discreteness_probe(real: &GcmRealization, norm: PolyNorm, n: usize, h: i64) -> Result<DiscretenessReport> {
    let plus = ThetaSpec::plus(norm);
    let xi = XiSpec::standard(norm);
    if real.is_finite() {
        let m = Masure::new(MasureConfig::new(real.clone(), h, 2, 1)?);
        let mut best: Option<Q> = None;
        for z in small_lattice(real.d, 2) {
            let v = root_distance(&m, &rat::from_ints(&z), &plus)?;
            if best.as_ref().map_or(true, |b| &v < b) {
                best = Some(v);
            }
        }
        return Ok(DiscretenessReport { discrete: true, min_spacing: best, steps: vec![], height: h });
    }
    let mut h = h;
    let mut table = crate::rootsys::enumerate_real_roots(real, h);
    let mut eps = Q::one();
    let mut chosen = Vec::new();
    while chosen.len() < n {
        match find_dense_direction(&table, &eps, norm) {
            Ok((idx, gap)) => {
                chosen.push((table.roots[idx].coeffs.clone(), gap.clone()));
                eps = gap;
            }
            Err(ApartmentError::HeightBoundExhausted) if h < PROBE_HEIGHT_CAP => {
                h = (2 * h).min(PROBE_HEIGHT_CAP);
                log::debug!("raising the height bound to {h}");
                table = crate::rootsys::enumerate_real_roots(real, h);
            }
            Err(e) => return Err(MasureError::from(e).into()),
        }
    }
    let mut m = Masure::new(MasureConfig::new(real.clone(), h, 2, 1)?);
    let mut words = Vec::new();
    for (coeffs, _) in &chosen {
        let idx = m.table().positive_index(coeffs).expect("chosen from the table");
        words.push(m.branch(&ApartmentId::root(), idx, &-Q::one(), 1)?);
    }
    m.freeze();
    let zero = MasurePoint::root(rat::zeros(real.d));
    let mut steps = Vec::new();
    for (k, ((coeffs, gap), w)) in chosen.into_iter().zip(words).enumerate() {
        let point = m.canonicalize(&w, &rat::zeros(real.d))?;
        let rho = m.retract(&point, &SectorGermId::minus_infinity())?;
        steps.push(ProbeStep {
            m: k + 1,
            root: coeffs,
            gap,
            d_plus: distance_value(&m, &point, &zero, &plus)?,
            d_xi: distance_mixed(&m, &point, &zero, &xi)?,
            rho_minus_norm: norm_eval(norm, &rho),
            rho_minus: rho,
            point,
        });
    }
    Ok(DiscretenessReport { discrete: false, min_spacing: None, steps, height: h })
}

/// Nonzero integer vectors with entries in `-r..=r`.
fn small_lattice(d: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| (-r..=r).map(move |x| {
                let mut w = v.clone();
                w.push(x);
                w
            }))
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPathReport {
    /// `(time, rho_-(x + time u))` at the ends and wall crossings.
    pub breakpoints: Vec<(Q, Vector)>,
    pub verdict: UPathVerdict,
    /// `pi(1) - pi(0) - u`.
    pub increment: Vector,
    /// Coordinates of the increment on the simple coroots.
    pub increment_coroot: Option<Vector>,
    /// The increment is a nonpositive combination of simple coroots.
    pub increment_ok: bool,
    pub two_time_ok: bool,
}

/// Image of the segment `[x, x+u]` of the apartment of `x` under `rho_-`.
pub fn retracted_segment(m: &Masure, x: &MasurePoint, u: &[Q]) -> Result<Vec<(Q, Vector)>> {
    let minus = SectorGermId::minus_infinity();
    let mut times = vec![Q::zero(), Q::one()];
    if let Some(r) = x.word.chain_root() {
        let beta = &m.root_of(r)?.covector;
        let h0 = rat::dot(beta, &x.b);
        let slope = rat::dot(beta, u);
        if !slope.is_zero() {
            for l in &x.word.0 {
                let s = (Q::from_integer((-l.k).into()) - &h0) / &slope;
                if s.is_positive() && s < Q::one() {
                    times.push(s);
                }
            }
        }
    }
    times.sort();
    times.dedup();
    times
        .into_iter()
        .map(|s| {
            let p = m.canonical_form(&x.word, &rat::axpy(&x.b, &s, u))?;
            Ok((s, m.retract(&p, &minus)?))
        })
        .collect()
}

/// Position of `rho_-(x + t u)` on the retracted segment.
fn segment_at(path: &[(Q, Vector)], t: &Q) -> Vector {
    for w in path.windows(2) {
        let (t0, p0) = &w[0];
        let (t1, p1) = &w[1];
        if t >= t0 && t <= t1 {
            let s = (t - t0) / (t1 - t0);
            return rat::axpy(p0, &s, &rat::sub(p1, p0));
        }
    }
    path.last().unwrap().1.clone()
}

pub fn path_retract_check(m: &Masure, x: &MasurePoint, u: &[Q]) -> Result<UPathReport> {
    let real = m.real();
    if !real.is_dominant(u) {
        return Err(MetricError::NotDominant);
    }
    let path = retracted_segment(m, x, u)?;
    let verdict = is_u_path(real, &path, u, DEFAULT_MAX_STEPS);
    let p0 = &path[0].1;
    let p1 = &path.last().unwrap().1;
    let increment = rat::sub(&rat::sub(p1, p0), u);
    let d = real.d;
    let cols: Vec<Vector> = (0..d).map(|r| (0..real.n).map(|i| real.coroots[i][r].clone()).collect()).collect();
    let coeffs = rat::solve_any(&cols, &increment);
    let increment_ok = coeffs.as_ref().is_some_and(|c| c.iter().all(|x| !x.is_positive()));
    let grid: Vec<Q> = (0..=4).map(|i| Q::new(i.into(), 4.into())).collect();
    let l1u = rat::l1(u);
    let mut two_time_ok = true;
    for t in &grid {
        for t2 in grid.iter().filter(|t2| *t2 >= t) {
            let a = rat::l1(&rat::sub(&segment_at(&path, t), p0));
            let b = rat::l1(&rat::sub(&segment_at(&path, t2), p0));
            two_time_ok &= a <= (t + t2) * &l1u + b;
        }
    }
    Ok(UPathReport { breakpoints: path, verdict, increment, increment_coroot: coeffs, increment_ok, two_time_ok })
}

/// `l` with `T_{+-lambda}(x) <= l |rho_+(x) - rho_-(x)|` for every chain point.
pub fn ray_time_constant(real: &GcmRealization, lambda: &[Q]) -> Q {
    let min = real.roots.iter().map(|a| rat::dot(a, lambda)).min().expect("rank is positive");
    Q::one() / min
}

/// `k = 4 l |lambda| + 2` for the mixed-distance bound.
pub fn mixed_constant(real: &GcmRealization, norm: PolyNorm, lambda: &[Q]) -> Q {
    Q::from_integer(4.into()) * ray_time_constant(real, lambda) * norm_eval(norm, lambda) + Q::from_integer(2.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedBoundReport {
    pub lhs: Q,
    pub rhs: Q,
    pub k: Q,
    pub t_plus: Q,
    pub t_minus: Q,
    pub t_bound: Q,
    pub ok: bool,
}

/// Checks `d_xi(a,x) <= k (d_xi(a,rho_-(x)) + d_xi(a,rho_+(x)))` and the ray-time bound.
pub fn mixed_bound_check(m: &Masure, a: &MasurePoint, x: &MasurePoint, xi: &XiSpec, lambda: &[Q]) -> Result<MixedBoundReport> {
    let real = m.real();
    let norm = xi.plus.norm;
    let k = mixed_constant(real, norm, lambda);
    let rp = m.retract(x, &SectorGermId::plus_infinity())?;
    let rm = m.retract(x, &SectorGermId::minus_infinity())?;
    let lhs = distance_mixed(m, a, x, xi)?;
    let rhs = &k
        * (distance_mixed(m, a, &MasurePoint::root(rm.clone()), xi)? + distance_mixed(m, a, &MasurePoint::root(rp.clone()), xi)?);
    let (t_plus, _) = ray_exit(m, x, lambda, Sign::Plus)?;
    let (t_minus, _) = ray_exit(m, x, lambda, Sign::Minus)?;
    let t_bound = ray_time_constant(real, lambda) * norm_eval(norm, &rat::sub(&rp, &rm));
    let ok = lhs <= rhs && t_plus <= t_bound && t_minus <= t_bound;
    Ok(MixedBoundReport { lhs, rhs, k, t_plus, t_minus, t_bound, ok })
}

/// Largest `d_xi` jump of `t -> chi_u(x,t)` between consecutive times of a grid
/// with `steps` intervals, over the sample.
pub fn chi_modulus(m: &Masure, xs: &[MasurePoint], u: &[Q], xi: &XiSpec, steps: u32) -> Result<Q> {
    let mut worst = Q::zero();
    for x in xs {
        let mut prev = chi(m, x, &Q::zero(), u)?;
        for i in 1..=steps {
            let t = Q::new(i.into(), steps.into());
            let cur = chi(m, x, &t, u)?;
            worst = worst.max(distance_mixed(m, &prev, &cur, xi)?);
            prev = cur;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{from_ints, q};
    use crate::rootsys::preset;

    #[test]
    fn probe_a1_is_discrete() {
        let r = discreteness_probe(&preset("a1").unwrap(), PolyNorm::L1, 3, 20).unwrap();
        assert!(r.discrete);
        assert_eq!(r.min_spacing, Some(q(1)));
    }

    #[test]
    fn probe_hyp23_separates() {
        let r = discreteness_probe(&preset("hyp23").unwrap(), PolyNorm::L1, 3, 20).unwrap();
        assert!(!r.discrete);
        assert_eq!(r.steps.len(), 3);
        for w in r.steps.windows(2) {
            assert!(w[1].d_plus < w[0].d_plus);
            assert!(w[1].rho_minus_norm > w[0].rho_minus_norm);
        }
        for s in &r.steps {
            assert!(s.d_plus.is_positive());
            // rho_- of the branch point is the coroot of the branch direction
            let real = preset("hyp23").unwrap();
            let t = crate::rootsys::enumerate_real_roots(&real, r.height);
            assert_eq!(s.rho_minus, t.get(&s.root).unwrap().coroot);
        }
    }

    #[test]
    fn upath_a1_branch() {
        let mut m = Masure::new(MasureConfig::new(preset("a1").unwrap(), 20, 2, 4).unwrap());
        let c = m.branch(&ApartmentId::root(), 0, &q(0), 1).unwrap();
        let x = m.canonicalize(&c, &[q(-1)]).unwrap();
        let r = path_retract_check(&m, &x, &[q(1)]).unwrap();
        assert!(r.verdict.ok && r.increment_ok && r.two_time_ok);
        assert_eq!(r.increment_coroot, Some(vec![q(-2)]));
        let root = path_retract_check(&m, &MasurePoint::root(vec![q(3)]), &[q(2)]).unwrap();
        assert_eq!(root.breakpoints.len(), 2);
        assert!(root.verdict.ok);
    }

    #[test]
    fn equivalence_identity_and_adjacent() {
        let m = Masure::new(MasureConfig::new(preset("hyp23").unwrap(), 20, 2, 4).unwrap());
        let th = ThetaSpec::plus(PolyNorm::L1);
        let pairs = vec![(MasurePoint::root(from_ints(&[0, 0])), MasurePoint::root(from_ints(&[1, -2])))];
        let r = equivalence_constant(&m, &th, &th, &pairs).unwrap();
        assert_eq!((r.forward.clone(), r.backward.clone()), (q(1), q(1)));
        let real = m.real();
        let th2 = ThetaSpec::new(PolyNorm::L1, SectorGermId::parse(real, "+s1").unwrap());
        let r = equivalence_constant(&m, &th, &th2, &pairs).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.gallery_distance, 1);
    }
}
