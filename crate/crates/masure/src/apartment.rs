//! Geometry of the model apartment: norms, walls, enclosures, the Tits preorder,
//! vectorial distance, u-paths and wall-density search.

use crate::lp::{lp_solve, LpOutcome, LpProblem, Relation};
use crate::rat::{self, Vector, Q};
use crate::rootsys::{GcmRealization, RealRootTable, RootError};
use num_traits::{One, Signed, Zero};

pub use crate::rootsys::{SectorGermId, Sign};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApartmentError {
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("points are not comparable for the Tits preorder")]
    NotComparable,
    #[error("no root within the height bound has walls closer than the requested gap")]
    HeightBoundExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolyNorm {
    L1,
    LInf,
}

impl PolyNorm {
    pub fn parse(s: &str) -> Option<PolyNorm> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Some(PolyNorm::L1),
            "linf" => Some(PolyNorm::LInf),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PolyNorm::L1 => "l1",
            PolyNorm::LInf => "linf",
        }
    }

    pub fn dual(self) -> PolyNorm {
        match self {
            PolyNorm::L1 => PolyNorm::LInf,
            PolyNorm::LInf => PolyNorm::L1,
        }
    }
}

pub fn norm_eval(norm: PolyNorm, v: &[Q]) -> Q {
    match norm {
        PolyNorm::L1 => rat::l1(v),
        PolyNorm::LInf => rat::linf(v),
    }
}

/// Dual norm of a covector given by its coefficient row.
pub fn dual_norm(norm: PolyNorm, covector: &[Q]) -> Q {
    norm_eval(norm.dual(), covector)
}

/// The closed half-apartment `{beta + k >= 0}`, `beta` in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpaceSpec {
    pub root: Vec<i64>,
    pub k: Q,
}

impl HalfSpaceSpec {
    pub fn is_true(&self) -> bool {
        self.k.is_integer()
    }

    pub fn contains(&self, real: &GcmRealization, x: &[Q]) -> bool {
        !(rat::dot(&real.covector(&self.root), x) + &self.k).is_negative()
    }
}

/// Enclosure of a finite intersection of half-apartments over the real roots of
/// the table: for each root, the tightest integral level implied by the input.
pub fn enclose(
    real: &GcmRealization,
    table: &RealRootTable,
    halfspaces: &[HalfSpaceSpec],
) -> Result<Vec<HalfSpaceSpec>, ApartmentError> {
    for h in halfspaces {
        table.get(&h.root)?;
    }
    if halfspaces.len() == 1 {
        let h = &halfspaces[0];
        return Ok(vec![HalfSpaceSpec { root: h.root.clone(), k: h.k.ceil() }]);
    }
    let mut base = LpProblem::new(real.d);
    for h in halfspaces {
        base.push(real.covector(&h.root), Relation::Ge, -h.k.clone());
    }
    let mut out = Vec::new();
    for root in &table.roots {
        let mut p = base.clone();
        p.objective = root.covector.clone();
        match lp_solve(&p) {
            LpOutcome::Optimal { value, .. } => {
                out.push(HalfSpaceSpec { root: root.coeffs.clone(), k: (-value).ceil() });
            }
            LpOutcome::Unbounded { .. } => {}
            LpOutcome::Infeasible { .. } => {
                return Ok(halfspaces
                    .iter()
                    .map(|h| HalfSpaceSpec { root: h.root.clone(), k: h.k.ceil() })
                    .collect());
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tristate {
    True,
    False,
    Unknown,
}

/// `x <= y` for the Tits preorder, decided by descent within `max_steps`.
///
/// A `False` answer is certified by `x - y` descending to the open fundamental
/// chamber when the Weyl group is infinite and indecomposable, since the interior
/// of the Tits cone meets its negative only at the origin.
pub fn tits_leq(real: &GcmRealization, x: &[Q], y: &[Q], max_steps: usize) -> Tristate {
    let v = rat::sub(y, x);
    let (_, dom) = real.descend(&v, max_steps);
    if dom {
        return Tristate::True;
    }
    if !real.is_finite() && real.is_indecomposable() {
        let (w, dom_neg) = real.descend(&rat::neg(&v), max_steps);
        if dom_neg && real.is_regular_dominant(&w) {
            return Tristate::False;
        }
    }
    Tristate::Unknown
}

pub const DEFAULT_MAX_STEPS: usize = 200;

/// Dominant representative of `y - x`.
pub fn vectorial_distance(
    real: &GcmRealization,
    x: &[Q],
    y: &[Q],
    max_steps: usize,
) -> Result<Vector, ApartmentError> {
    let (v, dom) = real.descend(&rat::sub(y, x), max_steps);
    if dom {
        Ok(v)
    } else {
        Err(ApartmentError::NotComparable)
    }
}

/// Least-height positive root whose consecutive true walls are closer than `eps`.
/// Returns the table position and the gap `1 / |beta|_*`.
pub fn find_dense_direction(
    table: &RealRootTable,
    eps: &Q,
    norm: PolyNorm,
) -> Result<(usize, Q), ApartmentError> {
    for &i in &table.positive {
        let gap = Q::one() / dual_norm(norm, &table.roots[i].covector);
        if &gap < eps {
            return Ok((i, gap));
        }
    }
    Err(ApartmentError::HeightBoundExhausted)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPathVerdict {
    pub ok: bool,
    /// Set when some velocity could not be decided within the step bound.
    pub undecided: bool,
}

/// Whether `v` lies in the Weyl orbit of the dominant `u`; `None` when undecided.
pub fn in_orbit(real: &GcmRealization, v: &[Q], u: &[Q], max_steps: usize) -> Option<bool> {
    let (w, dom) = real.descend(v, max_steps);
    if !dom {
        return None;
    }
    Some(w == u)
}

/// Checks a piecewise-linear path given by `(time, point)` breakpoints.
pub fn is_u_path(real: &GcmRealization, breakpoints: &[(Q, Vector)], u: &[Q], max_steps: usize) -> UPathVerdict {
    let mut verdict = UPathVerdict { ok: true, undecided: false };
    for pair in breakpoints.windows(2) {
        let (t0, p0) = &pair[0];
        let (t1, p1) = &pair[1];
        let dt = t1 - t0;
        if !dt.is_positive() {
            verdict.ok = false;
            continue;
        }
        let v = rat::scale(&(Q::one() / dt), &rat::sub(p1, p0));
        match in_orbit(real, &v, u, max_steps) {
            Some(true) => {}
            Some(false) => verdict.ok = false,
            None => {
                verdict.ok = false;
                verdict.undecided = true;
            }
        }
    }
    verdict
}

/// Vertices of `{v : alpha_i(v) >= 0} ∩ {|v| <= 1}`, found by solving every
/// square subsystem of the facet inequalities.
pub fn cone_ball_vertices(real: &GcmRealization, norm: PolyNorm) -> Vec<Vector> {
    let d = real.d;
    let mut rows: Vec<(Vector, Q)> = real.roots.iter().map(|a| (rat::neg(a), Q::zero())).collect();
    match norm {
        PolyNorm::L1 => {
            for mask in 0..(1u32 << d) {
                let r: Vector = (0..d)
                    .map(|i| if mask >> i & 1 == 1 { -Q::one() } else { Q::one() })
                    .collect();
                rows.push((r, Q::one()));
            }
        }
        PolyNorm::LInf => {
            for i in 0..d {
                rows.push((rat::unit(d, i), Q::one()));
                rows.push((rat::neg(&rat::unit(d, i)), Q::one()));
            }
        }
    }
    let mut out: Vec<Vector> = Vec::new();
    let m = rows.len();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let a: Vec<Vector> = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vector = idx.iter().map(|&i| rows[i].1.clone()).collect();
        if let Some(x) = rat::solve_square(&a, &b) {
            if rows.iter().all(|(r, c)| &rat::dot(r, &x) <= c) && !out.contains(&x) {
                out.push(x);
            }
        }
        // next combination
        let mut k = d;
        loop {
            if k == 0 {
                out.sort();
                return out;
            }
            k -= 1;
            if idx[k] < m - d + k {
                idx[k] += 1;
                for l in k + 1..d {
                    idx[l] = idx[l - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{from_ints, q, qf};
    use crate::rootsys::{enumerate_real_roots, preset};

    #[test]
    fn norms() {
        let h = preset("hyp23").unwrap();
        assert_eq!(norm_eval(PolyNorm::L1, &h.coroots[0]), q(1));
        assert_eq!(norm_eval(PolyNorm::L1, &from_ints(&[-1, -1])), q(2));
        assert_eq!(norm_eval(PolyNorm::LInf, &from_ints(&[3, -5])), q(5));
    }

    #[test]
    fn enclose_single() {
        let a1 = preset("a1").unwrap();
        let t = enumerate_real_roots(&a1, 5);
        let h = |k| vec![HalfSpaceSpec { root: vec![1], k }];
        assert_eq!(enclose(&a1, &t, &h(qf(1, 2))).unwrap(), h(q(1)));
        assert_eq!(enclose(&a1, &t, &h(q(2))).unwrap(), h(q(2)));
        assert_eq!(enclose(&a1, &t, &h(qf(-3, 2))).unwrap(), h(q(-1)));
        let bad = vec![HalfSpaceSpec { root: vec![7], k: q(0) }];
        assert!(enclose(&a1, &t, &bad).is_err());
    }

    #[test]
    fn enclose_intersection_idempotent() {
        let h = preset("hyp23").unwrap();
        let t = enumerate_real_roots(&h, 4);
        let input = vec![
            HalfSpaceSpec { root: vec![1, 0], k: qf(1, 3) },
            HalfSpaceSpec { root: vec![0, 1], k: qf(5, 2) },
            HalfSpaceSpec { root: vec![-1, -3], k: qf(7, 2) },
        ];
        let once = enclose(&h, &t, &input).unwrap();
        let twice = enclose(&h, &t, &once).unwrap();
        assert_eq!(once, twice);
        for s in &input {
            let rounded = once.iter().find(|o| o.root == s.root).unwrap();
            assert!(rounded.k <= s.k.ceil());
            assert!(rounded.k.is_integer());
        }
    }

    #[test]
    fn tits_examples() {
        let a1 = preset("a1").unwrap();
        assert_eq!(tits_leq(&a1, &[q(0)], &[q(1)], 10), Tristate::True);
        assert_eq!(tits_leq(&a1, &[q(0)], &[q(-1)], 10), Tristate::True);
        let h = preset("hyp23").unwrap();
        let z = from_ints(&[0, 0]);
        assert_eq!(tits_leq(&h, &z, &from_ints(&[-1, -1]), 50), Tristate::True);
        assert_eq!(tits_leq(&h, &z, &from_ints(&[1, -1]), 50), Tristate::Unknown);
        assert_eq!(tits_leq(&h, &z, &from_ints(&[1, 1]), 50), Tristate::False);
    }

    #[test]
    fn vectorial_distance_examples() {
        let a1 = preset("a1").unwrap();
        assert_eq!(vectorial_distance(&a1, &[q(0)], &[q(-1)], 10).unwrap(), vec![q(1)]);
        assert_eq!(vectorial_distance(&a1, &[q(2)], &[q(2)], 10).unwrap(), vec![q(0)]);
        let h = preset("hyp23").unwrap();
        let u = from_ints(&[-2, -3]);
        assert_eq!(vectorial_distance(&h, &from_ints(&[0, 0]), &u, 10).unwrap(), u);
        assert_eq!(
            vectorial_distance(&h, &from_ints(&[0, 0]), &from_ints(&[1, 1]), 10),
            Err(ApartmentError::NotComparable)
        );
    }

    #[test]
    fn dense_directions() {
        let a1 = preset("a1").unwrap();
        let t = enumerate_real_roots(&a1, 20);
        assert_eq!(find_dense_direction(&t, &qf(1, 3), PolyNorm::L1), Err(ApartmentError::HeightBoundExhausted));
        let h = preset("hyp23").unwrap();
        let th = enumerate_real_roots(&h, 20);
        let (i, gap) = find_dense_direction(&th, &q(1), PolyNorm::L1).unwrap();
        assert_eq!(th.roots[i].height(), 1);
        assert_eq!(gap, qf(1, 3));
        assert!(find_dense_direction(&th, &qf(1, 100), PolyNorm::L1).is_err());
        let deep = enumerate_real_roots(&h, 100);
        let (j, gap) = find_dense_direction(&deep, &qf(1, 100), PolyNorm::L1).unwrap();
        assert!(gap < qf(1, 100));
        assert!(deep.roots[j].height() > 11);
    }

    #[test]
    fn u_paths() {
        let a1 = preset("a1").unwrap();
        let u = vec![q(1)];
        let straight = vec![(q(0), vec![q(0)]), (q(1), vec![q(1)])];
        assert!(is_u_path(&a1, &straight, &u, 10).ok);
        let bent = vec![(q(0), vec![q(0)]), (qf(1, 2), vec![qf(-1, 2)]), (q(1), vec![q(0)])];
        assert!(is_u_path(&a1, &bent, &u, 10).ok);
        let fast = vec![(q(0), vec![q(0)]), (q(1), vec![q(2)])];
        assert!(!is_u_path(&a1, &fast, &u, 10).ok);
    }

    #[test]
    fn cone_ball_vertices_a1_and_hyp() {
        let a1 = preset("a1").unwrap();
        assert_eq!(cone_ball_vertices(&a1, PolyNorm::L1), vec![vec![q(0)], vec![q(1)]]);
        let h = preset("hyp23").unwrap();
        let v = cone_ball_vertices(&h, PolyNorm::L1);
        assert!(v.contains(&vec![qf(-3, 5), qf(-2, 5)]));
        assert!(v.contains(&vec![qf(-2, 5), qf(-3, 5)]));
        assert!(v.contains(&vec![q(0), q(0)]));
    }
}
