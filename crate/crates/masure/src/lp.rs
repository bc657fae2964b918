//! Exact rational linear programming.
//!
//! Dense two-phase tableau simplex with Bland's rule. Problems are minimizations
//! over variables that are either free or nonnegative.

use crate::apartment::PolyNorm;
use crate::rat::{dot, Q, Vector};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vector,
    pub rel: Relation,
    pub rhs: Q,
}

/// `minimize objective·z` subject to the constraint rows.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub num_vars: usize,
    /// `free[j]` is false when `z_j >= 0` is imposed.
    pub free: Vec<bool>,
    pub objective: Vector,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    /// `duals[i]` belongs to `constraints[i]` in the caller's order.
    Optimal { value: Q, x: Vector, duals: Vector },
    /// Multipliers `y` with `y·b > 0` whose combination contradicts every feasible `z`.
    Infeasible { certificate: Vector },
    /// A feasible point and a feasible direction along which the objective decreases.
    Unbounded { point: Vector, ray: Vector },
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Q> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            num_vars,
            free: vec![true; num_vars],
            objective: vec![Q::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vector, rel: Relation, rhs: Q) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    /// True when `x` satisfies every row and sign restriction exactly.
    pub fn is_feasible(&self, x: &[Q]) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        if x.iter().zip(&self.free).any(|(v, f)| !f && v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = dot(&c.coeffs, x);
            match c.rel {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
    }

    /// Checks a Farkas certificate against the original rows.
    pub fn certifies_infeasible(&self, y: &[Q]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        for (c, yi) in self.constraints.iter().zip(y) {
            let ok = match c.rel {
                Relation::Le => !yi.is_positive(),
                Relation::Ge => !yi.is_negative(),
                Relation::Eq => true,
            };
            if !ok {
                return false;
            }
        }
        for j in 0..self.num_vars {
            let s = self
                .constraints
                .iter()
                .zip(y)
                .fold(Q::zero(), |acc, (c, yi)| acc + yi * &c.coeffs[j]);
            if self.free[j] && !s.is_zero() || !self.free[j] && s.is_positive() {
                return false;
            }
        }
        let yb = self.constraints.iter().zip(y).fold(Q::zero(), |acc, (c, yi)| acc + yi * &c.rhs);
        yb.is_positive()
    }

    /// Checks dual feasibility of `y` and that its dual objective equals `value`.
    pub fn certifies_optimal(&self, y: &[Q], value: &Q) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        for (c, yi) in self.constraints.iter().zip(y) {
            let ok = match c.rel {
                Relation::Le => !yi.is_positive(),
                Relation::Ge => !yi.is_negative(),
                Relation::Eq => true,
            };
            if !ok {
                return false;
            }
        }
        for j in 0..self.num_vars {
            let s = self
                .constraints
                .iter()
                .zip(y)
                .fold(Q::zero(), |acc, (c, yi)| acc + yi * &c.coeffs[j]);
            let cj = &self.objective[j];
            if self.free[j] && &s != cj || !self.free[j] && &s > cj {
                return false;
            }
        }
        let yb = self.constraints.iter().zip(y).fold(Q::zero(), |acc, (c, yi)| acc + yi * &c.rhs);
        &yb == value
    }

    pub fn is_improving_ray(&self, ray: &[Q]) -> bool {
        if ray.iter().zip(&self.free).any(|(v, f)| !f && v.is_negative()) {
            return false;
        }
        let rows_ok = self.constraints.iter().all(|c| {
            let lhs = dot(&c.coeffs, ray);
            match c.rel {
                Relation::Le => !lhs.is_positive(),
                Relation::Eq => lhs.is_zero(),
                Relation::Ge => !lhs.is_negative(),
            }
        });
        rows_ok && dot(&self.objective, ray).is_negative()
    }
}

fn cmp_rows(a: &Constraint, b: &Constraint) -> Ordering {
    a.coeffs
        .cmp(&b.coeffs)
        .then(a.rel.cmp(&b.rel))
        .then(a.rhs.cmp(&b.rhs))
}

struct Tableau {
    rows: Vec<Vector>,
    rhs: Vector,
    basis: Vec<usize>,
    obj: Vector,
    obj_val: Q,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &piv;
        }
        self.rhs[r] /= &piv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            let t = &f * &prhs;
            self.rhs[i] -= t;
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (x, y) in self.obj.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.obj_val -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    fn set_costs(&mut self, costs: &[Q]) {
        self.obj = costs.to_vec();
        self.obj_val = Q::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = costs[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (x, y) in self.obj.iter_mut().zip(&self.rows[r]) {
                *x -= &cb * y;
            }
            self.obj_val -= &cb * &self.rhs[r];
        }
    }

    /// Runs Bland-rule simplex; `Err(col)` reports an unbounded entering column.
    fn run(&mut self, allowed: usize) -> Result<(), usize> {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(Q, usize, usize)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if a.is_positive() {
                    let ratio = &self.rhs[r] / a;
                    let better = match &best {
                        None => true,
                        Some((br, _, bb)) => ratio < *br || (ratio == *br && self.basis[r] < *bb),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            match best {
                None => return Err(c),
                Some((_, r, _)) => self.pivot(r, c),
            }
            if log::log_enabled!(log::Level::Trace) {
                log::trace!("pivot col {c}: basis {:?} obj {}", self.basis, self.obj_val);
            }
        }
    }
}

/// Solves the problem exactly.
pub fn lp_solve(p: &LpProblem) -> LpOutcome {
    let m = p.constraints.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| cmp_rows(&p.constraints[a], &p.constraints[b]).then(a.cmp(&b)));

    // structural columns: each variable gives one column, free ones a second negated column
    let mut col_of = Vec::with_capacity(p.num_vars);
    let mut ncols = 0;
    for j in 0..p.num_vars {
        col_of.push(ncols);
        ncols += if p.free[j] { 2 } else { 1 };
    }
    let mut slack_col = vec![None; m];
    for (pos, &i) in order.iter().enumerate() {
        if p.constraints[i].rel != Relation::Eq {
            slack_col[pos] = Some(ncols);
            ncols += 1;
        }
    }
    let art0 = ncols;
    ncols += m;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut flip = Vec::with_capacity(m);
    for (pos, &i) in order.iter().enumerate() {
        let c = &p.constraints[i];
        let mut row = vec![Q::zero(); ncols];
        for j in 0..p.num_vars {
            row[col_of[j]] = c.coeffs[j].clone();
            if p.free[j] {
                row[col_of[j] + 1] = -c.coeffs[j].clone();
            }
        }
        if let Some(s) = slack_col[pos] {
            row[s] = if c.rel == Relation::Le { Q::one() } else { -Q::one() };
        }
        let mut b = c.rhs.clone();
        let f = if b.is_negative() { -1 } else { 1 };
        if f < 0 {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            b = -b;
        }
        row[art0 + pos] = Q::one();
        rows.push(row);
        rhs.push(b);
        flip.push(f);
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis: (art0..art0 + m).collect(),
        obj: Vec::new(),
        obj_val: Q::zero(),
    };

    let mut phase1 = vec![Q::zero(); ncols];
    for c in phase1.iter_mut().skip(art0) {
        *c = Q::one();
    }
    t.set_costs(&phase1);
    t.run(ncols).expect("phase one is bounded below by zero");

    let read_duals = |t: &Tableau, costs: &[Q]| -> Vector {
        let mut y = vec![Q::zero(); m];
        for (pos, &i) in order.iter().enumerate() {
            let mut s = Q::zero();
            for (r, &b) in t.basis.iter().enumerate() {
                if !costs[b].is_zero() {
                    s += &costs[b] * &t.rows[r][art0 + pos];
                }
            }
            y[i] = if flip[pos] < 0 { -s } else { s };
        }
        y
    };

    if (-&t.obj_val).is_positive() {
        let certificate = read_duals(&t, &phase1);
        return LpOutcome::Infeasible { certificate };
    }

    // drive artificial variables out of the basis where possible
    for r in 0..m {
        if t.basis[r] >= art0 {
            if let Some(c) = (0..art0).find(|&c| !t.rows[r][c].is_zero()) {
                t.pivot(r, c);
            }
        }
    }

    let mut costs = vec![Q::zero(); ncols];
    for j in 0..p.num_vars {
        costs[col_of[j]] = p.objective[j].clone();
        if p.free[j] {
            costs[col_of[j] + 1] = -p.objective[j].clone();
        }
    }
    t.set_costs(&costs);

    let extract = |t: &Tableau, extra: Option<(usize, &Vector)>| -> Vector {
        let mut std = vec![Q::zero(); ncols];
        for (r, &b) in t.basis.iter().enumerate() {
            std[b] = t.rhs[r].clone();
        }
        if let Some((enter, col)) = extra {
            std = vec![Q::zero(); ncols];
            std[enter] = Q::one();
            for (r, &b) in t.basis.iter().enumerate() {
                std[b] = -col[r].clone();
            }
        }
        (0..p.num_vars)
            .map(|j| {
                let mut v = std[col_of[j]].clone();
                if p.free[j] {
                    v -= &std[col_of[j] + 1];
                }
                v
            })
            .collect()
    };

    match t.run(art0) {
        Ok(()) => {
            let x = extract(&t, None);
            let value = dot(&p.objective, &x);
            debug_assert!(p.is_feasible(&x));
            debug_assert_eq!(value, -t.obj_val.clone());
            let duals = read_duals(&t, &costs);
            LpOutcome::Optimal { value, x, duals }
        }
        Err(c) => {
            let point = extract(&t, None);
            let col: Vector = t.rows.iter().map(|r| r[c].clone()).collect();
            let ray = extract(&t, Some((c, &col)));
            LpOutcome::Unbounded { point, ray }
        }
    }
}

/// Minimizes the objective, then each listed variable in turn while holding
/// every earlier optimum fixed; returns the lexicographically least optimal point.
pub fn lp_solve_lexicographic(p: &LpProblem, priority: &[usize]) -> LpOutcome {
    let first = lp_solve(p);
    let LpOutcome::Optimal { value, mut x, duals } = first else {
        return first;
    };
    let mut q = p.clone();
    q.push(p.objective.clone(), Relation::Eq, value.clone());
    for &j in priority {
        let mut obj = vec![Q::zero(); p.num_vars];
        obj[j] = Q::one();
        q.objective = obj;
        match lp_solve(&q) {
            LpOutcome::Optimal { value: vj, x: xj, .. } => {
                let mut row = vec![Q::zero(); p.num_vars];
                row[j] = Q::one();
                q.push(row, Relation::Eq, vj);
                x = xj;
            }
            // a coordinate unbounded below on the optimal face keeps the current point
            _ => continue,
        }
    }
    LpOutcome::Optimal { value, x, duals }
}

/// Row `a·(u,u') rel b` over the stacked pair variables.
pub type PairRow = (Vector, Q);

/// Minimizes `|u| + |u'|` over pairs satisfying `eq` (equalities) and `ge`
/// (`a·(u,u') >= b`), encoding the polyhedral norm with epigraph variables.
/// With `lexicographic` the least optimal `(u,u')` is returned. `None` when
/// the rows are infeasible.
pub fn min_norm_pair(
    d: usize,
    norm: PolyNorm,
    eq: &[PairRow],
    ge: &[PairRow],
    lexicographic: bool,
) -> Option<(Q, Vector, Vector)> {
    let extra = match norm {
        PolyNorm::L1 => 2 * d,
        PolyNorm::LInf => 2,
    };
    let nv = 2 * d + extra;
    let mut p = LpProblem::new(nv);
    let pad = |row: &Vector| {
        let mut r = row.clone();
        r.resize(nv, Q::zero());
        r
    };
    for (a, b) in eq {
        p.push(pad(a), Relation::Eq, b.clone());
    }
    for (a, b) in ge {
        p.push(pad(a), Relation::Ge, b.clone());
    }
    for j in 0..2 * d {
        let t = match norm {
            PolyNorm::L1 => 2 * d + j,
            PolyNorm::LInf => 2 * d + j / d,
        };
        for s in [Q::one(), -Q::one()] {
            let mut r = vec![Q::zero(); nv];
            r[t] = Q::one();
            r[j] = s;
            p.push(r, Relation::Ge, Q::zero());
        }
    }
    for t in 2 * d..nv {
        p.objective[t] = Q::one();
    }
    let priority: Vec<usize> = (0..2 * d).collect();
    let out = if lexicographic { lp_solve_lexicographic(&p, &priority) } else { lp_solve(&p) };
    match out {
        LpOutcome::Optimal { value, x, .. } => Some((value, x[..d].to_vec(), x[d..2 * d].to_vec())),
        LpOutcome::Infeasible { .. } => None,
        LpOutcome::Unbounded { .. } => unreachable!("norms are bounded below"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qf};

    fn one_var(c: i64) -> LpProblem {
        let mut p = LpProblem::new(1);
        p.objective = vec![q(c)];
        p
    }

    #[test]
    fn min_z_with_lower_bound() {
        let mut p = one_var(1);
        p.push(vec![q(1)], Relation::Ge, q(3));
        match lp_solve(&p) {
            LpOutcome::Optimal { value, x, duals } => {
                assert_eq!(value, q(3));
                assert_eq!(x, vec![q(3)]);
                assert!(p.certifies_optimal(&duals, &value));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut p = one_var(0);
        p.push(vec![q(1)], Relation::Le, q(-1));
        p.push(vec![q(1)], Relation::Ge, q(1));
        match lp_solve(&p) {
            LpOutcome::Infeasible { certificate } => assert!(p.certifies_infeasible(&certificate)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn unbounded_direction() {
        let mut p = one_var(-1);
        p.free = vec![false];
        p.push(vec![q(1)], Relation::Ge, q(0));
        match lp_solve(&p) {
            LpOutcome::Unbounded { point, ray } => {
                assert!(p.is_feasible(&point));
                assert!(p.is_improving_ray(&ray));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn two_dimensional_with_equalities() {
        // min x + 2y, x + y = 3, x - y <= 1, y >= 0
        let mut p = LpProblem::new(2);
        p.objective = vec![q(1), q(2)];
        p.push(vec![q(1), q(1)], Relation::Eq, q(3));
        p.push(vec![q(1), q(-1)], Relation::Le, q(1));
        p.push(vec![q(0), q(1)], Relation::Ge, q(0));
        match lp_solve(&p) {
            LpOutcome::Optimal { value, x, duals } => {
                assert_eq!(x, vec![q(2), q(1)]);
                assert_eq!(value, q(4));
                assert!(p.certifies_optimal(&duals, &value));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn degenerate_and_redundant_rows() {
        let mut p = LpProblem::new(2);
        p.objective = vec![q(1), q(1)];
        p.push(vec![q(1), q(1)], Relation::Eq, q(1));
        p.push(vec![q(2), q(2)], Relation::Eq, q(2));
        p.push(vec![q(1), q(0)], Relation::Ge, qf(1, 3));
        p.push(vec![q(0), q(1)], Relation::Ge, q(0));
        match lp_solve(&p) {
            LpOutcome::Optimal { value, x, duals } => {
                assert_eq!(value, q(1));
                assert!(p.is_feasible(&x));
                assert!(p.certifies_optimal(&duals, &value));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn lexicographic_witness() {
        // min |a| style: x + y = 1 with both nonnegative, tie broken toward small x
        let mut p = LpProblem::new(2);
        p.free = vec![false, false];
        p.objective = vec![q(1), q(1)];
        p.push(vec![q(1), q(1)], Relation::Eq, q(1));
        match lp_solve_lexicographic(&p, &[0, 1]) {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, vec![q(0), q(1)]),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn min_norm_pair_examples() {
        // hyp23: u - u' = (-1,-1) with both dominant
        let d = 2;
        let cone = [[2, -3], [-3, 2]];
        let mut ge = Vec::new();
        for a in cone {
            ge.push((vec![q(a[0]), q(a[1]), q(0), q(0)], q(0)));
            ge.push((vec![q(0), q(0), q(a[0]), q(a[1])], q(0)));
        }
        let eq = vec![
            (vec![q(1), q(0), q(-1), q(0)], q(-1)),
            (vec![q(0), q(1), q(0), q(-1)], q(-1)),
        ];
        let (v, u, u2) = min_norm_pair(d, PolyNorm::L1, &eq, &ge, true).unwrap();
        assert_eq!(v, q(2));
        assert_eq!((u, u2), (vec![q(-1), q(-1)], vec![q(0), q(0)]));
        let zero = vec![
            (vec![q(1), q(0), q(0), q(0)], q(0)),
            (vec![q(0), q(1), q(0), q(0)], q(0)),
            (vec![q(0), q(0), q(1), q(0)], q(0)),
            (vec![q(0), q(0), q(0), q(1)], q(0)),
        ];
        let (v, u, u2) = min_norm_pair(d, PolyNorm::LInf, &zero, &[], false).unwrap();
        assert_eq!(v, q(0));
        assert!(u.iter().chain(&u2).all(|x| x.is_zero()));
        let bad = vec![(vec![q(1), q(0), q(0), q(0)], q(1)), (vec![q(1), q(0), q(0), q(0)], q(2))];
        assert!(min_norm_pair(d, PolyNorm::L1, &bad, &[], false).is_none());
    }
}
