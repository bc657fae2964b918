//! The acceptance suite: thirteen exact or explicitly bounded checks over the
//! presets, driven by a fixed seed.

use crate::apartment::{enclose, norm_eval, HalfSpaceSpec, PolyNorm};
use crate::masure::{ApartmentId, Host, Masure, MasureConfig, MasureError, MasurePoint};
use crate::metrics::{
    chi, distance, distance_oracle, distance_value, geodesic_family_with, geodesic_with, ray_exit, upsilon, MetricError,
    ThetaSpec, XiSpec,
};
use crate::probes::{chi_modulus, discreteness_probe, equivalence_constant, mixed_bound_check, path_retract_check};
use crate::rat::{self, Q};
use crate::rootsys::{preset, RootError, SectorGermId, Sign};
use crate::sample::{random_dominant, random_germ, random_masure, random_point};
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

#[derive(Clone, Debug)]
pub struct AcceptanceConfig {
    pub presets: Vec<String>,
    pub seed: u64,
    pub height: i64,
    pub depth: usize,
    pub thickness: u32,
    /// Points per preset; all unordered pairs are sampled.
    pub points: usize,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            presets: crate::rootsys::PRESETS.iter().map(|s| s.to_string()).collect(),
            seed: 20240611,
            height: 20,
            depth: 4,
            thickness: 2,
            points: 21,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<22} {}  {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

type Check = std::result::Result<(bool, String), MetricError>;

struct Ctx {
    name: String,
    m: Masure,
    pts: Vec<MasurePoint>,
    /// `d[g][i][j]` for the germs `+e` and `-e` under the L1 norm.
    d: [Vec<Vec<Q>>; 2],
}

fn rng_for(seed: u64, criterion: u64, preset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (criterion << 32) ^ (preset << 48))
}

fn signed_thetas() -> [ThetaSpec; 2] {
    [ThetaSpec::plus(PolyNorm::L1), ThetaSpec::minus(PolyNorm::L1)]
}

fn build_ctx(cfg: &AcceptanceConfig, k: usize, name: &str) -> std::result::Result<Ctx, MetricError> {
    let real = preset(name).map_err(crate::masure::MasureError::from)?;
    let mut rng = rng_for(cfg.seed, 0, k as u64);
    let m = random_masure(&real, cfg.height, cfg.depth, cfg.thickness, 5, &mut rng)?;
    let pts: Vec<MasurePoint> = (0..cfg.points).map(|_| random_point(&m, &mut rng)).collect();
    let n = pts.len();
    let mut d = [vec![vec![Q::zero(); n]; n], vec![vec![Q::zero(); n]; n]];
    for (g, th) in signed_thetas().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                d[g][i][j] = distance_value(&m, &pts[i], &pts[j], th)?;
            }
        }
    }
    Ok(Ctx { name: name.to_string(), m, pts, d })
}

/// Runs every criterion and returns one result per criterion.
pub fn run(cfg: &AcceptanceConfig) -> Vec<Criterion> {
    let ctxs: Vec<std::result::Result<Ctx, MetricError>> =
        cfg.presets.iter().enumerate().map(|(k, p)| build_ctx(cfg, k, p)).collect();
    let ok_ctxs: Vec<&Ctx> = ctxs.iter().filter_map(|c| c.as_ref().ok()).collect();
    let setup_err: Option<String> = ctxs.iter().find_map(|c| c.as_ref().err().map(|e| e.to_string()));
    let mut out = Vec::new();
    let mut push = |id: u8, name: &'static str, r: Check| {
        log::info!("criterion {id} done");
        let (pass, detail) = match (r, &setup_err) {
            (_, Some(e)) => (false, format!("setup failed: {e}")),
            (Ok(v), None) => v,
            (Err(e), None) => (false, format!("error: {e}")),
        };
        out.push(Criterion { id, name, pass, detail });
    };
    push(1, "enclosure", c1_enclosure(cfg));
    push(2, "metric-axioms", c2_axioms(&ok_ctxs));
    push(3, "tree-ground-truth", c3_tree(cfg));
    push(4, "norm-restriction", c4_norm(cfg, &ok_ctxs));
    push(5, "retraction-contract", c5_retraction(cfg, &ok_ctxs));
    push(6, "geodesics", c6_geodesics(cfg, &ok_ctxs));
    push(7, "equivalence", c7_equivalence(cfg, &ok_ctxs));
    push(8, "oracle-agreement", c8_oracle(&ok_ctxs));
    push(9, "topology-separation", c9_separation(cfg));
    push(10, "mixed-distance-bound", c10_mixed(cfg, &ok_ctxs));
    push(11, "u-path", c11_upath(cfg, &ok_ctxs));
    push(12, "contraction", c12_contraction(&ok_ctxs));
    push(13, "splitting", c13_split(cfg, &ok_ctxs));
    out
}

fn summary(parts: Vec<String>) -> String {
    parts.join("; ")
}

fn c1_enclosure(cfg: &AcceptanceConfig) -> Check {
    let mut fails = 0;
    let mut total = 0;
    for (k, name) in cfg.presets.iter().enumerate() {
        let real = preset(name).map_err(crate::masure::MasureError::from)?;
        let table = crate::rootsys::enumerate_real_roots(&real, cfg.height);
        let mut rng = rng_for(cfg.seed, 1, k as u64);
        for _ in 0..50 {
            let root = table.roots.choose(&mut rng).unwrap().coeffs.clone();
            let den = rng.gen_range(1..=6);
            let kq = rat::qf(rng.gen_range(-20..=20), den);
            let h = HalfSpaceSpec { root: root.clone(), k: kq.clone() };
            let got = enclose(&real, &table, &[h]).map_err(crate::masure::MasureError::from)?;
            total += 1;
            if got != vec![HalfSpaceSpec { root, k: kq.ceil() }] {
                fails += 1;
            }
        }
    }
    Ok((fails == 0, format!("{total} random half-apartments, {fails} mismatches")))
}

fn c2_axioms(ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for c in ctxs {
        let n = c.pts.len();
        let mut sym = 0;
        let mut ident = 0;
        let mut tri = 0;
        let dxi = |i: usize, j: usize| &c.d[0][i][j] + &c.d[1][i][j];
        for i in 0..n {
            for j in 0..n {
                let eq = c.m.points_equal(&c.pts[i], &c.pts[j])?;
                for g in 0..2 {
                    if c.d[g][i][j] != c.d[g][j][i] {
                        sym += 1;
                    }
                    if c.d[g][i][j].is_zero() != eq {
                        ident += 1;
                    }
                }
                for k in 0..n {
                    for g in 0..2 {
                        if c.d[g][i][k] > &c.d[g][i][j] + &c.d[g][j][k] {
                            tri += 1;
                        }
                    }
                    if dxi(i, k) > dxi(i, j) + dxi(j, k) {
                        tri += 1;
                    }
                }
            }
        }
        pass &= sym + ident + tri == 0;
        parts.push(format!(
            "{}: {} pairs, {} triples, violations sym {sym} ident {ident} triangle {tri}",
            c.name,
            n * (n - 1) / 2,
            n * n * n
        ));
    }
    Ok((pass, summary(parts)))
}

/// Graph distance on the tree spanned by the registered apartments of a rank-one
/// masure: nodes are branch points and the queried points, edges join neighbours
/// along each apartment.
pub fn tree_metric(m: &Masure, queries: &[MasurePoint]) -> std::result::Result<Vec<Vec<Q>>, MetricError> {
    let root = m.root_of(0)?;
    let levels: Vec<i64> = m.apartments().flat_map(|a| a.0.iter().map(|l| -l.k)).collect();
    let mut nodes: Vec<MasurePoint> = queries.to_vec();
    for a in m.apartments() {
        for &lv in &levels {
            // beta(t beta^vee) = 2t
            let b = rat::scale(&rat::qf(lv, 2), &root.coroot);
            nodes.push(m.canonicalize(a, &b)?);
        }
    }
    nodes.sort();
    nodes.dedup();
    let index: HashMap<&MasurePoint, usize> = nodes.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut adj: Vec<Vec<(usize, Q)>> = vec![Vec::new(); nodes.len()];
    for a in m.apartments() {
        let mut on: Vec<&MasurePoint> = Vec::new();
        for p in &nodes {
            if &m.canonical_form(a, &p.b)? == p {
                on.push(p);
            }
        }
        on.sort_by(|x, y| x.b.cmp(&y.b));
        for w in on.windows(2) {
            let len = rat::l1(&rat::sub(&w[1].b, &w[0].b));
            let (i, j) = (index[w[0]], index[w[1]]);
            adj[i].push((j, len.clone()));
            adj[j].push((i, len));
        }
    }
    let mut out = Vec::new();
    for q in queries {
        let src = index[q];
        let mut dist: Vec<Option<Q>> = vec![None; nodes.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = Some(Q::zero());
        heap.push(Reverse((Q::zero(), src)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v].as_ref().is_some_and(|x| x < &d) {
                continue;
            }
            for (w, len) in &adj[v] {
                let nd = &d + len;
                if dist[*w].as_ref().map_or(true, |x| &nd < x) {
                    dist[*w] = Some(nd.clone());
                    heap.push(Reverse((nd, *w)));
                }
            }
        }
        out.push(queries.iter().map(|p| dist[index[p]].clone().expect("tree is connected")).collect());
    }
    Ok(out)
}

fn c3_tree(cfg: &AcceptanceConfig) -> Check {
    let real = preset("a1").map_err(crate::masure::MasureError::from)?;
    let mut rng = rng_for(cfg.seed, 3, 0);
    let m = random_masure(&real, cfg.height, 3, cfg.thickness, 6, &mut rng)?;
    let pts: Vec<MasurePoint> = (0..cfg.points).map(|_| random_point(&m, &mut rng)).collect();
    let tree = tree_metric(&m, &pts)?;
    let mut bad = 0;
    let mut pairs = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            pairs += 1;
            for th in signed_thetas() {
                if distance_value(&m, &pts[i], &pts[j], &th)? != tree[i][j] {
                    bad += 1;
                }
            }
        }
    }
    let depth = m.apartments().map(|a| a.depth()).max().unwrap_or(0);
    Ok((bad == 0, format!("a1, {} apartments up to depth {depth}, {pairs} pairs, {bad} mismatches", m.apartments().count())))
}

fn c4_norm(cfg: &AcceptanceConfig, ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, c) in ctxs.iter().enumerate() {
        let real = c.m.real();
        let mut rng = rng_for(cfg.seed, 4, k as u64);
        let thetas = [
            ThetaSpec::plus(PolyNorm::L1),
            ThetaSpec::minus(PolyNorm::L1),
            ThetaSpec::new(PolyNorm::LInf, SectorGermId { sign: Sign::Plus, w: crate::rootsys::WeylWord::new(vec![0]) }),
        ];
        let mut bad = 0;
        let zero = MasurePoint::root(rat::zeros(real.d));
        let at = |v: &[Q]| MasurePoint::root(v.to_vec());
        let pairs = 200;
        for i in 0..pairs {
            let th = &thetas[i % thetas.len()];
            let x = crate::sample::random_vector(&mut rng, real.d, 4);
            let y = crate::sample::random_vector(&mut rng, real.d, 4);
            let w = crate::sample::random_vector(&mut rng, real.d, 4);
            let v = rat::sub(&y, &x);
            let dv = distance_value(&c.m, &zero, &at(&v), th)?;
            bad += (distance_value(&c.m, &at(&x), &at(&y), th)? != dv) as usize;
            let two = rat::q(2);
            let third = rat::qf(1, 3);
            bad += (distance_value(&c.m, &zero, &at(&rat::scale(&two, &v)), th)? != &two * &dv) as usize;
            bad += (distance_value(&c.m, &zero, &at(&rat::scale(&third, &v)), th)? != &third * &dv) as usize;
            let dw = distance_value(&c.m, &zero, &at(&w), th)?;
            bad += (distance_value(&c.m, &zero, &at(&rat::add(&v, &w)), th)? > &dv + &dw) as usize;
        }
        pass &= bad == 0;
        parts.push(format!("{}: {pairs} root pairs, {bad} violations", c.name));
    }
    Ok((pass, summary(parts)))
}

fn c5_retraction(cfg: &AcceptanceConfig, ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, c) in ctxs.iter().enumerate() {
        let real = c.m.real();
        let mut rng = rng_for(cfg.seed, 5, k as u64);
        let germs = [
            SectorGermId::plus_infinity(),
            SectorGermId::minus_infinity(),
            SectorGermId::parse(real, "+s1").map_err(crate::masure::MasureError::from)?,
            SectorGermId::parse(real, "-s1").map_err(crate::masure::MasureError::from)?,
        ];
        let mut compat = 0;
        let mut lip = 0;
        let mut checks = 0;
        for x in &c.pts {
            for g in &germs {
                let u = random_dominant(real, &mut rng, false);
                let lhs = c.m.retract(&c.m.translate(x, g, &u)?, g)?;
                let rhs = rat::add(&c.m.retract(x, g)?, &g.direction(real, &u));
                compat += (lhs != rhs) as usize;
                checks += 1;
            }
        }
        let n = c.pts.len();
        let mut pairs = 0;
        for i in 0..n {
            for j in i + 1..n {
                let gi = pairs % germs.len();
                let g = &germs[gi];
                let th = ThetaSpec::new(PolyNorm::L1, g.clone());
                let d = if gi < 2 { c.d[gi][i][j].clone() } else { distance_value(&c.m, &c.pts[i], &c.pts[j], &th)? };
                let ri = MasurePoint::root(c.m.retract(&c.pts[i], g)?);
                let rj = MasurePoint::root(c.m.retract(&c.pts[j], g)?);
                lip += (distance_value(&c.m, &ri, &rj, &th)? > d) as usize;
                pairs += 1;
            }
        }
        pass &= compat + lip == 0;
        parts.push(format!("{}: {checks} translations ({compat} bad), {pairs} Lipschitz pairs ({lip} bad)", c.name));
    }
    Ok((pass, summary(parts)))
}

fn c6_geodesics(cfg: &AcceptanceConfig, ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    let times: Vec<Q> = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (1, 1)].iter().map(|&(a, b)| rat::qf(a, b)).collect();
    for (k, c) in ctxs.iter().enumerate() {
        let mut rng = rng_for(cfg.seed, 6, k as u64);
        let mut bad = 0;
        let mut checks = 0;
        for s in 0..30 {
            let i = rng.gen_range(0..c.pts.len());
            let j = rng.gen_range(0..c.pts.len());
            let th = &signed_thetas()[s % 2];
            let (x, y) = (&c.pts[i], &c.pts[j]);
            let dist = distance(&c.m, x, y, th)?;
            let t = times.choose(&mut rng).unwrap();
            let t2 = times.choose(&mut rng).unwrap();
            let a = geodesic_with(&c.m, x, y, th, &dist, t)?;
            let b = geodesic_with(&c.m, x, y, th, &dist, t2)?;
            bad += (distance_value(&c.m, &a, &b, th)? != (t - t2).abs() * &dist.value) as usize;
            bad += (geodesic_with(&c.m, x, y, th, &dist, &Q::zero())? != *x) as usize;
            bad += (geodesic_with(&c.m, x, y, th, &dist, &Q::one())? != *y) as usize;
            checks += 1;
        }
        pass &= bad == 0;
        parts.push(format!("{}: {checks} geodesics, {bad} violations", c.name));
    }
    // two distinct geodesics on hyp23
    let real = preset("hyp23").map_err(crate::masure::MasureError::from)?;
    let m = Masure::new(MasureConfig::new(real.clone(), cfg.height, 2, 1)?);
    let th = ThetaSpec::plus(PolyNorm::L1);
    let x2 = real.coroots[0].clone();
    let zero = MasurePoint::root(rat::zeros(real.d));
    let dist = distance(&m, &zero, &MasurePoint::root(x2.clone()), &th)?;
    let a1 = norm_eval(th.norm, &dist.witness.u) / &dist.value;
    let half = rat::qf(1, 2);
    let p0 = geodesic_family_with(&m, &th, &dist, &Q::zero(), &(&a1 * &half))?;
    let p1 = geodesic_family_with(&m, &th, &dist, &half, &(&a1 * &half))?;
    let mut fam_bad = 0;
    for z in [Q::zero(), half.clone(), Q::one()] {
        for (t, t2) in [(rat::qf(1, 5), rat::qf(3, 4)), (Q::zero(), Q::one()), (rat::qf(1, 3), rat::qf(1, 2))] {
            let a = MasurePoint::root(geodesic_family_with(&m, &th, &dist, &z, &t)?);
            let b = MasurePoint::root(geodesic_family_with(&m, &th, &dist, &z, &t2)?);
            fam_bad += (distance_value(&m, &a, &b, &th)? != (&t - &t2).abs() * &dist.value) as usize;
        }
    }
    let distinct = p0 != p1;
    pass &= distinct && fam_bad == 0;
    parts.push(format!(
        "hyp23 family to {}: gamma_0 {} gamma_1/2 at t=a1/2 ({} vs {}), {fam_bad} violations",
        fmt_vec(&x2),
        if distinct { "!=" } else { "==" },
        fmt_vec(&p0),
        fmt_vec(&p1)
    ));
    Ok((pass, summary(parts)))
}

fn fmt_vec(v: &[Q]) -> String {
    format!("({})", v.iter().map(rat::fmt_q).collect::<Vec<_>>().join(","))
}

fn c7_equivalence(cfg: &AcceptanceConfig, ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, c) in ctxs.iter().enumerate() {
        let real = c.m.real();
        let mut rng = rng_for(cfg.seed, 7, k as u64);
        let samples: Vec<(MasurePoint, MasurePoint)> = (0..40)
            .map(|_| (c.pts.choose(&mut rng).unwrap().clone(), c.pts.choose(&mut rng).unwrap().clone()))
            .collect();
        let mut worst = (Q::zero(), Q::zero());
        let mut bad = 0;
        let mut pairs = 0;
        for sign in [Sign::Plus, Sign::Minus] {
            let base = ThetaSpec::new(PolyNorm::L1, SectorGermId { sign, w: crate::rootsys::WeylWord::identity() });
            for w in real.elements_up_to(2).into_iter().filter(|w| !w.is_identity()) {
                let other = ThetaSpec::new(PolyNorm::L1, SectorGermId { sign, w });
                let r = equivalence_constant(&c.m, &base, &other, &samples)?;
                pairs += 1;
                bad += !r.ok as usize;
                let ratio = &r.forward / &r.apriori_forward;
                if ratio > worst.0 {
                    worst = (ratio, r.apriori_forward.clone());
                }
            }
        }
        pass &= bad == 0;
        parts.push(format!(
            "{}: {pairs} germ pairs x 40 samples, {bad} over bound, worst empirical/a-priori {} (a-priori {})",
            c.name,
            rat::fmt_decimal(&worst.0, 3),
            rat::fmt_q(&worst.1)
        ));
    }
    Ok((pass, summary(parts)))
}

fn c8_oracle(ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for c in ctxs {
        let n = c.pts.len();
        let mut exact = 0;
        let mut bounded = 0;
        let mut bad = 0;
        let mut count = 0;
        'outer: for i in 0..n {
            for j in i + 1..n {
                if count >= 50 {
                    break 'outer;
                }
                count += 1;
                let th = &signed_thetas()[count % 2];
                let dist = distance(&c.m, &c.pts[i], &c.pts[j], th)?;
                let w: Vec<Q> = dist.witness.u.iter().chain(&dist.witness.u2).cloned().collect();
                let l = rat::lcm_denominators(&w);
                if l <= 12.into() {
                    let res: u32 = l.try_into().unwrap();
                    let o = distance_oracle(&c.m, &c.pts[i], &c.pts[j], th, res)?;
                    bad += (o != dist.value) as usize;
                    exact += 1;
                } else {
                    let mut prev: Option<Q> = None;
                    for res in [1u32, 2, 4] {
                        let o = distance_oracle(&c.m, &c.pts[i], &c.pts[j], th, res)?;
                        let gap = &o - &dist.value;
                        bad += (gap.is_negative() || prev.as_ref().is_some_and(|p| &gap > p)) as usize;
                        prev = Some(gap);
                    }
                    bounded += 1;
                }
            }
        }
        pass &= bad == 0 && count >= 50;
        parts.push(format!("{}: {count} instances ({exact} exact, {bounded} bounded), {bad} violations", c.name));
    }
    Ok((pass, summary(parts)))
}

fn c9_separation(cfg: &AcceptanceConfig) -> Check {
    let real = preset("hyp23").map_err(crate::masure::MasureError::from)?;
    let r = discreteness_probe(&real, PolyNorm::L1, 5, cfg.height)?;
    let s = &r.steps;
    let dec = s.windows(2).all(|w| w[1].d_plus < w[0].d_plus);
    let pos = s.iter().all(|p| p.d_plus.is_positive());
    let inc = s.windows(2).all(|w| w[1].rho_minus_norm > w[0].rho_minus_norm);
    // rho_- is 1-Lipschitz for d_-, and root distances dominate the L1 norm
    let lower = s.iter().all(|p| p.d_xi >= Q::one());
    let pass = s.len() == 5 && dec && pos && inc && lower;
    let dp: Vec<String> = s.iter().map(|p| rat::fmt_q(&p.d_plus)).collect();
    let rn: Vec<String> = s.iter().map(|p| rat::fmt_q(&p.rho_minus_norm)).collect();
    let dx = s.iter().map(|p| p.d_xi.clone()).min().unwrap_or_else(Q::zero);
    Ok((
        pass,
        format!(
            "hyp23 (height raised to {}): d+ = [{}], |rho-|_1 = [{}], min d_xi = {}",
            r.height,
            dp.join(", "),
            rn.join(", "),
            rat::fmt_q(&dx)
        ),
    ))
}

fn c10_mixed(cfg: &AcceptanceConfig, ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    let xi = XiSpec::standard(PolyNorm::L1);
    for (k, c) in ctxs.iter().enumerate() {
        let real = c.m.real();
        let lambda = real.regular_lattice_vector();
        let mut rng = rng_for(cfg.seed, 10, k as u64);
        let mut bad = 0;
        let mut worst = Q::zero();
        let mut kk = Q::zero();
        for _ in 0..200 {
            let a = MasurePoint::root(crate::sample::random_vector(&mut rng, real.d, 3));
            let x = c.pts.choose(&mut rng).unwrap();
            let r = mixed_bound_check(&c.m, &a, x, &xi, &lambda)?;
            bad += !r.ok as usize;
            if r.rhs.is_positive() {
                worst = worst.max(&r.lhs / &r.rhs);
            }
            kk = r.k;
        }
        pass &= bad == 0;
        parts.push(format!(
            "{}: 200 samples, k = {}, worst lhs/rhs {}, {bad} violations",
            c.name,
            rat::fmt_q(&kk),
            rat::fmt_decimal(&worst, 3)
        ));
    }
    Ok((pass, summary(parts)))
}

fn c11_upath(cfg: &AcceptanceConfig, ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, c) in ctxs.iter().enumerate() {
        let real = c.m.real();
        let mut rng = rng_for(cfg.seed, 11, k as u64);
        let mut bad = 0;
        let mut undecided = 0;
        let mut n = 0;
        for x in &c.pts {
            for _ in 0..3 {
                let u = random_dominant(real, &mut rng, false);
                let r = path_retract_check(&c.m, x, &u)?;
                undecided += r.verdict.undecided as usize;
                bad += !(r.verdict.ok && r.increment_ok && r.two_time_ok) as usize;
                n += 1;
            }
        }
        pass &= bad == 0;
        parts.push(format!("{}: {n} segments, {bad} failures ({undecided} undecided)", c.name));
    }
    Ok((pass, summary(parts)))
}

fn c12_contraction(ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    let xi = XiSpec::standard(PolyNorm::L1);
    let grid: Vec<Q> = (0..=4).map(|i| rat::qf(i, 4)).collect();
    for c in ctxs {
        let real = c.m.real();
        let u = real.regular_lattice_vector();
        let zero = MasurePoint::root(rat::zeros(real.d));
        let mut bad = 0;
        for x in &c.pts {
            let (_, y) = ray_exit(&c.m, x, &u, Sign::Plus)?;
            bad += (chi(&c.m, x, &Q::zero(), &u)? != *x) as usize;
            let end = chi(&c.m, x, &Q::one(), &u)?;
            bad += !(end.in_root() && end.b == y) as usize;
            bad += (upsilon(&c.m, x, &Q::one(), &u)? != zero) as usize;
            if x.in_root() {
                for t in &grid {
                    bad += (chi(&c.m, x, t, &u)? != *x) as usize;
                }
            }
        }
        let sample: Vec<MasurePoint> = c.pts.iter().take(8).cloned().collect();
        let m8 = chi_modulus(&c.m, &sample, &u, &xi, 8)?;
        let m16 = chi_modulus(&c.m, &sample, &u, &xi, 16)?;
        pass &= bad == 0;
        parts.push(format!(
            "{}: {} points, {bad} violations, modulus {} (8 steps) {} (16 steps)",
            c.name,
            c.pts.len(),
            rat::fmt_decimal(&m8, 3),
            rat::fmt_decimal(&m16, 3)
        ));
    }
    Ok((pass, summary(parts)))
}

fn c13_split(cfg: &AcceptanceConfig, ctxs: &[&Ctx]) -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, c) in ctxs.iter().enumerate() {
        let real = c.m.real();
        let mut rng = rng_for(cfg.seed, 13, k as u64);
        let words: Vec<&ApartmentId> = c.m.apartments().collect();
        let mut bad = 0;
        let mut max_n = 0;
        let mut rejected = 0;
        let mut done = 0;
        while done < 20 {
            let a = (*words.choose(&mut rng).unwrap()).clone();
            let g = random_germ(real, &mut rng, 3);
            // germs whose transform of the chain root leaves the table are out of scope
            let split = match c.m.split_apartment(&a, &g) {
                Err(MasureError::Root(RootError::RootOutsideTable(_))) if rejected < 1000 => {
                    rejected += 1;
                    continue;
                }
                r => r?,
            };
            done += 1;
            max_n = max_n.max(split.n);
            bad += (split.pieces.len() > 1usize << split.n.min(20)) as usize;
            let chart = c.m.chart(&a, &g)?;
            for _ in 0..10 {
                let p = crate::sample::random_vector(&mut rng, real.d, 4);
                let pt = c.m.canonicalize(&a, &p)?;
                let rho = c.m.retract(&pt, &g)?;
                let mut covered = false;
                for piece in split.pieces.iter().filter(|s| crate::masure::region_contains(&s.region, &p)) {
                    covered = true;
                    bad += (piece.to_root.apply(&p) != rho) as usize;
                    match &piece.host {
                        Host::Registered(h) => {
                            bad += (c.m.canonicalize(h, &p)? != pt) as usize;
                        }
                        Host::Unfolded(w) => {
                            bad += (w != &a || chart.locate(&pt) != Some(rho.clone())) as usize;
                        }
                    }
                }
                bad += !covered as usize;
            }
        }
        pass &= bad == 0;
        parts.push(format!(
            "{}: 20 (apartment, germ) pairs ({rejected} germs outside the table redrawn), max n {max_n}, {bad} violations",
            c.name
        ));
    }
    Ok((pass, summary(parts)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn tree_metric_single_branch() {
        let mut m = Masure::new(MasureConfig::new(preset("a1").unwrap(), 20, 2, 3).unwrap());
        let c = m.branch(&ApartmentId::root(), 0, &q(0), 1).unwrap();
        let x = m.canonicalize(&c, &[q(-1)]).unwrap();
        let y = MasurePoint::root(vec![q(-1)]);
        let z = MasurePoint::root(vec![q(2)]);
        let t = tree_metric(&m, &[x, y, z]).unwrap();
        assert_eq!(t[0][1], q(2));
        assert_eq!(t[0][2], q(3));
        assert_eq!(t[1][2], q(3));
    }
}
