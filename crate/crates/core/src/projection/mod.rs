//! Fourier–Motzkin projection of the auxiliary code parameters out of the
//! single-codebook system, with an independent simplex oracle.

pub mod lp;

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rate_region::{
    check_point, rate_assignment, Assignment, ConstraintSystem, Cor1Constants, LinearConstraint,
    Sense, Var, TOL_CLOSURE, cor1_system_from_constants,
};
use lp::{LpOutcome, LpRow};

/// Elimination order for the single-codebook system.
pub const THM1_ORDER: [Var; 3] = [Var::B1, Var::S2, Var::S3];

/// Conjunction of `≤` constraints. A derived `0 ≤ negative` is recorded in
/// `infeasible` rather than kept as a row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyhedron {
    pub variables: Vec<Var>,
    pub constraints: Vec<LinearConstraint>,
    pub infeasible: bool,
}

impl Polyhedron {
    pub fn new(variables: Vec<Var>, constraints: &[LinearConstraint]) -> Self {
        let mut p = Self {
            variables,
            constraints: Vec::new(),
            infeasible: false,
        };
        for c in constraints {
            p.push(c.as_le());
        }
        p
    }

    fn push(&mut self, c: LinearConstraint) {
        if c.is_trivial() {
            if c.constant < -TOL_CLOSURE {
                self.infeasible = true;
            }
            return;
        }
        self.constraints.push(c);
    }

    pub fn contains(&self, a: &Assignment) -> Result<bool> {
        if self.infeasible {
            return Ok(false);
        }
        for c in &self.constraints {
            if c.slack(a)? < -TOL_CLOSURE {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contains_rates(&self, r: [f64; 3]) -> Result<bool> {
        self.contains(&rate_assignment(r))
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.constraints.iter().any(|c| !c.coeff(v).is_zero())
    }

    fn sort(&mut self) {
        let vars = &self.variables;
        self.constraints.sort_by(|a, b| {
            constraint_key(a, vars)
                .partial_cmp(&constraint_key(b, vars))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }
}

fn constraint_key(c: &LinearConstraint, vars: &[Var]) -> Vec<f64> {
    let mut k: Vec<f64> = vars
        .iter()
        .map(|v| c.coeff(*v).to_f64().unwrap_or(0.0))
        .collect();
    k.push(c.constant);
    k
}

/// Scales so the largest coefficient magnitude is 1.
fn normalize(mut c: LinearConstraint) -> LinearConstraint {
    let m = c.max_abs_coeff();
    if m.is_zero() {
        return c;
    }
    for v in c.coeffs.values_mut() {
        *v /= m;
    }
    c.constant /= m.to_f64().unwrap_or(1.0);
    c
}

/// Keeps the tightest constraint among those with identical coefficients.
fn drop_dominated(cs: Vec<LinearConstraint>) -> Vec<LinearConstraint> {
    let mut best: BTreeMap<Vec<(Var, Rational64)>, LinearConstraint> = BTreeMap::new();
    for c in cs {
        let key: Vec<(Var, Rational64)> = c.coeffs.iter().map(|(v, k)| (*v, *k)).collect();
        match best.get(&key) {
            Some(prev) if prev.constant <= c.constant => {}
            _ => {
                best.insert(key, c);
            }
        }
    }
    best.into_values().collect()
}

/// One Fourier–Motzkin step: pairs every upper bound on `var` with every
/// lower bound; constraints without `var` are carried over.
pub fn fme_eliminate(poly: &Polyhedron, var: Var) -> Polyhedron {
    let mut out = Polyhedron {
        variables: poly.variables.iter().copied().filter(|v| *v != var).collect(),
        constraints: Vec::new(),
        infeasible: poly.infeasible,
    };
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for c in &poly.constraints {
        let k = c.coeff(var);
        if k.is_positive() {
            upper.push(c);
        } else if k.is_negative() {
            lower.push(c);
        } else {
            out.push(c.clone());
        }
    }
    for up in &upper {
        let cu = up.coeff(var);
        for lo in &lower {
            let cl = -lo.coeff(var);
            let mut coeffs: BTreeMap<Var, Rational64> = BTreeMap::new();
            for (v, k) in &up.coeffs {
                *coeffs.entry(*v).or_insert_with(Rational64::zero) += k * cl;
            }
            for (v, k) in &lo.coeffs {
                *coeffs.entry(*v).or_insert_with(Rational64::zero) += k * cu;
            }
            coeffs.retain(|_, k| !k.is_zero());
            let constant = up.constant * cl.to_f64().unwrap_or(f64::NAN)
                + lo.constant * cu.to_f64().unwrap_or(f64::NAN);
            out.push(normalize(LinearConstraint {
                label: format!("{}+{}", up.label, lo.label),
                coeffs,
                constant,
                sense: Sense::Le,
            }));
        }
    }
    out.constraints = drop_dominated(out.constraints.into_iter().map(normalize).collect());
    out
}

fn lp_rows(cs: &[&LinearConstraint], vars: &[Var], split_free: bool) -> Vec<LpRow> {
    cs.iter()
        .map(|c| {
            let mut coeffs = Vec::new();
            for v in vars {
                let k = c.coeff(*v).to_f64().unwrap_or(0.0);
                coeffs.push(k);
                if split_free {
                    coeffs.push(-k);
                }
            }
            LpRow::le(coeffs, c.constant)
        })
        .collect()
}

/// Whether the polyhedron has any point, variables free in sign.
pub fn lp_nonempty(poly: &Polyhedron) -> Result<bool> {
    if poly.infeasible {
        return Ok(false);
    }
    let refs: Vec<&LinearConstraint> = poly.constraints.iter().collect();
    lp::feasible(2 * poly.variables.len(), &lp_rows(&refs, &poly.variables, true))
}

/// Removes every constraint whose violation, maximized over the remaining
/// ones, is at most the closure tolerance.
pub fn prune(poly: &Polyhedron) -> Result<Polyhedron> {
    let mut p = poly.clone();
    p.constraints = drop_dominated(p.constraints.into_iter().map(normalize).collect());
    if p.infeasible {
        p.constraints.clear();
        return Ok(p);
    }
    if !lp_nonempty(&p)? {
        p.infeasible = true;
        p.constraints.clear();
        return Ok(p);
    }
    p.sort();
    let mut i = 0;
    while i < p.constraints.len() {
        let target = &p.constraints[i];
        let rest: Vec<&LinearConstraint> = p
            .constraints
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, c)| c)
            .collect();
        let mut obj = Vec::new();
        for v in &p.variables {
            let k = target.coeff(*v).to_f64().unwrap_or(0.0);
            obj.push(k);
            obj.push(-k);
        }
        let redundant = match lp::maximize(&obj, &lp_rows(&rest, &p.variables, true))? {
            LpOutcome::Optimal { value, .. } => value - target.constant <= TOL_CLOSURE,
            LpOutcome::Unbounded => false,
            LpOutcome::Infeasible { .. } => {
                return Err(Error::LpDefect("relaxation of a nonempty polyhedron is empty".into()))
            }
        };
        if redundant {
            p.constraints.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub id: usize,
    /// Label of the chosen member of every disjunction group.
    pub choice: Vec<String>,
    pub polyhedron: Polyhedron,
}

/// Union of polyhedra, one per disjunction branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionUnion {
    pub branches: Vec<Branch>,
}

impl RegionUnion {
    pub fn contains(&self, a: &Assignment) -> Result<bool> {
        for b in &self.branches {
            if b.polyhedron.contains(a)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn contains_rates(&self, r: [f64; 3]) -> Result<bool> {
        self.contains(&rate_assignment(r))
    }

    pub fn constraint_count(&self) -> usize {
        self.branches.iter().map(|b| b.polyhedron.constraints.len()).sum()
    }
}

fn branch_choices(system: &ConstraintSystem) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![vec![]];
    for g in &system.disjunction_groups {
        out = out
            .into_iter()
            .flat_map(|base| {
                g.iter().map(move |c| {
                    let mut b = base.clone();
                    b.push(c.label.clone());
                    b
                })
            })
            .collect();
    }
    out
}

/// Eliminates `order` from every branch of `system`; `prune_result` runs the
/// LP-certified redundancy removal on each projected branch.
pub fn project_system(system: &ConstraintSystem, order: &[Var], prune_result: bool) -> Result<RegionUnion> {
    let kept: Vec<Var> = system
        .variables
        .iter()
        .copied()
        .filter(|v| !order.contains(v))
        .collect();
    let branches = system
        .branches()
        .into_iter()
        .zip(branch_choices(system))
        .enumerate()
        .map(|(id, (cs, choice))| {
            let mut poly = Polyhedron::new(system.variables.clone(), &cs);
            for v in order {
                poly = fme_eliminate(&poly, *v);
            }
            poly.variables = kept.clone();
            if prune_result {
                poly = prune(&poly)?;
            }
            poly.sort();
            Ok(Branch {
                id,
                choice,
                polyhedron: poly,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionUnion { branches })
}

/// Eliminates `B1, S2, S3` and prunes.
pub fn project_thm1(system: &ConstraintSystem) -> Result<RegionUnion> {
    project_system(system, &THM1_ORDER, true)
}

/// Phase-1 feasibility of one branch with the rate triple fixed and the
/// auxiliary variables constrained to be nonnegative.
pub fn lp_feasible(branch: &[LinearConstraint], rates: [f64; 3]) -> Result<bool> {
    let mut aux: Vec<Var> = Vec::new();
    for c in branch {
        for v in c.variables() {
            if !Var::RATES.contains(&v) && !aux.contains(&v) {
                aux.push(v);
            }
        }
    }
    aux.sort();
    let rows: Vec<LpRow> = branch
        .iter()
        .map(|c| {
            let le = c.as_le();
            let fixed: f64 = Var::RATES
                .iter()
                .zip(rates)
                .map(|(v, r)| le.coeff(*v).to_f64().unwrap_or(0.0) * r)
                .sum();
            LpRow::le(
                aux.iter().map(|v| le.coeff(*v).to_f64().unwrap_or(0.0)).collect(),
                le.constant - fixed,
            )
        })
        .collect();
    if aux.is_empty() {
        return Ok(rows.iter().all(|r| r.rhs >= -TOL_CLOSURE));
    }
    lp::feasible(aux.len(), &rows)
}

/// Existence of nonnegative auxiliary values in some branch of `system`.
pub fn exists_aux(system: &ConstraintSystem, rates: [f64; 3]) -> Result<bool> {
    for b in system.branches() {
        if lp_feasible(&b, rates)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// One exported row: `a·R ≤ constant` in branch `branch`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRow {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub constant: f64,
    pub branch: usize,
}

/// All projected constraints, sorted lexicographically.
pub fn region_rows(region: &RegionUnion) -> Vec<RegionRow> {
    let mut rows: Vec<RegionRow> = region
        .branches
        .iter()
        .flat_map(|b| {
            b.polyhedron.constraints.iter().map(move |c| RegionRow {
                r1: c.coeff(Var::R1).to_f64().unwrap_or(0.0),
                r2: c.coeff(Var::R2).to_f64().unwrap_or(0.0),
                r3: c.coeff(Var::R3).to_f64().unwrap_or(0.0),
                constant: c.constant,
                branch: b.id,
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        [a.r1, a.r2, a.r3, a.constant, a.branch as f64]
            .partial_cmp(&[b.r1, b.r2, b.r3, b.constant, b.branch as f64])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    rows
}

/// Ray-shooting boundary samples: for each direction in a simplex grid of
/// the nonnegative octant, the farthest union point along it.
pub fn boundary_points(region: &RegionUnion, resolution: usize) -> Result<Vec<[f64; 3]>> {
    let k = resolution.max(1);
    let mut pts = Vec::new();
    for i in 0..=k {
        for j in 0..=(k - i) {
            let d = [i as f64, j as f64, (k - i - j) as f64];
            let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let d = [d[0] / norm, d[1] / norm, d[2] / norm];
            let mut best: Option<f64> = None;
            for b in &region.branches {
                if !b.polyhedron.contains_rates([0.0; 3])? {
                    continue;
                }
                let mut t = f64::INFINITY;
                for c in &b.polyhedron.constraints {
                    let ad: f64 = Var::RATES
                        .iter()
                        .zip(d)
                        .map(|(v, x)| c.coeff(*v).to_f64().unwrap_or(0.0) * x)
                        .sum();
                    if ad > 1e-12 {
                        t = t.min(c.constant / ad);
                    }
                }
                if t.is_finite() {
                    best = Some(best.map_or(t, |bt: f64| bt.max(t)));
                }
            }
            if let Some(t) = best {
                pts.push([t * d[0], t * d[1], t * d[2]]);
            }
        }
    }
    Ok(pts)
}

/// Agreement between the eliminated region (some `l`) and existence of
/// auxiliary values for the single-codebook system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cor1Comparison {
    pub samples: usize,
    pub both: usize,
    pub neither: usize,
    /// Accepted by the eliminated region only (soundness violation).
    pub cor1_only: usize,
    /// Accepted by the auxiliary system only.
    pub thm1_only: usize,
    pub disagreement_fraction: f64,
    pub cor1_only_points: Vec<[f64; 3]>,
}

impl Cor1Comparison {
    pub fn sound(&self) -> bool {
        self.cor1_only == 0
    }
}

pub fn compare_cor1(
    thm1: &ConstraintSystem,
    cor1: &Cor1Constants,
    points: &[[f64; 3]],
) -> Result<Cor1Comparison> {
    let systems = [cor1_system_from_constants(cor1, 2)?, cor1_system_from_constants(cor1, 3)?];
    let mut cmp = Cor1Comparison {
        samples: points.len(),
        both: 0,
        neither: 0,
        cor1_only: 0,
        thm1_only: 0,
        disagreement_fraction: 0.0,
        cor1_only_points: Vec::new(),
    };
    for &r in points {
        let a = rate_assignment(r);
        let mut in_cor1 = false;
        for s in &systems {
            in_cor1 |= check_point(s, &a)?.pass;
        }
        let in_thm1 = exists_aux(thm1, r)?;
        match (in_cor1, in_thm1) {
            (true, true) => cmp.both += 1,
            (false, false) => cmp.neither += 1,
            (true, false) => {
                cmp.cor1_only += 1;
                cmp.cor1_only_points.push(r);
            }
            (false, true) => cmp.thm1_only += 1,
        }
    }
    if !points.is_empty() {
        cmp.disagreement_fraction = (cmp.cor1_only + cmp.thm1_only) as f64 / points.len() as f64;
    }
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::examples::{build_ex1, check_separation_ex1, EX1_REFERENCE};
    use crate::rate_region::{build_thm1_system, thm1_system_from_constants, SystemKind, Thm1Constants};

    fn lc(label: &str, terms: &[(Var, i64)], sense: Sense, b: f64) -> LinearConstraint {
        LinearConstraint::new(label, terms, sense, b)
    }

    #[test]
    fn interval_elimination_is_tautology() {
        let p = Polyhedron::new(
            vec![Var::B1],
            &[lc("lo", &[(Var::B1, 1)], Sense::Ge, 1.0), lc("hi", &[(Var::B1, 1)], Sense::Le, 3.0)],
        );
        let e = fme_eliminate(&p, Var::B1);
        assert!(e.constraints.is_empty() && !e.infeasible);
        let p = Polyhedron::new(
            vec![Var::B1],
            &[lc("lo", &[(Var::B1, 1)], Sense::Ge, 3.0), lc("hi", &[(Var::B1, 1)], Sense::Le, 1.0)],
        );
        assert!(fme_eliminate(&p, Var::B1).infeasible);
    }

    #[test]
    fn carried_sum() {
        let p = Polyhedron::new(
            vec![Var::R1, Var::B1],
            &[
                lc("a", &[(Var::R1, 1), (Var::B1, 1)], Sense::Le, 2.0),
                lc("b", &[(Var::B1, 1)], Sense::Ge, 0.0),
            ],
        );
        let e = fme_eliminate(&p, Var::B1);
        assert_eq!(e.constraints.len(), 1);
        let c = &e.constraints[0];
        assert_eq!(c.coeff(Var::R1), Rational64::from_integer(1));
        assert_eq!(c.constant, 2.0);
    }

    #[test]
    fn lp_feasible_basics() {
        assert!(!lp_feasible(&[lc("x", &[(Var::B1, 1)], Sense::Le, -1.0)], [0.0; 3]).unwrap());
        assert!(lp_feasible(&[lc("x", &[(Var::B1, 1)], Sense::Ge, 0.0)], [0.0; 3]).unwrap());
    }

    fn random_system(rng: &mut ChaCha8Rng) -> Polyhedron {
        let vars = [Var::R1, Var::R2, Var::B1];
        let mut cs = Vec::new();
        for i in 0..6 {
            let terms: Vec<(Var, i64)> = vars.iter().map(|v| (*v, rng.gen_range(-3..=3))).collect();
            cs.push(lc(&format!("c{i}"), &terms, Sense::Le, rng.gen_range(-1.0..3.0)));
        }
        Polyhedron::new(vars.to_vec(), &cs)
    }

    #[test]
    fn random_projection_matches_lp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let p = random_system(&mut rng);
            let proj = fme_eliminate(&p, Var::B1);
            for _ in 0..100 {
                let r = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), 0.0];
                // B1 free in sign here: split it for the oracle
                let shifted: Vec<LinearConstraint> = p
                    .constraints
                    .iter()
                    .map(|c| {
                        let mut c2 = c.clone();
                        let k = c.coeff(Var::B1);
                        if !k.is_zero() {
                            c2.coeffs.insert(Var::B2, -k);
                        }
                        c2
                    })
                    .collect();
                let a = rate_assignment(r);
                assert_eq!(proj.contains(&a).unwrap(), lp_feasible(&shifted, r).unwrap());
            }
        }
    }

    fn ex1_system() -> ConstraintSystem {
        let inst = build_ex1(EX1_REFERENCE).unwrap();
        build_thm1_system(&inst.state().unwrap(), &inst.cost, EX1_REFERENCE.tau).unwrap()
    }

    #[test]
    fn ex1_projection_contains_capacity_point() {
        let sys = ex1_system();
        let region = project_thm1(&sys).unwrap();
        assert_eq!(region.branches.len(), 4);
        let s = check_separation_ex1(EX1_REFERENCE).unwrap();
        let c = [s.c1, s.c2, s.c3];
        assert!(exists_aux(&sys, c).unwrap());
        assert!(region.contains_rates(c).unwrap());
        assert!(!region.contains_rates([s.c1 + 0.01, s.c2, s.c3]).unwrap());
    }

    #[test]
    fn zero_constants_give_origin_only() {
        let zero = Thm1Constants {
            q: 2,
            log_q: 1.0,
            covering: Thm1Constants::evaluate(&build_ex1(EX1_REFERENCE).unwrap().state().unwrap())
                .unwrap()
                .covering
                .into_iter()
                .map(|mut c| {
                    c.rhs = 0.0;
                    c
                })
                .collect(),
            alg: [0.0; 2],
            rx1_u1: 0.0,
            rx1_w: 0.0,
            rx1_joint: 0.0,
            rx: [0.0; 2],
        };
        let region = project_thm1(&thm1_system_from_constants(&zero).unwrap()).unwrap();
        assert!(region.contains_rates([0.0; 3]).unwrap());
        for r in [[1e-3, 0.0, 0.0], [0.0, 1e-3, 0.0], [0.0, 0.0, 1e-3]] {
            assert!(!region.contains_rates(r).unwrap());
        }
    }

    #[test]
    fn projection_agrees_with_lp_and_unpruned() {
        let sys = ex1_system();
        let pruned = project_thm1(&sys).unwrap();
        let raw = project_system(&sys, &THM1_ORDER, false).unwrap();
        assert!(pruned.constraint_count() <= raw.constraint_count());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let r = [rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4)];
            let lp = exists_aux(&sys, r).unwrap();
            assert_eq!(pruned.contains_rates(r).unwrap(), lp, "{r:?}");
            assert_eq!(raw.contains_rates(r).unwrap(), lp, "{r:?}");
        }
    }

    #[test]
    fn order_invariance() {
        let sys = ex1_system();
        let base = project_system(&sys, &THM1_ORDER, false).unwrap();
        let orders = [
            [Var::B1, Var::S3, Var::S2],
            [Var::S2, Var::B1, Var::S3],
            [Var::S2, Var::S3, Var::B1],
            [Var::S3, Var::B1, Var::S2],
            [Var::S3, Var::S2, Var::B1],
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<[f64; 3]> = (0..200)
            .map(|_| [rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4)])
            .collect();
        for o in orders {
            let other = project_system(&sys, &o, false).unwrap();
            for r in &pts {
                assert_eq!(base.contains_rates(*r).unwrap(), other.contains_rates(*r).unwrap());
            }
        }
    }

    #[test]
    fn projection_is_downward_closed() {
        let region = project_thm1(&ex1_system()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let r = [rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4)];
            if region.contains_rates(r).unwrap() {
                let s = [r[0] * rng.gen::<f64>(), r[1] * rng.gen::<f64>(), r[2] * rng.gen::<f64>()];
                assert!(region.contains_rates(s).unwrap());
            }
        }
    }

    #[test]
    fn rates_only_system_is_idempotent() {
        let st = build_ex1(EX1_REFERENCE).unwrap().state().unwrap();
        let cor = crate::rate_region::build_cor1_system(&st, 3).unwrap();
        assert_eq!(cor.kind, SystemKind::Cor1 { l: 3 });
        let region = project_system(&cor, &[], true).unwrap();
        assert_eq!(region.branches.len(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let r = [rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4)];
            assert_eq!(
                region.contains_rates(r).unwrap(),
                check_point(&cor, &rate_assignment(r)).unwrap().pass
            );
        }
    }

    #[test]
    fn exports_are_sorted_and_bounded() {
        let region = project_thm1(&ex1_system()).unwrap();
        let rows = region_rows(&region);
        assert_eq!(rows.len(), region.constraint_count());
        for w in rows.windows(2) {
            assert!([w[0].r1, w[0].r2, w[0].r3] <= [w[1].r1, w[1].r2, w[1].r3]);
        }
        let pts = boundary_points(&region, 6).unwrap();
        assert_eq!(pts.len(), 28);
        for p in pts {
            assert!(region.contains_rates(p).unwrap());
            let out = [p[0] * 1.01 + 1e-6, p[1] * 1.01 + 1e-6, p[2] * 1.01 + 1e-6];
            assert!(!region.contains_rates(out).unwrap());
        }
    }
}
