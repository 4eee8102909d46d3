use crate::cq_state::{EntropySource, TheoremState};
use crate::error::{Error, Result};

use super::constants::{Cor1Constants, Thm1Constants, Thm2Constants};
use super::{ConstraintSystem, CostCheck, LinearConstraint, SystemKind, Var};

type Lc = LinearConstraint;

fn nonneg(vars: &[Var]) -> Vec<Lc> {
    vars.iter()
        .map(|&v| Lc::ge(format!("nonneg:{v}"), &[(v, 1)], 0.0))
        .collect()
}

/// Covering and algebraic-closure bounds shared by both theorems. `t_of`
/// names the variable carrying `T_a·log2 q`.
fn source_coding(
    covering: &[super::constants::CoveringBound],
    alg: [f64; 2],
    t_of: fn(usize) -> Var,
) -> (Vec<Lc>, Vec<Vec<Lc>>) {
    let mut conj = Vec::new();
    for cb in covering {
        let mut terms = Vec::new();
        for &a in &cb.a {
            terms.push((Var::s(a), 1));
            terms.push((t_of(a), -1));
        }
        if cb.d {
            terms.push((Var::B1, 1));
        }
        conj.push(Lc::ge(cb.label(), &terms, cb.rhs));
    }
    let groups = [false, true]
        .into_iter()
        .map(|d| {
            [2usize, 3]
                .into_iter()
                .map(|j| {
                    let mut terms = vec![(Var::s(j), 1)];
                    if d {
                        terms.push((Var::B1, 1));
                    }
                    let label = format!("alg[D={{{}}}]:S{j}", if d { "1" } else { "" });
                    Lc::ge(label, &terms, alg[d as usize])
                })
                .collect()
        })
        .collect();
    (conj, groups)
}

/// Rx 1 bounds, with `r1` the variable carrying Rx 1's rate.
fn rx1_bounds(r1: Var, u1: f64, w: f64, joint: f64) -> Vec<Lc> {
    let mut out = vec![Lc::le("rx1.u1", &[(r1, 1), (Var::B1, 1)], u1)];
    for j in [2, 3] {
        out.push(Lc::le(format!("rx1.w:S{j}"), &[(Var::s(j), 1)], w));
    }
    for j in [2, 3] {
        out.push(Lc::le(
            format!("rx1.joint:S{j}"),
            &[(r1, 1), (Var::B1, 1), (Var::s(j), 1)],
            joint,
        ));
    }
    out
}

/// The single-codebook system over `R1, R2, R3, B1, S2, S3` from precomputed
/// right sides. `T_j·log2 q` is substituted by `R_j`.
pub fn thm1_system_from_constants(c: &Thm1Constants) -> Result<ConstraintSystem> {
    let vars = vec![Var::R1, Var::R2, Var::R3, Var::B1, Var::S2, Var::S3];
    let (mut conj, groups) = source_coding(&c.covering, c.alg, Var::r);
    conj.extend(rx1_bounds(Var::R1, c.rx1_u1, c.rx1_w, c.rx1_joint));
    for j in [2, 3] {
        conj.push(Lc::le(format!("rx{j}"), &[(Var::s(j), 1)], c.rx[j - 2]));
    }
    conj.extend(nonneg(&vars));
    ConstraintSystem::new(SystemKind::Thm1, vars, conj, groups)
}

/// Single-codebook system for `state` with the cost side condition.
pub fn build_thm1_system(state: &TheoremState, cost: &[f64], cost_tau: f64) -> Result<ConstraintSystem> {
    let expected = state.pmf().expected_cost(cost)?;
    let consts = Thm1Constants::evaluate(state)?;
    Ok(thm1_system_from_constants(&consts)?.with_cost(CostCheck::new(expected, cost_tau)))
}

/// The eliminated rates-only region for a fixed `l ∈ {2, 3}`; every `min` on
/// a right side becomes one conjunct per argument.
pub fn cor1_system_from_constants(c: &Cor1Constants, l: usize) -> Result<ConstraintSystem> {
    if l != 2 && l != 3 {
        return Err(Error::InvalidParameter(format!("l = {l} is not in {{2, 3}}")));
    }
    let lb = 5 - l;
    let (rl, rlb) = (Var::r(l), Var::r(lb));
    let (r1, r2, r3) = (Var::R1, Var::R2, Var::R3);
    let k = c.k;
    let ups = |j: usize| c.ups(j);
    let h_v = |j: usize| c.hv(j);
    let h_v_u1 = |j: usize| c.h_v_given_u1[j - 2];
    let i_u1 = |j: usize| c.i_u1_v[j - 2];
    let mut conj = Vec::new();
    let mut push = |label: &str, terms: &[(Var, i64)], rhs: f64| conj.push(Lc::le(label, terms, rhs));

    push("cor1.1:R2", &[(r2, 1)], ups(2) + h_v(2));
    push("cor1.1:R3", &[(r3, 1)], ups(3) + h_v(3));
    push("cor1.2", &[(r2, 1), (r3, 1)], ups(2) + ups(3) + c.h_v2v3);

    push("cor1.3a", &[(r1, 1)], c.i_u1_y1w);
    push("cor1.3b", &[(r1, 1)], k + c.gamma12);
    push("cor1.3c", &[(r1, 1)], c.i_u1_y1w + c.gamma12 + ups(l));

    let base_lb = h_v(lb) - i_u1(lb);
    push("cor1.4a", &[(r1, 1), (rlb, 1)], base_lb + k);
    push("cor1.4b", &[(r1, 1), (rlb, 1)], base_lb + c.i_u1_y1w + ups(lb));

    push("cor1.5a", &[(r1, 1), (rlb, 1)], base_lb + c.gamma + k + ups(lb));
    push("cor1.5b", &[(r1, 1), (rlb, 1)], h_v(lb) + c.gamma12 + k + ups(l));

    push("cor1.6a", &[(r1, 1), (rl, 1)], h_v_u1(l) + k);
    push("cor1.6b", &[(r1, 1), (rl, 1)], h_v_u1(l) + c.i_u1_y1w + ups(l));

    let all = [(r1, 1), (r2, 1), (r3, 1)];
    let h23_u1 = c.h_v2v3_given_u1;
    push("cor1.7a", &all, k + h23_u1 + ups(2).min(ups(3)));
    push("cor1.7b", &all, h23_u1 + c.i_u1_y1w + ups(2) + ups(3));
    push("cor1.7c", &all, k + h23_u1 + c.gamma12 + 2.0 * ups(l));
    push("cor1.7d", &all, h_v(3) + h_v_u1(2) + ups(2) + k);
    push("cor1.7e", &all, h_v(2) + h_v_u1(3) + ups(3) + k);

    push(
        "cor1.8",
        &[(r1, 1), (r2, 1), (r3, 2)],
        2.0 * h_v(3) + h_v(2) - i_u1(3) - c.i_v2_v3 + k + 2.0 * ups(3),
    );
    push(
        "cor1.9",
        &[(r1, 1), (r2, 2), (r3, 1)],
        2.0 * h_v(2) + h_v(3) - i_u1(2) + k + 2.0 * ups(2),
    );
    push(
        "cor1.10",
        &[(r1, 2), (r2, 1), (r3, 1)],
        2.0 * k - c.i_v2v3_u1 - c.i_v2_v3 + h_v(2) + h_v(3),
    );

    let vars = Var::RATES.to_vec();
    conj.extend(nonneg(&vars));
    ConstraintSystem::new(SystemKind::Cor1 { l }, vars, conj, vec![])
}

pub fn build_cor1_system(state: &dyn EntropySource, l: usize) -> Result<ConstraintSystem> {
    cor1_system_from_constants(&Cor1Constants::evaluate(state)?, l)
}

/// The rate-splitting system over `L1..L3, T2, T3, B1..B3, S2, S3`, where
/// `R1 = L1` and `R_j = L_j + T_j·log2 q`.
pub fn thm2_system_from_constants(c: &Thm2Constants) -> Result<ConstraintSystem> {
    let vars = vec![
        Var::L1,
        Var::L2,
        Var::L3,
        Var::T2,
        Var::T3,
        Var::B1,
        Var::B2,
        Var::B3,
        Var::S2,
        Var::S3,
    ];
    let (mut conj, groups) = source_coding(&c.covering, c.alg, Var::t);
    conj.extend(rx1_bounds(Var::L1, c.rx1_u1, c.rx1_w, c.rx1_joint));
    for j in [2, 3] {
        let i = j - 2;
        let (s, l, b) = (Var::s(j), Var::l(j), Var::b(j));
        conj.push(Lc::le(format!("rx{j}"), &[(s, 1)], c.rx_v[i]));
        conj.push(Lc::le(format!("rx{j}.u"), &[(l, 1), (b, 1)], c.rx_u[i]));
        conj.push(Lc::le(format!("rx{j}.joint"), &[(s, 1), (l, 1), (b, 1)], c.rx_joint[i]));
    }
    conj.extend(nonneg(&vars));
    ConstraintSystem::new(SystemKind::Thm2, vars, conj, groups)
}

pub fn build_thm2_system(state: &TheoremState, cost: &[f64], cost_tau: f64) -> Result<ConstraintSystem> {
    let expected = state.pmf().expected_cost(cost)?;
    let consts = Thm2Constants::evaluate(state)?;
    Ok(thm2_system_from_constants(&consts)?.with_cost(CostCheck::new(expected, cost_tau)))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use proptest::prelude::*;

    use super::*;
    use crate::cq_state::{
        build_theorem_state, diagonal_marginals, ClassicalJoint, ClassicalTuple, InputPmf,
    };
    use crate::rate_region::{check_point, rate_assignment, thm1_assignment, Sense};

    fn bsc(p: f64) -> Vec<Vec<f64>> {
        vec![vec![1.0 - p, p], vec![p, 1.0 - p]]
    }

    /// `x = (u1, v2, v3)` packed as `u1 + 2 v2 + 4 v3`, independent inputs.
    fn product_pmf(p_u1: f64, p_v: [f64; 2]) -> InputPmf {
        let mut entries = Vec::new();
        for u1 in 0..2u32 {
            for v2 in 0..2u32 {
                for v3 in 0..2u32 {
                    let p = [1.0 - p_u1, p_u1][u1 as usize]
                        * [1.0 - p_v[0], p_v[0]][v2 as usize]
                        * [1.0 - p_v[1], p_v[1]][v3 as usize];
                    let t = ClassicalTuple {
                        x: u1 + 2 * v2 + 4 * v3,
                        u: [u1, 0, 0],
                        v2,
                        v3,
                    };
                    entries.push((t, p));
                }
            }
        }
        InputPmf {
            x_size: 8,
            u_sizes: [2, 1, 1],
            q: 2,
            entries,
        }
    }

    /// Rx1 sees `x1 ⊕ x2 ⊕ x3` through a BSC, Rx j sees `x_j` through a BSC.
    fn additive_kernels(eps: f64, d2: f64, d3: f64) -> [Vec<Vec<f64>>; 3] {
        let row = |bit: u32, p: f64| bsc(p)[bit as usize].clone();
        let mut k = [Vec::new(), Vec::new(), Vec::new()];
        for x in 0..8u32 {
            let (a, b, c) = (x & 1, (x >> 1) & 1, (x >> 2) & 1);
            k[0].push(row(a ^ b ^ c, eps));
            k[1].push(row(b, d2));
            k[2].push(row(c, d3));
        }
        k
    }

    fn state(p_u1: f64, eps: f64) -> TheoremState {
        let kern = additive_kernels(eps, 0.1, 0.2);
        build_theorem_state(product_pmf(p_u1, [0.5, 0.5]), diagonal_marginals(&kern).unwrap()).unwrap()
    }

    #[test]
    fn independent_uniforms_have_zero_covering_bounds() {
        let st = state(0.1, 0.05);
        let c = Thm1Constants::evaluate(&st).unwrap();
        assert_eq!(c.covering.len(), 7);
        for cb in &c.covering {
            assert!(cb.rhs.abs() < 1e-12, "{cb:?}");
        }
        assert!(c.alg.iter().all(|a| a.abs() < 1e-12));
    }

    #[test]
    fn origin_passes_and_violation_reports_slack() {
        let st = state(0.1, 0.05);
        let cost: Vec<f64> = (0..8).map(|x| (x & 1) as f64).collect();
        let sys = build_thm1_system(&st, &cost, 0.1).unwrap();
        assert!(sys.cost.unwrap().satisfied);
        let origin = thm1_assignment([0.0; 3], 0.0, [0.0, 0.0]);
        assert!(check_point(&sys, &origin).unwrap().pass);
        let bound = sys.find("rx1.u1").unwrap().constant;
        let bad = thm1_assignment([bound + 0.01, 0.0, 0.0], 0.0, [0.0, 0.0]);
        let rep = check_point(&sys, &bad).unwrap();
        assert!(!rep.pass);
        assert!((rep.slack("rx1.u1").unwrap() + 0.01).abs() < 1e-12);
    }

    #[test]
    fn cost_length_mismatch() {
        let st = state(0.1, 0.05);
        assert!(matches!(
            build_thm1_system(&st, &[0.0, 1.0], 0.1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn cost_violation_is_reported() {
        let st = state(0.3, 0.05);
        let cost: Vec<f64> = (0..8).map(|x| (x & 1) as f64).collect();
        let sys = build_thm1_system(&st, &cost, 0.1).unwrap();
        assert!(!sys.cost.unwrap().satisfied);
    }

    #[test]
    fn thm1_t_never_free() {
        let st = state(0.1, 0.05);
        let sys = build_thm1_system(&st, &[0.0; 8], 1.0).unwrap();
        assert!(sys
            .all_constraints()
            .all(|c| c.coeff(Var::T2).numer() == &0 && c.coeff(Var::T3).numer() == &0));
        assert_eq!(sys.disjunction_groups.len(), 2);
        assert_eq!(sys.branches().len(), 4);
    }

    #[test]
    fn cor1_origin_member_and_bad_l() {
        let st = state(0.1, 0.05);
        for l in [2, 3] {
            let sys = build_cor1_system(&st, l).unwrap();
            assert!(check_point(&sys, &rate_assignment([0.0; 3])).unwrap().pass);
        }
        assert!(build_cor1_system(&st, 1).is_err());
    }

    #[test]
    fn quantum_and_classical_routes_agree() {
        let kern = additive_kernels(0.07, 0.11, 0.23);
        let pmf = product_pmf(0.2, [0.3, 0.6]);
        let q = build_theorem_state(pmf.clone(), diagonal_marginals(&kern).unwrap()).unwrap();
        let c = ClassicalJoint::new(pmf, &kern).unwrap();
        let (a, b) = (Thm1Constants::evaluate(&q).unwrap(), Thm1Constants::evaluate(&c).unwrap());
        let close = |x: f64, y: f64| (x - y).abs() < 1e-9;
        assert!(close(a.rx1_u1, b.rx1_u1) && close(a.rx1_w, b.rx1_w) && close(a.rx1_joint, b.rx1_joint));
        for i in 0..2 {
            assert!(close(a.rx[i], b.rx[i]) && close(a.alg[i], b.alg[i]));
        }
        for (x, y) in a.covering.iter().zip(&b.covering) {
            assert!(close(x.rhs, y.rhs));
        }
    }

    #[test]
    fn thm2_with_trivial_splits_matches_thm1() {
        let kern = additive_kernels(0.07, 0.11, 0.23);
        let st = build_theorem_state(product_pmf(0.2, [0.3, 0.6]), diagonal_marginals(&kern).unwrap())
            .unwrap();
        let s1 = build_thm1_system(&st, &[0.0; 8], 1.0).unwrap();
        let s2 = build_thm2_system(&st, &[0.0; 8], 1.0).unwrap();
        // substitute L_j = B_j = 0 for j = 2, 3 and T_j -> R_j, L1 -> R1
        let map = |v: Var| match v {
            Var::L1 => Some(Var::R1),
            Var::T2 => Some(Var::R2),
            Var::T3 => Some(Var::R3),
            Var::L2 | Var::L3 | Var::B2 | Var::B3 => None,
            other => Some(other),
        };
        for c1 in s1.all_constraints() {
            if c1.label.starts_with("nonneg") {
                continue;
            }
            let c2 = s2.find(&c1.label).unwrap_or_else(|| panic!("{} missing", c1.label));
            assert!((c1.constant - c2.constant).abs() < 1e-9, "{}", c1.label);
            let mapped: BTreeMap<Var, _> = c2
                .coeffs
                .iter()
                .filter_map(|(v, k)| map(*v).map(|m| (m, *k)))
                .collect();
            assert_eq!(mapped, c1.coeffs, "{}", c1.label);
        }
        // the split-only bounds collapse to L_j + B_j <= 0
        for j in [2, 3] {
            assert!(s2.find(&format!("rx{j}.u")).unwrap().constant.abs() < 1e-12);
        }
    }

    #[test]
    fn thm2_deterministic_state_is_all_zero() {
        let pmf = InputPmf {
            x_size: 1,
            u_sizes: [1, 1, 1],
            q: 2,
            entries: vec![(
                ClassicalTuple {
                    x: 0,
                    u: [0, 0, 0],
                    v2: 0,
                    v3: 0,
                },
                1.0,
            )],
        };
        let kern = [vec![vec![1.0, 0.0]], vec![vec![1.0, 0.0]], vec![vec![1.0, 0.0]]];
        let st = build_theorem_state(pmf, diagonal_marginals(&kern).unwrap()).unwrap();
        let c = Thm2Constants::evaluate(&st).unwrap();
        assert_eq!(c.rx1_u1, 0.0);
        assert_eq!(c.rx_u, [0.0, 0.0]);
        // every entropy vanishes, so only the log q offsets remain
        assert!(c.rx_v.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(c.covering.iter().all(|cb| (cb.rhs - cb.a.len() as f64).abs() < 1e-12));
    }

    #[test]
    fn thm2_independent_uniforms_zero_covering() {
        let st = state(0.1, 0.05);
        let c = Thm2Constants::evaluate(&st).unwrap();
        assert!(c.covering.iter().all(|cb| cb.rhs.abs() < 1e-12));
        let sys = thm2_system_from_constants(&c).unwrap();
        assert_eq!(sys.kind, SystemKind::Thm2);
        assert!(sys.all_constraints().all(|c| c.sense == Sense::Le || c.sense == Sense::Ge));
    }

    fn random_state(
        p: &[f64],
        k: &[f64],
    ) -> TheoremState {
        // x = (u1, v2, v3) bits; random joint pmf and random per-x output rows
        let total: f64 = p.iter().sum();
        let mut entries = Vec::new();
        for x in 0..8u32 {
            let t = ClassicalTuple {
                x,
                u: [x & 1, 0, 0],
                v2: (x >> 1) & 1,
                v3: (x >> 2) & 1,
            };
            entries.push((t, p[x as usize] / total));
        }
        let pmf = InputPmf {
            x_size: 8,
            u_sizes: [2, 1, 1],
            q: 2,
            entries,
        };
        let mut kern = [Vec::new(), Vec::new(), Vec::new()];
        for j in 0..3 {
            for x in 0..8 {
                let a = k[j * 8 + x];
                kern[j].push(vec![a, 1.0 - a]);
            }
        }
        build_theorem_state(pmf, diagonal_marginals(&kern).unwrap()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn downward_closed(
            p in prop::collection::vec(0.01f64..1.0, 8),
            k in prop::collection::vec(0.0f64..1.0, 24),
            rates in prop::array::uniform3(0.0f64..1.0),
            aux in prop::array::uniform3(0.0f64..1.5),
            shrink in prop::array::uniform3(0.0f64..1.0),
        ) {
            let st = random_state(&p, &k);
            let sys = build_thm1_system(&st, &[0.0; 8], 1.0).unwrap();
            let cor = [build_cor1_system(&st, 2).unwrap(), build_cor1_system(&st, 3).unwrap()];
            let a = thm1_assignment(rates, aux[0], [aux[1], aux[2]]);
            let smaller = [rates[0] * shrink[0], rates[1] * shrink[1], rates[2] * shrink[2]];
            if check_point(&sys, &a).unwrap().pass {
                let b = thm1_assignment(smaller, aux[0], [aux[1], aux[2]]);
                prop_assert!(check_point(&sys, &b).unwrap().pass);
            }
            for c in &cor {
                if check_point(c, &rate_assignment(rates)).unwrap().pass {
                    prop_assert!(check_point(c, &rate_assignment(smaller)).unwrap().pass);
                }
            }
        }
    }
}
