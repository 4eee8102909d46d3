//! The two additive three-receiver example channels: a commuting one with
//! binary symmetric receivers, and a rotated one whose receivers 2 and 3 see
//! non-orthogonal pure states.

use num_complex::Complex64;
use serde::Serialize;

use crate::cq_state::{
    bconv, build_theorem_state, hb, ClassicalJoint, ClassicalTuple, InputPmf, TheoremState,
};
use crate::error::{Error, Result};
use crate::quantum::DensityOperator;
use crate::rate_region::{
    build_thm1_system, check_point, thm1_assignment, PointReport, Thm1Constants,
};

/// Commuting example parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct Ex1Params {
    pub tau: f64,
    pub eps: f64,
    pub delta: f64,
}

/// Rotated example parameters (angles in radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct Ex2Params {
    pub tau: f64,
    pub eps: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl Ex2Params {
    /// `δ̃_j = (1 + cos θ_j)/2` for `j = 2, 3`.
    pub fn delta_tilde(&self) -> [f64; 2] {
        [
            (1.0 + self.theta2.cos()) / 2.0,
            (1.0 + self.theta3.cos()) / 2.0,
        ]
    }
}

fn check_tau_eps(tau: f64, eps: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 0.5) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must lie in (0, 1/2)")));
    }
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in [0, 1/2]")));
    }
    Ok(())
}

impl Ex1Params {
    pub fn validate(&self) -> Result<()> {
        check_tau_eps(self.tau, self.eps)?;
        if !(0.0..=0.5).contains(&self.delta) {
            return Err(Error::InvalidParameter(format!(
                "delta = {} must lie in [0, 1/2]",
                self.delta
            )));
        }
        Ok(())
    }
}

impl Ex2Params {
    pub fn validate(&self) -> Result<()> {
        check_tau_eps(self.tau, self.eps)?;
        for th in [self.theta2, self.theta3] {
            if !(th > 0.0 && th < std::f64::consts::FRAC_PI_2) {
                return Err(Error::InvalidParameter(format!("theta = {th} must lie in (0, pi/2)")));
            }
        }
        Ok(())
    }
}

/// A channel with its canonical input distribution and cost vector. Input
/// `x = (x1, x2, x3)` is indexed as `x1 + 2 x2 + 4 x3`.
#[derive(Debug, Clone)]
pub struct ExampleInstance {
    pub marginals: Vec<[DensityOperator; 3]>,
    pub pmf: InputPmf,
    /// `κ(x) = x1`.
    pub cost: Vec<f64>,
    /// Per-receiver classical kernels when every marginal is diagonal.
    pub kernels: Option<[Vec<Vec<f64>>; 3]>,
}

impl ExampleInstance {
    pub fn state(&self) -> Result<TheoremState> {
        build_theorem_state(self.pmf.clone(), self.marginals.clone())
    }

    pub fn classical_joint(&self) -> Option<Result<ClassicalJoint>> {
        self.kernels
            .as_ref()
            .map(|k| ClassicalJoint::new(self.pmf.clone(), k))
    }
}

pub fn split_input(x: u32) -> (u32, u32, u32) {
    (x & 1, (x >> 1) & 1, (x >> 2) & 1)
}

/// `U1 = X1 ~ Ber(τ)` independent of uniform `V2 = X2`, `V3 = X3`.
pub fn canonical_pmf(tau: f64) -> InputPmf {
    let entries = (0..8u32)
        .map(|x| {
            let (x1, x2, x3) = split_input(x);
            let p = if x1 == 0 { (1.0 - tau) / 4.0 } else { tau / 4.0 };
            (
                ClassicalTuple {
                    x,
                    u: [x1, 0, 0],
                    v2: x2,
                    v3: x3,
                },
                p,
            )
        })
        .collect();
    InputPmf {
        x_size: 8,
        u_sizes: [2, 1, 1],
        q: 2,
        entries,
    }
}

fn hamming_cost() -> Vec<f64> {
    (0..8u32).map(|x| split_input(x).0 as f64).collect()
}

/// `σ_b(η)` as a probability row.
fn flip_row(b: u32, eta: f64) -> Vec<f64> {
    if b == 0 {
        vec![1.0 - eta, eta]
    } else {
        vec![eta, 1.0 - eta]
    }
}

pub fn build_ex1(p: Ex1Params) -> Result<ExampleInstance> {
    p.validate()?;
    let mut kernels = [Vec::new(), Vec::new(), Vec::new()];
    for x in 0..8u32 {
        let (x1, x2, x3) = split_input(x);
        kernels[0].push(flip_row(x1 ^ x2 ^ x3, p.eps));
        kernels[1].push(flip_row(x2, p.delta));
        kernels[2].push(flip_row(x3, p.delta));
    }
    let marginals = crate::cq_state::diagonal_marginals(&kernels)?;
    Ok(ExampleInstance {
        marginals,
        pmf: canonical_pmf(p.tau),
        cost: hamming_cost(),
        kernels: Some(kernels),
    })
}

fn rotated_state(b: u32, theta: f64) -> Result<DensityOperator> {
    let psi = if b == 0 {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    } else {
        [Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0)]
    };
    DensityOperator::pure(&psi)
}

pub fn build_ex2(p: Ex2Params) -> Result<ExampleInstance> {
    p.validate()?;
    let mut marginals = Vec::with_capacity(8);
    for x in 0..8u32 {
        let (x1, x2, x3) = split_input(x);
        marginals.push([
            DensityOperator::diagonal(&flip_row(x1 ^ x2 ^ x3, p.eps))?,
            rotated_state(x2, p.theta2)?,
            rotated_state(x3, p.theta3)?,
        ]);
    }
    Ok(ExampleInstance {
        marginals,
        pmf: canonical_pmf(p.tau),
        cost: hamming_cost(),
        kernels: None,
    })
}

/// Single-letter capacities and the two separation inequalities of the
/// commuting example.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub params: Ex1Params,
    /// `τ∗ε < δ`.
    pub valid_noise_order: bool,
    /// `h_b(δ) < (1 + h_b(τ∗ε))/2`.
    pub valid_entropy_order: bool,
    /// Rx 1 capacity without a cost constraint, `1 − h_b(ε)`.
    pub rx1_unconstrained: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `𝒞1 < C1 + C2 + C3`: unstructured codes cannot reach `(C1, C2, C3)`.
    pub unstructured_fails: bool,
    /// `𝒞1 > C1 + max{C2, C3}`: Rx 1 can absorb the sum codebook.
    pub coset_suffices: bool,
}

pub fn check_separation_ex1(p: Ex1Params) -> Result<SeparationReport> {
    p.validate()?;
    let te = bconv(p.tau, p.eps)?;
    let h_te = hb(te)?;
    let h_d = hb(p.delta)?;
    let big_c1 = 1.0 - hb(p.eps)?;
    let c1 = h_te - hb(p.eps)?;
    let c2 = 1.0 - h_d;
    Ok(SeparationReport {
        params: p,
        valid_noise_order: te < p.delta,
        valid_entropy_order: h_d < (1.0 + h_te) / 2.0,
        rx1_unconstrained: big_c1,
        c1,
        c2,
        c3: c2,
        unstructured_fails: big_c1 < c1 + 2.0 * c2,
        coset_suffices: big_c1 > c1 + c2,
    })
}

/// One closed-form check of a computed right side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundIdentity {
    pub name: String,
    pub computed: f64,
    pub closed_form: f64,
    pub holds: bool,
}

pub const TOL_IDENTITY: f64 = 1e-9;

fn identity(name: &str, computed: f64, closed_form: f64) -> BoundIdentity {
    BoundIdentity {
        name: name.into(),
        computed,
        closed_form,
        holds: (computed - closed_form).abs() <= TOL_IDENTITY,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop1Report {
    pub params: Ex2Params,
    pub delta_tilde: [f64; 2],
    pub theta_order: bool,
    pub constants: Thm1Constants,
    pub identities: Vec<BoundIdentity>,
    /// Every covering and algebraic lower bound vanishes.
    pub lower_bounds_zero: bool,
    /// `h(τ∗ε) + h(δ̃2) + h(δ̃3) > 1`.
    pub eq4a: bool,
    /// `1 > h(τ∗ε) + h(δ̃3)`.
    pub eq4b: bool,
    pub rates: [f64; 3],
    /// `S_j·log2 q` per receiver.
    pub s_bits: [f64; 2],
    pub b1: f64,
    pub point: PointReport,
    pub cost_satisfied: bool,
    /// Outcome when both `S_j` are set to `h_b(δ̃3)` instead of per-receiver.
    pub shared_s_passes: bool,
    pub shared_s_violations: Vec<String>,
    pub pass: bool,
}

/// Evaluates the capacity-achieving parameter choice on the rotated example:
/// `B1 = 0`, `S_j = T_j = h_b(δ̃_j)`.
pub fn verify_prop1(p: Ex2Params) -> Result<Prop1Report> {
    let inst = build_ex2(p)?;
    let state = inst.state()?;
    let consts = Thm1Constants::evaluate(&state)?;
    let dt = p.delta_tilde();
    let h_dt = [hb(dt[0])?, hb(dt[1])?];
    let h_te = hb(bconv(p.tau, p.eps)?)?;
    let h_e = hb(p.eps)?;
    let identities = vec![
        identity("rx1.u1", consts.rx1_u1, h_te - h_e),
        identity("rx1.w", consts.rx1_w, 1.0 - h_e),
        identity("rx1.joint", consts.rx1_joint, 1.0 - h_e),
        identity("rx2", consts.rx[0], h_dt[0]),
        identity("rx3", consts.rx[1], h_dt[1]),
    ];
    let lower_bounds_zero = consts.covering.iter().all(|c| c.rhs.abs() <= TOL_IDENTITY)
        && consts.alg.iter().all(|a| a.abs() <= TOL_IDENTITY);

    let sys = build_thm1_system(&state, &inst.cost, p.tau)?;
    let rates = [h_te - h_e, h_dt[0], h_dt[1]];
    let point = check_point(&sys, &thm1_assignment(rates, 0.0, h_dt))?;
    let shared = check_point(&sys, &thm1_assignment(rates, 0.0, [h_dt[1], h_dt[1]]))?;
    let shared_s_violations = shared
        .violated()
        .into_iter()
        .map(|e| e.label.clone())
        .collect();
    let cost_satisfied = sys.cost.map(|c| c.satisfied).unwrap_or(true);
    let pass = point.pass && cost_satisfied && identities.iter().all(|i| i.holds) && lower_bounds_zero;
    Ok(Prop1Report {
        params: p,
        delta_tilde: dt,
        theta_order: p.theta2 < p.theta3,
        constants: consts,
        identities,
        lower_bounds_zero,
        eq4a: h_te + h_dt[0] + h_dt[1] > 1.0,
        eq4b: 1.0 > h_te + h_dt[1],
        rates,
        s_bits: h_dt,
        b1: 0.0,
        point,
        cost_satisfied,
        shared_s_passes: shared.pass,
        shared_s_violations,
        pass,
    })
}

/// Reference instances used throughout the tests and the command line tool.
pub const EX1_REFERENCE: Ex1Params = Ex1Params {
    tau: 0.1,
    eps: 0.05,
    delta: 0.2,
};

pub fn ex2_reference() -> Ex2Params {
    Ex2Params {
        tau: 0.1,
        eps: 0.05,
        theta2: 0.9f64.acos(),
        theta3: 0.84f64.acos(),
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::cq_state::{EntropySource, QuantityExpr, Register};
    use crate::quantum::vn_entropy;
    use crate::rate_region::{build_cor1_system, rate_assignment};

    #[test]
    fn ex1_reference_separation() {
        let r = check_separation_ex1(EX1_REFERENCE).unwrap();
        assert!(r.valid_noise_order && r.valid_entropy_order);
        assert!((r.rx1_unconstrained - 0.7136).abs() < 1e-4);
        assert!((r.c1 + r.c2 + r.c3 - 0.8540).abs() < 1e-4);
        assert!((r.c1 + r.c2 - 0.5759).abs() < 1e-4);
        assert!(r.unstructured_fails && r.coset_suffices);
    }

    #[test]
    fn separation_limits() {
        let r = check_separation_ex1(Ex1Params { delta: 0.5, ..EX1_REFERENCE }).unwrap();
        assert_eq!(r.c2, 0.0);
        assert!(!r.unstructured_fails);
        let r = check_separation_ex1(Ex1Params {
            tau: 0.5 - 1e-12,
            eps: 0.0,
            delta: 0.2,
        })
        .unwrap();
        assert!((r.c1 - 1.0).abs() < 1e-9);
        assert!(!r.coset_suffices);
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(build_ex1(Ex1Params { tau: 0.6, ..EX1_REFERENCE }).is_err());
        assert!(build_ex1(Ex1Params { tau: 0.0, ..EX1_REFERENCE }).is_err());
        assert!(build_ex1(Ex1Params { delta: 0.7, ..EX1_REFERENCE }).is_err());
        let mut p = ex2_reference();
        p.theta3 = 2.0;
        assert!(build_ex2(p).is_err());
    }

    #[test]
    fn ex1_canonical_entropies() {
        let st = build_ex1(EX1_REFERENCE).unwrap().state().unwrap();
        let h = QuantityExpr::h_cond(&[Register::V2, Register::V3], &[Register::U1])
            .eval(&st)
            .unwrap();
        assert!((h - 2.0).abs() < 1e-12);
        assert!((st.entropy(&[Register::W]).unwrap() - 1.0).abs() < 1e-12);
        let i = QuantityExpr::mi(&[Register::Y1, Register::W], &[Register::U1])
            .eval(&st)
            .unwrap();
        assert!((i - 0.2978).abs() < 1e-4);
        let c = Thm1Constants::evaluate(&st).unwrap();
        let expect = hb(0.2).map(|h| 1.0 - h).unwrap();
        assert!((c.rx[0] - expect).abs() < 1e-12 && (c.rx[1] - expect).abs() < 1e-12);
    }

    #[test]
    fn noiseless_rx1_gives_binary_entropy_of_tau() {
        let st = build_ex1(Ex1Params { eps: 0.0, ..EX1_REFERENCE })
            .unwrap()
            .state()
            .unwrap();
        let c = Thm1Constants::evaluate(&st).unwrap();
        assert!((c.rx1_u1 - hb(0.1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ex1_quantum_matches_classical() {
        let inst = build_ex1(EX1_REFERENCE).unwrap();
        let q = Thm1Constants::evaluate(&inst.state().unwrap()).unwrap();
        let cj = inst.classical_joint().unwrap().unwrap();
        let c = Thm1Constants::evaluate(&cj).unwrap();
        assert!((q.rx1_u1 - c.rx1_u1).abs() < 1e-9);
        assert!((q.rx1_joint - c.rx1_joint).abs() < 1e-9);
        assert!((q.rx1_w - c.rx1_w).abs() < 1e-9);
    }

    #[test]
    fn ex1_capacity_point_in_cor1() {
        let st = build_ex1(EX1_REFERENCE).unwrap().state().unwrap();
        let r = check_separation_ex1(EX1_REFERENCE).unwrap();
        let pt = rate_assignment([r.c1, r.c2, r.c3]);
        let sys = build_cor1_system(&st, 3).unwrap();
        let rep = check_point(&sys, &pt).unwrap();
        assert!(rep.pass, "{:?}", rep.violated());
        let half = rate_assignment([r.c1 / 2.0, r.c2 / 2.0, r.c3 / 2.0]);
        assert!(check_point(&sys, &half).unwrap().pass);
        // the structured region with S_j = C_j, B1 = 0 also holds
        let inst = build_ex1(EX1_REFERENCE).unwrap();
        let sys = build_thm1_system(&st, &inst.cost, 0.1).unwrap();
        let a = thm1_assignment([r.c1, r.c2, r.c3], 0.0, [r.c2, r.c3]);
        assert!(check_point(&sys, &a).unwrap().pass);
    }

    #[test]
    fn ex2_receiver_entropy_is_binary_entropy() {
        let p = ex2_reference();
        let inst = build_ex2(p).unwrap();
        for (j, th) in [(1usize, p.theta2), (2, p.theta3)] {
            let avg = DensityOperator::mixture(&[
                (0.5, &inst.marginals[0][j]),
                (0.5, &inst.marginals[if j == 1 { 2 } else { 4 }][j]),
            ])
            .unwrap();
            let dt = (1.0 + th.cos()) / 2.0;
            assert!((vn_entropy(&avg) - hb(dt).unwrap()).abs() < 1e-10);
        }
        let dt = p.delta_tilde();
        assert!(hb(dt[1]).unwrap() > hb(dt[0]).unwrap());
    }

    #[test]
    fn orthogonal_limit() {
        let p = Ex2Params {
            theta3: std::f64::consts::FRAC_PI_2 - 1e-9,
            ..ex2_reference()
        };
        assert!((hb(p.delta_tilde()[1]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn prop1_reference() {
        let r = verify_prop1(ex2_reference()).unwrap();
        assert!(r.eq4a && r.eq4b && r.theta_order);
        assert!(r.identities.iter().all(|i| i.holds), "{:?}", r.identities);
        assert!(r.lower_bounds_zero);
        assert!(r.pass);
        assert!(!r.shared_s_passes);
        assert_eq!(r.shared_s_violations, vec!["rx2".to_string()]);
        let h = |p: f64| hb(p).unwrap();
        let dt = r.delta_tilde;
        assert!((h(0.14) + h(dt[0]) + h(dt[1]) - 1.2728).abs() < 1e-3);
        assert!((h(0.14) + h(dt[1]) - 0.9864).abs() < 1e-3);
    }

    #[test]
    fn prop1_useless_rx1() {
        let p = Ex2Params { eps: 0.5, ..ex2_reference() };
        let r = verify_prop1(p).unwrap();
        assert!(r.rates[0].abs() < 1e-12);
        assert!(r.eq4b == r.point.pass);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn prop1_identities_hold_everywhere(
            tau in 0.01f64..0.49,
            eps in 0.0f64..0.5,
            t2 in 0.05f64..1.5,
            t3 in 0.05f64..1.5,
        ) {
            let r = verify_prop1(Ex2Params { tau, eps, theta2: t2, theta3: t3 }).unwrap();
            for i in &r.identities {
                prop_assert!(i.holds, "{i:?}");
            }
            prop_assert!(r.lower_bounds_zero);
            // the assignment passes exactly when its binding sums fit
            if r.eq4b && r.delta_tilde[0] >= r.delta_tilde[1] {
                prop_assert!(r.point.pass);
            }
        }
    }

}
