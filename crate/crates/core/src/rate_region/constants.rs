use serde::Serialize;

use crate::cq_state::{gamma_terms, EntropySource, QuantityExpr, Register};
use crate::error::Result;

use Register::{U1, V2, V3, W, Y1};

fn ev(src: &dyn EntropySource, e: QuantityExpr) -> Result<f64> {
    e.eval(src)
}

/// A covering bound `Σ_A (S_a − T_a) + B_D ≥ rhs` for a nonempty `(A, D)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringBound {
    /// Subset of `{2, 3}`.
    pub a: Vec<usize>,
    /// Whether `D = {1}`.
    pub d: bool,
    pub rhs: f64,
}

impl CoveringBound {
    pub fn label(&self) -> String {
        let a: Vec<String> = self.a.iter().map(|j| j.to_string()).collect();
        format!("cover[A={{{}}},D={{{}}}]", a.join(","), if self.d { "1" } else { "" })
    }
}

fn covering_bounds(src: &dyn EntropySource, u_of_d: Register) -> Result<Vec<CoveringBound>> {
    let log_q = src.log_q();
    let h_ud = src.entropy(&[u_of_d])?;
    let mut out = Vec::new();
    for a in [vec![], vec![2], vec![3], vec![2, 3]] {
        for d in [false, true] {
            if a.is_empty() && !d {
                continue;
            }
            let mut regs: Vec<Register> = a.iter().map(|&j| Register::v(j)).collect();
            if d {
                regs.push(u_of_d);
            }
            let rhs = if d { h_ud } else { 0.0 } + a.len() as f64 * log_q - src.entropy(&regs)?;
            out.push(CoveringBound { a: a.clone(), d, rhs });
        }
    }
    Ok(out)
}

/// Every numeric right side of the single-codebook system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm1Constants {
    pub q: u32,
    pub log_q: f64,
    pub covering: Vec<CoveringBound>,
    /// `log q − min_θ H(V2 ⊕ θV3 | U_D)` for `D = ∅` and `D = {1}`.
    pub alg: [f64; 2],
    /// `I(U1; Y1, W)`.
    pub rx1_u1: f64,
    /// `I(Y1, U1; W) + log q − H(W)`.
    pub rx1_w: f64,
    /// `I(Y1; W, U1) + I(U1; W) + log q − H(W)`.
    pub rx1_joint: f64,
    /// `I(Y_j; V_j) + log q − H(V_j)` for `j = 2, 3`.
    pub rx: [f64; 2],
}

impl Thm1Constants {
    pub fn evaluate(src: &dyn EntropySource) -> Result<Self> {
        let log_q = src.log_q();
        let (g12, g) = gamma_terms(src)?;
        let h_w = src.entropy(&[W])?;
        let mut rx = [0.0; 2];
        for (i, j) in [2usize, 3].into_iter().enumerate() {
            let v = Register::v(j);
            rx[i] = ev(src, QuantityExpr::mi(&[Register::output(j - 1)], &[v]))? + log_q
                - src.entropy(&[v])?;
        }
        Ok(Self {
            q: src.q(),
            log_q,
            covering: covering_bounds(src, U1)?,
            alg: [log_q - g, log_q - g12],
            rx1_u1: ev(src, QuantityExpr::mi(&[U1], &[Y1, W]))?,
            rx1_w: ev(src, QuantityExpr::mi(&[Y1, U1], &[W]))? + log_q - h_w,
            rx1_joint: ev(src, QuantityExpr::mi(&[Y1], &[W, U1]))?
                + ev(src, QuantityExpr::mi(&[U1], &[W]))?
                + log_q
                - h_w,
            rx,
        })
    }
}

/// Quantities appearing in the eliminated (rates-only) region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cor1Constants {
    /// `Υ_2, Υ_3`.
    pub upsilon: [f64; 2],
    pub gamma12: f64,
    pub gamma: f64,
    /// `I(U1, W; Y1) + I(U1; W) − H(W)`.
    pub k: f64,
    /// `I(U1; Y1, W)`.
    pub i_u1_y1w: f64,
    /// `H(V2), H(V3)`.
    pub h_v: [f64; 2],
    pub h_v2v3: f64,
    /// `H(V2|U1), H(V3|U1)`.
    pub h_v_given_u1: [f64; 2],
    pub h_v2v3_given_u1: f64,
    /// `I(U1; V2), I(U1; V3)`.
    pub i_u1_v: [f64; 2],
    pub i_v2_v3: f64,
    pub i_v2v3_u1: f64,
}

impl Cor1Constants {
    pub fn evaluate(src: &dyn EntropySource) -> Result<Self> {
        let (gamma12, gamma) = gamma_terms(src)?;
        let h_w = src.entropy(&[W])?;
        let w_term = ev(src, QuantityExpr::mi(&[W], &[Y1, U1]))? - h_w;
        let mut upsilon = [0.0; 2];
        let mut h_v = [0.0; 2];
        let mut h_v_given_u1 = [0.0; 2];
        let mut i_u1_v = [0.0; 2];
        for (i, j) in [2usize, 3].into_iter().enumerate() {
            let v = Register::v(j);
            h_v[i] = src.entropy(&[v])?;
            upsilon[i] = (ev(src, QuantityExpr::mi(&[v], &[Register::output(j - 1)]))? - h_v[i])
                .min(w_term);
            h_v_given_u1[i] = ev(src, QuantityExpr::h_cond(&[v], &[U1]))?;
            i_u1_v[i] = ev(src, QuantityExpr::mi(&[U1], &[v]))?;
        }
        Ok(Self {
            upsilon,
            gamma12,
            gamma,
            k: ev(src, QuantityExpr::mi(&[U1, W], &[Y1]))? + ev(src, QuantityExpr::mi(&[U1], &[W]))?
                - h_w,
            i_u1_y1w: ev(src, QuantityExpr::mi(&[U1], &[Y1, W]))?,
            h_v,
            h_v2v3: src.entropy(&[V2, V3])?,
            h_v_given_u1,
            h_v2v3_given_u1: ev(src, QuantityExpr::h_cond(&[V2, V3], &[U1]))?,
            i_u1_v,
            i_v2_v3: ev(src, QuantityExpr::mi(&[V2], &[V3]))?,
            i_v2v3_u1: ev(src, QuantityExpr::mi(&[V2, V3], &[U1]))?,
        })
    }

    /// `Υ_j` for `j ∈ {2, 3}`.
    pub fn ups(&self, j: usize) -> f64 {
        self.upsilon[j - 2]
    }

    pub fn hv(&self, j: usize) -> f64 {
        self.h_v[j - 2]
    }
}

/// Right sides of the rate-splitting system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm2Constants {
    pub q: u32,
    pub log_q: f64,
    pub covering: Vec<CoveringBound>,
    /// `log q + Σ_D H(U_d) − min_θ H(V2 ⊕ θV3, U_D)` for `D = ∅, {1}`.
    pub alg: [f64; 2],
    pub rx1_u1: f64,
    pub rx1_w: f64,
    pub rx1_joint: f64,
    /// `I(Y_j, U_j; V_j) + log q − H(V_j)`.
    pub rx_v: [f64; 2],
    /// `I(Y_j, V_j; U_j)`.
    pub rx_u: [f64; 2],
    /// `I(Y_j; U_j, V_j) + I(U_j; V_j) + log q − H(V_j)`.
    pub rx_joint: [f64; 2],
}

impl Thm2Constants {
    pub fn evaluate(src: &dyn EntropySource) -> Result<Self> {
        let log_q = src.log_q();
        let h_w = src.entropy(&[W])?;
        let h_u1 = src.entropy(&[U1])?;
        let mut min_lin = f64::INFINITY;
        let mut min_lin_u1 = f64::INFINITY;
        for theta in 1..src.q() {
            min_lin = min_lin.min(src.entropy(&[Register::Lin(theta)])?);
            min_lin_u1 = min_lin_u1.min(src.entropy(&[Register::Lin(theta), U1])?);
        }
        let mut rx_v = [0.0; 2];
        let mut rx_u = [0.0; 2];
        let mut rx_joint = [0.0; 2];
        for (i, j) in [2usize, 3].into_iter().enumerate() {
            let (u, v, y) = (Register::u(j), Register::v(j), Register::output(j - 1));
            let h_v = src.entropy(&[v])?;
            rx_v[i] = ev(src, QuantityExpr::mi(&[y, u], &[v]))? + log_q - h_v;
            rx_u[i] = ev(src, QuantityExpr::mi(&[y, v], &[u]))?;
            rx_joint[i] = ev(src, QuantityExpr::mi(&[y], &[u, v]))?
                + ev(src, QuantityExpr::mi(&[u], &[v]))?
                + log_q
                - h_v;
        }
        Ok(Self {
            q: src.q(),
            log_q,
            covering: covering_bounds(src, U1)?,
            alg: [log_q - min_lin, log_q + h_u1 - min_lin_u1],
            rx1_u1: ev(src, QuantityExpr::mi(&[Y1, W], &[U1]))?,
            rx1_w: ev(src, QuantityExpr::mi(&[Y1, U1], &[W]))? + log_q - h_w,
            rx1_joint: ev(src, QuantityExpr::mi(&[Y1], &[W, U1]))?
                + ev(src, QuantityExpr::mi(&[U1], &[W]))?
                + log_q
                - h_w,
            rx_v,
            rx_u,
            rx_joint,
        })
    }
}
