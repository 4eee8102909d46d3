//! Classical-quantum theorem states and the entropy evaluator behind every
//! rate-region quantity.
//!
//! A [`TheoremState`] holds a joint PMF over `(X, U1, U2, U3, V2, V3)` with the
//! deterministic register `W = V2 ⊕_q V3`, plus the per-input receiver
//! marginals `ρ_x^{Y_j}`. Mutual informations and conditional entropies are
//! expanded into signed subset entropies ([`QuantityExpr`]) and evaluated by a
//! single routine; at most one quantum register may appear in any subset.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::Field;
use crate::quantum::{entropy_of_matrix, shannon_bits, CMatrix, DensityOperator};

pub const TOL_NORMALIZATION: f64 = 1e-9;

/// Binary entropy in bits.
pub fn hb(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(shannon_bits(&[p, 1.0 - p]))
}

/// Binary convolution `a(1−b) + b(1−a)`.
pub fn bconv(a: f64, b: f64) -> Result<f64> {
    for p in [a, b] {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
        }
    }
    Ok(a * (1.0 - b) + b * (1.0 - a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Register {
    X,
    U1,
    U2,
    U3,
    V2,
    V3,
    /// `V2 ⊕_q V3`.
    W,
    /// `V2 ⊕_q θ·V3` for a nonzero `θ`.
    Lin(u32),
    Y1,
    Y2,
    Y3,
}

impl Register {
    pub fn is_quantum(self) -> bool {
        matches!(self, Register::Y1 | Register::Y2 | Register::Y3)
    }

    /// Receiver index 0..3 for `Y1..Y3`.
    pub fn receiver(self) -> Option<usize> {
        match self {
            Register::Y1 => Some(0),
            Register::Y2 => Some(1),
            Register::Y3 => Some(2),
            _ => None,
        }
    }

    pub fn output(j: usize) -> Register {
        [Register::Y1, Register::Y2, Register::Y3][j]
    }

    /// `V_j` for `j ∈ {2, 3}`.
    pub fn v(j: usize) -> Register {
        match j {
            2 => Register::V2,
            3 => Register::V3,
            _ => panic!("V_{j} does not exist"),
        }
    }

    /// `U_j` for `j ∈ {1, 2, 3}`.
    pub fn u(j: usize) -> Register {
        match j {
            1 => Register::U1,
            2 => Register::U2,
            3 => Register::U3,
            _ => panic!("U_{j} does not exist"),
        }
    }
}

/// One classical outcome `(x, u1, u2, u3, v2, v3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassicalTuple {
    pub x: u32,
    pub u: [u32; 3],
    pub v2: u32,
    pub v3: u32,
}

impl ClassicalTuple {
    pub fn value(&self, reg: Register, field: Field) -> u32 {
        match reg {
            Register::X => self.x,
            Register::U1 => self.u[0],
            Register::U2 => self.u[1],
            Register::U3 => self.u[2],
            Register::V2 => self.v2,
            Register::V3 => self.v3,
            Register::W => field.add(self.v2, self.v3),
            Register::Lin(theta) => field.add(self.v2, field.mul(theta, self.v3)),
            Register::Y1 | Register::Y2 | Register::Y3 => {
                panic!("quantum register has no classical value")
            }
        }
    }
}

/// Alphabet sizes of the classical registers and receiver Hilbert dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterSystem {
    pub x_size: usize,
    /// `|U1|, |U2|, |U3|`; singletons for the single-codebook state.
    pub u_sizes: [usize; 3],
    pub q: u32,
    pub y_dims: [usize; 3],
}

/// A joint PMF over `X × U1 × U2 × U3 × V2 × V3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputPmf {
    pub x_size: usize,
    pub u_sizes: [usize; 3],
    pub q: u32,
    pub entries: Vec<(ClassicalTuple, f64)>,
}

impl InputPmf {
    /// Checks ranges and normalization; merges duplicates and drops zeros.
    pub fn validated(mut self) -> Result<Self> {
        Field::new(self.q)?;
        if self.x_size == 0 || self.u_sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParameter("empty alphabet".into()));
        }
        let mut merged: BTreeMap<ClassicalTuple, f64> = BTreeMap::new();
        for (t, p) in &self.entries {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::InvalidParameter(format!("probability {p} is negative or not finite")));
            }
            let in_range = (t.x as usize) < self.x_size
                && t.u.iter().zip(self.u_sizes).all(|(&u, s)| (u as usize) < s)
                && t.v2 < self.q
                && t.v3 < self.q;
            if !in_range {
                return Err(Error::Dimension(format!("outcome {t:?} outside the alphabets")));
            }
            *merged.entry(*t).or_default() += p;
        }
        let sum: f64 = merged.values().sum();
        if (sum - 1.0).abs() > TOL_NORMALIZATION {
            return Err(Error::Normalization { sum });
        }
        self.entries = merged.into_iter().filter(|(_, p)| *p > 0.0).collect();
        Ok(self)
    }

    /// Marginal `p_X`.
    pub fn x_marginal(&self) -> Vec<f64> {
        let mut px = vec![0.0; self.x_size];
        for (t, p) in &self.entries {
            px[t.x as usize] += p;
        }
        px
    }

    /// Expected cost `Σ_x p_X(x) κ(x)`.
    pub fn expected_cost(&self, cost: &[f64]) -> Result<f64> {
        if cost.len() != self.x_size {
            return Err(Error::Dimension(format!(
                "cost vector has {} entries for |X| = {}",
                cost.len(),
                self.x_size
            )));
        }
        Ok(self.x_marginal().iter().zip(cost).map(|(p, k)| p * k).sum())
    }
}

/// Anything that can report the entropy of a register subset in bits.
pub trait EntropySource {
    fn q(&self) -> u32;
    fn entropy(&self, subset: &[Register]) -> Result<f64>;

    fn log_q(&self) -> f64 {
        (self.q() as f64).log2()
    }
}

/// The joint cq state over registers, evaluated lazily per subset.
#[derive(Debug, Clone)]
pub struct TheoremState {
    system: RegisterSystem,
    pmf: InputPmf,
    /// `marginals[x][j] = ρ_x^{Y_{j+1}}`.
    marginals: Vec<[DensityOperator; 3]>,
}

/// Builds the theorem state: the input PMF extended by the deterministic
/// `W = V2 ⊕_q V3`, with receiver marginals per input symbol.
pub fn build_theorem_state(pmf: InputPmf, marginals: Vec<[DensityOperator; 3]>) -> Result<TheoremState> {
    let pmf = pmf.validated()?;
    if marginals.len() != pmf.x_size {
        return Err(Error::Dimension(format!(
            "{} channel marginals for |X| = {}",
            marginals.len(),
            pmf.x_size
        )));
    }
    let y_dims = [marginals[0][0].dim(), marginals[0][1].dim(), marginals[0][2].dim()];
    if marginals
        .iter()
        .any(|m| (0..3).any(|j| m[j].dim() != y_dims[j]))
    {
        return Err(Error::Dimension("receiver dimension varies with x".into()));
    }
    let system = RegisterSystem {
        x_size: pmf.x_size,
        u_sizes: pmf.u_sizes,
        q: pmf.q,
        y_dims,
    };
    Ok(TheoremState {
        system,
        pmf,
        marginals,
    })
}

impl TheoremState {
    pub fn system(&self) -> &RegisterSystem {
        &self.system
    }

    pub fn pmf(&self) -> &InputPmf {
        &self.pmf
    }

    pub fn marginal(&self, x: usize, j: usize) -> &DensityOperator {
        &self.marginals[x][j]
    }

    pub fn field(&self) -> Field {
        Field::new(self.system.q).expect("validated")
    }

    /// Average receiver state `ρ^{Y_j}_c` conditioned on a classical event,
    /// weighted by the event probability (unnormalized).
    pub fn conditional_average<F>(&self, j: usize, mut pred: F) -> (f64, CMatrix)
    where
        F: FnMut(&ClassicalTuple) -> bool,
    {
        let mut acc = CMatrix::zeros(self.system.y_dims[j]);
        let mut mass = 0.0;
        for (t, p) in &self.pmf.entries {
            if pred(t) {
                acc.add_scaled(self.marginals[t.x as usize][j].matrix(), *p);
                mass += p;
            }
        }
        (mass, acc)
    }
}

fn split_subset(subset: &[Register]) -> Result<(Vec<Register>, Option<usize>)> {
    let mut classical: Vec<Register> = Vec::new();
    let mut quantum: Option<usize> = None;
    for &r in subset {
        if let Some(j) = r.receiver() {
            match quantum {
                Some(k) if k != j => {
                    return Err(Error::Unsupported(
                        "joint entropy of two quantum registers".into(),
                    ))
                }
                _ => quantum = Some(j),
            }
        } else if !classical.contains(&r) {
            classical.push(r);
        }
    }
    Ok((classical, quantum))
}

fn check_lin(subset: &[Register], q: u32) -> Result<()> {
    for r in subset {
        if let Register::Lin(theta) = r {
            if *theta == 0 || *theta >= q {
                return Err(Error::Unknown(format!("V2 + {theta}·V3 over F_{q}")));
            }
        }
    }
    Ok(())
}

impl EntropySource for TheoremState {
    fn q(&self) -> u32 {
        self.system.q
    }

    fn entropy(&self, subset: &[Register]) -> Result<f64> {
        check_lin(subset, self.system.q)?;
        let (classical, quantum) = split_subset(subset)?;
        let field = self.field();
        let key = |t: &ClassicalTuple| -> Vec<u32> {
            classical.iter().map(|&r| t.value(r, field)).collect()
        };
        match quantum {
            None => {
                let mut dist: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
                for (t, p) in &self.pmf.entries {
                    *dist.entry(key(t)).or_default() += p;
                }
                Ok(shannon_bits(&dist.values().copied().collect::<Vec<_>>()))
            }
            Some(j) => {
                let mut groups: BTreeMap<Vec<u32>, (f64, CMatrix)> = BTreeMap::new();
                for (t, p) in &self.pmf.entries {
                    let e = groups
                        .entry(key(t))
                        .or_insert_with(|| (0.0, CMatrix::zeros(self.system.y_dims[j])));
                    e.0 += p;
                    e.1.add_scaled(self.marginals[t.x as usize][j].matrix(), *p);
                }
                let probs: Vec<f64> = groups.values().map(|(p, _)| *p).collect();
                let mut h = shannon_bits(&probs);
                for (p, m) in groups.values() {
                    if *p > 0.0 {
                        h += p * entropy_of_matrix(&m.scale(1.0 / p))?;
                    }
                }
                Ok(h)
            }
        }
    }
}

/// Fully classical joint table over inputs and receiver outputs, used when
/// all channel marginals commute. Receiver outputs are conditionally
/// independent given `x`: `p(y1, y2, y3 | x) = Π_j kernels[j][x][y_j]`.
#[derive(Debug, Clone)]
pub struct ClassicalJoint {
    q: u32,
    entries: Vec<(ClassicalTuple, [u32; 3], f64)>,
}

impl ClassicalJoint {
    pub fn new(pmf: InputPmf, kernels: &[Vec<Vec<f64>>; 3]) -> Result<Self> {
        let pmf = pmf.validated()?;
        for k in kernels {
            if k.len() != pmf.x_size {
                return Err(Error::Dimension("kernel rows must cover every x".into()));
            }
            for row in k {
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > TOL_NORMALIZATION || row.iter().any(|&p| p < 0.0) {
                    return Err(Error::Normalization { sum: s });
                }
            }
        }
        let mut entries = Vec::new();
        for (t, p) in &pmf.entries {
            let x = t.x as usize;
            for (y1, p1) in kernels[0][x].iter().enumerate() {
                for (y2, p2) in kernels[1][x].iter().enumerate() {
                    for (y3, p3) in kernels[2][x].iter().enumerate() {
                        let w = p * p1 * p2 * p3;
                        if w > 0.0 {
                            entries.push((*t, [y1 as u32, y2 as u32, y3 as u32], w));
                        }
                    }
                }
            }
        }
        Ok(Self { q: pmf.q, entries })
    }
}

impl EntropySource for ClassicalJoint {
    fn q(&self) -> u32 {
        self.q
    }

    fn entropy(&self, subset: &[Register]) -> Result<f64> {
        check_lin(subset, self.q)?;
        let field = Field::new(self.q)?;
        let mut regs = subset.to_vec();
        regs.sort();
        regs.dedup();
        let mut dist: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (t, y, p) in &self.entries {
            let key: Vec<u32> = regs
                .iter()
                .map(|&r| match r.receiver() {
                    Some(j) => y[j],
                    None => t.value(r, field),
                })
                .collect();
            *dist.entry(key).or_default() += p;
        }
        Ok(shannon_bits(&dist.values().copied().collect::<Vec<_>>()))
    }
}

/// Diagonal receiver marginals `ρ_x^{Y_j} = diag(kernels[j][x])`.
pub fn diagonal_marginals(kernels: &[Vec<Vec<f64>>; 3]) -> Result<Vec<[DensityOperator; 3]>> {
    let x_size = kernels[0].len();
    if kernels.iter().any(|k| k.len() != x_size) {
        return Err(Error::Dimension("kernels disagree on |X|".into()));
    }
    (0..x_size)
        .map(|x| {
            Ok([
                DensityOperator::diagonal(&kernels[0][x])?,
                DensityOperator::diagonal(&kernels[1][x])?,
                DensityOperator::diagonal(&kernels[2][x])?,
            ])
        })
        .collect()
}

/// A signed combination of subset entropies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityExpr {
    pub terms: Vec<(f64, Vec<Register>)>,
}

fn union(a: &[Register], b: &[Register]) -> Vec<Register> {
    let mut out = a.to_vec();
    for r in b {
        if !out.contains(r) {
            out.push(*r);
        }
    }
    out
}

impl QuantityExpr {
    /// `H(A)`.
    pub fn h(a: &[Register]) -> Self {
        Self {
            terms: vec![(1.0, a.to_vec())],
        }
    }

    /// `H(A | B) = H(A, B) − H(B)`.
    pub fn h_cond(a: &[Register], b: &[Register]) -> Self {
        Self {
            terms: vec![(1.0, union(a, b)), (-1.0, b.to_vec())],
        }
    }

    /// `I(A; B) = H(A) + H(B) − H(A, B)`.
    pub fn mi(a: &[Register], b: &[Register]) -> Self {
        Self {
            terms: vec![(1.0, a.to_vec()), (1.0, b.to_vec()), (-1.0, union(a, b))],
        }
    }

    /// `I(A; B | C) = H(A, C) + H(B, C) − H(A, B, C) − H(C)`.
    pub fn cmi(a: &[Register], b: &[Register], c: &[Register]) -> Self {
        Self {
            terms: vec![
                (1.0, union(a, c)),
                (1.0, union(b, c)),
                (-1.0, union(&union(a, b), c)),
                (-1.0, c.to_vec()),
            ],
        }
    }

    pub fn eval(&self, src: &dyn EntropySource) -> Result<f64> {
        let mut total = 0.0;
        for (coef, subset) in &self.terms {
            if subset.is_empty() {
                continue;
            }
            total += coef * src.entropy(subset)?;
        }
        Ok(total)
    }
}

/// `(γ12, γ)`: minima over nonzero `θ` of `H(V2 ⊕ θV3 | U1)` and `H(V2 ⊕ θV3)`.
pub fn gamma_terms(src: &dyn EntropySource) -> Result<(f64, f64)> {
    let mut g12 = f64::INFINITY;
    let mut g = f64::INFINITY;
    for theta in 1..src.q() {
        let lin = [Register::Lin(theta)];
        g12 = g12.min(QuantityExpr::h_cond(&lin, &[Register::U1]).eval(src)?);
        g = g.min(QuantityExpr::h(&lin).eval(src)?);
    }
    Ok((g12, g))
}

/// `min_θ H(V2 ⊕ θV3 | U_D)` for `D = ∅` (`with_u1 = false`) or `D = {1}`.
pub fn min_lin_entropy(src: &dyn EntropySource, with_u1: bool) -> Result<f64> {
    let (g12, g) = gamma_terms(src)?;
    Ok(if with_u1 { g12 } else { g })
}
