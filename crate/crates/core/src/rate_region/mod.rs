//! Linear inequality systems describing the coset-code inner bounds, and
//! point-membership checks with per-constraint slack.
//!
//! All variables are expressed in bits per channel use. The code parameters
//! `S_j` and `T_j` enter every bound multiplied by `log2 q`, so the systems
//! carry them pre-scaled (`Var::S2` stands for `S_2·log2 q`); coefficients then
//! stay small integers for any prime `q`.

mod constants;
mod systems;

pub use constants::{Cor1Constants, Thm1Constants, Thm2Constants};
pub use systems::{
    build_cor1_system, build_thm1_system, build_thm2_system, cor1_system_from_constants,
    thm1_system_from_constants, thm2_system_from_constants,
};

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Closure tolerance used by every membership test.
pub const TOL_CLOSURE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Var {
    R1,
    R2,
    R3,
    L1,
    L2,
    L3,
    B1,
    B2,
    B3,
    /// `S_2·log2 q`.
    S2,
    /// `S_3·log2 q`.
    S3,
    /// `T_2·log2 q`.
    T2,
    /// `T_3·log2 q`.
    T3,
}

impl Var {
    pub const RATES: [Var; 3] = [Var::R1, Var::R2, Var::R3];
    pub const THM1_AUX: [Var; 3] = [Var::B1, Var::S2, Var::S3];

    pub fn r(j: usize) -> Var {
        Self::RATES[j - 1]
    }

    pub fn s(j: usize) -> Var {
        match j {
            2 => Var::S2,
            3 => Var::S3,
            _ => panic!("S_{j} does not exist"),
        }
    }

    pub fn t(j: usize) -> Var {
        match j {
            2 => Var::T2,
            3 => Var::T3,
            _ => panic!("T_{j} does not exist"),
        }
    }

    pub fn l(j: usize) -> Var {
        [Var::L1, Var::L2, Var::L3][j - 1]
    }

    pub fn b(j: usize) -> Var {
        [Var::B1, Var::B2, Var::B3][j - 1]
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::R1 => "R1",
            Var::R2 => "R2",
            Var::R3 => "R3",
            Var::L1 => "L1",
            Var::L2 => "L2",
            Var::L3 => "L3",
            Var::B1 => "B1",
            Var::B2 => "B2",
            Var::B3 => "B3",
            Var::S2 => "S2",
            Var::S3 => "S3",
            Var::T2 => "T2",
            Var::T3 => "T3",
        }
    }

    pub fn parse(s: &str) -> Result<Var> {
        let all = [
            Var::R1,
            Var::R2,
            Var::R3,
            Var::L1,
            Var::L2,
            Var::L3,
            Var::B1,
            Var::B2,
            Var::B3,
            Var::S2,
            Var::S3,
            Var::T2,
            Var::T3,
        ];
        all.into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Unknown(format!("variable {s}")))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
}

pub type Assignment = BTreeMap<Var, f64>;

/// `Σ coeff·var (≤ | ≥) constant`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearConstraint {
    pub label: String,
    #[serde(serialize_with = "ser_coeffs")]
    pub coeffs: BTreeMap<Var, Rational64>,
    pub constant: f64,
    pub sense: Sense,
}

fn ser_coeffs<S: serde::Serializer>(
    coeffs: &BTreeMap<Var, Rational64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(coeffs.len()))?;
    for (v, c) in coeffs {
        map.serialize_entry(v.name(), &c.to_f64().unwrap_or(f64::NAN))?;
    }
    map.end()
}

impl LinearConstraint {
    pub fn new(label: impl Into<String>, terms: &[(Var, i64)], sense: Sense, constant: f64) -> Self {
        let mut coeffs = BTreeMap::new();
        for &(v, c) in terms {
            *coeffs.entry(v).or_insert_with(Rational64::zero) += Rational64::from_integer(c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self {
            label: label.into(),
            coeffs,
            constant,
            sense,
        }
    }

    pub fn le(label: impl Into<String>, terms: &[(Var, i64)], constant: f64) -> Self {
        Self::new(label, terms, Sense::Le, constant)
    }

    pub fn ge(label: impl Into<String>, terms: &[(Var, i64)], constant: f64) -> Self {
        Self::new(label, terms, Sense::Ge, constant)
    }

    pub fn coeff(&self, v: Var) -> Rational64 {
        self.coeffs.get(&v).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn lhs(&self, a: &Assignment) -> Result<f64> {
        let mut total = 0.0;
        for (v, c) in &self.coeffs {
            let x = a
                .get(v)
                .ok_or_else(|| Error::Unknown(format!("no value for {v}")))?;
            total += c.to_f64().unwrap_or(f64::NAN) * x;
        }
        Ok(total)
    }

    /// Signed slack in bits; nonnegative when satisfied exactly.
    pub fn slack(&self, a: &Assignment) -> Result<f64> {
        let lhs = self.lhs(a)?;
        Ok(match self.sense {
            Sense::Le => self.constant - lhs,
            Sense::Ge => lhs - self.constant,
        })
    }

    /// The same constraint written as `Σ c·v ≤ b`.
    pub fn as_le(&self) -> LinearConstraint {
        match self.sense {
            Sense::Le => self.clone(),
            Sense::Ge => LinearConstraint {
                label: self.label.clone(),
                coeffs: self.coeffs.iter().map(|(v, c)| (*v, -c)).collect(),
                constant: -self.constant,
                sense: Sense::Le,
            },
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn listing(&self) -> String {
        let mut s = String::new();
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{v}:{c}");
        }
        if s.is_empty() {
            s.push('0');
        }
        let op = match self.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
        };
        format!("{:<28} {s} {op} {:.12}", self.label, self.constant)
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn max_abs_coeff(&self) -> Rational64 {
        self.coeffs
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational64::zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SystemKind {
    Thm1,
    Cor1 { l: usize },
    Thm2,
}

/// Side condition `Σ p_X κ ≤ τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostCheck {
    pub expected_cost: f64,
    pub budget: f64,
    pub satisfied: bool,
}

impl CostCheck {
    pub fn new(expected_cost: f64, budget: f64) -> Self {
        Self {
            expected_cost,
            budget,
            satisfied: expected_cost <= budget + TOL_CLOSURE,
        }
    }
}

/// A conjunction of constraints plus disjunction groups (at least one member
/// of every group must hold).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSystem {
    pub kind: SystemKind,
    pub variables: Vec<Var>,
    pub conjuncts: Vec<LinearConstraint>,
    pub disjunction_groups: Vec<Vec<LinearConstraint>>,
    pub cost: Option<CostCheck>,
}

impl ConstraintSystem {
    pub fn new(
        kind: SystemKind,
        variables: Vec<Var>,
        conjuncts: Vec<LinearConstraint>,
        disjunction_groups: Vec<Vec<LinearConstraint>>,
    ) -> Result<Self> {
        let sys = Self {
            kind,
            variables,
            conjuncts,
            disjunction_groups,
            cost: None,
        };
        for c in sys.all_constraints() {
            if let Some(v) = c.variables().find(|v| !sys.variables.contains(v)) {
                return Err(Error::Unknown(format!(
                    "constraint {} references undeclared {v}",
                    c.label
                )));
            }
        }
        Ok(sys)
    }

    pub fn with_cost(mut self, cost: CostCheck) -> Self {
        self.cost = Some(cost);
        self
    }

    pub fn all_constraints(&self) -> impl Iterator<Item = &LinearConstraint> {
        self.conjuncts
            .iter()
            .chain(self.disjunction_groups.iter().flatten())
    }

    pub fn find(&self, label: &str) -> Option<&LinearConstraint> {
        self.all_constraints().find(|c| c.label == label)
    }

    /// One conjunctive constraint list per choice of a member from every group.
    pub fn branches(&self) -> Vec<Vec<LinearConstraint>> {
        let mut out = vec![self.conjuncts.clone()];
        for group in &self.disjunction_groups {
            let mut next = Vec::with_capacity(out.len() * group.len());
            for base in &out {
                for member in group {
                    let mut b = base.clone();
                    b.push(member.clone());
                    next.push(b);
                }
            }
            out = next;
        }
        out
    }

    /// Plain-text audit listing, one constraint per line.
    pub fn listing(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# {:?} over {}",
            self.kind,
            self.variables.iter().map(|v| v.name()).collect::<Vec<_>>().join(",")
        );
        for c in &self.conjuncts {
            let _ = writeln!(s, "{}", c.listing());
        }
        for (i, g) in self.disjunction_groups.iter().enumerate() {
            let _ = writeln!(s, "# any of group {i}");
            for c in g {
                let _ = writeln!(s, "  {}", c.listing());
            }
        }
        if let Some(cost) = &self.cost {
            let _ = writeln!(
                s,
                "# cost {:.12} <= {:.12} ({})",
                cost.expected_cost,
                cost.budget,
                if cost.satisfied { "ok" } else { "violated" }
            );
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlackEntry {
    pub label: String,
    pub slack: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub members: Vec<SlackEntry>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub conjuncts: Vec<SlackEntry>,
    pub groups: Vec<GroupReport>,
    pub cost_satisfied: Option<bool>,
    pub tolerance: f64,
    pub pass: bool,
}

impl PointReport {
    pub fn slack(&self, label: &str) -> Option<f64> {
        self.conjuncts
            .iter()
            .chain(self.groups.iter().flat_map(|g| g.members.iter()))
            .find(|e| e.label == label)
            .map(|e| e.slack)
    }

    pub fn violated(&self) -> Vec<&SlackEntry> {
        self.conjuncts.iter().filter(|e| !e.satisfied).collect()
    }
}

fn slack_entry(c: &LinearConstraint, a: &Assignment) -> Result<SlackEntry> {
    let slack = c.slack(a)?;
    Ok(SlackEntry {
        label: c.label.clone(),
        slack,
        satisfied: slack >= -TOL_CLOSURE,
    })
}

/// Evaluates every constraint at `assignment` (closure semantics, tolerance
/// [`TOL_CLOSURE`]).
pub fn check_point(system: &ConstraintSystem, assignment: &Assignment) -> Result<PointReport> {
    if let Some(v) = system.variables.iter().find(|v| !assignment.contains_key(v)) {
        return Err(Error::Unknown(format!("assignment is missing {v}")));
    }
    let conjuncts = system
        .conjuncts
        .iter()
        .map(|c| slack_entry(c, assignment))
        .collect::<Result<Vec<_>>>()?;
    let groups = system
        .disjunction_groups
        .iter()
        .map(|g| {
            let members = g
                .iter()
                .map(|c| slack_entry(c, assignment))
                .collect::<Result<Vec<_>>>()?;
            let satisfied = members.iter().any(|m| m.satisfied);
            Ok(GroupReport { members, satisfied })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = conjuncts.iter().all(|e| e.satisfied) && groups.iter().all(|g| g.satisfied);
    Ok(PointReport {
        conjuncts,
        groups,
        cost_satisfied: system.cost.map(|c| c.satisfied),
        tolerance: TOL_CLOSURE,
        pass,
    })
}

/// Assignment for the single-codebook system. `s_bits[j]` is `S_j·log2 q`.
pub fn thm1_assignment(rates: [f64; 3], b1: f64, s_bits: [f64; 2]) -> Assignment {
    BTreeMap::from([
        (Var::R1, rates[0]),
        (Var::R2, rates[1]),
        (Var::R3, rates[2]),
        (Var::B1, b1),
        (Var::S2, s_bits[0]),
        (Var::S3, s_bits[1]),
    ])
}

/// Assignment for a rate triple only.
pub fn rate_assignment(rates: [f64; 3]) -> Assignment {
    BTreeMap::from([(Var::R1, rates[0]), (Var::R2, rates[1]), (Var::R3, rates[2])])
}
