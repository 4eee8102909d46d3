//! Run configuration: one JSON document per invocation.

use anyhow::{anyhow, bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cqbc_core::cq_state::{build_theorem_state, diagonal_marginals, ClassicalJoint, ClassicalTuple, InputPmf, TheoremState};
use cqbc_core::examples::{Ex1Params, Ex2Params};
use cqbc_core::quantum::{CMatrix, DensityOperator};
use cqbc_core::sim::{CodebookMode, DecoderKind, SimRates};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// `kernels[j][x][y] = p(y_{j+1} = y | x)`.
    Classical { kernels: [Vec<Vec<f64>>; 3] },
    /// `states[x][j]` is receiver `j+1`'s density matrix as `[re, im]` pairs.
    Cq { states: Vec<[Vec<Vec<[f64; 2]>>; 3]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfEntry {
    pub x: u32,
    #[serde(default)]
    pub u: [u32; 3],
    pub v2: u32,
    pub v3: u32,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfSpec {
    pub x_size: usize,
    pub u_sizes: [usize; 3],
    pub entries: Vec<PmfEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExamplesBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ex1: Option<Ex1Params>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ex2: Option<Ex2Params>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointBlock {
    pub rates: [f64; 3],
    /// With `b1` and `s_bits` the full auxiliary assignment is checked; with
    /// rates alone, membership in the eliminated region.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_bits: Option<[f64; 2]>,
}

fn default_resolution() -> usize {
    8
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionBlock {
    #[serde(default = "default_resolution")]
    pub boundary_resolution: usize,
    #[serde(default = "default_true")]
    pub prune: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimBlock {
    /// Block lengths; one result and one trend row per entry.
    pub ns: Vec<usize>,
    pub rates: SimRates,
    pub eta: f64,
    pub decoder: DecoderKind,
    pub trials: usize,
    pub codebook_mode: CodebookMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmf: Option<PmfSpec>,
    pub q: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub examples: Option<ExamplesBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<PointBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimBlock>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text).context("malformed config")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn input_pmf(&self) -> anyhow::Result<InputPmf> {
        let spec = self.pmf.as_ref().ok_or_else(|| anyhow!("config has no pmf table"))?;
        let pmf = InputPmf {
            x_size: spec.x_size,
            u_sizes: spec.u_sizes,
            q: self.q,
            entries: spec
                .entries
                .iter()
                .map(|e| {
                    (
                        ClassicalTuple {
                            x: e.x,
                            u: e.u,
                            v2: e.v2,
                            v3: e.v3,
                        },
                        e.p,
                    )
                })
                .collect(),
        };
        Ok(pmf.validated()?)
    }

    pub fn channel(&self) -> anyhow::Result<&ChannelSpec> {
        self.channel.as_ref().ok_or_else(|| anyhow!("config has no channel block"))
    }

    pub fn classical_kernels(&self) -> anyhow::Result<Option<&[Vec<Vec<f64>>; 3]>> {
        Ok(match self.channel()? {
            ChannelSpec::Classical { kernels } => Some(kernels),
            ChannelSpec::Cq { .. } => None,
        })
    }

    pub fn theorem_state(&self) -> anyhow::Result<TheoremState> {
        let pmf = self.input_pmf()?;
        let marginals = match self.channel()? {
            ChannelSpec::Classical { kernels } => diagonal_marginals(kernels)?,
            ChannelSpec::Cq { states } => states
                .iter()
                .map(|per_x| {
                    let mut out = Vec::with_capacity(3);
                    for m in per_x {
                        let rows = m
                            .iter()
                            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                            .collect();
                        out.push(DensityOperator::new(CMatrix::from_rows(rows)?)?);
                    }
                    Ok::<_, anyhow::Error>([out.remove(0), out.remove(0), out.remove(0)])
                })
                .collect::<anyhow::Result<Vec<_>>>()?,
        };
        Ok(build_theorem_state(pmf, marginals)?)
    }

    pub fn classical_joint(&self) -> anyhow::Result<Option<ClassicalJoint>> {
        match self.classical_kernels()? {
            Some(k) => Ok(Some(ClassicalJoint::new(self.input_pmf()?, k)?)),
            None => Ok(None),
        }
    }

    pub fn cost(&self) -> anyhow::Result<(Vec<f64>, f64)> {
        let x_size = self.pmf.as_ref().map(|p| p.x_size).unwrap_or(0);
        let cost = self.cost.clone().unwrap_or_else(|| vec![0.0; x_size]);
        if cost.len() != x_size {
            bail!(cqbc_core::Error::Dimension(format!("cost has {} entries for |X| = {x_size}", cost.len())));
        }
        Ok((cost, self.cost_tau.unwrap_or(f64::INFINITY)))
    }
}
