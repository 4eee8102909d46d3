//! Desk-scale Monte-Carlo simulation of the partitioned-coset-code scheme on
//! commuting (classical) channels.
//!
//! Rx 1 decodes the pair (its own codeword, the sum codeword `v2 ⊕ v3`);
//! Rx 2 and Rx 3 decode the bin of their own codeword. Exhaustive oracles in
//! [`oracle`] give exact values at small `n` to validate the sampler.

pub mod codebook;
pub mod coding;
pub mod oracle;
pub mod stats;

use rand::distributions::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cq_state::{InputPmf, TOL_NORMALIZATION};
use crate::error::{Error, Result};
use crate::finite_field::Field;
use crate::quantum::shannon_bits;

pub use codebook::{sample_codebooks, Codebooks};
pub use coding::{decode_rx1, decode_rxj, encode, list_of, Encoding, Message};
pub use oracle::{ensemble_mean_alpha, exact_fixed, exact_for, ExactValues};
pub use stats::{list_statistics, tau_list, wilson_interval, ListStatistics};

/// Largest `q^{s3}·2^{n(R1+B1)}` a configuration may request.
pub const DESK_CAP: usize = 1 << 22;

/// Per-use code parameters. `r1`, `b1` are in bits; `s_j`, `t_j` count
/// `F_q` symbols per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRates {
    pub r1: f64,
    pub b1: f64,
    pub s2: f64,
    pub t2: f64,
    pub s3: f64,
    pub t3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Typicality,
    #[serde(rename = "ml")]
    MaxLikelihood,
}

/// Whether one codebook serves every trial or each trial draws its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookMode {
    Fixed,
    PerTrial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub rates: SimRates,
    /// Joint law of `(X, U1, V2, V3)`; the fusion map is `p_{X|U1 V2 V3}`.
    pub pmf: InputPmf,
    /// `kernels[j][x][y] = p(y_{j+1} = y | x)`.
    pub kernels: [Vec<Vec<f64>>; 3],
    /// Total-variation slack of letter typicality.
    pub eta: f64,
    pub decoder: DecoderKind,
    pub trials: usize,
    pub seed: u64,
    pub codebook_mode: CodebookMode,
}

/// Realized integer code dimensions for one block length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub n: usize,
    /// `round(n R1)` message bits for Rx 1.
    pub k1: usize,
    /// `round(n B1)` binning bits for Rx 1.
    pub kb: usize,
    pub s2: usize,
    pub t2: usize,
    pub s3: usize,
    pub t3: usize,
}

impl Dims {
    pub fn c1_rows(&self) -> usize {
        1 << (self.k1 + self.kb)
    }
}

fn round_dim(n: usize, rate: f64, name: &str) -> Result<usize> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::InvalidParameter(format!("{name} = {rate} must be nonnegative")));
    }
    Ok((n as f64 * rate).round() as usize)
}

impl SimConfig {
    pub fn q(&self) -> u32 {
        self.pmf.q
    }

    pub fn dims(&self) -> Result<Dims> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("block length must be positive".into()));
        }
        let r = &self.rates;
        let d = Dims {
            n: self.n,
            k1: round_dim(self.n, r.r1, "R1")?,
            kb: round_dim(self.n, r.b1, "B1")?,
            s2: round_dim(self.n, r.s2, "S2")?,
            t2: round_dim(self.n, r.t2, "T2")?,
            s3: round_dim(self.n, r.s3, "S3")?,
            t3: round_dim(self.n, r.t3, "T3")?,
        };
        if d.s2 < d.t2 || d.s3 < d.t3 {
            return Err(Error::InvalidParameter(format!(
                "need s_j >= t_j, got (s2, t2, s3, t3) = ({}, {}, {}, {})",
                d.s2, d.t2, d.s3, d.t3
            )));
        }
        if d.s2 > d.s3 {
            return Err(Error::InvalidParameter(format!(
                "nested codes need s2 <= s3, got {} > {}",
                d.s2, d.s3
            )));
        }
        if d.s3 > self.n {
            return Err(Error::InvalidParameter(format!("s3 = {} exceeds n", d.s3)));
        }
        let field = Field::new(self.q())?;
        let size = field
            .count(d.s3)
            .and_then(|c| c.checked_mul(1usize.checked_shl((d.k1 + d.kb) as u32)?))
            .filter(|&s| s <= DESK_CAP && d.k1 + d.kb < 63);
        if size.is_none() {
            return Err(Error::CapExceeded(format!(
                "q^s3 * 2^(k1+kb) = {}^{} * 2^{} exceeds {DESK_CAP}",
                self.q(),
                d.s3,
                d.k1 + d.kb
            )));
        }
        Ok(d)
    }
}

/// Probability tables derived once from a configuration.
#[derive(Debug, Clone)]
pub struct Model {
    pub q: u32,
    pub u_size: usize,
    pub y_sizes: [usize; 3],
    /// `p(u, v2, v3)` at index `(u q + v2) q + v3`.
    pub p_uvv: Vec<f64>,
    fusion: Vec<WeightedIndex<f64>>,
    channel: [Vec<WeightedIndex<f64>>; 3],
    /// `p(y_j | u, v2, v3)` per receiver, indexed `[uvv][y]`.
    pub induced: [Vec<Vec<f64>>; 3],
    /// `ln p(y1 | u, w)` at `[u q + w][y]`.
    pub rx1_metric: Vec<Vec<f64>>,
    /// `ln p(y_j | v_j)` at `[v][y]` for `j = 2, 3`.
    pub rxj_metric: [Vec<Vec<f64>>; 2],
    /// `p(u, w, y1)` at `(u q + w)|Y1| + y`.
    pub rx1_ref: Vec<f64>,
    /// `p(v_j, y_j)` at `v |Y_j| + y`.
    pub rxj_ref: [Vec<f64>; 2],
    /// `H(V2, V3 | U1)` in bits.
    pub h_vv_given_u: f64,
}

fn ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

impl Model {
    pub fn new(config: &SimConfig) -> Result<Self> {
        let pmf = config.pmf.clone().validated()?;
        if pmf.u_sizes[1] != 1 || pmf.u_sizes[2] != 1 {
            return Err(Error::Unsupported("simulation uses U1 only; U2, U3 must be trivial".into()));
        }
        let q = pmf.q;
        let qs = q as usize;
        let u_size = pmf.u_sizes[0];
        let x_size = pmf.x_size;
        let mut y_sizes = [0usize; 3];
        for (j, k) in config.kernels.iter().enumerate() {
            if k.len() != x_size {
                return Err(Error::Dimension(format!("kernel {} has {} rows for |X| = {x_size}", j + 1, k.len())));
            }
            y_sizes[j] = k[0].len();
            for row in k {
                let s: f64 = row.iter().sum();
                if row.len() != y_sizes[j] || row.iter().any(|&p| p < 0.0) || (s - 1.0).abs() > TOL_NORMALIZATION {
                    return Err(Error::Normalization { sum: s });
                }
            }
        }
        if !(config.eta >= 0.0) {
            return Err(Error::InvalidParameter(format!("eta = {} must be nonnegative", config.eta)));
        }

        let cells = u_size * qs * qs;
        let idx = |u: u32, v2: u32, v3: u32| ((u as usize * qs) + v2 as usize) * qs + v3 as usize;
        let mut p_uvv = vec![0.0; cells];
        let mut p_x_given = vec![vec![0.0; x_size]; cells];
        let p_x = pmf.x_marginal();
        for (t, p) in &pmf.entries {
            let i = idx(t.u[0], t.v2, t.v3);
            p_uvv[i] += p;
            p_x_given[i][t.x as usize] += p;
        }
        for (i, row) in p_x_given.iter_mut().enumerate() {
            if p_uvv[i] > 0.0 {
                row.iter_mut().for_each(|v| *v /= p_uvv[i]);
            } else {
                // unreachable letters are sent through the input marginal
                row.copy_from_slice(&p_x);
            }
        }
        let fusion = p_x_given
            .iter()
            .map(|row| WeightedIndex::new(row).map_err(|e| Error::InvalidParameter(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let mut channel: [Vec<WeightedIndex<f64>>; 3] = Default::default();
        for j in 0..3 {
            channel[j] = config.kernels[j]
                .iter()
                .map(|row| WeightedIndex::new(row).map_err(|e| Error::InvalidParameter(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
        }
        let mut induced: [Vec<Vec<f64>>; 3] = Default::default();
        for j in 0..3 {
            induced[j] = p_x_given
                .iter()
                .map(|px| {
                    (0..y_sizes[j])
                        .map(|y| (0..x_size).map(|x| px[x] * config.kernels[j][x][y]).sum())
                        .collect()
                })
                .collect();
        }

        let field = Field::new(q)?;
        // Rx 1 metric p(y1 | u, w)
        let mut rx1_metric = vec![vec![0.0; y_sizes[0]]; u_size * qs];
        let mut rx1_ref = vec![0.0; u_size * qs * y_sizes[0]];
        for u in 0..u_size as u32 {
            for w in 0..q {
                let pairs: Vec<(u32, u32)> = (0..q).map(|v2| (v2, field.sub(w, v2))).collect();
                let mass: f64 = pairs.iter().map(|&(a, b)| p_uvv[idx(u, a, b)]).sum();
                let row = &mut rx1_metric[u as usize * qs + w as usize];
                for &(a, b) in &pairs {
                    let wgt = if mass > 0.0 { p_uvv[idx(u, a, b)] / mass } else { 1.0 / qs as f64 };
                    for (y, r) in row.iter_mut().enumerate() {
                        *r += wgt * induced[0][idx(u, a, b)][y];
                        rx1_ref[(u as usize * qs + w as usize) * y_sizes[0] + y] +=
                            p_uvv[idx(u, a, b)] * induced[0][idx(u, a, b)][y];
                    }
                }
                row.iter_mut().for_each(|r| *r = ln(*r));
            }
        }
        // Rx j metric p(y_j | v_j)
        let mut rxj_metric: [Vec<Vec<f64>>; 2] = Default::default();
        let mut rxj_ref: [Vec<f64>; 2] = Default::default();
        for jj in 0..2 {
            let ny = y_sizes[jj + 1];
            let mut metric = vec![vec![0.0; ny]; qs];
            let mut reference = vec![0.0; qs * ny];
            for v in 0..q {
                let members: Vec<usize> = (0..u_size as u32)
                    .flat_map(|u| (0..q).map(move |o| (u, o)))
                    .map(|(u, o)| if jj == 0 { idx(u, v, o) } else { idx(u, o, v) })
                    .collect();
                let mass: f64 = members.iter().map(|&i| p_uvv[i]).sum();
                for &i in &members {
                    let wgt = if mass > 0.0 { p_uvv[i] / mass } else { 1.0 / members.len() as f64 };
                    for y in 0..ny {
                        metric[v as usize][y] += wgt * induced[jj + 1][i][y];
                        reference[v as usize * ny + y] += p_uvv[i] * induced[jj + 1][i][y];
                    }
                }
                metric[v as usize].iter_mut().for_each(|r| *r = ln(*r));
            }
            rxj_metric[jj] = metric;
            rxj_ref[jj] = reference;
        }

        let mut p_u = vec![0.0; u_size];
        for (i, p) in p_uvv.iter().enumerate() {
            p_u[i / (qs * qs)] += p;
        }
        let h_vv_given_u = shannon_bits(&p_uvv) - shannon_bits(&p_u);

        Ok(Self {
            q,
            u_size,
            y_sizes,
            p_uvv,
            fusion,
            channel,
            induced,
            rx1_metric,
            rxj_metric,
            rx1_ref,
            rxj_ref,
            h_vv_given_u,
        })
    }

    pub fn cell(&self, u: u32, v2: u32, v3: u32) -> usize {
        let qs = self.q as usize;
        (u as usize * qs + v2 as usize) * qs + v3 as usize
    }

    /// `p_{U1}`.
    pub fn p_u(&self) -> Vec<f64> {
        let qs = self.q as usize;
        let mut p = vec![0.0; self.u_size];
        for (i, v) in self.p_uvv.iter().enumerate() {
            p[i / (qs * qs)] += v;
        }
        p
    }

    pub fn sample_x<R: Rng>(&self, cell: usize, rng: &mut R) -> u32 {
        rng.sample(&self.fusion[cell]) as u32
    }

    pub fn sample_y<R: Rng>(&self, j: usize, x: u32, rng: &mut R) -> u32 {
        rng.sample(&self.channel[j][x as usize]) as u32
    }
}

/// Letter-frequency typicality: the empirical type is within total
/// variation `eta` of `reference` and never visits a zero-probability cell.
pub fn is_typical(counts: &[usize], reference: &[f64], n: usize, eta: f64) -> bool {
    let mut tv = 0.0;
    for (c, p) in counts.iter().zip(reference) {
        if *c > 0 && *p <= 0.0 {
            return false;
        }
        tv += (*c as f64 / n as f64 - p).abs();
    }
    tv / 2.0 <= eta + 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorStats {
    pub errors: usize,
    pub rate: f64,
    pub wilson95: [f64; 2],
}

impl ErrorStats {
    fn new(errors: usize, trials: usize) -> Self {
        Self {
            errors,
            rate: if trials > 0 { errors as f64 / trials as f64 } else { 0.0 },
            wilson95: wilson_interval(errors, trials),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub dims: Dims,
    pub trials: usize,
    /// Message error per receiver.
    pub receivers: [ErrorStats; 3],
    /// Rx 1 error on the whole decoded tuple (message, bin index, sum index).
    pub rx1_full_tuple: ErrorStats,
    pub fallbacks: usize,
    pub fallback_rate: f64,
    pub alpha: Vec<usize>,
    pub mean_alpha: f64,
    /// Trials where the transmitted `v2 ⊕ v3` was not the sum-code codeword.
    pub closure_violations: usize,
    pub master_seed: u64,
    /// Trial `i` draws from ChaCha8 seeded with the master seed on stream `i`.
    pub seed_scheme: String,
}

/// Codebook stream used in fixed mode.
pub const FIXED_CODEBOOK_STREAM: u64 = u64::MAX;

pub fn trial_rng(master: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial as u64);
    rng
}

/// The codebook every trial shares in fixed mode.
pub fn fixed_codebooks(config: &SimConfig, model: &Model, dims: &Dims) -> Result<Codebooks> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(FIXED_CODEBOOK_STREAM);
    sample_codebooks(model, dims, rng.gen())
}

#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    errors: [bool; 3],
    rx1_full: bool,
    fallback: bool,
    alpha: usize,
    closure_ok: bool,
}

fn run_one(
    config: &SimConfig,
    model: &Model,
    dims: &Dims,
    fixed: Option<&Codebooks>,
    trial: usize,
    decode: bool,
) -> Result<TrialOutcome> {
    let mut rng = trial_rng(config.seed, trial);
    let owned;
    let cb = match fixed {
        Some(cb) => cb,
        None => {
            owned = sample_codebooks(model, dims, rng.gen())?;
            &owned
        }
    };
    let q = model.q as usize;
    let m = Message {
        m1: rng.gen_range(0..1usize << dims.k1),
        m2: rng.gen_range(0..q.pow(dims.t2 as u32)),
        m3: rng.gen_range(0..q.pow(dims.t3 as u32)),
    };
    let enc = encode(model, cb, dims, m, config.eta, &mut rng);
    let field = Field::new(model.q)?;
    let v2 = &cb.v2_words[enc.a2];
    let v3 = &cb.v3_words[enc.a3];
    let w = field.add_vec(v2, v3)?;
    let a_sum = cb.pair.sum_index(enc.a2, enc.a3);
    let closure_ok = cb.sum_words[a_sum] == w;
    let mut out = TrialOutcome {
        errors: [false; 3],
        rx1_full: false,
        fallback: enc.fallback,
        alpha: enc.alpha,
        closure_ok,
    };
    if !decode {
        return Ok(out);
    }
    let ys: [Vec<u32>; 3] = std::array::from_fn(|j| {
        enc.x.iter().map(|&x| model.sample_y(j, x, &mut rng)).collect()
    });
    match decode_rx1(model, cb, dims, &ys[0], config.decoder, config.eta) {
        Some((m1, b1, a)) => {
            out.errors[0] = m1 != m.m1;
            out.rx1_full = m1 != m.m1 || b1 != enc.b1 || a != a_sum;
        }
        None => {
            out.errors[0] = true;
            out.rx1_full = true;
        }
    }
    for j in [2usize, 3] {
        let want = if j == 2 { m.m2 } else { m.m3 };
        out.errors[j - 1] = decode_rxj(model, cb, j, &ys[j - 1], config.decoder, config.eta) != Some(want);
    }
    Ok(out)
}

fn aggregate(config: &SimConfig, dims: Dims, outcomes: Vec<TrialOutcome>) -> SimResult {
    let trials = outcomes.len();
    let count = |f: &dyn Fn(&TrialOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count();
    let receivers = [0, 1, 2].map(|j| ErrorStats::new(count(&|o| o.errors[j]), trials));
    let fallbacks = count(&|o| o.fallback);
    let alpha: Vec<usize> = outcomes.iter().map(|o| o.alpha).collect();
    let mean_alpha = if trials > 0 {
        alpha.iter().sum::<usize>() as f64 / trials as f64
    } else {
        0.0
    };
    SimResult {
        config: config.clone(),
        dims,
        trials,
        receivers,
        rx1_full_tuple: ErrorStats::new(count(&|o| o.rx1_full), trials),
        fallbacks,
        fallback_rate: if trials > 0 { fallbacks as f64 / trials as f64 } else { 0.0 },
        alpha,
        mean_alpha,
        closure_violations: count(&|o| !o.closure_ok),
        master_seed: config.seed,
        seed_scheme: "chacha8(master seed, stream = trial index)".into(),
    }
}

fn run(config: &SimConfig, decode: bool) -> Result<SimResult> {
    let dims = config.dims()?;
    let model = Model::new(config)?;
    let fixed = match config.codebook_mode {
        CodebookMode::Fixed => Some(fixed_codebooks(config, &model, &dims)?),
        CodebookMode::PerTrial => None,
    };
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|t| run_one(config, &model, &dims, fixed.as_ref(), t, decode))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(config, dims, outcomes))
}

/// Runs `config.trials` independent trials (encode, channel, decode).
pub fn run_trials(config: &SimConfig) -> Result<SimResult> {
    run(config, true)
}

/// Encoder-only trials for list-size statistics.
pub fn run_encoder_trials(config: &SimConfig) -> Result<SimResult> {
    run(config, false)
}

#[cfg(test)]
mod tests;
