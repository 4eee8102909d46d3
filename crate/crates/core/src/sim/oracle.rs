//! Exhaustive reference values for small block lengths.

use serde::Serialize;

use super::{fixed_codebooks, is_typical, list_of, Codebooks, Dims, Message, Model, SimConfig};
use super::coding::{decode_rx1, decode_rxj};
use crate::error::{Error, Result};

/// Largest output-sequence space enumerated per receiver.
pub const MAX_OUTPUTS: usize = 1 << 20;
/// Largest block length for the ensemble type enumeration.
pub const MAX_ENSEMBLE_N: usize = 16;

/// Exact values for the fixed codebook of a configuration, averaged over
/// uniform messages, the uniform list choice, fusion and channel noise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactValues {
    pub error: [f64; 3],
    pub rx1_full_tuple: f64,
    pub fallback: f64,
    pub mean_alpha: f64,
    pub alpha_variance: f64,
}

fn index_to_seq(mut idx: usize, base: usize, n: usize) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = idx % base;
            idx /= base;
            d as u32
        })
        .collect()
}

/// Distribution of `y^n` (index `Σ y_i |Y|^i`) given per-letter laws.
fn product_law(letters: &[&[f64]]) -> Vec<f64> {
    let mut law = vec![1.0];
    let mut stride = 1;
    for p in letters {
        let mut next = vec![0.0; law.len() * p.len()];
        for (y, &py) in p.iter().enumerate() {
            for (k, &l) in law.iter().enumerate() {
                next[k + y * stride] = l * py;
            }
        }
        stride *= p.len();
        law = next;
    }
    law
}

pub fn exact_fixed(config: &SimConfig) -> Result<ExactValues> {
    let dims = config.dims()?;
    let model = Model::new(config)?;
    let cb = fixed_codebooks(config, &model, &dims)?;
    exact_for(config, &model, &dims, &cb)
}

pub fn exact_for(config: &SimConfig, model: &Model, dims: &Dims, cb: &Codebooks) -> Result<ExactValues> {
    let n = dims.n;
    let mut spaces = [0usize; 3];
    for j in 0..3 {
        spaces[j] = model.y_sizes[j]
            .checked_pow(n as u32)
            .filter(|&s| s <= MAX_OUTPUTS)
            .ok_or_else(|| Error::CapExceeded(format!("|Y{}|^n exceeds {MAX_OUTPUTS}", j + 1)))?;
    }
    let dec1: Vec<Option<(usize, usize, usize)>> = (0..spaces[0])
        .map(|k| decode_rx1(model, cb, dims, &index_to_seq(k, model.y_sizes[0], n), config.decoder, config.eta))
        .collect();
    let decj: [Vec<Option<usize>>; 2] = std::array::from_fn(|jj| {
        (0..spaces[jj + 1])
            .map(|k| {
                let y = index_to_seq(k, model.y_sizes[jj + 1], n);
                decode_rxj(model, cb, jj + 2, &y, config.decoder, config.eta)
            })
            .collect()
    });

    let q = model.q as usize;
    let (n1, n2, n3) = (1usize << dims.k1, q.pow(dims.t2 as u32), q.pow(dims.t3 as u32));
    let total = (n1 * n2 * n3) as f64;
    let mut err = [0.0; 3];
    let mut full = 0.0;
    let mut fallback = 0.0;
    let mut alpha_sum = 0.0;
    let mut alpha_sq = 0.0;
    for m1 in 0..n1 {
        for m2 in 0..n2 {
            for m3 in 0..n3 {
                let m = Message { m1, m2, m3 };
                let list = list_of(model, cb, dims, m, config.eta);
                alpha_sum += list.len() as f64;
                alpha_sq += (list.len() * list.len()) as f64;
                let choices = if list.is_empty() {
                    fallback += 1.0;
                    vec![(0, 0, 0)]
                } else {
                    list
                };
                let weight = 1.0 / (choices.len() as f64 * total);
                for (b1, a2, a3) in choices {
                    let u = cb.row(m1, b1, dims.kb);
                    let (v2, v3) = (&cb.v2_words[a2], &cb.v3_words[a3]);
                    let cells: Vec<usize> = (0..n).map(|i| model.cell(u[i], v2[i], v3[i])).collect();
                    let a_sum = cb.pair.sum_index(a2, a3);
                    for j in 0..3 {
                        let letters: Vec<&[f64]> = cells.iter().map(|&c| model.induced[j][c].as_slice()).collect();
                        let law = product_law(&letters);
                        for (k, p) in law.iter().enumerate() {
                            if *p == 0.0 {
                                continue;
                            }
                            match j {
                                0 => match dec1[k] {
                                    Some((d1, db, da)) => {
                                        if d1 != m1 {
                                            err[0] += weight * p;
                                        }
                                        if d1 != m1 || db != b1 || da != a_sum {
                                            full += weight * p;
                                        }
                                    }
                                    None => {
                                        err[0] += weight * p;
                                        full += weight * p;
                                    }
                                },
                                _ => {
                                    let want = if j == 1 { m2 } else { m3 };
                                    if decj[j - 1][k] != Some(want) {
                                        err[j] += weight * p;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mean_alpha = alpha_sum / total;
    Ok(ExactValues {
        error: err,
        rx1_full_tuple: full,
        fallback: fallback / total,
        mean_alpha,
        alpha_variance: alpha_sq / total - mean_alpha * mean_alpha,
    })
}

/// `E|L(m)|` over the code ensemble:
/// `2^{kb} q^{s2−t2} q^{s3−t3} · P[(U^n, V2^n, V3^n) typical]` with `U`
/// iid `p_{U1}` and `V2, V3` iid uniform, by enumerating letter types.
pub fn ensemble_mean_alpha(config: &SimConfig) -> Result<f64> {
    let dims = config.dims()?;
    let model = Model::new(config)?;
    if dims.n > MAX_ENSEMBLE_N {
        return Err(Error::CapExceeded(format!("type enumeration limited to n <= {MAX_ENSEMBLE_N}")));
    }
    let q = model.q as usize;
    let p_u = model.p_u();
    let sampling: Vec<f64> = (0..model.p_uvv.len()).map(|c| p_u[c / (q * q)] / (q * q) as f64).collect();
    let p_typ = type_mass(&sampling, &model.p_uvv, dims.n, config.eta);
    let qf = q as f64;
    Ok(2f64.powi(dims.kb as i32)
        * qf.powi((dims.s2 - dims.t2) as i32)
        * qf.powi((dims.s3 - dims.t3) as i32)
        * p_typ)
}

/// Probability that an iid `sampling` sequence of length `n` has a type
/// typical for `reference`.
pub fn type_mass(sampling: &[f64], reference: &[f64], n: usize, eta: f64) -> f64 {
    let ln_fact: Vec<f64> = (0..=n)
        .scan(0.0, |acc, k| {
            if k > 0 {
                *acc += (k as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let mut counts = vec![0usize; sampling.len()];
    let mut total = 0.0;
    fn walk(
        cell: usize,
        left: usize,
        counts: &mut Vec<usize>,
        sampling: &[f64],
        reference: &[f64],
        n: usize,
        eta: f64,
        ln_fact: &[f64],
        total: &mut f64,
    ) {
        if cell + 1 == counts.len() {
            counts[cell] = left;
            if is_typical(counts, reference, n, eta) {
                let mut lp = ln_fact[n];
                for (c, p) in counts.iter().zip(sampling) {
                    if *c > 0 {
                        if *p <= 0.0 {
                            return;
                        }
                        lp += *c as f64 * p.ln() - ln_fact[*c];
                    }
                }
                *total += lp.exp();
            }
            return;
        }
        for c in 0..=left {
            counts[cell] = c;
            walk(cell + 1, left - c, counts, sampling, reference, n, eta, ln_fact, total);
        }
    }
    walk(0, n, &mut counts, sampling, reference, n, eta, &ln_fact, &mut total);
    total
}
