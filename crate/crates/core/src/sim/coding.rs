use rand::Rng;
use serde::Serialize;

use super::{is_typical, Codebooks, DecoderKind, Dims, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Message {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Encoding {
    pub b1: usize,
    pub a2: usize,
    pub a3: usize,
    /// `|L(m)|`.
    pub alpha: usize,
    /// True when the list was empty and the fixed fallback triple was sent.
    pub fallback: bool,
    pub x: Vec<u32>,
}

/// `L(m)`: every `(b1, a2, a3)` with `a_j` in bin `m_j` whose codeword
/// triple is jointly typical with respect to `p_{U1 V2 V3}`.
pub fn list_of(model: &Model, cb: &Codebooks, dims: &Dims, m: Message, eta: f64) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; model.p_uvv.len()];
    for b1 in 0..1usize << dims.kb {
        let u = cb.row(m.m1, b1, dims.kb);
        for &a2 in cb.bin(2, m.m2) {
            let v2 = &cb.v2_words[a2 as usize];
            for &a3 in cb.bin(3, m.m3) {
                let v3 = &cb.v3_words[a3 as usize];
                counts.iter_mut().for_each(|c| *c = 0);
                for i in 0..dims.n {
                    counts[model.cell(u[i], v2[i], v3[i])] += 1;
                }
                if is_typical(&counts, &model.p_uvv, dims.n, eta) {
                    out.push((b1, a2 as usize, a3 as usize));
                }
            }
        }
    }
    out
}

/// Picks a uniform member of `L(m)` (or `(0, 0, 0)` when it is empty) and
/// passes the codeword triple through the fusion map letter by letter.
pub fn encode<R: Rng>(model: &Model, cb: &Codebooks, dims: &Dims, m: Message, eta: f64, rng: &mut R) -> Encoding {
    let list = list_of(model, cb, dims, m, eta);
    let alpha = list.len();
    let ((b1, a2, a3), fallback) = if list.is_empty() {
        ((0, 0, 0), true)
    } else {
        (list[rng.gen_range(0..alpha)], false)
    };
    let u = cb.row(m.m1, b1, dims.kb);
    let v2 = &cb.v2_words[a2];
    let v3 = &cb.v3_words[a3];
    let x = (0..dims.n)
        .map(|i| model.sample_x(model.cell(u[i], v2[i], v3[i]), rng))
        .collect();
    Encoding {
        b1,
        a2,
        a3,
        alpha,
        fallback,
        x,
    }
}

const TIE_REL: f64 = 1e-9;

/// Tracks the best score and whether it is shared.
struct Best<T> {
    score: f64,
    arg: Option<T>,
    tied: bool,
}

impl<T: Copy + PartialEq> Best<T> {
    fn new() -> Self {
        Self {
            score: f64::NEG_INFINITY,
            arg: None,
            tied: false,
        }
    }

    fn offer(&mut self, score: f64, arg: T, same_class: impl Fn(T, T) -> bool) {
        if score == f64::NEG_INFINITY {
            return;
        }
        let tol = TIE_REL * self.score.abs().max(1.0);
        match self.arg {
            None => {
                self.score = score;
                self.arg = Some(arg);
            }
            Some(prev) => {
                if score > self.score + tol {
                    self.score = score;
                    self.arg = Some(arg);
                    self.tied = false;
                } else if score >= self.score - tol && !same_class(prev, arg) {
                    self.tied = true;
                }
            }
        }
    }

    fn result(self) -> Option<T> {
        if self.tied {
            None
        } else {
            self.arg
        }
    }
}

/// Rx 1 decodes `(m1, b1, a⊕)`. Returns `None` on a tie or when no
/// candidate qualifies.
pub fn decode_rx1(
    model: &Model,
    cb: &Codebooks,
    dims: &Dims,
    y: &[u32],
    decoder: DecoderKind,
    eta: f64,
) -> Option<(usize, usize, usize)> {
    let q = model.q as usize;
    let ny = model.y_sizes[0];
    match decoder {
        DecoderKind::MaxLikelihood => {
            let mut best = Best::new();
            for (r, u) in cb.c1.iter().enumerate() {
                'words: for (a, w) in cb.sum_words.iter().enumerate() {
                    let mut ll = 0.0;
                    for i in 0..dims.n {
                        ll += model.rx1_metric[u[i] as usize * q + w[i] as usize][y[i] as usize];
                        if ll == f64::NEG_INFINITY {
                            continue 'words;
                        }
                    }
                    best.offer(ll, (r, a), |x, z| x == z);
                }
            }
            best.result().map(|(r, a)| (r >> dims.kb, r & ((1 << dims.kb) - 1), a))
        }
        DecoderKind::Typicality => {
            let mut found = None;
            let mut counts = vec![0usize; model.rx1_ref.len()];
            for (r, u) in cb.c1.iter().enumerate() {
                for (a, w) in cb.sum_words.iter().enumerate() {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for i in 0..dims.n {
                        counts[(u[i] as usize * q + w[i] as usize) * ny + y[i] as usize] += 1;
                    }
                    if is_typical(&counts, &model.rx1_ref, dims.n, eta) {
                        if found.is_some() {
                            return None;
                        }
                        found = Some((r, a));
                    }
                }
            }
            found.map(|(r, a)| (r >> dims.kb, r & ((1 << dims.kb) - 1), a))
        }
    }
}

/// Rx `j ∈ {2, 3}` decodes the bin of its codeword. Success requires every
/// best candidate to lie in a single bin.
pub fn decode_rxj(model: &Model, cb: &Codebooks, j: usize, y: &[u32], decoder: DecoderKind, eta: f64) -> Option<usize> {
    let words = cb.words(j);
    let n = y.len();
    match decoder {
        DecoderKind::MaxLikelihood => {
            let metric = &model.rxj_metric[j - 2];
            let mut best = Best::new();
            'words: for (a, v) in words.iter().enumerate() {
                let mut ll = 0.0;
                for i in 0..n {
                    ll += metric[v[i] as usize][y[i] as usize];
                    if ll == f64::NEG_INFINITY {
                        continue 'words;
                    }
                }
                best.offer(ll, cb.bin_of(j, a), |x, z| x == z);
            }
            best.result()
        }
        DecoderKind::Typicality => {
            let reference = &model.rxj_ref[j - 2];
            let ny = model.y_sizes[j - 1];
            let mut found: Option<usize> = None;
            let mut counts = vec![0usize; reference.len()];
            for (a, v) in words.iter().enumerate() {
                counts.iter_mut().for_each(|c| *c = 0);
                for i in 0..n {
                    counts[v[i] as usize * ny + y[i] as usize] += 1;
                }
                if is_typical(&counts, reference, n, eta) {
                    let bin = cb.bin_of(j, a);
                    match found {
                        Some(b) if b != bin => return None,
                        _ => found = Some(bin),
                    }
                }
            }
            found
        }
    }
}
