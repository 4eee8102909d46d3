use rand::distributions::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dims, Model};
use crate::error::{Error, Result};
use crate::finite_field::{build_nested_pair, NestedPccPair};

/// One draw of the random code ensemble with its codewords tabulated.
#[derive(Debug, Clone)]
pub struct Codebooks {
    /// Rows of `C1`, indexed `m1·2^kb + b1`, entries drawn iid from `p_{U1}`.
    pub c1: Vec<Vec<u32>>,
    pub pair: NestedPccPair,
    pub v2_words: Vec<Vec<u32>>,
    pub v3_words: Vec<Vec<u32>>,
    pub sum_words: Vec<Vec<u32>>,
}

impl Codebooks {
    pub fn row(&self, m1: usize, b1: usize, kb: usize) -> &[u32] {
        &self.c1[(m1 << kb) | b1]
    }

    pub fn words(&self, j: usize) -> &[Vec<u32>] {
        match j {
            2 => &self.v2_words,
            3 => &self.v3_words,
            _ => panic!("receiver {j} has no coset code"),
        }
    }

    pub fn bin_of(&self, j: usize, a: usize) -> usize {
        match j {
            2 => self.pair.lambda2.bin_of_index(a) as usize,
            3 => self.pair.lambda3.bin_of_index(a) as usize,
            _ => panic!("receiver {j} has no coset code"),
        }
    }

    pub fn bin(&self, j: usize, m: usize) -> &[u32] {
        match j {
            2 => self.pair.lambda2.bin_indices(m),
            3 => self.pair.lambda3.bin_indices(m),
            _ => panic!("receiver {j} has no coset code"),
        }
    }
}

/// Draws `C1` and the nested pair from one seed.
pub fn sample_codebooks(model: &Model, dims: &Dims, seed: u64) -> Result<Codebooks> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_u = WeightedIndex::new(model.p_u()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let c1 = (0..dims.c1_rows())
        .map(|_| (0..dims.n).map(|_| rng.sample(&p_u) as u32).collect())
        .collect();
    let pair = build_nested_pair(model.q, dims.n, dims.s2, dims.s3, dims.t2, dims.t3, rng.gen())?;
    let v2_words = (0..pair.lambda2.code().size()).map(|a| pair.lambda2.codeword_by_index(a)).collect();
    let v3_words = (0..pair.lambda3.code().size()).map(|a| pair.lambda3.codeword_by_index(a)).collect();
    let sum_words = (0..pair.lambda_sum.size()).map(|a| pair.lambda_sum.codeword_by_index(a)).collect();
    Ok(Codebooks {
        c1,
        pair,
        v2_words,
        v3_words,
        sum_words,
    })
}
