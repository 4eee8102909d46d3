use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Field;
use crate::error::{Error, Result};

/// Largest message-vector length whose binning map is stored explicitly.
pub const MAX_MESSAGE_SYMBOLS: usize = 20;
/// Largest explicit binning table (entries).
pub const MAX_TABLE: usize = 1 << 22;

/// A coset `{a·g ⊕ d}` of the row space of `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosetCode {
    q: u32,
    n: usize,
    generator: Vec<Vec<u32>>,
    shift: Vec<u32>,
}

impl CosetCode {
    pub fn new(q: u32, generator: Vec<Vec<u32>>, shift: Vec<u32>) -> Result<Self> {
        let field = Field::new(q)?;
        let n = shift.len();
        if let Some(row) = generator.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "generator row of length {} but block length {n}",
                row.len()
            )));
        }
        if generator.len() > n {
            return Err(Error::Dimension(format!(
                "s = {} exceeds n = {n}",
                generator.len()
            )));
        }
        let in_range = |v: &u32| *v < field.q();
        if !shift.iter().all(in_range) || !generator.iter().flatten().all(in_range) {
            return Err(Error::InvalidParameter("symbol outside [0, q)".into()));
        }
        Ok(Self {
            q,
            n,
            generator,
            shift,
        })
    }

    pub fn field(&self) -> Field {
        Field::new(self.q).expect("validated at construction")
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Message-vector length.
    pub fn s(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &[Vec<u32>] {
        &self.generator
    }

    pub fn shift(&self) -> &[u32] {
        &self.shift
    }

    /// `a·g ⊕ d`.
    pub fn codeword(&self, a: &[u32]) -> Result<Vec<u32>> {
        let field = self.field();
        if a.iter().any(|&x| x >= self.q) {
            return Err(Error::InvalidParameter("message symbol outside [0, q)".into()));
        }
        let ag = field.vec_mat(a, &self.generator, self.n)?;
        field.add_vec(&ag, &self.shift)
    }

    /// Codeword for the message vector with base-q index `index`.
    pub fn codeword_by_index(&self, index: usize) -> Vec<u32> {
        let a = self.field().vector_from_index(index, self.s());
        self.codeword(&a).expect("index decodes to a valid message")
    }

    /// Number of message vectors, `q^s`.
    pub fn size(&self) -> usize {
        self.field().count(self.s()).unwrap_or(usize::MAX)
    }
}

/// A coset code partitioned into bins by `ι : F_q^s → F_q^t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PccCode {
    code: CosetCode,
    t: usize,
    /// `binning[index(a)] = index(ι(a))`.
    binning: Vec<u32>,
    /// Message-vector indices per bin, ascending.
    #[serde(skip)]
    bins: Vec<Vec<u32>>,
}

impl PccCode {
    pub fn new(code: CosetCode, t: usize, binning: Vec<u32>) -> Result<Self> {
        let s = code.s();
        if t > s {
            return Err(Error::Dimension(format!("t = {t} exceeds s = {s}")));
        }
        let field = code.field();
        let table = table_size(field, s)?;
        if binning.len() != table {
            return Err(Error::Dimension(format!(
                "binning map has {} entries, expected q^s = {table}",
                binning.len()
            )));
        }
        let n_bins = field.count(t).ok_or_else(|| cap("q^t overflows"))?;
        if binning.iter().any(|&b| b as usize >= n_bins) {
            return Err(Error::InvalidParameter("bin index outside F_q^t".into()));
        }
        let mut bins = vec![Vec::new(); n_bins];
        for (a, &m) in binning.iter().enumerate() {
            bins[m as usize].push(a as u32);
        }
        Ok(Self {
            code,
            t,
            binning,
            bins,
        })
    }

    /// `t = s`, `ι` the identity.
    pub fn with_identity_binning(code: CosetCode) -> Result<Self> {
        let s = code.s();
        let table = table_size(code.field(), s)?;
        Self::new(code, s, (0..table as u32).collect())
    }

    pub fn code(&self) -> &CosetCode {
        &self.code
    }

    pub fn q(&self) -> u32 {
        self.code.q
    }

    pub fn n(&self) -> usize {
        self.code.n
    }

    pub fn s(&self) -> usize {
        self.code.s()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `S = s/n`.
    pub fn s_rate(&self) -> f64 {
        self.s() as f64 / self.n() as f64
    }

    /// `T = t/n`.
    pub fn t_rate(&self) -> f64 {
        self.t as f64 / self.n() as f64
    }

    pub fn codeword(&self, a: &[u32]) -> Result<Vec<u32>> {
        self.code.codeword(a)
    }

    pub fn codeword_by_index(&self, index: usize) -> Vec<u32> {
        self.code.codeword_by_index(index)
    }

    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    /// `ι(a)` as a base-q index.
    pub fn bin_of_index(&self, index: usize) -> u32 {
        self.binning[index]
    }

    pub fn bin_of(&self, a: &[u32]) -> Result<Vec<u32>> {
        if a.len() != self.s() {
            return Err(Error::Dimension(format!(
                "message length {} but s = {}",
                a.len(),
                self.s()
            )));
        }
        let idx = self.code.field().index_from_vector(a);
        Ok(self.code.field().vector_from_index(self.binning[idx] as usize, self.t))
    }

    /// Message-vector indices in bin `m` (base-q index of the bin label).
    pub fn bin_indices(&self, m: usize) -> &[u32] {
        &self.bins[m]
    }

    /// `ι⁻¹(m)` as message vectors.
    pub fn bin_members(&self, m: &[u32]) -> Result<Vec<Vec<u32>>> {
        if m.len() != self.t || m.iter().any(|&x| x >= self.q()) {
            return Err(Error::Dimension(format!(
                "bin index must be a vector in F_q^{}",
                self.t
            )));
        }
        let field = self.code.field();
        let idx = field.index_from_vector(m);
        Ok(self.bins[idx]
            .iter()
            .map(|&a| field.vector_from_index(a as usize, self.s()))
            .collect())
    }

    fn rebuild_bins(&mut self) {
        let mut bins = vec![Vec::new(); self.code.field().count(self.t).unwrap_or(0)];
        for (a, &m) in self.binning.iter().enumerate() {
            bins[m as usize].push(a as u32);
        }
        self.bins = bins;
    }

    /// Restores the bin lists after deserialization.
    pub fn reindex(mut self) -> Self {
        self.rebuild_bins();
        self
    }
}

/// Nested pair `λ2 ⊂ λ3` sharing leading generator rows, together with the
/// sum code `λ⊕` that contains every pairwise codeword sum.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedPccPair {
    pub lambda2: PccCode,
    pub lambda3: PccCode,
    pub lambda_sum: CosetCode,
}

impl NestedPccPair {
    /// Builds the pair from `g3` (whose first `s2` rows form `g2`), both
    /// shifts and both binning maps.
    pub fn from_parts(
        q: u32,
        g3: Vec<Vec<u32>>,
        s2: usize,
        d2: Vec<u32>,
        d3: Vec<u32>,
        t2: usize,
        iota2: Vec<u32>,
        t3: usize,
        iota3: Vec<u32>,
    ) -> Result<Self> {
        if s2 > g3.len() {
            return Err(Error::Dimension(format!(
                "s2 = {s2} exceeds s3 = {}",
                g3.len()
            )));
        }
        let field = Field::new(q)?;
        let g2 = g3[..s2].to_vec();
        let lambda2 = PccCode::new(CosetCode::new(q, g2, d2.clone())?, t2, iota2)?;
        let lambda3 = PccCode::new(CosetCode::new(q, g3.clone(), d3.clone())?, t3, iota3)?;
        let d_sum = field.add_vec(&d2, &d3)?;
        let lambda_sum = CosetCode::new(q, g3, d_sum)?;
        Ok(Self {
            lambda2,
            lambda3,
            lambda_sum,
        })
    }

    pub fn s2(&self) -> usize {
        self.lambda2.s()
    }

    pub fn s3(&self) -> usize {
        self.lambda3.s()
    }

    /// `a⊕ = a2·0^{s3−s2} ⊕ a3`.
    pub fn sum_index_vector(&self, a2: &[u32], a3: &[u32]) -> Result<Vec<u32>> {
        if a2.len() != self.s2() || a3.len() != self.s3() {
            return Err(Error::Dimension("message lengths do not match (s2, s3)".into()));
        }
        let field = self.lambda3.code().field();
        let mut padded = a2.to_vec();
        padded.resize(self.s3(), 0);
        field.add_vec(&padded, a3)
    }

    /// Index form of [`Self::sum_index_vector`]; zero-padding `a2` keeps its
    /// base-q index unchanged since the low digits come first.
    pub fn sum_index(&self, a2: usize, a3: usize) -> usize {
        let field = self.lambda3.code().field();
        let v2 = field.vector_from_index(a2, self.s3());
        let v3 = field.vector_from_index(a3, self.s3());
        let sum = field.add_vec(&v2, &v3).expect("equal lengths");
        field.index_from_vector(&sum)
    }
}

/// Draws `g3`, both shifts and both binning maps uniformly and independently.
pub fn build_nested_pair(
    q: u32,
    n: usize,
    s2: usize,
    s3: usize,
    t2: usize,
    t3: usize,
    seed: u64,
) -> Result<NestedPccPair> {
    let field = Field::new(q)?;
    if s2 > s3 {
        return Err(Error::Dimension(format!("s2 = {s2} exceeds s3 = {s3}")));
    }
    if s3 > n {
        return Err(Error::Dimension(format!("s3 = {s3} exceeds n = {n}")));
    }
    if t2 > s2 || t3 > s3 {
        return Err(Error::Dimension("bin-index length exceeds message length".into()));
    }
    let table2 = table_size(field, s2)?;
    let table3 = table_size(field, s3)?;
    let bins2 = field.count(t2).ok_or_else(|| cap("q^t2 overflows"))? as u32;
    let bins3 = field.count(t3).ok_or_else(|| cap("q^t3 overflows"))? as u32;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g3: Vec<Vec<u32>> = (0..s3)
        .map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect())
        .collect();
    let d2: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q)).collect();
    let d3: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q)).collect();
    let iota2: Vec<u32> = (0..table2).map(|_| rng.gen_range(0..bins2)).collect();
    let iota3: Vec<u32> = (0..table3).map(|_| rng.gen_range(0..bins3)).collect();
    NestedPccPair::from_parts(q, g3, s2, d2, d3, t2, iota2, t3, iota3)
}

fn table_size(field: Field, s: usize) -> Result<usize> {
    if s > MAX_MESSAGE_SYMBOLS {
        return Err(cap(&format!(
            "s = {s} exceeds {MAX_MESSAGE_SYMBOLS} symbols"
        )));
    }
    match field.count(s) {
        Some(size) if size <= MAX_TABLE => Ok(size),
        _ => Err(cap(&format!("q^s table for s = {s} exceeds {MAX_TABLE} entries"))),
    }
}

fn cap(msg: &str) -> Error {
    Error::CapExceeded(msg.to_string())
}
