//! Small dense quantum-state linear algebra: validation, spectra, von Neumann
//! entropy and partial traces.

mod matrix;

pub use matrix::{hermitian_eigenvalues, CMatrix, JACOBI_TOL};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const TOL_HERMITIAN: f64 = 1e-10;
pub const TOL_NEGATIVE_EIGENVALUE: f64 = 1e-8;
pub const TOL_TRACE: f64 = 1e-9;
pub const MAX_DIM: usize = 64;

/// Eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn of(m: &CMatrix) -> Self {
        Self {
            eigenvalues: hermitian_eigenvalues(m),
        }
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Validation report for a candidate density matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace_defect: f64,
    pub hermitian: bool,
    pub positive: bool,
    pub unit_trace: bool,
}

impl Diagnostics {
    pub fn passed(&self) -> bool {
        self.hermitian && self.positive && self.unit_trace
    }
}

/// Reports Hermiticity, positivity and trace defects of `m`.
pub fn validate(m: &CMatrix) -> Diagnostics {
    let hermiticity_defect = m.hermiticity_defect();
    let min_eigenvalue = Spectrum::of(m).min();
    let tr = m.trace();
    let trace_defect = ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt();
    Diagnostics {
        hermiticity_defect,
        min_eigenvalue,
        trace_defect,
        hermitian: hermiticity_defect <= TOL_HERMITIAN,
        positive: min_eigenvalue >= -TOL_NEGATIVE_EIGENVALUE,
        unit_trace: trace_defect <= TOL_TRACE,
    }
}

/// A validated density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.dim() == 0 || matrix.dim() > MAX_DIM {
            return Err(Error::Dimension(format!(
                "density dimension {} outside [1, {MAX_DIM}]",
                matrix.dim()
            )));
        }
        let d = validate(&matrix);
        if !d.hermitian {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (defect {:.3e})",
                d.hermiticity_defect
            )));
        }
        if !d.positive {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {:.3e}",
                d.min_eigenvalue
            )));
        }
        if !d.unit_trace {
            return Err(Error::InvalidDensity(format!(
                "trace defect {:.3e}",
                d.trace_defect
            )));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// `diag(p)`; `p` must be a probability vector.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_real_diagonal(p))
    }

    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Self::new(CMatrix::projector(psi))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(&self.matrix)
    }

    /// Convex mixture `Σ w_i ρ_i`; weights must sum to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let dim = parts
            .first()
            .map(|(_, r)| r.dim())
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut m = CMatrix::zeros(dim);
        for (w, r) in parts {
            if r.dim() != dim {
                return Err(Error::Dimension("mixture of unequal dimensions".into()));
            }
            m.add_scaled(&r.matrix, *w);
        }
        Self::new(m)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

/// `−Σ λ log2 λ` over the eigenvalues of a positive semidefinite matrix;
/// eigenvalues in `[−1e-8, 0]` count as zero. Works for sub-normalized input.
pub fn entropy_of_matrix(m: &CMatrix) -> Result<f64> {
    let spectrum = Spectrum::of(m);
    if spectrum.min() < -TOL_NEGATIVE_EIGENVALUE {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {:.3e}",
            spectrum.min()
        )));
    }
    Ok(shannon_bits(&spectrum.eigenvalues))
}

/// `−Σ p log2 p` with `0·log 0 = 0`; non-positive entries are skipped.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in bits.
pub fn vn_entropy(rho: &DensityOperator) -> f64 {
    shannon_bits(&rho.spectrum().eigenvalues)
}

/// Traces out every tensor factor not listed in `keep` (factor order kept).
pub fn partial_trace(rho: &DensityOperator, dims: &[usize], keep: &[usize]) -> Result<DensityOperator> {
    let out = partial_trace_matrix(rho.matrix(), dims, keep)?;
    Ok(DensityOperator { matrix: out })
}

/// Partial trace on a raw matrix; linear, so it also applies to unnormalized input.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if total != m.dim() || dims.is_empty() {
        return Err(Error::Dimension(format!(
            "factor dimensions {dims:?} do not multiply to {}",
            m.dim()
        )));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension(format!("keep index outside {} factors", dims.len())));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();

    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    // strides of each factor in the full index (row-major, factor 0 most significant)
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let compose = |kept: usize, env: usize| -> usize {
        let mut idx = 0;
        let mut rem = kept;
        for (pos, &k) in keep_sorted.iter().enumerate().rev() {
            idx += (rem % kept_dims[pos]) * strides[k];
            rem /= kept_dims[pos];
        }
        let mut rem = env;
        for (pos, &k) in traced.iter().enumerate().rev() {
            idx += (rem % traced_dims[pos]) * strides[k];
            rem /= traced_dims[pos];
        }
        idx
    };

    let mut out = CMatrix::zeros(out_dim);
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..env_dim {
                acc += m[(compose(i, e), compose(j, e))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}
