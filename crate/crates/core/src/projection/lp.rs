//! Dense two-phase simplex with Bland's rule for small problems
//! `max c·x` subject to row constraints and `x ≥ 0`.

use crate::error::{Error, Result};
use crate::rate_region::Sense;

const PIVOT_EPS: f64 = 1e-11;
/// Phase-1 optimum above this counts as infeasible.
pub const TOL_PHASE1: f64 = 1e-9;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LpRow {
    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self {
            coeffs,
            sense: Sense::Le,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible { phase1: f64 },
    Unbounded,
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes the objective row (stored as reduced costs, `z − c`) over
    /// columns `< allowed`. Returns false when unbounded.
    fn run(&mut self, allowed: usize) -> Result<bool> {
        let m = self.m();
        for _ in 0..MAX_PIVOTS {
            let obj = &self.t[m];
            let Some(enter) = (0..allowed).find(|&j| obj[j] < -PIVOT_EPS) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][enter];
                if a > PIVOT_EPS {
                    let ratio = self.t[i][self.cols] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
        Err(Error::LpDefect("pivot limit reached".into()))
    }
}

/// Solves `max c·x` s.t. `rows`, `x ≥ 0`.
pub fn maximize(c: &[f64], rows: &[LpRow]) -> Result<LpOutcome> {
    let n = c.len();
    if rows.iter().any(|r| r.coeffs.len() != n) {
        return Err(Error::Dimension("LP row width differs from objective".into()));
    }
    // normalize to nonnegative right sides
    let rows: Vec<(Vec<f64>, Sense, f64)> = rows
        .iter()
        .map(|r| {
            if r.rhs < 0.0 {
                let flipped = match r.sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                };
                (r.coeffs.iter().map(|a| -a).collect(), flipped, -r.rhs)
            } else {
                (r.coeffs.clone(), r.sense, r.rhs)
            }
        })
        .collect();
    let m = rows.len();
    let n_slack = m;
    let n_art = rows.iter().filter(|r| r.1 == Sense::Ge).count();
    let cols = n + n_slack + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m + 1];
    let mut basis = vec![0; m];
    let mut art = n + n_slack;
    let mut art_rows = Vec::new();
    for (i, (a, sense, b)) in rows.iter().enumerate() {
        t[i][..n].copy_from_slice(a);
        t[i][cols] = *b;
        match sense {
            Sense::Le => {
                t[i][n + i] = 1.0;
                basis[i] = n + i;
            }
            Sense::Ge => {
                t[i][n + i] = -1.0;
                t[i][art] = 1.0;
                basis[i] = art;
                art_rows.push(i);
                art += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, cols };

    // phase 1: maximize −Σ artificials
    if n_art > 0 {
        for j in (n + n_slack)..cols {
            tab.t[m][j] = 1.0;
        }
        for &i in &art_rows {
            let row = tab.t[i].clone();
            for (o, v) in tab.t[m].iter_mut().zip(&row) {
                *o -= v;
            }
        }
        if !tab.run(cols)? {
            return Err(Error::LpDefect("phase 1 unbounded".into()));
        }
        let phase1 = -tab.t[m][cols];
        if phase1 > TOL_PHASE1 {
            return Ok(LpOutcome::Infeasible { phase1 });
        }
        // drive zero-level artificials out of the basis
        for i in 0..m {
            if tab.basis[i] >= n + n_slack {
                if let Some(j) = (0..n + n_slack).find(|&j| tab.t[i][j].abs() > PIVOT_EPS) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    // phase 2
    for v in tab.t[m].iter_mut() {
        *v = 0.0;
    }
    for j in 0..n {
        tab.t[m][j] = -c[j];
    }
    for i in 0..m {
        let bj = tab.basis[i];
        let cb = if bj < n { c[bj] } else { 0.0 };
        if cb != 0.0 {
            let row = tab.t[i].clone();
            for (o, v) in tab.t[m].iter_mut().zip(&row) {
                *o += cb * v;
            }
        }
    }
    if !tab.run(n + n_slack)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.t[i][cols];
        }
    }
    Ok(LpOutcome::Optimal {
        value: tab.t[m][cols],
        x,
    })
}

/// Feasibility of `rows` over `x ≥ 0`.
pub fn feasible(n: usize, rows: &[LpRow]) -> Result<bool> {
    Ok(matches!(maximize(&vec![0.0; n], rows)?, LpOutcome::Optimal { .. }))
}
