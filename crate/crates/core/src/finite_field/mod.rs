//! Prime-field arithmetic and partitioned coset codes.
//!
//! Symbols are stored as plain `u32` values in `[0, q)` and interpreted through
//! a [`Field`] context. [`FieldElement`] carries its modulus and is the checked
//! scalar type for callers that want operator overloading.

mod pcc;

pub use pcc::{build_nested_pair, CosetCode, NestedPccPair, PccCode, MAX_MESSAGE_SYMBOLS, MAX_TABLE};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    q: u32,
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NonPrimeField(q));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        FieldElement::new(value, self.q)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.q - b) % self.q
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        (self.q - a % self.q) % self.q
    }

    /// Multiplicative inverse via Fermat's little theorem; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a % self.q == 0 {
            return None;
        }
        Some(self.pow(a, self.q - 2))
    }

    pub fn pow(&self, base: u32, mut exp: u32) -> u32 {
        let q = self.q as u64;
        let mut b = base as u64 % q;
        let mut acc = 1u64 % q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % q;
            }
            b = b * b % q;
            exp >>= 1;
        }
        acc as u32
    }

    /// Componentwise `a ⊕ b`.
    pub fn add_vec(&self, a: &[u32], b: &[u32]) -> Result<Vec<u32>> {
        if a.len() != b.len() {
            return Err(Error::Dimension(format!(
                "vector lengths {} and {} differ",
                a.len(),
                b.len()
            )));
        }
        Ok(a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect())
    }

    /// Componentwise `a ⊖ b`.
    pub fn sub_vec(&self, a: &[u32], b: &[u32]) -> Result<Vec<u32>> {
        if a.len() != b.len() {
            return Err(Error::Dimension(format!(
                "vector lengths {} and {} differ",
                a.len(),
                b.len()
            )));
        }
        Ok(a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect())
    }

    /// Row-vector times matrix: `a · g` where `g` is given as its rows.
    pub fn vec_mat(&self, a: &[u32], rows: &[Vec<u32>], n: usize) -> Result<Vec<u32>> {
        if a.len() != rows.len() {
            return Err(Error::Dimension(format!(
                "message length {} but generator has {} rows",
                a.len(),
                rows.len()
            )));
        }
        let mut out = vec![0u32; n];
        for (&coef, row) in a.iter().zip(rows) {
            if coef == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(row) {
                *o = (*o + self.mul(coef, g)) % self.q;
            }
        }
        Ok(out)
    }

    /// Number of vectors in F_q^len, or `None` on overflow.
    pub fn count(&self, len: usize) -> Option<usize> {
        (self.q as usize).checked_pow(len as u32)
    }

    /// Base-q digits of `index`, least significant first.
    pub fn vector_from_index(&self, mut index: usize, len: usize) -> Vec<u32> {
        let q = self.q as usize;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push((index % q) as u32);
            index /= q;
        }
        out
    }

    pub fn index_from_vector(&self, v: &[u32]) -> usize {
        let q = self.q as usize;
        v.iter().rev().fold(0usize, |acc, &d| acc * q + d as usize)
    }
}

/// A checked element of F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    q: u32,
}

impl FieldElement {
    pub fn new(value: u32, q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NonPrimeField(q));
        }
        if value >= q {
            return Err(Error::InvalidParameter(format!(
                "value {value} outside [0, {q})"
            )));
        }
        Ok(Self { value, q })
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Option<Self> {
        Field { q: self.q }
            .inv(self.value)
            .map(|value| Self { value, q: self.q })
    }

    fn field(&self, other: &Self) -> Field {
        assert_eq!(self.q, other.q, "mixed field moduli");
        Field { q: self.q }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.q)
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let value = self.field(&rhs).add(self.value, rhs.value);
        Self { value, q: self.q }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let value = self.field(&rhs).sub(self.value, rhs.value);
        Self { value, q: self.q }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let value = self.field(&rhs).mul(self.value, rhs.value);
        Self { value, q: self.q }
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        let value = Field { q: self.q }.neg(self.value);
        Self { value, q: self.q }
    }
}
