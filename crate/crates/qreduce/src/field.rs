//! Exact arithmetic over prime fields F_q and the linear algebra every other
//! module consumes: reduced row echelon form, kernel bases, inner products and
//! additive characters.
//!
//! Only prime moduli are accepted. The additive character over F_q with q = p
//! prime is `chi_y(x) = exp(2*pi*i*(x.y)/q)`; extension fields would need trace
//! characters and are rejected at field construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A prime field context. Cheap to copy; all elements carry their modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fq {
    q: u32,
}

impl Fq {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::ModulusTooSmall { q });
        }
        if !is_prime(q) {
            return Err(Error::NonPrimeModulus { q });
        }
        Ok(Fq { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Reduce an integer into the canonical range [0, q).
    pub fn element(&self, value: i64) -> FqElement {
        let q = self.q as i64;
        let v = value.rem_euclid(q);
        FqElement {
            value: v as u32,
            q: self.q,
        }
    }

    pub fn zero(&self) -> FqElement {
        self.element(0)
    }

    pub fn one(&self) -> FqElement {
        self.element(1)
    }

    pub fn vector(&self, residues: &[i64]) -> FqVector {
        FqVector {
            q: self.q,
            entries: residues
                .iter()
                .map(|&v| v.rem_euclid(self.q as i64) as u32)
                .collect(),
        }
    }

    pub fn zero_vector(&self, n: usize) -> FqVector {
        FqVector {
            q: self.q,
            entries: vec![0; n],
        }
    }

    pub fn matrix(&self, rows: usize, cols: usize, entries: &[i64]) -> Result<FqMatrix> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                context: format!(
                    "{}x{} matrix needs {} entries, got {}",
                    rows,
                    cols,
                    rows * cols,
                    entries.len()
                ),
            });
        }
        Ok(FqMatrix {
            q: self.q,
            rows,
            cols,
            data: entries
                .iter()
                .map(|&v| v.rem_euclid(self.q as i64) as u32)
                .collect(),
        })
    }

    pub fn zero_matrix(&self, rows: usize, cols: usize) -> FqMatrix {
        FqMatrix {
            q: self.q,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(&self, n: usize) -> FqMatrix {
        let mut m = self.zero_matrix(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }
}

/// An element of F_q: a residue in [0, q) tagged with its prime modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FqElement {
    value: u32,
    q: u32,
}

impl FqElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &FqElement) {
        assert_eq!(self.q, other.q, "mixed moduli: {} vs {}", self.q, other.q);
    }

    pub fn add(&self, rhs: FqElement) -> FqElement {
        self.check(&rhs);
        FqElement {
            value: (self.value + rhs.value) % self.q,
            q: self.q,
        }
    }

    pub fn sub(&self, rhs: FqElement) -> FqElement {
        self.check(&rhs);
        FqElement {
            value: (self.value + self.q - rhs.value) % self.q,
            q: self.q,
        }
    }

    pub fn mul(&self, rhs: FqElement) -> FqElement {
        self.check(&rhs);
        FqElement {
            value: ((self.value as u64 * rhs.value as u64) % self.q as u64) as u32,
            q: self.q,
        }
    }

    pub fn neg(&self) -> FqElement {
        FqElement {
            value: (self.q - self.value) % self.q,
            q: self.q,
        }
    }

    /// Multiplicative inverse by Fermat exponentiation. Panics on zero.
    pub fn inv(&self) -> FqElement {
        assert!(self.value != 0, "inverse of zero in F_{}", self.q);
        let mut result = 1u64;
        let mut base = self.value as u64;
        let mut e = self.q as u64 - 2;
        let q = self.q as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        FqElement {
            value: result as u32,
            q: self.q,
        }
    }
}

impl fmt::Display for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A vector over F_q, stored as raw residues sharing one modulus.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct FqVector {
    q: u32,
    entries: Vec<u32>,
}

impl FqVector {
    pub fn from_residues(q: u32, entries: Vec<u32>) -> Result<Self> {
        let field = Fq::new(q)?;
        Ok(FqVector {
            q: field.q,
            entries: entries.into_iter().map(|v| v % q).collect(),
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> FqElement {
        FqElement {
            value: self.entries[i],
            q: self.q,
        }
    }

    /// Number of nonzero coordinates.
    pub fn hamming_weight(&self) -> usize {
        self.entries.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    fn check_len(&self, other: &FqVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        assert_eq!(self.q, other.q, "mixed moduli");
        Ok(())
    }

    pub fn add(&self, other: &FqVector) -> Result<FqVector> {
        self.check_len(other)?;
        Ok(FqVector {
            q: self.q,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| (a + b) % self.q)
                .collect(),
        })
    }

    pub fn sub(&self, other: &FqVector) -> Result<FqVector> {
        self.check_len(other)?;
        Ok(FqVector {
            q: self.q,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| (a + self.q - b) % self.q)
                .collect(),
        })
    }

    /// Standard inner product sum x_i y_i mod q.
    pub fn inner_product(&self, other: &FqVector) -> Result<FqElement> {
        self.check_len(other)?;
        let q = self.q as u64;
        let mut acc = 0u64;
        for (&a, &b) in self.entries.iter().zip(&other.entries) {
            acc = (acc + a as u64 * b as u64) % q;
        }
        Ok(FqElement {
            value: acc as u32,
            q: self.q,
        })
    }
}

impl fmt::Display for FqVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, ")")
    }
}

/// The additive character chi_y(x) = exp(2*pi*i*(x.y)/q) as a unit-modulus
/// complex number. Prime q only (enforced at field construction).
pub fn character(y: &FqVector, x: &FqVector) -> Result<Complex64> {
    let ip = y.inner_product(x)?;
    let angle = TAU * ip.value() as f64 / ip.modulus() as f64;
    Ok(Complex64::new(angle.cos(), angle.sin()))
}

/// Row-major matrix over F_q.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FqMatrix {
    q: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Outcome of Gaussian elimination: the RREF matrix, its rank and the pivot
/// column indices in increasing order.
#[derive(Clone, Debug)]
pub struct RrefResult {
    pub matrix: FqMatrix,
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
}

impl FqMatrix {
    pub fn from_rows(rows: &[FqVector]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::ShapeMismatch {
            context: "matrix from empty row list".into(),
        })?;
        let cols = first.len();
        let q = first.q();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols || r.q() != q {
                return Err(Error::ShapeMismatch {
                    context: "rows of differing length or modulus".into(),
                });
            }
            data.extend_from_slice(r.entries());
        }
        Ok(FqMatrix {
            q,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.q;
    }

    pub fn row(&self, r: usize) -> FqVector {
        FqVector {
            q: self.q,
            entries: self.data[r * self.cols..(r + 1) * self.cols].to_vec(),
        }
    }

    pub fn row_iter(&self) -> impl Iterator<Item = FqVector> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn entries_row_major(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut out = FqMatrix {
            q: self.q,
            rows: self.cols,
            cols: self.rows,
            data: vec![0; self.data.len()],
        };
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// M . x^T for a length-`cols` vector x.
    pub fn mul_vector(&self, x: &FqVector) -> Result<FqVector> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch {
                left: self.cols,
                right: x.len(),
            });
        }
        let q = self.q as u64;
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u64;
            for c in 0..self.cols {
                acc = (acc + self.get(r, c) as u64 * x.entries[c] as u64) % q;
            }
            out.push(acc as u32);
        }
        Ok(FqVector {
            q: self.q,
            entries: out,
        })
    }

    /// x . M for a length-`rows` vector x.
    pub fn vector_mul(&self, x: &FqVector) -> Result<FqVector> {
        if x.len() != self.rows {
            return Err(Error::LengthMismatch {
                left: self.rows,
                right: x.len(),
            });
        }
        let q = self.q as u64;
        let mut out = Vec::with_capacity(self.cols);
        for c in 0..self.cols {
            let mut acc = 0u64;
            for r in 0..self.rows {
                acc = (acc + x.entries[r] as u64 * self.get(r, c) as u64) % q;
            }
            out.push(acc as u32);
        }
        Ok(FqVector {
            q: self.q,
            entries: out,
        })
    }

    pub fn mat_mul(&self, other: &FqMatrix) -> Result<FqMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                context: format!(
                    "{}x{} * {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        let q = self.q as u64;
        let mut out = FqMatrix {
            q: self.q,
            rows: self.rows,
            cols: other.cols,
            data: vec![0; self.rows * other.cols],
        };
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0u64;
                for m in 0..self.cols {
                    acc = (acc + self.get(r, m) as u64 * other.get(m, c) as u64) % q;
                }
                out.data[r * other.cols + c] = acc as u32;
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form via Gauss-Jordan elimination.
    pub fn rref(&self) -> RrefResult {
        let field = Fq { q: self.q };
        let mut m = self.clone();
        let mut pivot_columns = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..m.cols {
            if pivot_row >= m.rows {
                break;
            }
            let Some(src) = (pivot_row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if src != pivot_row {
                for c in 0..m.cols {
                    let tmp = m.get(src, c);
                    let v = m.get(pivot_row, c);
                    m.set(src, c, v);
                    m.set(pivot_row, c, tmp);
                }
            }
            let inv = field
                .element(m.get(pivot_row, col) as i64)
                .inv()
                .value() as u64;
            let q = m.q as u64;
            for c in 0..m.cols {
                let v = m.get(pivot_row, c) as u64 * inv % q;
                m.set(pivot_row, c, v as u32);
            }
            for r in 0..m.rows {
                if r != pivot_row && m.get(r, col) != 0 {
                    let factor = m.get(r, col) as u64;
                    for c in 0..m.cols {
                        let v = (m.get(r, c) as u64 + (q - factor % q) * m.get(pivot_row, c) as u64)
                            % q;
                        m.set(r, c, v as u32);
                    }
                }
            }
            pivot_columns.push(col);
            pivot_row += 1;
        }
        RrefResult {
            matrix: m,
            rank: pivot_columns.len(),
            pivot_columns,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the right kernel {x : M x^T = 0}, one row per basis vector.
    /// Returns a (cols - rank) x cols matrix; zero rows when the kernel is
    /// trivial yields a 0 x cols matrix.
    pub fn kernel_basis(&self) -> FqMatrix {
        let RrefResult {
            matrix: r,
            rank,
            pivot_columns,
        } = self.rref();
        let n = self.cols;
        let free: Vec<usize> = (0..n).filter(|c| !pivot_columns.contains(c)).collect();
        let mut data = Vec::with_capacity(free.len() * n);
        for &fc in &free {
            let mut v = vec![0u32; n];
            v[fc] = 1;
            // pivot var of row i solves: x[pivot_i] = -sum over free cols
            for (i, &pc) in pivot_columns.iter().enumerate() {
                let coeff = r.get(i, fc);
                v[pc] = (self.q - coeff) % self.q;
            }
            data.extend_from_slice(&v);
        }
        FqMatrix {
            q: self.q,
            rows: free.len(),
            cols: n,
            data,
        }
        .assert_kernel_of(self, rank)
    }

    fn assert_kernel_of(self, m: &FqMatrix, rank: usize) -> FqMatrix {
        debug_assert_eq!(self.rows + rank, m.cols);
        debug_assert!(self
            .row_iter()
            .all(|row| m.mul_vector(&row).map(|s| s.is_zero()).unwrap_or(false)));
        self
    }
}

impl fmt::Display for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
