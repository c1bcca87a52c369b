//! Dense linear algebra over GF(2) for dimensions up to 8.
//!
//! A vector is a bit mask: coordinate `k` (0-based) is bit `k`, so the standard
//! basis vector `e_k` (1-based) is `1 << (k - 1)`. Matrix row `i` is a bit mask
//! whose bit `j` is the entry in column `j`.

use std::fmt;

use crate::{Error, Result};

pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GF2Vector {
    n: u8,
    bits: u8,
}

impl GF2Vector {
    pub fn new(n: usize, bits: u32) -> Self {
        assert!(n <= MAX_DIM && (n == 8 || bits >> n == 0), "vector out of range");
        Self {
            n: n as u8,
            bits: bits as u8,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, 0)
    }

    /// Standard basis vector `e_k`, `1 ≤ k ≤ n`.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!((1..=n).contains(&k));
        Self::new(n, 1 << (k - 1))
    }

    pub fn dim(self) -> usize {
        self.n as usize
    }

    pub fn bits(self) -> u32 {
        self.bits as u32
    }

    /// Coordinate `k`, 1-based.
    pub fn coord(self, k: usize) -> u8 {
        (self.bits >> (k - 1)) & 1
    }

    pub fn add(self, other: Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            bits: self.bits ^ other.bits,
        }
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }
}

impl fmt::Debug for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for k in 1..=self.dim() {
            write!(f, "{}", self.coord(k))?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GF2Matrix {
    n: u8,
    rows: [u8; MAX_DIM],
}

impl GF2Matrix {
    pub fn from_rows(rows: &[u32]) -> Self {
        let n = rows.len();
        assert!(n <= MAX_DIM);
        let mut r = [0u8; MAX_DIM];
        for (i, &row) in rows.iter().enumerate() {
            assert!(n == 8 || row >> n == 0, "row has bits beyond dimension");
            r[i] = row as u8;
        }
        Self { n: n as u8, rows: r }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_rows(&vec![0; n])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(&(0..n).map(|i| 1u32 << i).collect::<Vec<_>>())
    }

    /// Jordan block with eigenvalue 1: ones on the diagonal and superdiagonal.
    pub fn jordan(n: usize) -> Self {
        Self::from_rows(
            &(0..n)
                .map(|i| (1u32 << i) | if i + 1 < n { 1 << (i + 1) } else { 0 })
                .collect::<Vec<_>>(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn rows(&self) -> Vec<u32> {
        self.rows[..self.dim()].iter().map(|&r| r as u32).collect()
    }

    /// Entry `(i, j)`, 0-based.
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        (self.rows[i] >> j) & 1
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..self.dim() {
            out.rows[i] ^= other.rows[i];
        }
        out
    }

    pub fn mul_vec(&self, v: GF2Vector) -> GF2Vector {
        let mut bits = 0u32;
        for i in 0..self.dim() {
            bits |= ((self.rows[i] & v.bits).count_ones() & 1) << i;
        }
        GF2Vector::new(self.dim(), bits)
    }

    pub fn mul(&self, other: &Self) -> Self {
        // row i of AB = sum over j with A_ij = 1 of row j of B
        let mut out = Self::zero(self.dim());
        for i in 0..self.dim() {
            let mut acc = 0u8;
            for j in 0..self.dim() {
                if self.entry(i, j) == 1 {
                    acc ^= other.rows[j];
                }
            }
            out.rows[i] = acc;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.dim());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out.rows[j] |= self.entry(i, j) << i;
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(&self.rows())
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.dim()
    }

    /// Gauss–Jordan inverse, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim();
        let mut a: Vec<u32> = self.rows();
        let mut inv: Vec<u32> = (0..n).map(|i| 1 << i).collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| (a[r] >> col) & 1 == 1)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Some(Self::from_rows(&inv))
    }

    pub fn kernel_dim(&self) -> usize {
        self.dim() - self.rank()
    }

    /// True if `v` lies in the column space `Im(M)`.
    pub fn image_contains(&self, v: GF2Vector) -> bool {
        let mut cols = self.transpose().rows();
        let r = rank_of_rows(&cols);
        cols.push(v.bits());
        rank_of_rows(&cols) == r
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, ";")?;
            }
            for j in 0..self.dim() {
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Rank of a list of bit-mask rows.
pub fn rank_of_rows(rows: &[u32]) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for &r in rows {
        let mut x = r;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// `|GL(n,2)| = ∏_{i<n} (2ⁿ - 2ⁱ)`.
pub fn gl_order(n: usize) -> usize {
    (0..n).map(|i| (1usize << n) - (1usize << i)).product()
}

/// All invertible `n × n` matrices over GF(2), identity first, the rest in
/// lexicographic order of their row lists.
pub fn gl_enumerate(n: usize) -> Result<Vec<GF2Matrix>> {
    if !(1..=5).contains(&n) {
        return Err(Error::Dimension { n, min: 1, max: 5 });
    }
    let mut out = Vec::with_capacity(gl_order(n));
    let mut rows = Vec::with_capacity(n);
    let mut span = vec![false; 1 << n];
    span[0] = true;
    extend_rows(n, &mut rows, &mut span, &mut out);
    let id = GF2Matrix::identity(n);
    let pos = out.iter().position(|m| *m == id).expect("identity is invertible");
    out[..=pos].rotate_right(1);
    Ok(out)
}

fn extend_rows(n: usize, rows: &mut Vec<u32>, span: &mut Vec<bool>, out: &mut Vec<GF2Matrix>) {
    if rows.len() == n {
        out.push(GF2Matrix::from_rows(rows));
        return;
    }
    for r in 1..(1u32 << n) {
        if span[r as usize] {
            continue;
        }
        let old: Vec<usize> = (0..span.len()).filter(|&x| span[x]).collect();
        for &x in &old {
            span[x ^ r as usize] = true;
        }
        rows.push(r);
        extend_rows(n, rows, span, out);
        rows.pop();
        for &x in &old {
            span[x ^ r as usize] = false;
        }
    }
}
