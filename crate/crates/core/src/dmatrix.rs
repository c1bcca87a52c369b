//! The derangement matrix `M(G)`: rows are derangements, columns are ordered
//! pairs `(a, b)` of distinct points, and the entry is 1 iff `d(a) = b`.
//! Rank over the rationals is certified by sandwiching modular ranks against
//! the span of explicit kernel vectors.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::affine::Agl;
use crate::character::{coset_char_sum, ClassFunction};
use crate::group::{ElemId, GroupTable};
use crate::perm::Permutation;
use crate::rational::{fmt_q, Q};
use crate::{Error, Exec, Result};

/// Column index of `(a, b)`, `a ≠ b`, in lexicographic order.
pub fn pair_column(points: usize, a: usize, b: usize) -> usize {
    debug_assert!(a != b);
    a * (points - 1) + if b > a { b - 1 } else { b }
}

pub fn column_pair(points: usize, col: usize) -> (usize, usize) {
    let a = col / (points - 1);
    let r = col % (points - 1);
    (a, if r >= a { r + 1 } else { r })
}

/// Dense 0/1 matrix with bit-packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    points: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
    row_ids: Vec<ElemId>,
}

impl BitMatrix {
    /// One row per element id, columns indexed by ordered pairs.
    pub fn from_rows(group: &GroupTable, ids: &[ElemId]) -> Self {
        let points = group.degree();
        let cols = points * (points - 1);
        let words = cols.div_ceil(64);
        let mut data = vec![0u64; words * ids.len()];
        for (r, &id) in ids.iter().enumerate() {
            let g = group.element(id);
            for a in 0..points {
                let b = g.apply(a);
                if a != b {
                    let c = pair_column(points, a, b);
                    data[r * words + c / 64] |= 1 << (c % 64);
                }
            }
        }
        Self {
            points,
            cols,
            words,
            data,
            row_ids: ids.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn row_ids(&self) -> &[ElemId] {
        &self.row_ids
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row(r)[c / 64] >> (c % 64) & 1 == 1
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn ones(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.points);
        for (w, &word) in self.row(r).iter().enumerate() {
            let mut x = word;
            while x != 0 {
                out.push(w * 64 + x.trailing_zeros() as usize);
                x &= x - 1;
            }
        }
        out
    }

    pub fn row_sum(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Every row has exactly `points` ones.
    pub fn row_sums_hold(&self) -> bool {
        (0..self.rows()).all(|r| self.row_sum(r) == self.points)
    }

    /// The matrix with column `(a, b)` moved to `(g(a), g(b))`.
    pub fn permute_columns(&self, g: &Permutation) -> Self {
        let mut data = vec![0u64; self.data.len()];
        for r in 0..self.rows() {
            for c in self.ones(r) {
                let (a, b) = column_pair(self.points, c);
                let nc = pair_column(self.points, g.apply(a), g.apply(b));
                data[r * self.words + nc / 64] |= 1 << (nc % 64);
            }
        }
        Self {
            data,
            ..self.clone()
        }
    }
}

/// `M(G)`, rows in derangement id order.
pub fn build_m(group: &GroupTable) -> BitMatrix {
    BitMatrix::from_rows(group, &group.derangements())
}

/// The submatrix of `M(G)` on the rows of one conjugacy class of derangements.
pub fn build_class_submatrix(group: &GroupTable, class: usize) -> Result<BitMatrix> {
    let members = &group.classes()[class].members;
    if group.element(members[0]).fixed_point_count() != 0 {
        return Err(Error::Mismatch("class does not consist of derangements".into()));
    }
    Ok(BitMatrix::from_rows(group, members))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KernelKind {
    L,
    R,
}

/// A vector in the span of the ordered pairs with coefficients in {−1, 0, 1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVector {
    pub pair: (usize, usize),
    pub kind: KernelKind,
    /// `(column, coefficient)` sorted by column.
    pub coeffs: Vec<(usize, i8)>,
}

impl KernelVector {
    pub fn l(points: usize, a: usize, b: usize) -> Self {
        let mut coeffs = vec![(pair_column(points, a, b), 1), (pair_column(points, b, a), -1)];
        for v in (0..points).filter(|&v| v != a && v != b) {
            coeffs.push((pair_column(points, a, v), 1));
            coeffs.push((pair_column(points, b, v), -1));
        }
        coeffs.sort_unstable();
        Self {
            pair: (a, b),
            kind: KernelKind::L,
            coeffs,
        }
    }

    pub fn r(points: usize, a: usize, b: usize) -> Self {
        let mut coeffs = vec![(pair_column(points, b, a), 1), (pair_column(points, a, b), -1)];
        for v in (0..points).filter(|&v| v != a && v != b) {
            coeffs.push((pair_column(points, v, a), 1));
            coeffs.push((pair_column(points, v, b), -1));
        }
        coeffs.sort_unstable();
        Self {
            pair: (a, b),
            kind: KernelKind::R,
            coeffs,
        }
    }

    pub fn nonzeros(&self) -> usize {
        self.coeffs.len()
    }

    pub fn dense(&self, cols: usize) -> Vec<i64> {
        let mut v = vec![0; cols];
        for &(c, x) in &self.coeffs {
            v[c] = x as i64;
        }
        v
    }
}

/// `l_(a,b)` and `r_(a,b)` for every ordered pair.
pub fn kernel_vectors(points: usize) -> Vec<KernelVector> {
    let mut out = Vec::with_capacity(2 * points * (points - 1));
    for kind in [KernelKind::L, KernelKind::R] {
        for a in 0..points {
            for b in (0..points).filter(|&b| b != a) {
                out.push(match kind {
                    KernelKind::L => KernelVector::l(points, a, b),
                    KernelKind::R => KernelVector::r(points, a, b),
                });
            }
        }
    }
    out
}

/// `M·v = 0` for every vector, in exact integer arithmetic.
pub fn verify_kernel(m: &BitMatrix, vecs: &[KernelVector]) -> bool {
    verify_kernel_with(m, vecs, Exec::default())
}

pub fn verify_kernel_with(m: &BitMatrix, vecs: &[KernelVector], exec: Exec) -> bool {
    let dense: Vec<Vec<i64>> = vecs.iter().map(|v| v.dense(m.cols())).collect();
    let rows: Vec<usize> = (0..m.rows()).collect();
    exec.all(&rows, |&r| {
        let ones = m.ones(r);
        dense.iter().all(|v| ones.iter().map(|&c| v[c]).sum::<i64>() == 0)
    })
}

/// Rank over the rationals of the stacked coefficient vectors, by
/// fraction-free (Bareiss) elimination.
pub fn kernel_span_dim(vecs: &[KernelVector], cols: usize) -> usize {
    let rows: Vec<Vec<BigInt>> = vecs
        .iter()
        .map(|v| v.dense(cols).into_iter().map(BigInt::from).collect())
        .collect();
    bareiss_rank(rows, cols)
}

pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..cols {
        if rank == a.len() {
            break;
        }
        let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot_row = a[rank].clone();
        let pivot = pivot_row[col].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let factor = row[col].clone();
            if factor.is_zero() {
                for x in row.iter_mut().skip(col + 1) {
                    *x = &*x * &pivot / &prev;
                }
            } else {
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(col + 1) {
                    *x = (&*x * &pivot - &factor * y) / &prev;
                }
            }
            row[col] = BigInt::zero();
        }
        prev = pivot.abs();
        rank += 1;
    }
    rank
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = (r as u128 * b as u128 % n as u128) as u64;
            }
            b = (b as u128 * b as u128 % n as u128) as u64;
            e >>= 1;
        }
        r
    };
    // bases 2, 3, 5, 7 are exact below 3.2e9
    [2u64, 3, 5, 7].iter().all(|&a| {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..s {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                return true;
            }
        }
        false
    })
}

/// `k` distinct primes in `[2³⁰, 2³¹)` drawn from a seeded generator.
pub fn random_primes(k: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let c = rng.random_range(1u64 << 30..1u64 << 31) | 1;
        if is_prime(c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Reduced row echelon basis over GF(p).
struct Echelon {
    p: u64,
    cols: usize,
    pivot_row: Vec<Option<usize>>,
    basis: Vec<Vec<u64>>,
}

impl Echelon {
    fn new(p: u64, cols: usize) -> Self {
        Self {
            p,
            cols,
            pivot_row: vec![None; cols],
            basis: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn axpy(p: u64, v: &mut [u64], c: u64, row: &[u64]) {
        let neg = p - c;
        for (x, &y) in v.iter_mut().zip(row) {
            if y != 0 {
                *x = (*x + neg * y) % p;
            }
        }
    }

    /// Remainder of a 0/1 row against the current basis, if nonzero.
    fn reduce_ones(&self, ones: &[usize]) -> Option<Vec<u64>> {
        let mut v = vec![0u64; self.cols];
        for &c in ones {
            v[c] = 1;
        }
        // pivot rows vanish on the other pivot columns, so only the
        // original ones can sit on pivots
        for &c in ones {
            if let Some(r) = self.pivot_row[c] {
                Self::axpy(self.p, &mut v, 1, &self.basis[r]);
            }
        }
        v.iter().any(|&x| x != 0).then_some(v)
    }

    /// Reduces `v` fully and adds it to the basis if it is independent.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for c in 0..self.cols {
            if v[c] != 0 {
                if let Some(r) = self.pivot_row[c] {
                    let coef = v[c];
                    Self::axpy(self.p, &mut v, coef, &self.basis[r]);
                }
            }
        }
        let Some(lead) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_pow(v[lead], self.p - 2, self.p);
        for x in v.iter_mut() {
            *x = *x * inv % self.p;
        }
        for row in self.basis.iter_mut() {
            let coef = row[lead];
            if coef != 0 {
                Self::axpy(self.p, row, coef, &v);
            }
        }
        self.pivot_row[lead] = Some(self.basis.len());
        self.basis.push(v);
        true
    }
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

const BATCH: usize = 2048;

/// Rank of `m` over GF(p).
pub fn rank_mod_p(m: &BitMatrix, p: u64) -> usize {
    rank_mod_p_with(m, p, None, Exec::default())
}

/// Rank over GF(p), stopping early once `ceiling` is reached. Each batch of
/// rows is reduced against the current basis in parallel and then inserted
/// in row order, so the result does not depend on the worker count.
pub fn rank_mod_p_with(m: &BitMatrix, p: u64, ceiling: Option<usize>, exec: Exec) -> usize {
    let limit = ceiling.unwrap_or(usize::MAX).min(m.rows()).min(m.cols());
    let mut ech = Echelon::new(p, m.cols());
    let mut start = 0;
    while start < m.rows() && ech.rank() < limit {
        let end = (start + BATCH).min(m.rows());
        let rems = exec.map_range(start..end, |r| ech.reduce_ones(&m.ones(r)));
        for v in rems.into_iter().flatten() {
            ech.insert(v);
            if ech.rank() >= limit {
                break;
            }
        }
        start = end;
    }
    ech.rank()
}

/// Rank over GF(p) of integer vectors with small entries.
pub fn rank_mod_p_dense(rows: &[Vec<i64>], cols: usize, p: u64) -> usize {
    let mut ech = Echelon::new(p, cols);
    for r in rows {
        let v = r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
        ech.insert(v);
    }
    ech.rank()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RankCertificate {
    pub rows: usize,
    pub cols: usize,
    pub primes: Vec<u64>,
    pub ranks: Vec<usize>,
    /// Largest modular rank, a lower bound for the rational rank.
    pub rank: usize,
    /// All kernel vectors are annihilated by the matrix.
    pub kernel_verified: bool,
    /// Rational dimension of the span of the kernel vectors.
    pub kernel_dim: usize,
    /// `cols − kernel_dim`, an upper bound for the rational rank.
    pub upper_bound: usize,
    /// `(N−1)(N−2)` for `N` points.
    pub expected: usize,
    /// Lower and upper bounds meet, so `rank` is the rational rank.
    pub certified: bool,
}

impl RankCertificate {
    pub fn matches_expected(&self) -> bool {
        self.certified && self.rank == self.expected
    }
}

/// Certifies the rational rank of `m` (rows of some derangements) from
/// `k` modular ranks and the explicit kernel.
pub fn certify_rank(m: &BitMatrix, primes: &[u64], exec: Exec) -> RankCertificate {
    let n = m.points();
    let vecs = kernel_vectors(n);
    let kernel_verified = verify_kernel_with(m, &vecs, exec);
    let kernel_dim = kernel_span_dim(&vecs, m.cols());
    let upper_bound = m.cols() - kernel_dim;
    // Stopping at the upper bound is safe only when the kernel is genuine.
    let ceiling = kernel_verified.then_some(upper_bound);
    let ranks: Vec<usize> = primes.iter().map(|&p| rank_mod_p_with(m, p, ceiling, exec)).collect();
    let rank = ranks.iter().copied().max().unwrap_or(0);
    RankCertificate {
        rows: m.rows(),
        cols: m.cols(),
        primes: primes.to_vec(),
        ranks,
        rank,
        kernel_verified,
        kernel_dim,
        upper_bound,
        expected: (n - 1) * (n - 2),
        certified: kernel_verified && rank == upper_bound,
    }
}

/// Rank certificate for the full derangement matrix of `group`.
pub fn rank_certificate(group: &GroupTable, prime_count: usize, seed: u64) -> RankCertificate {
    certify_rank(&build_m(group), &random_primes(prime_count, seed), Exec::default())
}

/// Rank certificate for the submatrix on the conjugacy class of `c`.
pub fn class_map_rank(agl: &Agl, prime_count: usize, seed: u64) -> Result<RankCertificate> {
    let g = agl.group();
    let class = g.class_of(agl.jordan_id()?);
    let m = build_class_submatrix(g, class)?;
    Ok(certify_rank(&m, &random_primes(prime_count, seed), Exec::default()))
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotypicCoefficient {
    /// `Σ_{s∈S} η(s⁻¹)`.
    pub character_sum: String,
    /// `(η(1)/|G|)·Σ_{s∈S} η(s⁻¹)`, the coefficient of `c` in the image of
    /// `e_η·(0, e_n)`.
    pub coefficient: String,
    pub nonzero: bool,
}

pub fn isotypic_image_coeffs(agl: &Agl, eta: &ClassFunction) -> Result<IsotypicCoefficient> {
    let g = agl.group();
    let s = agl.set_s()?;
    let sum = coset_char_sum(g, eta, s.members());
    let coefficient = sum * eta.degree() / Q::from_integer(g.order() as i64);
    Ok(IsotypicCoefficient {
        character_sum: fmt_q(&sum),
        coefficient: fmt_q(&coefficient),
        nonzero: !sum.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::{derived_characters, CharName};
    use proptest::prelude::*;

    #[test]
    fn column_order_is_lexicographic() {
        let n = 5;
        let mut cols = Vec::new();
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                cols.push(pair_column(n, a, b));
                assert_eq!(column_pair(n, pair_column(n, a, b)), (a, b));
            }
        }
        assert_eq!(cols, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn shapes() {
        let s4 = GroupTable::symmetric(4).unwrap();
        let m = build_m(&s4);
        assert_eq!((m.rows(), m.cols()), (9, 12));
        assert!(m.row_sums_hold());
        let agl = Agl::build(3).unwrap();
        let m3 = build_m(agl.group());
        assert_eq!((m3.rows(), m3.cols()), (525, 56));
        let class = agl.group().class_of(agl.jordan_id().unwrap());
        let sub = build_class_submatrix(agl.group(), class).unwrap();
        assert_eq!((sub.rows(), sub.cols()), (168, 56));
        assert!(build_class_submatrix(agl.group(), 0).is_err());
    }

    #[test]
    fn entries_match_definition() {
        let s4 = GroupTable::symmetric(4).unwrap();
        let m = build_m(&s4);
        for r in 0..m.rows() {
            let d = s4.element(m.row_ids()[r]);
            for c in 0..m.cols() {
                let (a, b) = column_pair(4, c);
                assert_eq!(m.get(r, c), d.apply(a) == b);
            }
        }
    }

    #[test]
    fn kernel_vector_shape() {
        let v = KernelVector::l(8, 2, 5);
        assert_eq!(v.nonzeros(), 2 * 6 + 2);
        assert_eq!(kernel_vectors(8).len(), 112);
        assert!(kernel_vectors(4).iter().all(|v| v.nonzeros() == 6));
    }

    #[test]
    fn small_certificates() {
        let agl = Agl::build(2).unwrap();
        let c = rank_certificate(agl.group(), 3, 1);
        assert!(c.kernel_verified);
        assert_eq!((c.kernel_dim, c.rank, c.certified), (6, 6, true));
        let agl = Agl::build(3).unwrap();
        let c = rank_certificate(agl.group(), 3, 1);
        assert_eq!((c.kernel_dim, c.rank, c.certified), (14, 42, true));
        let sub = class_map_rank(&agl, 3, 1).unwrap();
        assert_eq!((sub.rank, sub.certified), (42, true));
    }

    #[test]
    fn kernel_dim_mod_p_matches_bareiss() {
        let vecs = kernel_vectors(8);
        let dense: Vec<Vec<i64>> = vecs.iter().map(|v| v.dense(56)).collect();
        assert_eq!(rank_mod_p_dense(&dense, 56, 1_000_000_007), kernel_span_dim(&vecs, 56));
    }

    #[test]
    fn bareiss_small() {
        let m = |rows: &[&[i64]]| rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        assert_eq!(bareiss_rank(m(&[&[1, 2], &[2, 4]]), 2), 1);
        assert_eq!(bareiss_rank(m(&[&[0, 2, 1], &[3, 0, 1], &[3, 2, 2]]), 3), 2);
        assert_eq!(bareiss_rank(m(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]), 3), 3);
    }

    #[test]
    fn primes_are_prime() {
        let ps = random_primes(3, 42);
        assert_eq!(ps, random_primes(3, 42));
        for p in ps {
            assert!((1u64 << 30..1u64 << 31).contains(&p));
            assert!((3..=46341u64).step_by(2).all(|d| p % d != 0));
        }
        assert!(is_prime(2147483647));
        // strong pseudoprime to bases 2 and 3
        assert!(!is_prime(1373653));
        assert!(!is_prime(2147483649));
    }

    #[test]
    fn isotypic_coefficients_n3() {
        let agl = Agl::build(3).unwrap();
        let d = derived_characters(&agl).unwrap();
        let psi = isotypic_image_coeffs(&agl, d.get(CharName::Psi)).unwrap();
        assert!(!psi.nonzero);
        let beta = isotypic_image_coeffs(&agl, d.get(CharName::Beta)).unwrap();
        assert_eq!(beta.character_sum, "32");
        assert_eq!(beta.coefficient, "1/2");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn rank_is_invariant_under_column_action(x in 0usize..1344) {
            let agl = Agl::build(3).unwrap();
            let m = build_m(agl.group());
            let moved = m.permute_columns(agl.group().element(x));
            prop_assert_eq!(rank_mod_p(&moved, 2147483647), rank_mod_p(&m, 2147483647));
        }

        #[test]
        fn modes_agree_on_rank(seed in 0u64..1000) {
            let s5 = GroupTable::symmetric(5).unwrap();
            let m = build_m(&s5);
            let p = random_primes(1, seed)[0];
            prop_assert_eq!(
                rank_mod_p_with(&m, p, None, Exec::Sequential),
                rank_mod_p_with(&m, p, None, Exec::Parallel)
            );
        }
    }
}
