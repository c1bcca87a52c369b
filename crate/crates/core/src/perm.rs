//! Permutations of `{0, …, degree-1}` stored as image tables.

use std::fmt;

use crate::{Error, Result};

/// A bijection of a finite point set; point `i` maps to `images[i]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Box<[u32]>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &x in &images {
            let x = x as usize;
            if x >= degree || seen[x] {
                return Err(Error::NotABijection { degree });
            }
            seen[x] = true;
        }
        Ok(Self::from_images_unchecked(images))
    }

    pub fn from_usize(images: &[usize]) -> Result<Self> {
        Self::new(images.iter().map(|&x| x as u32).collect())
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        Self {
            images: images.into_boxed_slice(),
        }
    }

    pub fn identity(degree: usize) -> Self {
        Self::from_images_unchecked((0..degree as u32).collect())
    }

    /// Builds a permutation from disjoint cycles, e.g. `&[&[0, 1, 2, 3]]`.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()];
                if p >= degree || next >= degree {
                    return Err(Error::PointOutOfRange {
                        point: p.max(next),
                        degree,
                    });
                }
                images[p] = next as u32;
            }
        }
        Self::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Self::from_images_unchecked(
            other
                .images
                .iter()
                .map(|&j| self.images[j as usize])
                .collect(),
        )
    }

    pub fn invert(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Self::from_images_unchecked(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn fixed_point_count(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i as u32 == j)
            .count()
    }

    pub fn is_derangement(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 != j)
    }

    /// True if `self(i) == other(i)` for some `i`.
    #[inline]
    pub fn agrees_somewhere(&self, other: &Permutation) -> bool {
        self.images
            .iter()
            .zip(other.images.iter())
            .any(|(a, b)| a == b)
    }

    /// Number of 2-cycles in the cycle decomposition.
    pub fn transposition_count(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &j)| (j as usize) > i && self.images[j as usize] as usize == i)
            .count()
    }

    pub fn is_even(&self) -> bool {
        let mut seen = vec![false; self.degree()];
        let mut transpositions = 0;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.apply(p);
                len += 1;
            }
            transpositions += len - 1;
        }
        transpositions % 2 == 0
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", &self.images[..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn random_perm(rng: &mut rand_chacha::ChaCha8Rng, degree: usize) -> Permutation {
        let mut v: Vec<u32> = (0..degree as u32).collect();
        v.shuffle(rng);
        Permutation::new(v).unwrap()
    }

    // Second composition routine: relations as ordered maps, applied right to left.
    fn compose_oracle(p: &[u32], q: &[u32]) -> Vec<u32> {
        use std::collections::BTreeMap;
        let pm: BTreeMap<u32, u32> = (0u32..).zip(p.iter().copied()).collect();
        let qm: BTreeMap<u32, u32> = (0u32..).zip(q.iter().copied()).collect();
        qm.values().map(|x| pm[x]).collect()
    }

    #[test]
    fn identity_composition() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let q = random_perm(&mut rng, 6);
        let id = Permutation::identity(6);
        assert_eq!(id.compose(&q).unwrap(), q);
    }

    #[test]
    fn transposition_squares_to_identity() {
        let t = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        assert!(t.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let a = Permutation::identity(3);
        let b = Permutation::identity(4);
        assert_eq!(
            a.compose(&b),
            Err(Error::DegreeMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn derangement_queries() {
        let id = Permutation::identity(4);
        assert!(!id.is_derangement());
        assert_eq!(id.fixed_point_count(), 4);
        let c = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        assert!(c.is_derangement());
        assert!(!c.is_even());
    }

    #[test]
    fn composition_matches_oracle_degree_8() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let p = random_perm(&mut rng, 8);
            let q = random_perm(&mut rng, 8);
            let pq = p.compose(&q).unwrap();
            assert_eq!(pq.images(), &compose_oracle(p.images(), q.images())[..]);
        }
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(v in Just((0u32..9).collect::<Vec<_>>()).prop_shuffle()) {
            let p = Permutation::new(v).unwrap();
            prop_assert!(p.compose(&p.invert()).unwrap().is_identity());
            prop_assert!(p.invert().compose(&p).unwrap().is_identity());
        }
    }
}
