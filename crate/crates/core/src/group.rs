//! Fully enumerated permutation groups.
//!
//! Groups here have at most a few hundred thousand elements, so every element
//! gets an integer id, and conjugacy classes are found by brute-force
//! conjugation orbits under the generators.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::exec::Exec;
use crate::perm::Permutation;
use crate::{Error, Result};

pub type ElemId = usize;

/// Default enumeration cap; large enough for `AGL(4,2)` and `Sym(9)`.
pub const DEFAULT_CAP: usize = 400_000;

#[derive(Clone, Debug)]
pub struct ConjugacyClass {
    /// Least element id in the class.
    pub representative: ElemId,
    pub members: Vec<ElemId>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

pub struct GroupTable {
    degree: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, u32>,
    inverse: Vec<u32>,
    generators: Vec<Permutation>,
    classes: Vec<ConjugacyClass>,
    class_of: Vec<u32>,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupTable")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("classes", &self.classes.len())
            .finish()
    }
}

impl GroupTable {
    pub fn generate(generators: &[Permutation]) -> Result<Self> {
        Self::generate_with_cap(generators, DEFAULT_CAP)
    }

    /// Closure of `generators` by breadth-first products. Identity gets id 0.
    pub fn generate_with_cap(generators: &[Permutation], cap: usize) -> Result<Self> {
        let first = generators.first().ok_or(Error::NoGenerators)?;
        let degree = first.degree();
        for g in generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        let gens: Vec<Permutation> = generators
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();

        let id = Permutation::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0u32);
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for g in &gens {
                let h = g.compose_unchecked(&elements[e]);
                if !index.contains_key(&h) {
                    if elements.len() >= cap {
                        return Err(Error::GroupTooLarge { cap });
                    }
                    index.insert(h.clone(), elements.len() as u32);
                    queue.push_back(elements.len());
                    elements.push(h);
                }
            }
        }
        Ok(Self::finish(degree, elements, index, gens))
    }

    /// Builds a table from a complete element list whose first entry is the
    /// identity. `generators` must generate the same group; they drive the
    /// conjugacy-class search. Closure is not re-checked.
    pub fn from_elements(elements: Vec<Permutation>, generators: Vec<Permutation>) -> Result<Self> {
        let first = elements.first().ok_or(Error::NoGenerators)?;
        if !first.is_identity() {
            return Err(Error::Degenerate("first element must be the identity".into()));
        }
        let degree = first.degree();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if e.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: e.degree(),
                });
            }
            if index.insert(e.clone(), i as u32).is_some() {
                return Err(Error::Degenerate("duplicate element".into()));
            }
        }
        let gens = generators.into_iter().filter(|g| !g.is_identity()).collect();
        Ok(Self::finish(degree, elements, index, gens))
    }

    fn finish(
        degree: usize,
        elements: Vec<Permutation>,
        index: HashMap<Permutation, u32>,
        generators: Vec<Permutation>,
    ) -> Self {
        let inverse = elements.iter().map(|e| index[&e.invert()]).collect();
        let mut table = Self {
            degree,
            elements,
            index,
            inverse,
            generators,
            classes: Vec::new(),
            class_of: Vec::new(),
        };
        table.compute_classes();
        table
    }

    fn compute_classes(&mut self) {
        let n = self.order();
        // Without generators, conjugate by every element.
        let conjugators = if self.generators.is_empty() {
            &self.elements[..]
        } else {
            &self.generators[..]
        };
        let gen_pairs: Vec<(Permutation, Permutation)> = conjugators
            .iter()
            .map(|g| (g.clone(), g.invert()))
            .collect();
        let mut class_of = vec![u32::MAX; n];
        let mut classes = Vec::new();
        for start in 0..n {
            if class_of[start] != u32::MAX {
                continue;
            }
            let cid = classes.len() as u32;
            class_of[start] = cid;
            let mut members = vec![start];
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for (g, gi) in &gen_pairs {
                    let y = g.compose_unchecked(&self.elements[x]).compose_unchecked(gi);
                    let y = self.index[&y] as usize;
                    if class_of[y] == u32::MAX {
                        class_of[y] = cid;
                        members.push(y);
                        stack.push(y);
                    }
                }
            }
            members.sort_unstable();
            classes.push(ConjugacyClass {
                representative: start,
                members,
            });
        }
        self.classes = classes;
        self.class_of = class_of;
    }

    pub fn symmetric(n: usize) -> Result<Self> {
        Self::generate(&symmetric_generators(n))
    }

    pub fn alternating(n: usize) -> Result<Self> {
        Self::generate(&alternating_generators(n))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, id: ElemId) -> &Permutation {
        &self.elements[id]
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn id_of(&self, p: &Permutation) -> Option<ElemId> {
        self.index.get(p).map(|&i| i as usize)
    }

    pub fn identity(&self) -> ElemId {
        0
    }

    pub fn inverse(&self, id: ElemId) -> ElemId {
        self.inverse[id] as usize
    }

    /// Id of `a·b`, where the product acts as `b` first, then `a`.
    pub fn product(&self, a: ElemId, b: ElemId) -> ElemId {
        let p = self.elements[a].compose_unchecked(&self.elements[b]);
        self.index[&p] as usize
    }

    /// Id of `x g x⁻¹`.
    pub fn conjugate(&self, x: ElemId, g: ElemId) -> ElemId {
        self.product(self.product(x, g), self.inverse(x))
    }

    #[inline]
    pub fn apply(&self, g: ElemId, point: usize) -> usize {
        self.elements[g].apply(point)
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    #[inline]
    pub fn class_of(&self, g: ElemId) -> usize {
        self.class_of[g] as usize
    }

    fn check_point(&self, p: usize) -> Result<()> {
        if p >= self.degree {
            Err(Error::PointOutOfRange {
                point: p,
                degree: self.degree,
            })
        } else {
            Ok(())
        }
    }

    fn select(&self, descriptor: CosetDescriptor, pred: impl Fn(&Permutation) -> bool + Sync + Send) -> CosetSet {
        let members = Exec::default().filter_range(0..self.order(), |g| pred(&self.elements[g]));
        CosetSet::new(descriptor, members)
    }

    /// `{g : g(α) = β}`.
    pub fn coset(&self, alpha: usize, beta: usize) -> Result<CosetSet> {
        self.check_point(alpha)?;
        self.check_point(beta)?;
        Ok(self.select(CosetDescriptor::Canonical { alpha, beta }, |g| {
            g.apply(alpha) == beta
        }))
    }

    pub fn point_stabilizer(&self, alpha: usize) -> Result<CosetSet> {
        self.check_point(alpha)?;
        Ok(self.select(CosetDescriptor::PointStabilizer { alpha }, |g| {
            g.apply(alpha) == alpha
        }))
    }

    /// Pointwise stabilizer of `α` and `β`.
    pub fn pair_stabilizer(&self, alpha: usize, beta: usize) -> Result<CosetSet> {
        self.check_point(alpha)?;
        self.check_point(beta)?;
        Ok(self.select(CosetDescriptor::PairStabilizer { alpha, beta }, |g| {
            g.apply(alpha) == alpha && g.apply(beta) == beta
        }))
    }

    /// Setwise stabilizer of `{α, β}`.
    pub fn set_stabilizer(&self, alpha: usize, beta: usize) -> Result<CosetSet> {
        self.check_point(alpha)?;
        self.check_point(beta)?;
        Ok(self.select(CosetDescriptor::SetStabilizer { alpha, beta }, |g| {
            let (a, b) = (g.apply(alpha), g.apply(beta));
            (a == alpha && b == beta) || (a == beta && b == alpha)
        }))
    }

    /// Size of the orbit of the tuple `(0, 1, …, k-1)` under the group.
    pub fn tuple_orbit_size(&self, k: usize) -> usize {
        if k > self.degree {
            return 0;
        }
        let start: Vec<u32> = (0..k as u32).collect();
        let mut seen = std::collections::HashSet::from([start.clone()]);
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for g in &self.generators {
                let img: Vec<u32> = t.iter().map(|&p| g.apply(p as usize) as u32).collect();
                if seen.insert(img.clone()) {
                    stack.push(img);
                }
            }
        }
        seen.len()
    }

    /// True if the group acts transitively on ordered `k`-tuples of distinct points.
    pub fn is_k_transitive(&self, k: usize) -> bool {
        let n = self.degree;
        let falling: usize = (0..k).map(|i| n.saturating_sub(i)).product();
        k <= n && self.tuple_orbit_size(k) == falling
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.is_k_transitive(1)
    }

    /// Element ids of all fixed-point-free elements, ascending.
    pub fn derangements(&self) -> Vec<ElemId> {
        Exec::default().filter_range(0..self.order(), |g| self.elements[g].is_derangement())
    }
}

/// `(0 1)` and `(0 1 … n-1)`.
pub fn symmetric_generators(n: usize) -> Vec<Permutation> {
    if n < 2 {
        return vec![Permutation::identity(n)];
    }
    let cycle: Vec<usize> = (0..n).collect();
    vec![
        Permutation::from_cycles(n, &[&[0, 1]]).unwrap(),
        Permutation::from_cycles(n, &[&cycle]).unwrap(),
    ]
}

/// 3-cycles `(0 1 i)` for `2 ≤ i < n`.
pub fn alternating_generators(n: usize) -> Vec<Permutation> {
    if n < 3 {
        return vec![Permutation::identity(n)];
    }
    (2..n)
        .map(|i| Permutation::from_cycles(n, &[&[0, 1, i]]).unwrap())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CosetDescriptor {
    /// `{g : g(α) = β}`.
    Canonical { alpha: usize, beta: usize },
    PointStabilizer { alpha: usize },
    PairStabilizer { alpha: usize, beta: usize },
    SetStabilizer { alpha: usize, beta: usize },
    /// Centralizer of the Jordan element in `AGL(n,2)`.
    Centralizer,
    /// `{g : c·g(0) = g(e_n)}`, equal to the product of the centralizer and `H`.
    JordanSet,
    Other(String),
}

impl fmt::Display for CosetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosetDescriptor::Canonical { alpha, beta } => write!(f, "S_{{{alpha}->{beta}}}"),
            CosetDescriptor::PointStabilizer { alpha } => write!(f, "G_{alpha}"),
            CosetDescriptor::PairStabilizer { alpha, beta } => write!(f, "G_({alpha},{beta})"),
            CosetDescriptor::SetStabilizer { alpha, beta } => write!(f, "G_{{{alpha},{beta}}}"),
            CosetDescriptor::Centralizer => write!(f, "C"),
            CosetDescriptor::JordanSet => write!(f, "CH"),
            CosetDescriptor::Other(s) => write!(f, "{s}"),
        }
    }
}

/// A set of element ids of one group, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSet {
    pub descriptor: CosetDescriptor,
    members: Vec<ElemId>,
}

impl CosetSet {
    pub fn new(descriptor: CosetDescriptor, mut members: Vec<ElemId>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self {
            descriptor,
            members,
        }
    }

    pub fn members(&self) -> &[ElemId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: ElemId) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    /// `{z⁻¹ s z : s ∈ self}`.
    pub fn conjugated_by(&self, group: &GroupTable, z: ElemId) -> CosetSet {
        let zi = group.inverse(z);
        let members = self.members.iter().map(|&s| group.conjugate(zi, s)).collect();
        CosetSet::new(CosetDescriptor::Other(format!("{}^z", self.descriptor)), members)
    }

    /// `{x s : s ∈ self}`.
    pub fn left_translate(&self, group: &GroupTable, x: ElemId) -> CosetSet {
        let members = self.members.iter().map(|&s| group.product(x, s)).collect();
        CosetSet::new(CosetDescriptor::Other(format!("x{}", self.descriptor)), members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subfactorial(n: usize) -> usize {
        // !n = n·!(n-1) + (-1)^n
        let mut d: i64 = 1;
        for k in 1..=n as i64 {
            d = k * d + if k % 2 == 0 { 1 } else { -1 };
        }
        d as usize
    }

    #[test]
    fn sym4_from_standard_generators() {
        let g = GroupTable::symmetric(4).unwrap();
        assert_eq!(g.order(), 24);
        assert!(g.element(g.identity()).is_identity());
    }

    #[test]
    fn trivial_group() {
        let g = GroupTable::generate(&[Permutation::identity(5)]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.class_count(), 1);
        let g0 = GroupTable::symmetric(0).unwrap();
        assert_eq!(g0.order(), 1);
        let g1 = GroupTable::symmetric(1).unwrap();
        assert_eq!(g1.order(), 1);
        assert!(g1.derangements().is_empty());
    }

    #[test]
    fn empty_generator_list() {
        assert_eq!(GroupTable::generate(&[]).unwrap_err(), Error::NoGenerators);
    }

    #[test]
    fn cap_is_enforced() {
        let err = GroupTable::generate_with_cap(&symmetric_generators(5), 100).unwrap_err();
        assert_eq!(err, Error::GroupTooLarge { cap: 100 });
    }

    #[test]
    fn sym4_class_sizes() {
        let g = GroupTable::symmetric(4).unwrap();
        let mut sizes: Vec<usize> = g.classes().iter().map(|c| c.size()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 6, 6, 8]);
        assert_eq!(sizes.iter().sum::<usize>(), 24);
        for c in g.classes() {
            assert_eq!(c.representative, c.members[0]);
        }
    }

    #[test]
    fn classes_are_conjugation_invariant() {
        let g = GroupTable::symmetric(5).unwrap();
        for c in g.classes() {
            for x in [1usize, 7, 33, 100] {
                let mut img: Vec<usize> = c.members.iter().map(|&m| g.conjugate(x, m)).collect();
                img.sort_unstable();
                assert_eq!(img, c.members);
            }
        }
    }

    #[test]
    fn group_axioms_on_alt5() {
        let g = GroupTable::alternating(5).unwrap();
        assert_eq!(g.order(), 60);
        for a in (0..60).step_by(7) {
            assert_eq!(g.product(a, g.inverse(a)), 0);
            assert_eq!(g.product(0, a), a);
            for b in (0..60).step_by(11) {
                for c in (0..60).step_by(13) {
                    assert_eq!(
                        g.product(g.product(a, b), c),
                        g.product(a, g.product(b, c))
                    );
                }
            }
        }
        assert!(g.elements().iter().all(|e| e.is_even()));
    }

    #[test]
    fn subfactorial_derangement_counts() {
        for n in 2..=7 {
            let g = GroupTable::symmetric(n).unwrap();
            assert_eq!(g.derangements().len(), subfactorial(n), "n = {n}");
        }
    }

    #[test]
    fn cosets_of_sym4() {
        let g = GroupTable::symmetric(4).unwrap();
        assert_eq!(g.coset(0, 0).unwrap().len(), 6);
        let mut seen = vec![0u32; g.order()];
        for a in 0..4 {
            for b in 0..4 {
                let c = g.coset(a, b).unwrap();
                assert_eq!(c.len(), 6);
                assert!(c.members().iter().all(|&x| g.apply(x, a) == b));
                if a == 0 {
                    for &x in c.members() {
                        seen[x] += 1;
                    }
                }
            }
        }
        // cosets with a fixed source point partition the group
        assert!(seen.iter().all(|&s| s == 1));
        assert!(g.coset(0, 4).is_err());
    }

    #[test]
    fn two_transitive_pair_stabilizer_index() {
        let g = GroupTable::symmetric(5).unwrap();
        assert!(g.is_k_transitive(2));
        let h = g.pair_stabilizer(0, 1).unwrap();
        assert_eq!(g.order() / h.len(), 5 * 4);
    }

    #[test]
    fn gens_subgroup() {
        let t = Permutation::new(vec![1, 0, 2]).unwrap();
        let g = GroupTable::generate(&[t, Permutation::identity(3)]).unwrap();
        assert_eq!(g.order(), 2);
        assert!(!g.is_transitive());
    }
}
