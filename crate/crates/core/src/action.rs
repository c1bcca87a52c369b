//! Actions of permutation groups on derived finite sets, and orbit machinery.

use crate::group::{ElemId, GroupTable};
use crate::perm::Permutation;

/// A finite set on which permutations of the natural domain act.
pub trait Action: Sync {
    /// Number of points in the acted-on set.
    fn size(&self) -> usize;
    fn image(&self, g: &Permutation, x: usize) -> usize;

    fn fixed_points(&self, g: &Permutation) -> usize {
        (0..self.size()).filter(|&x| self.image(g, x) == x).count()
    }
}

/// The natural action on `{0, …, degree-1}`.
#[derive(Clone, Debug)]
pub struct Natural {
    pub degree: usize,
}

impl Action for Natural {
    fn size(&self) -> usize {
        self.degree
    }
    fn image(&self, g: &Permutation, x: usize) -> usize {
        g.apply(x)
    }
}

/// Ordered pairs `(a, b)` of distinct points of a base action.
#[derive(Clone, Debug)]
pub struct OrderedPairs<A> {
    base: A,
    pairs: Vec<(usize, usize)>,
    lookup: Vec<usize>,
}

impl<A: Action> OrderedPairs<A> {
    pub fn new(base: A) -> Self {
        let m = base.size();
        let mut pairs = Vec::with_capacity(m * m.saturating_sub(1));
        let mut lookup = vec![usize::MAX; m * m];
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    lookup[a * m + b] = pairs.len();
                    pairs.push((a, b));
                }
            }
        }
        Self {
            base,
            pairs,
            lookup,
        }
    }

    pub fn pair(&self, x: usize) -> (usize, usize) {
        self.pairs[x]
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        self.lookup[a * self.base.size() + b]
    }
}

impl<A: Action> Action for OrderedPairs<A> {
    fn size(&self) -> usize {
        self.pairs.len()
    }
    fn image(&self, g: &Permutation, x: usize) -> usize {
        let (a, b) = self.pairs[x];
        self.index(self.base.image(g, a), self.base.image(g, b))
    }
}

/// 2-subsets `{a, b}` of a base action, stored with `a < b`.
#[derive(Clone, Debug)]
pub struct UnorderedPairs<A> {
    base: A,
    pairs: Vec<(usize, usize)>,
    lookup: Vec<usize>,
}

impl<A: Action> UnorderedPairs<A> {
    pub fn new(base: A) -> Self {
        let m = base.size();
        let mut pairs = Vec::new();
        let mut lookup = vec![usize::MAX; m * m];
        for a in 0..m {
            for b in a + 1..m {
                lookup[a * m + b] = pairs.len();
                lookup[b * m + a] = pairs.len();
                pairs.push((a, b));
            }
        }
        Self {
            base,
            pairs,
            lookup,
        }
    }

    pub fn pair(&self, x: usize) -> (usize, usize) {
        self.pairs[x]
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        self.lookup[a * self.base.size() + b]
    }
}

impl<A: Action> Action for UnorderedPairs<A> {
    fn size(&self) -> usize {
        self.pairs.len()
    }
    fn image(&self, g: &Permutation, x: usize) -> usize {
        let (a, b) = self.pairs[x];
        self.index(self.base.image(g, a), self.base.image(g, b))
    }
}

/// Orbits of the subgroup with element ids `members` on the points of
/// `action`. Orbits are sorted internally and listed by least point.
pub fn orbits<A: Action + ?Sized>(group: &GroupTable, members: &[ElemId], action: &A) -> Vec<Vec<usize>> {
    let m = action.size();
    let mut orbit_of = vec![usize::MAX; m];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for start in 0..m {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let oid = out.len();
        orbit_of[start] = oid;
        let mut orbit = vec![start];
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &h in members {
                let y = action.image(group.element(h), x);
                if orbit_of[y] == usize::MAX {
                    orbit_of[y] = oid;
                    orbit.push(y);
                    stack.push(y);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_domains_have_expected_sizes() {
        let op = OrderedPairs::new(Natural { degree: 8 });
        let up = UnorderedPairs::new(Natural { degree: 8 });
        assert_eq!(op.size(), 56);
        assert_eq!(up.size(), 28);
        let (a, b) = op.pair(op.index(3, 5));
        assert_eq!((a, b), (3, 5));
        assert_eq!(up.index(5, 3), up.index(3, 5));
    }

    #[test]
    fn sym4_orbit_counts() {
        let g = GroupTable::symmetric(4).unwrap();
        let all: Vec<ElemId> = (0..g.order()).collect();
        assert_eq!(orbits(&g, &all, &Natural { degree: 4 }).len(), 1);
        assert_eq!(orbits(&g, &all, &OrderedPairs::new(Natural { degree: 4 })).len(), 1);
        let stab = g.point_stabilizer(0).unwrap();
        let o = orbits(&g, stab.members(), &Natural { degree: 4 });
        assert_eq!(o, vec![vec![0], vec![1, 2, 3]]);
    }

    #[test]
    fn burnside_matches_orbit_count() {
        let g = GroupTable::alternating(5).unwrap();
        let act = UnorderedPairs::new(Natural { degree: 5 });
        let stab = g.pair_stabilizer(0, 1).unwrap();
        let fixed: usize = stab
            .members()
            .iter()
            .map(|&h| act.fixed_points(g.element(h)))
            .sum();
        let count = orbits(&g, stab.members(), &act).len();
        assert_eq!(fixed, count * stab.len());
    }
}
