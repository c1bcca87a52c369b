//! The `H`-orbits `O1..O5` on 2-subsets of `V` and `Q1..Q8` on ordered pairs
//! of distinct points, where `H` fixes `0` and `e_n`, together with closed
//! forms for `|O ∩ xO|` at elements `x` of the centralizer of `c`.

use serde::Serialize;

use crate::action::{orbits, Action, Natural, OrderedPairs, UnorderedPairs};
use crate::affine::Agl;
use crate::group::ElemId;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralizerCase {
    Identity,
    Jordan,
    JordanInverse,
    /// The translation `s = (I, e_1)`.
    Special,
    Generic,
}

/// Classifies a 2-subset `{v, w}` into `O1..O5` (returned as `1..=5`).
pub fn set_orbit_index(v: usize, w: usize, en: usize) -> usize {
    let (v, w) = if v == 0 || (v == en && w != 0) { (v, w) } else { (w, v) };
    match (v, w) {
        (0, x) if x == en => 1,
        (0, _) => 2,
        (x, _) if x == en => 3,
        _ if v ^ w == en => 4,
        _ => 5,
    }
}

/// Classifies an ordered pair `(v, w)` with `v ≠ w` into `Q1..Q8`.
pub fn pair_orbit_index(v: usize, w: usize, en: usize) -> usize {
    let special = |x: usize| x == 0 || x == en;
    match (v, w) {
        (0, x) if x == en => 1,
        (x, 0) if x == en => 2,
        (0, _) => 3,
        (_, 0) => 4,
        (x, _) if x == en => 5,
        (_, x) if x == en => 6,
        _ if !special(v) && !special(w) && v ^ w == en => 7,
        _ => 8,
    }
}

pub struct OrbitTables<'a> {
    agl: &'a Agl,
    sets: UnorderedPairs<Natural>,
    pairs: OrderedPairs<Natural>,
    set_orbit: Vec<usize>,
    pair_orbit: Vec<usize>,
    jordan: ElemId,
    jordan_inv: ElemId,
    special: ElemId,
}

impl<'a> OrbitTables<'a> {
    pub fn new(agl: &'a Agl) -> Result<Self> {
        if agl.n() < 3 {
            return Err(Error::Dimension { n: agl.n(), min: 3, max: 4 });
        }
        let points = 1usize << agl.n();
        let en = agl.e_n();
        let sets = UnorderedPairs::new(Natural { degree: points });
        let pairs = OrderedPairs::new(Natural { degree: points });
        let set_orbit = (0..sets.size())
            .map(|i| {
                let (v, w) = sets.pair(i);
                set_orbit_index(v, w, en)
            })
            .collect();
        let pair_orbit = (0..pairs.size())
            .map(|i| {
                let (v, w) = pairs.pair(i);
                pair_orbit_index(v, w, en)
            })
            .collect();
        let jordan = agl.jordan_id()?;
        Ok(Self {
            agl,
            sets,
            pairs,
            set_orbit,
            pair_orbit,
            jordan,
            jordan_inv: agl.group().inverse(jordan),
            special: agl.special_id(),
        })
    }

    pub fn classify(&self, x: ElemId) -> CentralizerCase {
        if x == self.agl.group().identity() {
            CentralizerCase::Identity
        } else if x == self.jordan {
            CentralizerCase::Jordan
        } else if x == self.jordan_inv {
            CentralizerCase::JordanInverse
        } else if x == self.special {
            CentralizerCase::Special
        } else {
            CentralizerCase::Generic
        }
    }

    /// Members of `O_i` as indices into the 2-subset domain.
    pub fn set_orbit(&self, i: usize) -> Vec<usize> {
        (0..self.set_orbit.len()).filter(|&k| self.set_orbit[k] == i).collect()
    }

    /// Members of `Q_i` as indices into the ordered-pair domain.
    pub fn pair_orbit(&self, i: usize) -> Vec<usize> {
        (0..self.pair_orbit.len()).filter(|&k| self.pair_orbit[k] == i).collect()
    }

    /// True when the predicates `O1..O5` and `Q1..Q8` are exactly the
    /// `H`-orbits computed by closure.
    pub fn predicates_are_h_orbits(&self) -> bool {
        let h = self.agl.h();
        let check = |computed: Vec<Vec<usize>>, labels: &[usize], count: usize| {
            computed.len() == count
                && computed.iter().all(|o| o.iter().all(|&p| labels[p] == labels[o[0]]))
        };
        check(orbits(self.agl.group(), h.members(), &self.sets), &self.set_orbit, 5)
            && check(orbits(self.agl.group(), h.members(), &self.pairs), &self.pair_orbit, 8)
    }

    /// `|O_i ∩ x(O_i)|` by enumeration.
    pub fn set_intersection(&self, i: usize, x: ElemId) -> usize {
        let g = self.agl.group();
        let xinv = g.element(g.inverse(x));
        (0..self.set_orbit.len())
            .filter(|&k| self.set_orbit[k] == i && self.set_orbit[self.sets.image(xinv, k)] == i)
            .count()
    }

    /// `|Q_i ∩ x(Q_i)|` by enumeration.
    pub fn pair_intersection(&self, i: usize, x: ElemId) -> usize {
        let g = self.agl.group();
        let xinv = g.element(g.inverse(x));
        (0..self.pair_orbit.len())
            .filter(|&k| self.pair_orbit[k] == i && self.pair_orbit[self.pairs.image(xinv, k)] == i)
            .count()
    }

    /// Closed form for `|O_i ∩ x(O_i)|` with `x ∈ C`.
    pub fn set_closed_form(&self, i: usize, case: CentralizerCase) -> i64 {
        set_closed_form(self.agl.n(), i, case)
    }

    /// Closed form for `|Q_i ∩ x(Q_i)|` with `x ∈ C`.
    pub fn pair_closed_form(&self, i: usize, case: CentralizerCase) -> i64 {
        pair_closed_form(self.agl.n(), i, case)
    }
}

pub fn set_orbit_size(n: usize, i: usize) -> i64 {
    let p = 1i64 << n;
    match i {
        1 => 1,
        2 | 3 => p - 2,
        4 => p / 2 - 1,
        5 => (p - 2) * (p - 3) / 2 - (p / 2 - 1),
        _ => panic!("no set orbit O{i}"),
    }
}

pub fn pair_orbit_size(n: usize, i: usize) -> i64 {
    let p = 1i64 << n;
    match i {
        1 | 2 => 1,
        3..=6 => p - 2,
        7 => p - 2,
        8 => (p - 2) * (p - 4),
        _ => panic!("no pair orbit Q{i}"),
    }
}

pub fn set_closed_form(n: usize, i: usize, case: CentralizerCase) -> i64 {
    use CentralizerCase::*;
    let h = 1i64 << (n - 1);
    let sq = 1i64 << (2 * n - 1);
    match (i, case) {
        (1, Identity) => 1,
        (1, _) => 0,
        (2 | 3, Identity) => 2 * h - 2,
        (2 | 3, Jordan | JordanInverse) => 0,
        (2 | 3, _) => 1,
        (4, Identity) => h - 1,
        (4, Special) => h - 2,
        (4, _) => 0,
        (5, Identity) => sq - 6 * h + 4,
        (5, Jordan | JordanInverse) => sq - 9 * h + 10,
        (5, Special) => sq - 10 * h + 12,
        (5, Generic) => sq - 11 * h + 16,
        _ => panic!("no set orbit O{i}"),
    }
}

pub fn pair_closed_form(n: usize, i: usize, case: CentralizerCase) -> i64 {
    match i {
        1..=6 if case == CentralizerCase::Identity => pair_orbit_size(n, i),
        1..=6 => 0,
        7 => 2 * set_closed_form(n, 4, case),
        8 => 2 * set_closed_form(n, 5, case),
        _ => panic!("no pair orbit Q{i}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_all(n: usize) {
        let agl = Agl::build(n).unwrap();
        let t = OrbitTables::new(&agl).unwrap();
        assert!(t.predicates_are_h_orbits());
        for i in 1..=5 {
            assert_eq!(t.set_orbit(i).len() as i64, set_orbit_size(n, i));
        }
        for i in 1..=8 {
            assert_eq!(t.pair_orbit(i).len() as i64, pair_orbit_size(n, i));
        }
        let cent = agl.centralizer().unwrap();
        for &x in cent.members() {
            let case = t.classify(x);
            for i in 1..=5 {
                assert_eq!(t.set_intersection(i, x) as i64, t.set_closed_form(i, case), "O{i} {case:?}");
            }
            for i in 1..=8 {
                assert_eq!(t.pair_intersection(i, x) as i64, t.pair_closed_form(i, case), "Q{i} {case:?}");
            }
        }
    }

    #[test]
    fn closed_forms_n3() {
        check_all(3);
    }

    #[test]
    fn closed_forms_n4() {
        check_all(4);
    }

    #[test]
    fn refuses_n2() {
        let agl = Agl::build(2).unwrap();
        assert!(OrbitTables::new(&agl).is_err());
    }

    #[test]
    fn set_labels_are_symmetric() {
        for v in 0..16 {
            for w in 0..16 {
                if v != w {
                    assert_eq!(set_orbit_index(v, w, 8), set_orbit_index(w, v, 8));
                }
            }
        }
    }
}
