//! The affine group `AGL(n,2)` acting on `V = F₂ⁿ`.
//!
//! Points of `V` are numbered by their bit masks (see [`crate::gf2`]), so the
//! zero vector is point 0 and `e_n` is point `2^(n-1)`.

use std::collections::HashMap;

use crate::action::Action;
use crate::gf2::{gl_enumerate, gl_order, GF2Matrix, GF2Vector};
use crate::group::{CosetDescriptor, CosetSet, ElemId, GroupTable};
use crate::perm::Permutation;
use crate::{Error, Exec, Result};

/// `(M, v)` acting by `w ↦ v + Mw`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AffineMap {
    pub m: GF2Matrix,
    pub v: GF2Vector,
}

impl AffineMap {
    pub fn new(m: GF2Matrix, v: GF2Vector) -> Self {
        debug_assert_eq!(m.dim(), v.dim());
        Self { m, v }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(GF2Matrix::identity(n), GF2Vector::zero(n))
    }

    pub fn translation(v: GF2Vector) -> Self {
        Self::new(GF2Matrix::identity(v.dim()), v)
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn apply(&self, w: GF2Vector) -> GF2Vector {
        self.v.add(self.m.mul_vec(w))
    }

    /// `(M₁,v₁)(M₂,v₂) = (M₁M₂, v₁ + M₁v₂)`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(self.m.mul(&other.m), self.v.add(self.m.mul_vec(other.v)))
    }

    pub fn inverse(&self) -> Self {
        let mi = self.m.inverse().expect("affine map has invertible linear part");
        Self::new(mi, mi.mul_vec(self.v))
    }

    pub fn to_permutation(&self) -> Permutation {
        let n = self.dim();
        Permutation::from_images_unchecked(
            (0..1u32 << n)
                .map(|w| self.apply(GF2Vector::new(n, w)).bits())
                .collect(),
        )
    }

    /// `|Ker(M - I)|`, the number of fixed points of the linear part.
    pub fn linear_fixed_points(&self) -> usize {
        1 << self.m.add(&GF2Matrix::identity(self.dim())).kernel_dim()
    }
}

/// `(M, v)` has no fixed point iff `v ∉ Im(M - I)`.
pub fn affine_is_derangement(a: &AffineMap) -> bool {
    let shifted = a.m.add(&GF2Matrix::identity(a.dim()));
    !shifted.image_contains(a.v)
}

/// `c = (J_n, e_n)`.
pub fn jordan_element(n: usize) -> Result<AffineMap> {
    if !(2..=crate::gf2::MAX_DIM).contains(&n) {
        return Err(Error::Dimension {
            n,
            min: 2,
            max: crate::gf2::MAX_DIM,
        });
    }
    Ok(AffineMap::new(GF2Matrix::jordan(n), GF2Vector::basis(n, n)))
}

/// The translation by `e_1`.
pub fn special_translation(n: usize) -> AffineMap {
    AffineMap::translation(GF2Vector::basis(n, 1))
}

/// `N^a`: upper unitriangular with `N_ij = a_{n-(j-i)}` above the diagonal
/// (1-based indices, `a ∈ F₂ⁿ⁻¹` with `a_k` = bit `k-1` of `a`).
pub fn centralizer_matrix(n: usize, a: u32) -> GF2Matrix {
    let rows: Vec<u32> = (1..=n)
        .map(|i| {
            let mut row = 1u32 << (i - 1);
            for j in i + 1..=n {
                let k = n - (j - i);
                if (a >> (k - 1)) & 1 == 1 {
                    row |= 1 << (j - 1);
                }
            }
            row
        })
        .collect();
    GF2Matrix::from_rows(&rows)
}

/// `AGL(n,2)` as a permutation group on `2ⁿ` points, with the affine data of
/// every element.
pub struct Agl {
    n: usize,
    group: GroupTable,
    maps: Vec<AffineMap>,
    gl_index: HashMap<GF2Matrix, usize>,
}

impl std::fmt::Debug for Agl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Agl(n={}, order={})", self.n, self.group.order())
    }
}

impl Agl {
    /// Enumerates `GL(n,2) ⋉ V`; element id is `gl_index(M)·2ⁿ + v`.
    pub fn build(n: usize) -> Result<Self> {
        if !(1..=4).contains(&n) {
            return Err(Error::Dimension { n, min: 1, max: 4 });
        }
        let gl = gl_enumerate(n)?;
        let points = 1u32 << n;
        let mut maps = Vec::with_capacity(gl.len() * points as usize);
        for m in &gl {
            for v in 0..points {
                maps.push(AffineMap::new(*m, GF2Vector::new(n, v)));
            }
        }
        let elements: Vec<Permutation> = Exec::default().map(&maps, |a| a.to_permutation());
        let group = GroupTable::from_elements(elements, Self::generators(n))?;
        let gl_index = gl.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Ok(Self {
            n,
            group,
            maps,
            gl_index,
        })
    }

    /// Recovers the affine data from a table in the element order produced by
    /// [`Agl::build`], e.g. one loaded from disk.
    pub fn from_group(n: usize, group: GroupTable) -> Result<Self> {
        if !(1..=4).contains(&n) {
            return Err(Error::Dimension { n, min: 1, max: 4 });
        }
        let points = 1usize << n;
        if group.degree() != points || group.order() != gl_order(n) * points {
            return Err(Error::NotAffine);
        }
        let gl = gl_enumerate(n)?;
        let gl_index: HashMap<GF2Matrix, usize> = gl.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut maps = Vec::with_capacity(group.order());
        for (id, p) in group.elements().iter().enumerate() {
            let v = p.apply(0) as u32;
            let cols: Vec<u32> = (0..n).map(|k| p.apply(1 << k) as u32 ^ v).collect();
            let rows: Vec<u32> = (0..n)
                .map(|i| (0..n).fold(0, |row, k| row | ((cols[k] >> i) & 1) << k))
                .collect();
            let a = AffineMap::new(GF2Matrix::from_rows(&rows), GF2Vector::new(n, v));
            let expected = gl_index.get(&a.m).map(|gi| gi * points + v as usize);
            if expected != Some(id) || a.to_permutation() != *p {
                return Err(Error::NotAffine);
            }
            maps.push(a);
        }
        Ok(Self {
            n,
            group,
            maps,
            gl_index,
        })
    }

    /// Elementary transvections `I + E_ij` and the translation by `e_1`.
    pub fn generators(n: usize) -> Vec<Permutation> {
        let mut gens = vec![special_translation(n).to_permutation()];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut rows = GF2Matrix::identity(n).rows();
                    rows[i] |= 1 << j;
                    let m = GF2Matrix::from_rows(&rows);
                    gens.push(AffineMap::new(m, GF2Vector::zero(n)).to_permutation());
                }
            }
        }
        gens
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn into_group(self) -> GroupTable {
        self.group
    }

    pub fn map(&self, id: ElemId) -> &AffineMap {
        &self.maps[id]
    }

    pub fn id_of_map(&self, a: &AffineMap) -> Option<ElemId> {
        let gi = self.gl_index.get(&a.m)?;
        Some(gi * (1 << self.n) + a.v.bits() as usize)
    }

    /// Point number of `e_n`.
    pub fn e_n(&self) -> usize {
        1 << (self.n - 1)
    }

    pub fn jordan_id(&self) -> Result<ElemId> {
        let c = jordan_element(self.n)?;
        Ok(self.id_of_map(&c).expect("c is in AGL"))
    }

    pub fn special_id(&self) -> ElemId {
        self.id_of_map(&special_translation(self.n)).expect("translation is in AGL")
    }

    /// `H`, the pointwise stabilizer of `(0, e_n)`.
    pub fn h(&self) -> CosetSet {
        self.group.pair_stabilizer(0, self.e_n()).expect("points in range")
    }

    /// `K`, the setwise stabilizer of `{0, e_n}`.
    pub fn k(&self) -> CosetSet {
        self.group.set_stabilizer(0, self.e_n()).expect("points in range")
    }

    /// The point stabilizer `G_0 = GL(n,2)`.
    pub fn g0(&self) -> CosetSet {
        self.group.point_stabilizer(0).expect("points in range")
    }

    /// Conjugacy class of `c`.
    pub fn jordan_class(&self) -> Result<Vec<ElemId>> {
        let c = self.jordan_id()?;
        Ok(self.group.classes()[self.group.class_of(c)].members.clone())
    }

    pub fn centralizer_closed_form(&self) -> Result<Vec<ElemId>> {
        let n = self.n;
        if n < 2 {
            return Err(Error::Dimension { n, min: 2, max: 4 });
        }
        let mut out = Vec::with_capacity(1 << n);
        for a in 0..1u32 << (n - 1) {
            let m = centralizer_matrix(n, a);
            // x_a = (0; a) and y_a = (1; a): coordinate 1 first, then a_1..a_{n-1}
            for first in 0..2u32 {
                let v = GF2Vector::new(n, first | (a << 1));
                out.push(self.id_of_map(&AffineMap::new(m, v)).ok_or_else(|| {
                    Error::Mismatch("closed-form centralizer element is singular".into())
                })?);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// `{g : gc = cg}` by scanning the whole group.
    pub fn centralizer_brute_force(&self) -> Result<Vec<ElemId>> {
        let c = jordan_element(self.n)?;
        Ok(Exec::default().filter_range(0..self.group.order(), |g| {
            let a = &self.maps[g];
            a.compose(&c) == c.compose(a)
        }))
    }

    /// The centralizer `C` of `c`, from the closed form and checked against the
    /// brute-force centralizer.
    pub fn centralizer(&self) -> Result<CosetSet> {
        let closed = self.centralizer_closed_form()?;
        let brute = self.centralizer_brute_force()?;
        if closed != brute {
            return Err(Error::Mismatch(format!(
                "centralizer closed form has {} elements, brute force {}",
                closed.len(),
                brute.len()
            )));
        }
        Ok(CosetSet::new(CosetDescriptor::Centralizer, closed))
    }

    /// `S = {g : c·g(0) = g(e_n)}` by its defining predicate. Checks that
    /// `S = C·H` and `|S| = 2ⁿ|H|`.
    pub fn set_s(&self) -> Result<CosetSet> {
        let c = self.group.element(self.jordan_id()?).clone();
        let en = self.e_n();
        let members = Exec::default().filter_range(0..self.group.order(), |g| {
            let p = self.group.element(g);
            c.apply(p.apply(0)) == p.apply(en)
        });
        let s = CosetSet::new(CosetDescriptor::JordanSet, members);

        let cent = self.centralizer()?;
        let h = self.h();
        let mut ch: Vec<ElemId> = cent
            .members()
            .iter()
            .flat_map(|&x| h.members().iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.group.product(x, y))
            .collect();
        ch.sort_unstable();
        let products = ch.len();
        ch.dedup();
        if ch.len() != products || ch != s.members() || s.len() != (1 << self.n) * h.len() {
            return Err(Error::Mismatch("S differs from the product CH".into()));
        }
        Ok(s)
    }
}

/// `AGL(n,2)` acting on `V ∖ {0}` through its linear part, `w ↦ g(w) + g(0)`.
/// Domain index `i` stands for the nonzero vector `i + 1`.
#[derive(Clone, Debug)]
pub struct LinearPart {
    pub points: usize,
}

impl Action for LinearPart {
    fn size(&self) -> usize {
        self.points - 1
    }
    fn image(&self, g: &Permutation, x: usize) -> usize {
        (g.apply(x + 1) ^ g.apply(0)) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn orders() {
        assert_eq!(Agl::build(1).unwrap().group().order(), 2);
        assert_eq!(Agl::build(2).unwrap().group().order(), 24);
        let g3 = Agl::build(3).unwrap();
        assert_eq!(g3.group().order(), 1344);
        assert!(g3.group().is_transitive());
        assert_eq!(g3.g0().len(), 168);
        assert!(Agl::build(5).is_err());
    }

    #[test]
    fn rebuild_from_table() {
        let a = Agl::build(3).unwrap();
        let c = a.jordan_id().unwrap();
        let elements = a.group().elements().to_vec();
        let b = Agl::from_group(3, GroupTable::from_elements(elements, Agl::generators(3)).unwrap()).unwrap();
        assert_eq!(b.jordan_id().unwrap(), c);
        assert_eq!(b.map(77), a.map(77));
        let s4 = GroupTable::symmetric(4).unwrap();
        assert!(matches!(Agl::from_group(2, s4), Err(Error::NotAffine)));
    }

    #[test]
    fn closure_agrees_with_direct_enumeration() {
        for n in 2..=3 {
            let agl = Agl::build(n).unwrap();
            let closed = GroupTable::generate(&Agl::generators(n)).unwrap();
            assert_eq!(closed.order(), agl.group().order());
            assert!(closed.elements().iter().all(|e| agl.group().id_of(e).is_some()));
        }
    }

    #[test]
    fn agl22_is_sym4() {
        let agl = Agl::build(2).unwrap();
        let sym = GroupTable::symmetric(4).unwrap();
        let mut a: Vec<_> = agl.group().elements().to_vec();
        let mut b: Vec<_> = sym.elements().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn three_transitive() {
        for n in 2..=3 {
            assert!(Agl::build(n).unwrap().group().is_k_transitive(3));
        }
    }

    #[test]
    fn product_rule_matches_composition() {
        let agl = Agl::build(2).unwrap();
        let g = agl.group();
        for a in 0..g.order() {
            for b in 0..g.order() {
                let ab = agl.map(a).compose(agl.map(b));
                assert_eq!(agl.id_of_map(&ab), Some(g.product(a, b)));
            }
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [3, 4] {
            let agl = Agl::build(n).unwrap();
            let g = agl.group();
            let samples = if n == 3 { 10_000 } else { 2_000 };
            for _ in 0..samples {
                let a = rng.random_range(0..g.order());
                let b = rng.random_range(0..g.order());
                let ab = agl.map(a).compose(agl.map(b)).to_permutation();
                assert_eq!(ab, g.element(a).compose(g.element(b)).unwrap());
                assert_eq!(agl.map(a).inverse().to_permutation(), g.element(g.inverse(a)).clone());
            }
        }
    }

    #[test]
    fn derangement_criterion() {
        for n in 1..=3 {
            let agl = Agl::build(n).unwrap();
            for id in 0..agl.group().order() {
                assert_eq!(
                    affine_is_derangement(agl.map(id)),
                    agl.group().element(id).is_derangement()
                );
            }
        }
        let agl = Agl::build(3).unwrap();
        assert_eq!(agl.group().derangements().len(), 525);
        assert!(affine_is_derangement(&AffineMap::translation(GF2Vector::basis(3, 2))));
        assert!(!affine_is_derangement(&AffineMap::identity(3)));
    }

    #[test]
    fn jordan_element_values() {
        let c = jordan_element(2).unwrap();
        assert_eq!(c.m.rows(), vec![0b11, 0b10]);
        assert_eq!(c.v, GF2Vector::basis(2, 2));
        for n in 2..=4 {
            let c = jordan_element(n).unwrap();
            assert!(affine_is_derangement(&c));
            assert!(c.to_permutation().is_derangement());
            assert_eq!(c.apply(GF2Vector::zero(n)), GF2Vector::basis(n, n));
        }
        assert!(jordan_element(1).is_err());
    }

    #[test]
    fn centralizer_is_regular() {
        for n in 2..=3 {
            let agl = Agl::build(n).unwrap();
            let cent = agl.centralizer().unwrap();
            assert_eq!(cent.len(), 1 << n);
            assert!(cent.contains(0));
            assert!(cent.contains(agl.jordan_id().unwrap()));
            let mut images: Vec<usize> = cent.members().iter().map(|&x| agl.group().apply(x, 0)).collect();
            images.sort_unstable();
            assert_eq!(images, (0..1 << n).collect::<Vec<_>>());
            for &x in &cent.members()[1..] {
                assert!(agl.group().element(x).is_derangement());
            }
        }
    }

    #[test]
    fn jordan_class_size() {
        let agl = Agl::build(3).unwrap();
        assert_eq!(agl.jordan_class().unwrap().len(), 168);
    }

    #[test]
    fn set_s_sizes() {
        let a2 = Agl::build(2).unwrap();
        let s2 = a2.set_s().unwrap();
        assert_eq!(s2.len(), 8);
        let a3 = Agl::build(3).unwrap();
        let s3 = a3.set_s().unwrap();
        assert_eq!(a3.h().len(), 24);
        assert_eq!(s3.len(), 192);
        assert!(s3.contains(0));
        assert!(s3.contains(a3.jordan_id().unwrap()));
    }

    #[test]
    fn pair_stabilizer_orders() {
        assert_eq!(Agl::build(2).unwrap().h().len(), 2);
        assert_eq!(Agl::build(3).unwrap().h().len(), 24);
    }

    #[test]
    fn images_of_zero_and_en_under_centralizer() {
        for n in 3..=4 {
            let agl = Agl::build(n).unwrap();
            let g = agl.group();
            let c = agl.jordan_id().unwrap();
            let ci = g.inverse(c);
            let en = agl.e_n();
            for &x in agl.centralizer().unwrap().members() {
                let img = [g.apply(x, 0), g.apply(x, en)];
                let hits = img.iter().filter(|&&p| p == 0 || p == en).count();
                let expected = if x == 0 {
                    2
                } else if x == c || x == ci {
                    1
                } else {
                    0
                };
                assert_eq!(hits, expected, "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn defining_relation_is_conjugation_covariant() {
        // t h(a) = h(b) implies (x t x⁻¹)(x h)(a) = (x h)(b)
        let agl = Agl::build(3).unwrap();
        let g = agl.group();
        let c = agl.jordan_id().unwrap();
        let en = agl.e_n();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let s = agl.set_s().unwrap();
        for _ in 0..200 {
            let x = rng.random_range(0..g.order());
            let t = g.conjugate(x, c);
            let h = s.members()[rng.random_range(0..s.len())];
            let xh = g.product(x, h);
            assert_eq!(g.apply(t, g.apply(xh, 0)), g.apply(xh, en));
        }
    }

    #[test]
    fn linear_part_action_is_theta_plus_one() {
        let agl = Agl::build(3).unwrap();
        let act = LinearPart { points: 8 };
        for id in (0..agl.group().order()).step_by(17) {
            let fixed = act.fixed_points(agl.group().element(id));
            assert_eq!(fixed + 1, agl.map(id).linear_fixed_points());
        }
    }
}
