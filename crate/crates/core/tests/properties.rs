use std::sync::OnceLock;

use ekrlab::affine::Agl;
use ekrlab::character::{derived_characters, group_sum, CharName, DerivedCharacters};
use ekrlab::dgraph::{class_spectrum, close, dense_spectrum, ratio_bound, DerangementGraph, DENSE_CAP};
use ekrlab::dmatrix::{build_m, kernel_vectors, rank_mod_p, verify_kernel};
use ekrlab::rational::q;
use ekrlab::{GroupTable, Permutation};
use proptest::prelude::*;

fn agl3() -> &'static Agl {
    static G: OnceLock<Agl> = OnceLock::new();
    G.get_or_init(|| Agl::build(3).unwrap())
}

fn chars3() -> &'static DerivedCharacters {
    static C: OnceLock<DerivedCharacters> = OnceLock::new();
    C.get_or_init(|| derived_characters(agl3()).unwrap())
}

fn perm_strategy(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_usize(&v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_match_composition(a in 0usize..1344, b in 0usize..1344, c in 0usize..1344) {
        let g = agl3().group();
        let ab = g.product(a, b);
        prop_assert_eq!(g.product(ab, c), g.product(a, g.product(b, c)));
        prop_assert_eq!(g.element(ab), &g.element(a).compose(g.element(b)).unwrap());
        prop_assert_eq!(g.product(a, g.inverse(a)), g.identity());
    }

    #[test]
    fn adjacency_is_symmetric_and_translation_invariant(x in 0usize..1344, a in 0usize..1344, b in 0usize..1344) {
        let gr = DerangementGraph::build(agl3().group());
        let g = agl3().group();
        prop_assert_eq!(gr.adjacent(a, b), gr.adjacent(b, a));
        prop_assert_eq!(gr.adjacent(a, b), gr.adjacent(g.product(x, a), g.product(x, b)));
        prop_assert_eq!(gr.adjacent(a, b), !g.element(a).agrees_somewhere(g.element(b)));
    }

    #[test]
    fn classes_are_closed_under_conjugation(x in 0usize..1344, z in 0usize..1344) {
        let g = agl3().group();
        prop_assert_eq!(g.class_of(x), g.class_of(g.conjugate(z, x)));
    }

    #[test]
    fn rank_is_invariant_under_relabelling(p in perm_strategy(4)) {
        let g = GroupTable::symmetric(4).unwrap();
        let m = build_m(&g);
        prop_assert_eq!(rank_mod_p(&m.permute_columns(&p), 1_000_000_007), rank_mod_p(&m, 1_000_000_007));
    }

    #[test]
    fn stabilizer_never_beats_ratio_bound(gens in prop::collection::vec(perm_strategy(6), 1..3)) {
        let g = GroupTable::generate(&gens).unwrap();
        prop_assume!(g.is_transitive() && g.order() > 1);
        let gr = DerangementGraph::build(&g);
        let sp = class_spectrum(&gr);
        prop_assume!(sp.is_ok());
        let bound = ratio_bound(g.order(), gr.degree(), sp.unwrap().least());
        let stab = g.point_stabilizer(0).unwrap();
        prop_assert!(q(stab.len() as i64) <= bound);
        prop_assert!(gr.is_independent(stab.members()));
    }
}

#[test]
fn nontrivial_characters_sum_to_zero() {
    let g = agl3().group();
    for chi in CharName::ALL {
        let want = if chi == CharName::One { q(g.order() as i64) } else { q(0) };
        assert_eq!(group_sum(g, chars3().get(chi)), want, "{chi}");
    }
}

#[test]
fn kernel_vectors_kill_sym_matrices() {
    for n in 3..=5 {
        let g = GroupTable::symmetric(n).unwrap();
        assert!(verify_kernel(&build_m(&g), &kernel_vectors(n)));
    }
}

#[test]
fn routes_agree_on_small_groups() {
    for g in [
        GroupTable::symmetric(4).unwrap(),
        GroupTable::alternating(5).unwrap(),
        Agl::build(2).unwrap().into_group(),
    ] {
        let gr = DerangementGraph::build(&g);
        let exact = class_spectrum(&gr).unwrap();
        let dense = dense_spectrum(&gr, DENSE_CAP).unwrap();
        assert_eq!(exact.values.len(), dense.values.len());
        for (a, b) in exact.values.iter().zip(&dense.values) {
            assert!(close(a.value as f64, b.value));
            assert_eq!(a.multiplicity as usize, b.multiplicity);
        }
    }
}
