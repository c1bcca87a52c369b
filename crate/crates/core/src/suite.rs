//! The acceptance criteria as library code, shared by the `acceptance` test
//! target and the command-line `report-all` subcommand.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::{Action, Natural, OrderedPairs, UnorderedPairs};
use crate::affine::{Agl, LinearPart};
use crate::character::{
    coset_char_sum, derived_characters, inner_product, standard_characters, theta_pointwise, CharName,
    ClassFunction, DerivedCharacters, OrbitFormula, PermutationCharacters,
};
use crate::dgraph::{
    char_eigenvalue, class_spectrum, close, dense_spectrum, derangement_series, enumerate_maximum,
    random_intersecting_sets, ratio_bound, stability_residual, DerangementGraph, Projector, SearchOptions,
    DENSE_CAP, REL_TOL,
};
use crate::dmatrix::{build_m, kernel_span_dim, kernel_vectors, rank_certificate, verify_kernel};
use crate::orbit_tables::OrbitTables;
use crate::rational::{fmt_q, q, Q};
use crate::{ElemId, GroupTable, Result};
use num_traits::Zero;

pub const PRIMES: usize = 3;
pub const SEED: u64 = 0x5eed;
/// Residual threshold for canonical-coset indicators.
pub const CANONICAL_RESIDUAL: f64 = 1e-10;
pub const STABILITY_SETS: usize = 100;
pub const SAMPLED_X: usize = 25;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

pub struct Fixture {
    agl: Vec<Agl>,
    chars3: DerivedCharacters,
    chars4: DerivedCharacters,
}

impl Fixture {
    fn agl(&self, n: usize) -> &Agl {
        &self.agl[n - 2]
    }

    fn chars(&self, n: usize) -> &DerivedCharacters {
        if n == 3 {
            &self.chars3
        } else {
            &self.chars4
        }
    }
}

fn rank_certificate_timed(f: &Fixture) -> Outcome {
    let limits = [(2, Duration::from_secs(1)), (3, Duration::from_secs(5)), (4, Duration::from_secs(600))];
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, limit) in limits {
        let start = Instant::now();
        let cert = rank_certificate(f.agl(n).group(), PRIMES, SEED);
        let took = start.elapsed();
        let expected = ((1 << n) - 1) * ((1 << n) - 2);
        let ok = cert.certified && cert.rank == expected && took < limit;
        pass &= ok;
        parts.push(format!(
            "n={n}: rank {} (expected {expected}, certified {}) in {:.2?}",
            cert.rank, cert.certified, took
        ));
    }
    outcome(pass, parts.join("; "))
}

fn kernel_vectors_annihilated(f: &Fixture) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 2..=4 {
        let m = build_m(f.agl(n).group());
        let vecs = kernel_vectors(1 << n);
        let annihilated = verify_kernel(&m, &vecs);
        let dim = kernel_span_dim(&vecs, m.cols());
        let ok = annihilated && dim == 2 * ((1 << n) - 1);
        pass &= ok;
        parts.push(format!("n={n}: M·v=0 {annihilated}, span {dim}"));
    }
    outcome(pass, parts.join("; "))
}

fn character_sums(f: &Fixture) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 3..=4 {
        let agl = f.agl(n);
        let d = f.chars(n);
        let s = agl.set_s().expect("S = CH");
        let h = agl.h().len() as i64;
        let expected = [
            (CharName::Psi, q(0)),
            (CharName::Theta, q(h)),
            (CharName::Alpha, q(h)),
            (CharName::Beta, q(h) * (q(1) + Q::new(1, (1 << (n - 1)) - 1))),
            (CharName::One, q(s.len() as i64)),
        ];
        let got: Vec<String> = expected
            .iter()
            .map(|(c, want)| {
                let v = coset_char_sum(agl.group(), d.get(*c), s.members());
                pass &= v == *want;
                fmt_q(&v)
            })
            .collect();
        parts.push(format!("n={n}: (psi,theta,alpha,beta,1) = ({})", got.join(", ")));
    }
    outcome(pass, parts.join("; "))
}

fn orbit_formula_case<A: Action>(
    agl: &Agl,
    rho: &ClassFunction,
    action: &A,
    subgroup: &[ElemId],
    rng: &mut ChaCha8Rng,
) -> bool {
    let g = agl.group();
    let f = OrbitFormula::new(g, action, subgroup);
    (0..SAMPLED_X).all(|_| f.evaluate(rho, rng.random_range(0..g.order())).agrees())
}

fn orbit_formula_equivalence(f: &Fixture) -> Outcome {
    let agl = f.agl(3);
    let p = PermutationCharacters::new(agl);
    let nat = Natural { degree: 8 };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    let mut cases = 0;
    for (lname, l) in [("H", agl.h()), ("K", agl.k())] {
        let l = l.members();
        let checks = [
            ("pi", orbit_formula_case(agl, &p.pi, &nat, l, &mut rng)),
            ("rho", orbit_formula_case(agl, &p.rho, &LinearPart { points: 8 }, l, &mut rng)),
            ("pi_sets", orbit_formula_case(agl, &p.pi_sets, &UnorderedPairs::new(nat.clone()), l, &mut rng)),
            ("pi_pairs", orbit_formula_case(agl, &p.pi_pairs, &OrderedPairs::new(nat.clone()), l, &mut rng)),
        ];
        for (name, ok) in checks {
            cases += 1;
            if !ok {
                failures.push(format!("{name}/{lname}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{cases} cases x {SAMPLED_X} samples, mismatches: {failures:?}"),
    )
}

fn orbit_tables(f: &Fixture) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 3..=4 {
        let agl = f.agl(n);
        let t = OrbitTables::new(agl).expect("n >= 3");
        let cent = agl.centralizer().expect("centralizer");
        let mut checked = 0;
        let mut bad = 0;
        for &x in cent.members() {
            let case = t.classify(x);
            for i in 1..=5 {
                checked += 1;
                bad += usize::from(t.set_intersection(i, x) as i64 != t.set_closed_form(i, case));
            }
            for i in 1..=8 {
                checked += 1;
                bad += usize::from(t.pair_intersection(i, x) as i64 != t.pair_closed_form(i, case));
            }
        }
        let orbits_ok = t.predicates_are_h_orbits();
        pass &= bad == 0 && orbits_ok;
        parts.push(format!("n={n}: {checked} counts, {bad} mismatches, predicates are H-orbits {orbits_ok}"));
    }
    outcome(pass, parts.join("; "))
}

fn spectra(f: &Fixture) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 2..=3 {
        let agl = f.agl(n);
        let gr = DerangementGraph::build(agl.group());
        let k = gr.degree() as f64;
        let dense = dense_spectrum(&gr, DENSE_CAP).expect("within cap");
        let perm = PermutationCharacters::new(agl);
        let (psi, theta) = standard_characters(agl, &perm);
        let lpsi = char_eigenvalue(&gr, &psi).expect("irreducible");
        let ltheta = char_eigenvalue(&gr, &theta).expect("irreducible");
        let expected_least = -k / ((1 << n) - 1) as f64;
        let dim = ((1 << n) - 1) * ((1 << n) - 1);
        let least_ok = close(dense.least(), expected_least) && close(dense.least(), crate::rational::q_to_f64(&lpsi));
        let mult = dense.multiplicity_near(dense.least());
        let half = crate::rational::q_to_f64(&lpsi).abs() / 2.0;
        let known = [k, crate::rational::q_to_f64(&lpsi), crate::rational::q_to_f64(&ltheta)];
        let violators: Vec<f64> = dense
            .values
            .iter()
            .filter(|e| !known.iter().any(|&x| close(e.value, x)))
            .filter(|e| e.value.abs() > half * (1.0 + REL_TOL))
            .map(|e| e.value)
            .collect();
        let exact = class_spectrum(&gr).expect("integral spectrum");
        let routes_agree = exact.values.len() == dense.values.len()
            && exact
                .values
                .iter()
                .zip(&dense.values)
                .all(|(a, b)| close(a.value as f64, b.value) && a.multiplicity as usize == b.multiplicity);
        let ok = least_ok
            && mult == dim
            && ltheta > Q::zero()
            && violators.is_empty()
            && dense.accounting_holds()
            && routes_agree;
        pass &= ok;
        parts.push(format!(
            "n={n}: least {:.6} (expected {expected_least}), dim {mult} (expected {dim}), lambda_theta {}, \
             |other| > {half} at {violators:?}, dense = exact {routes_agree}",
            dense.least(),
            fmt_q(&ltheta)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn derangement_proportion(f: &Fixture) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 2..=4 {
        let g = f.agl(n).group();
        let p = Q::new(g.derangements().len() as i64, g.order() as i64);
        let series = derangement_series(n);
        pass &= p == series && p >= Q::new(3, 8);
        parts.push(format!("n={n}: {} vs series {}", fmt_q(&p), fmt_q(&series)));
    }
    outcome(pass, parts.join("; "))
}

fn strict_ekr(f: &Fixture) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, count) in [(4usize, 16usize), (5, 25)] {
        let start = Instant::now();
        let g = GroupTable::symmetric(n).expect("Sym(n)");
        let gr = DerangementGraph::build(&g);
        let maxima = enumerate_maximum(&gr, SearchOptions::default()).expect("within cap");
        let took = start.elapsed();
        let size = (1..n).product::<usize>();
        let ok = maxima.len() == count
            && maxima.iter().all(|s| s.len() == size && s.is_canonical() && gr.is_independent(&s.members))
            && took < Duration::from_secs(60);
        pass &= ok;
        parts.push(format!("Sym({n}): {} maxima of size {} in {took:.2?}", maxima.len(), maxima[0].len()));
    }

    let agl = f.agl(3);
    let g = agl.group();
    let gr = DerangementGraph::build(g);
    let sp = class_spectrum(&gr).expect("spectrum");
    let bound = ratio_bound(g.order(), gr.degree(), sp.least());
    let mut cosets_ok = true;
    let mut counts = std::collections::BTreeSet::new();
    for alpha in 0..8 {
        for beta in 0..8 {
            let c = g.coset(alpha, beta).expect("coset");
            cosets_ok &= q(c.len() as i64) == bound && gr.is_independent(c.members());
            let outside: Vec<ElemId> = (0..g.order()).filter(|&v| !c.contains(v)).collect();
            let per = crate::Exec::default().map(&outside, |&v| gr.neighbours_in(v, c.members()));
            counts.extend(per);
        }
    }
    let ok = bound == q(168) && cosets_ok && counts.len() == 1 && counts.contains(&75);
    pass &= ok;
    parts.push(format!(
        "AGL(3,2): ratio bound {}, all 64 cosets attain it {cosets_ok}, outside neighbour counts {counts:?}",
        fmt_q(&bound)
    ));
    outcome(pass, parts.join("; "))
}

fn stability(f: &Fixture) -> Outcome {
    let s4 = GroupTable::symmetric(4).expect("Sym(4)");
    let s5 = GroupTable::symmetric(5).expect("Sym(5)");
    let groups: [(&str, &GroupTable); 3] = [("Sym(4)", &s4), ("Sym(5)", &s5), ("AGL(3,2)", f.agl(3).group())];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, g)) in groups.into_iter().enumerate() {
        let gr = DerangementGraph::build(g);
        let sp = class_spectrum(&gr).expect("spectrum");
        let eigenspaces = sp.projector(&[gr.degree() as i64, sp.least()]).expect("projector");
        let sets = random_intersecting_sets(&gr, STABILITY_SETS, SEED + i as u64);
        let mut held = 0;
        let mut min_slack = f64::INFINITY;
        for s in &sets {
            let r = stability_residual(&gr, &sp, &eigenspaces, s).expect("gap");
            held += usize::from(r.holds && gr.is_independent(s));
            min_slack = min_slack.min(r.bound_f64 - r.residual_f64);
        }

        let one = ClassFunction::trivial(g);
        let pi = crate::character::perm_character(g, &Natural { degree: g.degree() });
        let psi = &pi - &one;
        let u = Projector::from_characters(g, &[&one, &psi]);
        let mut worst: f64 = 0.0;
        for a in 0..g.degree() {
            for b in 0..g.degree() {
                let c = g.coset(a, b).expect("coset");
                let r = u.residual(g, c.members(), crate::Exec::default());
                worst = worst.max(crate::rational::big_to_f64(&r));
            }
        }
        let ok = held == sets.len() && worst < CANONICAL_RESIDUAL;
        pass &= ok;
        parts.push(format!(
            "{name}: inequality held {held}/{} (min slack {min_slack:.3e}), max canonical residual {worst:.1e}",
            sets.len()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn character_decomposition(f: &Fixture) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 3..=4 {
        let agl = f.agl(n);
        let g = agl.group();
        let d = f.chars(n);
        let p = &d.perm;
        let sets = &(&(&d.one + &d.psi) + &d.theta) + &d.alpha;
        let pairs = &(&(&(&d.one + &d.psi.scale(2)) + &d.theta) + &d.alpha) + &d.beta;
        let pointwise = sets == p.pi_sets
            && pairs == p.pi_pairs
            && g.classes().iter().enumerate().all(|(i, c)| {
                d.theta.on_class(i) == theta_pointwise(agl, c.representative)
                    && d.psi.on_class(i) == q(g.element(c.representative).fixed_point_count() as i64 - 1)
            });
        let irreducible = [&d.psi, &d.theta, &d.alpha, &d.beta]
            .iter()
            .all(|c| inner_product(g, c, c) == q(1));
        let table = [
            inner_product(g, &p.pi_pairs, &p.pi_pairs),
            inner_product(g, &p.pi_sets, &p.pi_sets),
            inner_product(g, &p.pi_sets, &p.pi_pairs),
        ];
        let ok = pointwise && irreducible && table == [q(8), q(4), q(5)];
        pass &= ok;
        parts.push(format!(
            "n={n}: pointwise {pointwise}, irreducible {irreducible}, table ({}, {}, {})",
            fmt_q(&table[0]),
            fmt_q(&table[1]),
            fmt_q(&table[2])
        ));
    }
    outcome(pass, parts.join("; "))
}

impl Fixture {
    /// Builds `AGL(2..4,2)` and the derived characters for `n = 3, 4`.
    pub fn new() -> Result<Self> {
        let agl: Vec<Agl> = (2..=4).map(Agl::build).collect::<Result<_>>()?;
        let chars3 = derived_characters(&agl[1])?;
        let chars4 = derived_characters(&agl[2])?;
        Ok(Self { agl, chars3, chars4 })
    }
}

pub type Criterion = (&'static str, fn(&Fixture) -> Outcome);

pub const CRITERIA: [Criterion; 10] = [
    ("rank certificate", rank_certificate_timed),
    ("kernel vectors", kernel_vectors_annihilated),
    ("character sums on S", character_sums),
    ("orbit formula equivalence", orbit_formula_equivalence),
    ("orbit-intersection tables", orbit_tables),
    ("spectra", spectra),
    ("derangement proportion", derangement_proportion),
    ("strict EKR by exhaustion", strict_ekr),
    ("stability inequality", stability),
    ("character decomposition", character_decomposition),
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Runs every criterion in order, handing each result to `each` as it lands.
pub fn run_all(fixture: &Fixture, mut each: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .enumerate()
        .map(|(i, (name, run))| {
            let t = Instant::now();
            let o = run(fixture);
            let r = CriterionResult {
                index: i + 1,
                name,
                pass: o.pass,
                detail: o.detail,
                seconds: t.elapsed().as_secs_f64(),
            };
            each(&r);
            r
        })
        .collect()
}
