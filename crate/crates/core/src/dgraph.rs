//! The derangement graph: Cayley graph on `G` with connection set the
//! derangements. Spectrum (exact through the class algebra, or by a dense
//! eigensolve), the ratio bound and its equality case, the stability
//! inequality, eigenvalue bounds for `AGL(n,2)`, and exact search for
//! maximum intersecting sets.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::character::{inner_product, ClassFunction};
use crate::group::{ElemId, GroupTable};
use crate::rational::{big_to_f64, q, q_abs, q_to_f64, Q};
use crate::{Error, Exec, Result};

/// Relative tolerance for floating eigenvalue comparisons.
pub const REL_TOL: f64 = 1e-6;
/// Absolute tolerance for floating eigenvalue comparisons.
pub const ABS_TOL: f64 = 1e-8;
/// Largest group handled by [`dense_spectrum`] unless overridden.
pub const DENSE_CAP: usize = 6000;

pub struct DerangementGraph<'a> {
    group: &'a GroupTable,
    derangements: Vec<ElemId>,
    is_der: Vec<bool>,
}

impl<'a> DerangementGraph<'a> {
    pub fn build(group: &'a GroupTable) -> Self {
        let derangements = group.derangements();
        let mut is_der = vec![false; group.order()];
        for &d in &derangements {
            is_der[d] = true;
        }
        Self {
            group,
            derangements,
            is_der,
        }
    }

    pub fn group(&self) -> &'a GroupTable {
        self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Valency `k = |Der(G)|`.
    pub fn degree(&self) -> usize {
        self.derangements.len()
    }

    pub fn derangements(&self) -> &[ElemId] {
        &self.derangements
    }

    pub fn is_derangement(&self, g: ElemId) -> bool {
        self.is_der[g]
    }

    /// `g ~ h` iff `gh⁻¹` is a derangement, i.e. `g` and `h` agree nowhere.
    pub fn adjacent(&self, g: ElemId, h: ElemId) -> bool {
        g != h && !self.group.element(g).agrees_somewhere(self.group.element(h))
    }

    /// Connection set closed under inverses and conjugation by generators.
    pub fn is_normal(&self) -> bool {
        let g = self.group;
        self.derangements.iter().all(|&d| {
            self.is_der[g.inverse(d)]
                && g.generators().iter().all(|s| {
                    let sid = g.id_of(s).expect("generator in group");
                    self.is_der[g.conjugate(sid, d)]
                })
        })
    }

    /// Checks the valency of up to `samples` vertices by direct counting.
    pub fn is_regular_sample(&self, samples: usize) -> bool {
        let n = self.order();
        let step = (n / samples.max(1)).max(1);
        (0..n).step_by(step).take(samples).all(|v| {
            (0..n).filter(|&w| self.adjacent(v, w)).count() == self.degree()
        })
    }

    pub fn is_independent(&self, members: &[ElemId]) -> bool {
        members
            .iter()
            .enumerate()
            .all(|(i, &a)| members[i + 1..].iter().all(|&b| !self.adjacent(a, b)))
    }

    /// Number of members of `set` adjacent to `v`.
    pub fn neighbours_in(&self, v: ElemId, set: &[ElemId]) -> usize {
        set.iter().filter(|&&s| self.adjacent(v, s)).count()
    }
}

/// `λ_η = (1/η(1)) Σ_{d ∈ Der(G)} η(d)`, exact.
pub fn char_eigenvalue(graph: &DerangementGraph, chi: &ClassFunction) -> Result<Q> {
    let g = graph.group();
    if inner_product(g, chi, chi) != q(1) {
        return Err(Error::NotIrreducible("eigenvalue needs an irreducible character".into()));
    }
    let sum = g
        .classes()
        .iter()
        .enumerate()
        .filter(|(_, c)| graph.is_derangement(c.representative))
        .fold(Q::zero(), |acc, (i, c)| acc + chi.on_class(i) * c.size() as i64);
    Ok(sum / chi.degree())
}

/// Multiplication by `Σ_{d∈Der} d` on the centre of the group algebra, in the
/// class-sum basis: `T[k][j] = #{d : d⁻¹·r_k ∈ C_j}` with `r_k` the
/// representative of class `k`.
pub fn class_matrix(graph: &DerangementGraph, exec: Exec) -> Vec<Vec<i64>> {
    let g = graph.group();
    let r = g.class_count();
    let inv: Vec<ElemId> = graph.derangements().iter().map(|&d| g.inverse(d)).collect();
    exec.map_range(0..r, |k| {
        let rep = g.classes()[k].representative;
        let mut row = vec![0i64; r];
        for &di in &inv {
            row[g.class_of(g.product(di, rep))] += 1;
        }
        row
    })
}

#[derive(Clone, Debug)]
pub struct ClassEigenvalue {
    pub value: i64,
    /// Dimension of the eigenspace in the adjacency operator.
    pub multiplicity: u64,
    /// Number of irreducible characters with this eigenvalue.
    pub characters: usize,
    /// Coefficients (per class) of the central idempotent projecting onto
    /// this eigenspace.
    pub projector: Vec<BigRational>,
}

/// Exact spectrum from the class algebra. Every eigenvalue here is an
/// integer; a non-integral one is reported as an error.
#[derive(Clone, Debug)]
pub struct ClassSpectrum {
    pub order: usize,
    pub degree: usize,
    pub values: Vec<ClassEigenvalue>,
}

pub fn class_spectrum(graph: &DerangementGraph) -> Result<ClassSpectrum> {
    class_spectrum_with(graph, Exec::default())
}

pub fn class_spectrum_with(graph: &DerangementGraph, exec: Exec) -> Result<ClassSpectrum> {
    let g = graph.group();
    let t = class_matrix(graph, exec);
    let r = t.len();
    let sizes: Vec<f64> = g.classes().iter().map(|c| c.size() as f64).collect();

    // diag(c)·T is symmetric, so T is similar to a real symmetric matrix.
    let sym = DMatrix::from_fn(r, r, |i, j| t[i][j] as f64 * (sizes[i] / sizes[j]).sqrt());
    let floats = SymmetricEigen::new(sym).eigenvalues;
    let mut rounded: Vec<i64> = Vec::with_capacity(r);
    for &x in floats.iter() {
        let k = x.round();
        if (x - k).abs() > REL_TOL * x.abs().max(1.0) {
            return Err(Error::Degenerate(format!("non-integral eigenvalue {x}")));
        }
        rounded.push(k as i64);
    }
    rounded.sort_unstable();
    let mut distinct = rounded.clone();
    distinct.dedup();

    // Π (T - ν) annihilates the identity exactly iff the list is complete.
    let apply = |v: &[BigRational], shift: i64| -> Vec<BigRational> {
        (0..r)
            .map(|k| {
                let mut acc = -v[k].clone() * BigInt::from(shift);
                for j in 0..r {
                    if t[k][j] != 0 && !v[j].is_zero() {
                        acc += v[j].clone() * BigInt::from(t[k][j]);
                    }
                }
                acc
            })
            .collect()
    };
    let mut e0 = vec![BigRational::zero(); r];
    e0[0] = BigRational::one();
    let mut w = e0.clone();
    for &nu in &distinct {
        w = apply(&w, nu);
    }
    if w.iter().any(|x| !x.is_zero()) {
        return Err(Error::Mismatch("rounded eigenvalues do not annihilate the identity".into()));
    }

    let values = exec.map(&distinct, |&nu| {
        let mut v = e0.clone();
        for &other in distinct.iter().filter(|&&o| o != nu) {
            let denom = BigRational::from_integer(BigInt::from(nu - other));
            v = apply(&v, other).into_iter().map(|x| x / &denom).collect();
        }
        (nu, v)
    });
    let mut out = Vec::with_capacity(values.len());
    for (nu, projector) in values {
        let m = &projector[0] * BigInt::from(g.order());
        if !m.is_integer() || !m.is_positive() {
            return Err(Error::Mismatch(format!("eigenvalue {nu} has multiplicity {m}")));
        }
        out.push(ClassEigenvalue {
            value: nu,
            multiplicity: m.to_integer().to_u64().expect("fits"),
            characters: rounded.iter().filter(|&&x| x == nu).count(),
            projector,
        });
    }
    let total: u64 = out.iter().map(|e| e.multiplicity).sum();
    if total != g.order() as u64 {
        return Err(Error::Mismatch(format!("multiplicities sum to {total}")));
    }
    Ok(ClassSpectrum {
        order: g.order(),
        degree: graph.degree(),
        values: out,
    })
}

impl ClassSpectrum {
    pub fn least(&self) -> i64 {
        self.values[0].value
    }

    /// Second-smallest distinct eigenvalue.
    pub fn second_least(&self) -> Option<i64> {
        self.values.get(1).map(|e| e.value)
    }

    pub fn get(&self, value: i64) -> Option<&ClassEigenvalue> {
        self.values.iter().find(|e| e.value == value)
    }

    pub fn multiplicity(&self, value: i64) -> u64 {
        self.get(value).map_or(0, |e| e.multiplicity)
    }

    /// Orthogonal projector onto the sum of the eigenspaces for `values`.
    pub fn projector(&self, values: &[i64]) -> Result<Projector> {
        let r = self.values[0].projector.len();
        let mut coeffs = vec![BigRational::zero(); r];
        for &v in values {
            let e = self
                .get(v)
                .ok_or_else(|| Error::Mismatch(format!("{v} is not an eigenvalue")))?;
            for (c, p) in coeffs.iter_mut().zip(&e.projector) {
                *c += p;
            }
        }
        Ok(Projector { coeffs })
    }

    pub fn report(&self) -> SpectrumReport {
        SpectrumReport {
            method: SpectrumMethod::ClassAlgebra,
            order: self.order,
            degree: self.degree,
            values: self
                .values
                .iter()
                .map(|e| Eigenvalue {
                    value: e.value as f64,
                    exact: Some(e.value),
                    multiplicity: e.multiplicity as usize,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    ClassAlgebra,
    Dense,
}

#[derive(Clone, Debug, Serialize)]
pub struct Eigenvalue {
    pub value: f64,
    pub exact: Option<i64>,
    pub multiplicity: usize,
}

/// Distinct eigenvalues in ascending order with multiplicities.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub method: SpectrumMethod,
    pub order: usize,
    pub degree: usize,
    pub values: Vec<Eigenvalue>,
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= (REL_TOL * a.abs().max(b.abs())).max(ABS_TOL)
}

impl SpectrumReport {
    pub fn least(&self) -> f64 {
        self.values[0].value
    }

    pub fn second_least(&self) -> Option<f64> {
        self.values.get(1).map(|e| e.value)
    }

    /// Multiplicity of the eigenvalue closest to `x` within tolerance, else 0.
    pub fn multiplicity_near(&self, x: f64) -> usize {
        self.values
            .iter()
            .find(|e| close(e.value, x))
            .map_or(0, |e| e.multiplicity)
    }

    pub fn total_multiplicity(&self) -> usize {
        self.values.iter().map(|e| e.multiplicity).sum()
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().map(|e| e.value * e.multiplicity as f64).sum()
    }

    pub fn trace_of_square(&self) -> f64 {
        self.values.iter().map(|e| e.value * e.value * e.multiplicity as f64).sum()
    }

    /// Multiplicities sum to `|G|`, trace is 0 and `Tr(A²) = k|G|`.
    pub fn accounting_holds(&self) -> bool {
        let kg = (self.degree * self.order) as f64;
        self.total_multiplicity() == self.order
            && self.trace().abs() <= REL_TOL * kg.max(1.0)
            && close(self.trace_of_square(), kg)
    }
}

/// Full spectrum of the `|G| × |G|` adjacency matrix by a symmetric
/// eigensolve. Refuses groups larger than `cap`.
pub fn dense_spectrum(graph: &DerangementGraph, cap: usize) -> Result<SpectrumReport> {
    dense_spectrum_with(graph, cap, Exec::default())
}

pub fn dense_adjacency(graph: &DerangementGraph, exec: Exec) -> DMatrix<f64> {
    let n = graph.order();
    let rows = exec.map_range(0..n, |i| {
        (0..n)
            .map(|j| if graph.adjacent(i, j) { 1.0 } else { 0.0 })
            .collect::<Vec<f64>>()
    });
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

pub fn dense_spectrum_with(graph: &DerangementGraph, cap: usize, exec: Exec) -> Result<SpectrumReport> {
    let n = graph.order();
    if n > cap {
        return Err(Error::OverCap {
            what: "dense spectrum (use character eigenvalues instead)",
            size: n,
            cap,
        });
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(dense_adjacency(graph, exec))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    let mut values: Vec<Eigenvalue> = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || !close(vals[i], vals[start]) {
            let group = &vals[start..i];
            let mean = group.iter().sum::<f64>() / group.len() as f64;
            let k = mean.round();
            values.push(Eigenvalue {
                value: mean,
                exact: close(mean, k).then_some(k as i64),
                multiplicity: group.len(),
            });
            start = i;
        }
    }
    Ok(SpectrumReport {
        method: SpectrumMethod::Dense,
        order: n,
        degree: graph.degree(),
        values,
    })
}

/// `|G| / (1 - k/λ)` for least eigenvalue `λ < 0`.
pub fn ratio_bound(order: usize, degree: usize, least: i64) -> Q {
    Q::new(order as i64 * -least, degree as i64 - least)
}

/// A central element of the group algebra (coefficients constant on
/// classes), used as an orthogonal projector by right convolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    coeffs: Vec<BigRational>,
}

impl Projector {
    /// `Σ_η e_η` with `e_η(g) = (η(1)/|G|)·η(g⁻¹)`.
    pub fn from_characters(group: &GroupTable, chars: &[&ClassFunction]) -> Self {
        let order = BigInt::from(group.order());
        let coeffs = group
            .classes()
            .iter()
            .map(|c| {
                let inv_class = group.class_of(group.inverse(c.representative));
                chars.iter().fold(BigRational::zero(), |acc, chi| {
                    let v = chi.degree() * chi.on_class(inv_class);
                    acc + BigRational::new(BigInt::from(*v.numer()), BigInt::from(*v.denom()) * &order)
                })
            })
            .collect();
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `||1_S - 1_S * P||²` with the norm `||f||² = (1/|G|) Σ f²`, exactly.
    pub fn residual(&self, group: &GroupTable, set: &[ElemId], exec: Exec) -> BigRational {
        if set.is_empty() {
            return BigRational::zero();
        }
        let r = group.class_count();
        let partial = exec.map(set, |&h| {
            let hi = group.inverse(h);
            let mut counts = vec![0u64; r];
            for &g in set {
                counts[group.class_of(group.product(hi, g))] += 1;
            }
            counts
        });
        let mut counts = vec![0u64; r];
        for p in partial {
            for (c, x) in counts.iter_mut().zip(p) {
                *c += x;
            }
        }
        let inner = counts
            .iter()
            .zip(&self.coeffs)
            .fold(BigRational::zero(), |acc, (&n, p)| acc + p * BigInt::from(n));
        (BigRational::from_integer(BigInt::from(set.len())) - inner) / BigInt::from(group.order())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EqualityReport {
    pub size: usize,
    pub ratio_bound: String,
    pub attains_bound: bool,
    pub independent: bool,
    /// Distinct values of `|N(v) ∩ S|` over vertices `v ∉ S`.
    pub outside_neighbour_counts: Vec<usize>,
    /// Every outside vertex has exactly `-λ` neighbours in `S`.
    pub neighbours_match: bool,
    /// Squared distance of `1_S` from `V_k ⊕ V_λ`.
    pub residual: String,
    pub residual_f64: f64,
    pub in_span: bool,
}

/// Checks the consequences of equality in the ratio bound for `set`.
pub fn check_equality_consequences(
    graph: &DerangementGraph,
    spectrum: &ClassSpectrum,
    set: &[ElemId],
) -> Result<EqualityReport> {
    let lambda = spectrum.least();
    let bound = ratio_bound(graph.order(), graph.degree(), lambda);
    let members: BTreeSet<ElemId> = set.iter().copied().collect();
    let outside: Vec<ElemId> = (0..graph.order()).filter(|v| !members.contains(v)).collect();
    let counts = Exec::default().map(&outside, |&v| graph.neighbours_in(v, set));
    let distinct: BTreeSet<usize> = counts.iter().copied().collect();
    let projector = spectrum.projector(&[graph.degree() as i64, lambda])?;
    let residual = projector.residual(graph.group(), set, Exec::default());
    let residual_f64 = big_to_f64(&residual);
    Ok(EqualityReport {
        size: set.len(),
        ratio_bound: crate::rational::fmt_q(&bound),
        attains_bound: q(set.len() as i64) == bound,
        independent: graph.is_independent(set),
        neighbours_match: distinct.iter().all(|&c| c as i64 == -lambda),
        outside_neighbour_counts: distinct.into_iter().collect(),
        residual: crate::rational::fmt_big(&residual),
        residual_f64,
        in_span: residual_f64 < 1e-8,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub size: usize,
    pub density: String,
    pub lambda: i64,
    pub mu: i64,
    pub residual: String,
    pub residual_f64: f64,
    pub bound: String,
    pub bound_f64: f64,
    pub holds: bool,
}

/// `||1_S − Proj_U(1_S)||² ≤ (c|λ| − c²(k − λ)) / (|λ| − |μ|)` with
/// `c = |S|/|G|`, `λ` the least and `μ` the second-smallest distinct
/// eigenvalue, and `U = ⟨1⟩ ⊕ V_λ` given by `projector`.
pub fn stability_residual(
    graph: &DerangementGraph,
    spectrum: &ClassSpectrum,
    projector: &Projector,
    set: &[ElemId],
) -> Result<StabilityReport> {
    let lambda = spectrum.least();
    let mu = spectrum
        .second_least()
        .ok_or_else(|| Error::Degenerate("spectrum has a single eigenvalue".into()))?;
    let gap = lambda.abs() - mu.abs();
    if gap <= 0 {
        return Err(Error::Degenerate(format!("|λ| - |μ| = {gap} is not positive")));
    }
    let big = |x: i64| BigRational::from_integer(BigInt::from(x));
    let c = BigRational::new(BigInt::from(set.len()), BigInt::from(graph.order()));
    let k = graph.degree() as i64;
    let bound = (&c * big(lambda.abs()) - &c * &c * big(k - lambda)) / big(gap);
    let residual = projector.residual(graph.group(), set, Exec::default());
    Ok(StabilityReport {
        size: set.len(),
        density: crate::rational::fmt_big(&c),
        lambda,
        mu,
        holds: residual <= bound,
        residual_f64: big_to_f64(&residual),
        bound_f64: big_to_f64(&bound),
        residual: crate::rational::fmt_big(&residual),
        bound: crate::rational::fmt_big(&bound),
    })
}

/// `Σ_{i=1}^{n} (−1)^{i−1} / 2^{i(i+1)/2}`.
pub fn derangement_series(n: usize) -> Q {
    (1..=n).fold(Q::zero(), |acc, i| {
        let term = Q::new(1, 1i64 << (i * (i + 1) / 2));
        if i % 2 == 1 {
            acc + term
        } else {
            acc - term
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterBound {
    pub name: String,
    pub degree: String,
    pub eigenvalue: String,
    /// `k / (χ(1)·√p_G)`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OtherEigenvalue {
    pub value: i64,
    /// Multiplicity not accounted for by `1`, `ψ` and `θ`.
    pub multiplicity: u64,
    pub within: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenBoundsReport {
    pub n: usize,
    pub order: usize,
    pub degree: usize,
    pub proportion: String,
    pub series: String,
    pub proportion_matches_series: bool,
    pub proportion_at_least_3_8: bool,
    pub lambda_psi: String,
    pub lambda_psi_expected: String,
    pub lambda_psi_matches: bool,
    pub lambda_theta: String,
    pub lambda_theta_positive: bool,
    /// `min(|λ_ψ|/2^{n−6}, |λ_ψ|/2)`.
    pub other_bound: f64,
    /// `None` when the full spectrum was not computed.
    pub others: Option<Vec<OtherEigenvalue>>,
    pub character_bounds: Vec<CharacterBound>,
}

impl EigenBoundsReport {
    pub fn others_within(&self) -> Option<bool> {
        self.others.as_ref().map(|o| o.iter().all(|e| e.within))
    }
}

/// Eigenvalue facts for `AGL(n,2)`: the derangement proportion against its
/// series, `λ_ψ = −k/(2ⁿ−1)`, `λ_θ > 0`, the per-character bound
/// `|λ_χ| ≤ k/(χ(1)√p)` for the supplied characters, and (when `spectrum` is
/// given) the bound `|λ| ≤ min(|λ_ψ|/2^{n−6}, |λ_ψ|/2)` for every eigenvalue
/// whose eigenspace is not exhausted by `1`, `ψ`, `θ`.
pub fn eigen_bounds_report(
    n: usize,
    graph: &DerangementGraph,
    psi: &ClassFunction,
    theta: &ClassFunction,
    extra: &[(&str, &ClassFunction)],
    spectrum: Option<&ClassSpectrum>,
) -> Result<EigenBoundsReport> {
    let order = graph.order();
    let k = graph.degree();
    let p = Q::new(k as i64, order as i64);
    let series = derangement_series(n);
    let lpsi = char_eigenvalue(graph, psi)?;
    let ltheta = char_eigenvalue(graph, theta)?;
    let expected = Q::new(-(k as i64), (1i64 << n) - 1);
    let abs_psi = q_to_f64(&q_abs(&lpsi));
    let other_bound = (abs_psi * 2f64.powi(6 - n as i32)).min(abs_psi / 2.0);

    let sqrt_p = q_to_f64(&p).sqrt();
    let mut character_bounds = Vec::new();
    let named = [("psi", psi), ("theta", theta)];
    for (name, chi) in named.iter().copied().chain(extra.iter().copied()) {
        let l = char_eigenvalue(graph, chi)?;
        let bound = k as f64 / (q_to_f64(&chi.degree()) * sqrt_p);
        character_bounds.push(CharacterBound {
            name: name.to_string(),
            degree: crate::rational::fmt_q(&chi.degree()),
            eigenvalue: crate::rational::fmt_q(&l),
            bound,
            holds: q_to_f64(&q_abs(&l)) <= bound * (1.0 + REL_TOL),
        });
    }

    let others = spectrum.map(|s| {
        let known = [
            (k as i64, Q::from_integer(1)),
            (lpsi.to_integer(), psi.degree()),
            (ltheta.to_integer(), theta.degree()),
        ];
        s.values
            .iter()
            .filter_map(|e| {
                let accounted: i64 = known
                    .iter()
                    .filter(|(v, _)| *v == e.value)
                    .map(|(_, d)| (d * d).to_integer())
                    .sum();
                let rest = e.multiplicity as i64 - accounted;
                (rest > 0).then(|| OtherEigenvalue {
                    value: e.value,
                    multiplicity: rest as u64,
                    within: (e.value.abs() as f64) <= other_bound,
                })
            })
            .collect()
    });

    Ok(EigenBoundsReport {
        n,
        order,
        degree: k,
        proportion: crate::rational::fmt_q(&p),
        series: crate::rational::fmt_q(&series),
        proportion_matches_series: p == series,
        proportion_at_least_3_8: p >= Q::new(3, 8),
        lambda_psi: crate::rational::fmt_q(&lpsi),
        lambda_psi_expected: crate::rational::fmt_q(&expected),
        lambda_psi_matches: lpsi == expected,
        lambda_theta: crate::rational::fmt_q(&ltheta),
        lambda_theta_positive: ltheta > Q::zero(),
        other_bound,
        others,
        character_bounds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Canonical { alpha: usize, beta: usize },
    NonCanonical,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectingSet {
    pub members: Vec<ElemId>,
    pub certificate: Certificate,
}

impl IntersectingSet {
    pub fn new(group: &GroupTable, mut members: Vec<ElemId>) -> Self {
        members.sort_unstable();
        let certificate = match is_canonical(group, &members) {
            Some((alpha, beta)) => Certificate::Canonical { alpha, beta },
            None => Certificate::NonCanonical,
        };
        Self { members, certificate }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self.certificate, Certificate::Canonical { .. })
    }
}

/// The `(α, β)` with `members = {g : g(α) = β}`, if there is one.
pub fn is_canonical(group: &GroupTable, members: &[ElemId]) -> Option<(usize, usize)> {
    let first = group.element(*members.first()?);
    (0..group.degree()).find_map(|alpha| {
        let beta = first.apply(alpha);
        let all_map = members.iter().all(|&m| group.element(m).apply(alpha) == beta);
        (all_map && group.coset(alpha, beta).ok()?.len() == members.len()).then_some((alpha, beta))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimality {
    /// Branch and bound explored the whole search space.
    Exhaustive,
    /// Size equals the floor of the ratio bound.
    RatioBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxIntersecting {
    pub set: IntersectingSet,
    pub optimality: Optimality,
    pub ratio_bound: Option<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Largest group for which one maximum set is searched for.
    pub find_cap: usize,
    /// Largest group for which all maximum sets are enumerated.
    pub enumerate_cap: usize,
    /// Stop as soon as a set meets the ratio bound.
    pub use_ratio_bound: bool,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            find_cap: 2000,
            enumerate_cap: 200,
            use_ratio_bound: true,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn and_not_assign(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a &= !b;
        }
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Maximum cliques in the graph on vertex set `0..m` (the intersecting graph
/// restricted to the neighbourhood of the identity).
struct CliqueSearch {
    adj: Vec<Bits>,
}

impl CliqueSearch {
    /// Greedy sequential colouring; returns vertices in colour order with
    /// their (nondecreasing) colour numbers.
    fn colour(&self, p: &Bits) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = p.clone();
        let mut order = Vec::new();
        let mut colours = Vec::new();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                uncoloured.clear(v);
                q.clear(v);
                q.and_not_assign(&self.adj[v]);
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn best(&self, r: &mut Vec<usize>, p: Bits, best: &mut Vec<usize>, ceiling: usize) {
        let (order, colours) = self.colour(&p);
        let mut p = p;
        for i in (0..order.len()).rev() {
            if r.len() + colours[i] <= best.len() || best.len() >= ceiling {
                return;
            }
            let v = order[i];
            r.push(v);
            let np = p.and(&self.adj[v]);
            if np.is_empty() {
                if r.len() > best.len() {
                    *best = r.clone();
                }
            } else {
                self.best(r, np, best, ceiling);
            }
            r.pop();
            p.clear(v);
        }
    }

    fn all(&self, r: &mut Vec<usize>, p: Bits, target: usize, out: &mut Vec<Vec<usize>>) {
        if r.len() == target {
            out.push(r.clone());
            return;
        }
        let (order, colours) = self.colour(&p);
        let mut p = p;
        for i in (0..order.len()).rev() {
            if r.len() + colours[i] < target {
                return;
            }
            let v = order[i];
            r.push(v);
            self.all(r, p.and(&self.adj[v]), target, out);
            r.pop();
            p.clear(v);
        }
    }

    /// Top level of [`Self::all`], with branches run through `exec`.
    fn all_top(&self, p: &Bits, target: usize, exec: Exec) -> Vec<Vec<usize>> {
        if target == 0 {
            return vec![Vec::new()];
        }
        let (order, colours) = self.colour(p);
        let branches: Vec<usize> = (0..order.len()).rev().filter(|&i| colours[i] >= target).collect();
        let found = exec.map(&branches, |&i| {
            let mut pi = p.clone();
            for &later in &order[i + 1..] {
                pi.clear(later);
            }
            let v = order[i];
            let mut out = Vec::new();
            self.all(&mut vec![v], pi.and(&self.adj[v]), target, &mut out);
            out
        });
        found.into_iter().flatten().collect()
    }
}

struct Neighbourhood {
    vertices: Vec<ElemId>,
    search: CliqueSearch,
}

/// Elements agreeing with the identity somewhere, with the intersecting
/// graph on them.
fn identity_neighbourhood(graph: &DerangementGraph, exec: Exec) -> Neighbourhood {
    let g = graph.group();
    let id = g.identity();
    let vertices: Vec<ElemId> = (0..g.order()).filter(|&x| x != id && !graph.is_derangement(x)).collect();
    let m = vertices.len();
    let adj = exec.map_range(0..m, |i| {
        let mut b = Bits::new(m);
        for j in 0..m {
            if i != j && !graph.adjacent(vertices[i], vertices[j]) {
                b.set(j);
            }
        }
        b
    });
    Neighbourhood {
        vertices,
        search: CliqueSearch { adj },
    }
}

/// Largest canonical coset through the identity, i.e. the largest point
/// stabilizer.
fn best_stabilizer(group: &GroupTable) -> Vec<ElemId> {
    (0..group.degree())
        .map(|a| group.point_stabilizer(a).expect("point in range").members().to_vec())
        .max_by_key(|s| s.len())
        .unwrap_or_else(|| vec![group.identity()])
}

fn ratio_floor(graph: &DerangementGraph) -> Option<(Q, usize)> {
    if graph.degree() == 0 {
        return None;
    }
    let spectrum = class_spectrum(graph).ok()?;
    let b = ratio_bound(graph.order(), graph.degree(), spectrum.least());
    Some((b, b.floor().to_integer() as usize))
}

/// One maximum intersecting set. The identity may be assumed to lie in it
/// because left translation preserves independence.
pub fn max_intersecting(graph: &DerangementGraph, opts: SearchOptions) -> Result<MaxIntersecting> {
    let g = graph.group();
    let ratio = if opts.use_ratio_bound { ratio_floor(graph) } else { None };
    let incumbent = best_stabilizer(g);
    let ratio_string = ratio.map(|(b, _)| crate::rational::fmt_q(&b));
    if let Some((_, ceiling)) = ratio {
        if incumbent.len() >= ceiling {
            return Ok(MaxIntersecting {
                set: IntersectingSet::new(g, incumbent),
                optimality: Optimality::RatioBound,
                ratio_bound: ratio_string,
            });
        }
    }
    if g.order() > opts.find_cap {
        return Err(Error::OverCap {
            what: "maximum intersecting set search",
            size: g.order(),
            cap: opts.find_cap,
        });
    }
    let nb = identity_neighbourhood(graph, opts.exec);
    let local_of = |x: ElemId| nb.vertices.binary_search(&x).ok();
    let mut best: Vec<usize> = incumbent.iter().filter_map(|&x| local_of(x)).collect();
    let mut all = Bits::new(nb.vertices.len());
    for i in 0..nb.vertices.len() {
        all.set(i);
    }
    let ceiling = ratio.map_or(usize::MAX, |(_, c)| c.saturating_sub(1));
    nb.search.best(&mut Vec::new(), all, &mut best, ceiling);
    let optimality = if best.len() >= ceiling { Optimality::RatioBound } else { Optimality::Exhaustive };
    let mut members: Vec<ElemId> = best.iter().map(|&i| nb.vertices[i]).collect();
    members.push(g.identity());
    Ok(MaxIntersecting {
        set: IntersectingSet::new(g, members),
        optimality,
        ratio_bound: ratio_string,
    })
}

/// Every maximum intersecting set, found by exhaustive branch and bound
/// through the identity and then closed under left translation.
pub fn enumerate_maximum(graph: &DerangementGraph, opts: SearchOptions) -> Result<Vec<IntersectingSet>> {
    let g = graph.group();
    if g.order() > opts.enumerate_cap {
        return Err(Error::OverCap {
            what: "enumeration of maximum intersecting sets",
            size: g.order(),
            cap: opts.enumerate_cap,
        });
    }
    let nb = identity_neighbourhood(graph, opts.exec);
    let mut all = Bits::new(nb.vertices.len());
    for i in 0..nb.vertices.len() {
        all.set(i);
    }
    let mut best: Vec<usize> = best_stabilizer(g)
        .iter()
        .filter_map(|x| nb.vertices.binary_search(x).ok())
        .collect();
    nb.search.best(&mut Vec::new(), all.clone(), &mut best, usize::MAX);
    let through_identity = nb.search.all_top(&all, best.len(), opts.exec);

    let mut seen: BTreeSet<Vec<ElemId>> = BTreeSet::new();
    for clique in &through_identity {
        let mut base: Vec<ElemId> = clique.iter().map(|&i| nb.vertices[i]).collect();
        base.push(g.identity());
        for x in 0..g.order() {
            let mut t: Vec<ElemId> = base.iter().map(|&b| g.product(x, b)).collect();
            t.sort_unstable();
            seen.insert(t);
        }
    }
    Ok(seen.into_iter().map(|m| IntersectingSet::new(g, m)).collect())
}

/// `count` random intersecting sets built greedily in random order, with
/// random target sizes up to the largest point stabilizer.
pub fn random_intersecting_sets(graph: &DerangementGraph, count: usize, seed: u64) -> Vec<Vec<ElemId>> {
    let g = graph.group();
    let max = best_stabilizer(g).len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<ElemId> = (0..g.order()).collect();
    (0..count)
        .map(|_| {
            let target = rng.random_range(1..=max);
            all.shuffle(&mut rng);
            let mut set: Vec<ElemId> = Vec::with_capacity(target);
            for &x in &all {
                if set.len() == target {
                    break;
                }
                if set.iter().all(|&s| !graph.adjacent(s, x)) {
                    set.push(x);
                }
            }
            set.sort_unstable();
            set
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Natural;
    use crate::affine::Agl;
    use crate::character::{derived_characters, perm_character, standard_characters, PermutationCharacters};

    #[test]
    fn degrees() {
        let s4 = GroupTable::symmetric(4).unwrap();
        assert_eq!(DerangementGraph::build(&s4).degree(), 9);
        let agl = Agl::build(3).unwrap();
        let gr = DerangementGraph::build(agl.group());
        assert_eq!(gr.degree(), 525);
        assert!(gr.is_normal());
        assert!(gr.is_regular_sample(5));
        let trivial = GroupTable::generate(&[crate::Permutation::identity(3)]).unwrap();
        assert_eq!(DerangementGraph::build(&trivial).degree(), 0);
    }

    #[test]
    fn sym4_spectrum_both_routes() {
        let s4 = GroupTable::symmetric(4).unwrap();
        let gr = DerangementGraph::build(&s4);
        let exact = class_spectrum(&gr).unwrap();
        let got: Vec<(i64, u64)> = exact.values.iter().map(|e| (e.value, e.multiplicity)).collect();
        assert_eq!(got, vec![(-3, 10), (1, 9), (3, 4), (9, 1)]);
        let dense = dense_spectrum(&gr, DENSE_CAP).unwrap();
        assert!(dense.accounting_holds());
        let d: Vec<(Option<i64>, usize)> = dense.values.iter().map(|e| (e.exact, e.multiplicity)).collect();
        assert_eq!(d, vec![(Some(-3), 10), (Some(1), 9), (Some(3), 4), (Some(9), 1)]);
        assert_eq!(exact.get(-3).unwrap().characters, 2);
    }

    #[test]
    fn sym5_ratio_and_mu() {
        let s5 = GroupTable::symmetric(5).unwrap();
        let gr = DerangementGraph::build(&s5);
        let sp = class_spectrum(&gr).unwrap();
        assert_eq!(sp.least(), -11);
        assert_eq!(sp.multiplicity(-11), 16);
        assert_eq!(sp.second_least(), Some(-4));
        assert_eq!(ratio_bound(120, 44, -11), q(24));
    }

    #[test]
    fn char_eigenvalues_n3() {
        let agl = Agl::build(3).unwrap();
        let gr = DerangementGraph::build(agl.group());
        let d = derived_characters(&agl).unwrap();
        assert_eq!(char_eigenvalue(&gr, &d.one).unwrap(), q(525));
        assert_eq!(char_eigenvalue(&gr, &d.psi).unwrap(), q(-75));
        assert!(char_eigenvalue(&gr, &d.theta).unwrap() > q(0));
        let pi = &d.perm.pi;
        assert!(char_eigenvalue(&gr, pi).is_err());
    }

    #[test]
    fn exact_and_character_projectors_agree() {
        let agl = Agl::build(3).unwrap();
        let g = agl.group();
        let gr = DerangementGraph::build(g);
        let sp = class_spectrum(&gr).unwrap();
        let d = derived_characters(&agl).unwrap();
        let from_chars = Projector::from_characters(g, &[&d.one, &d.psi]);
        assert_eq!(sp.projector(&[525, -75]).unwrap(), from_chars);
        assert_eq!(sp.multiplicity(-75), 49);
    }

    #[test]
    fn series_values() {
        assert_eq!(derangement_series(2), Q::new(3, 8));
        assert_eq!(derangement_series(3), Q::new(25, 64));
        assert_eq!(derangement_series(4), Q::new(399, 1024));
    }

    #[test]
    fn canonical_recognition() {
        let s4 = GroupTable::symmetric(4).unwrap();
        let c = s4.coset(0, 3).unwrap();
        assert_eq!(is_canonical(&s4, c.members()), Some((0, 3)));
        let mut swapped = c.members().to_vec();
        let outsider = (0..24).find(|x| !c.contains(*x)).unwrap();
        swapped[0] = outsider;
        swapped.sort_unstable();
        assert_eq!(is_canonical(&s4, &swapped), None);
        assert_eq!(is_canonical(&s4, &[]), None);
    }

    #[test]
    fn sym4_maxima() {
        let s4 = GroupTable::symmetric(4).unwrap();
        let gr = DerangementGraph::build(&s4);
        let all = enumerate_maximum(&gr, SearchOptions::default()).unwrap();
        assert_eq!(all.len(), 16);
        assert!(all.iter().all(|s| s.len() == 6 && s.is_canonical() && gr.is_independent(&s.members)));
        let opts = SearchOptions {
            use_ratio_bound: false,
            ..SearchOptions::default()
        };
        let one = max_intersecting(&gr, opts).unwrap();
        assert_eq!(one.set.len(), 6);
        assert_eq!(one.optimality, Optimality::Exhaustive);
    }

    #[test]
    fn alt4_has_noncanonical_search_path() {
        // Alt(4) is not 2-transitive on pairs in the way Sym(4) is; the
        // search still has to return an independent set of maximum size.
        let a4 = GroupTable::alternating(4).unwrap();
        let gr = DerangementGraph::build(&a4);
        let all = enumerate_maximum(&gr, SearchOptions::default()).unwrap();
        assert!(all.iter().all(|s| gr.is_independent(&s.members)));
        assert_eq!(all[0].len(), 3);
    }

    #[test]
    fn stability_on_sym4() {
        let s4 = GroupTable::symmetric(4).unwrap();
        let gr = DerangementGraph::build(&s4);
        let sp = class_spectrum(&gr).unwrap();
        let proj = sp.projector(&[9, -3]).unwrap();
        let coset = s4.coset(1, 2).unwrap();
        let r = stability_residual(&gr, &sp, &proj, coset.members()).unwrap();
        assert_eq!(r.residual, "0");
        assert!(r.holds);
        for set in random_intersecting_sets(&gr, 30, 7) {
            assert!(gr.is_independent(&set));
            assert!(stability_residual(&gr, &sp, &proj, &set).unwrap().holds);
        }
        let empty = stability_residual(&gr, &sp, &proj, &[]).unwrap();
        assert_eq!((empty.residual.as_str(), empty.bound.as_str()), ("0", "0"));
    }

    #[test]
    fn eigen_bounds_n3() {
        let agl = Agl::build(3).unwrap();
        let gr = DerangementGraph::build(agl.group());
        let d = derived_characters(&agl).unwrap();
        let sp = class_spectrum(&gr).unwrap();
        let r = eigen_bounds_report(3, &gr, &d.psi, &d.theta, &[("alpha", &d.alpha), ("beta", &d.beta)], Some(&sp))
            .unwrap();
        assert!(r.proportion_matches_series && r.lambda_psi_matches && r.lambda_theta_positive);
        assert_eq!(r.others_within(), Some(true));
        assert!(r.character_bounds.iter().all(|b| b.holds));
    }

    #[test]
    fn eigen_bounds_n2_sign_character() {
        let agl = Agl::build(2).unwrap();
        let gr = DerangementGraph::build(agl.group());
        let perm = PermutationCharacters::new(&agl);
        let (psi, theta) = standard_characters(&agl, &perm);
        let sp = class_spectrum(&gr).unwrap();
        let r = eigen_bounds_report(2, &gr, &psi, &theta, &[], Some(&sp)).unwrap();
        let others = r.others.unwrap();
        // the sign character shares the least eigenvalue -3
        assert!(others.iter().any(|e| e.value == -3 && e.multiplicity == 1 && !e.within));
        let _ = perm_character(agl.group(), &Natural { degree: 4 });
    }
}
