//! Class functions with exact rational values, permutation characters, and
//! the five characters `1, ψ, θ, α, β` of `AGL(n,2)` that govern its
//! derangement matrix.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::Zero;
use serde::Serialize;

use crate::action::{orbits, Action, Natural, OrderedPairs, UnorderedPairs};
use crate::affine::{Agl, LinearPart};
use crate::group::{ElemId, GroupTable};
use crate::rational::{q, Q};
use crate::{Error, Exec, Result};

/// Rational-valued function on a group, stored per conjugacy class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    values: Vec<Q>,
}

impl ClassFunction {
    pub fn from_values(values: Vec<Q>) -> Self {
        Self { values }
    }

    /// Evaluates `f` at each class representative.
    pub fn from_fn(group: &GroupTable, f: impl Fn(ElemId) -> Q + Sync + Send) -> Self {
        let values = Exec::default().map(group.classes(), |c| f(c.representative));
        Self { values }
    }

    pub fn trivial(group: &GroupTable) -> Self {
        Self {
            values: vec![q(1); group.class_count()],
        }
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn on_class(&self, class: usize) -> Q {
        self.values[class]
    }

    pub fn eval(&self, group: &GroupTable, g: ElemId) -> Q {
        self.values[group.class_of(g)]
    }

    /// Value at the identity (class 0).
    pub fn degree(&self) -> Q {
        self.values[0]
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }
}

impl Add for &ClassFunction {
    type Output = ClassFunction;
    fn add(self, rhs: &ClassFunction) -> ClassFunction {
        ClassFunction {
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ClassFunction {
    type Output = ClassFunction;
    fn sub(self, rhs: &ClassFunction) -> ClassFunction {
        ClassFunction {
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<i64> for &ClassFunction {
    type Output = ClassFunction;
    fn mul(self, k: i64) -> ClassFunction {
        self.scale(k)
    }
}

/// Value at each class = fixed points of the class representative.
pub fn perm_character<A: Action + ?Sized>(group: &GroupTable, action: &A) -> ClassFunction {
    ClassFunction::from_fn(group, |g| q(action.fixed_points(group.element(g)) as i64))
}

/// `⟨χ₁, χ₂⟩ = (1/|G|) Σ_g χ₁(g)·χ₂(g)`, summed class by class. All values
/// here are rational, so complex conjugation is the identity.
pub fn inner_product(group: &GroupTable, a: &ClassFunction, b: &ClassFunction) -> Q {
    let terms = Exec::default().map_range(0..group.class_count(), |c| {
        a.on_class(c) * b.on_class(c) * group.classes()[c].size() as i64
    });
    let total = terms.into_iter().fold(Q::zero(), |acc, t| acc + t);
    total / group.order() as i64
}

/// `Σ_{g ∈ G} χ(g)`.
pub fn group_sum(group: &GroupTable, chi: &ClassFunction) -> Q {
    group
        .classes()
        .iter()
        .enumerate()
        .fold(Q::zero(), |acc, (c, cl)| acc + chi.on_class(c) * cl.size() as i64)
}

/// `Σ_{s ∈ T} χ(s⁻¹)`.
pub fn coset_char_sum(group: &GroupTable, chi: &ClassFunction, members: &[ElemId]) -> Q {
    let mut counts = vec![0i64; group.class_count()];
    for &s in members {
        counts[group.class_of(group.inverse(s))] += 1;
    }
    counts
        .iter()
        .enumerate()
        .fold(Q::zero(), |acc, (c, &k)| acc + chi.on_class(c) * k)
}

/// Orbits of a subgroup `L` on an action domain, prepared for evaluating
/// `Σ_{y∈L} ρ(xy) = (Σᵢ |Oᵢ ∩ xOᵢ| / |Oᵢ|)·|L|` at many `x`.
pub struct OrbitFormula<'a, A: Action> {
    group: &'a GroupTable,
    action: &'a A,
    subgroup: &'a [ElemId],
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitFormulaValue {
    /// `Σ_{y∈L} ρ(xy)` from the class function.
    pub direct: Q,
    /// `(Σᵢ |Oᵢ ∩ xOᵢ| / |Oᵢ|)·|L|` from the orbits.
    pub formula: Q,
}

impl OrbitFormulaValue {
    pub fn agrees(&self) -> bool {
        self.direct == self.formula
    }
}

impl<'a, A: Action> OrbitFormula<'a, A> {
    pub fn new(group: &'a GroupTable, action: &'a A, subgroup: &'a [ElemId]) -> Self {
        let orbits = orbits(group, subgroup, action);
        let mut orbit_of = vec![0; action.size()];
        for (i, o) in orbits.iter().enumerate() {
            for &p in o {
                orbit_of[p] = i;
            }
        }
        Self {
            group,
            action,
            subgroup,
            orbits,
            orbit_of,
        }
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    /// `|Oᵢ ∩ x(Oᵢ)|`.
    pub fn intersection(&self, i: usize, x: ElemId) -> usize {
        let xi = self.group.element(self.group.inverse(x));
        self.orbits[i]
            .iter()
            .filter(|&&o| self.orbit_of[self.action.image(xi, o)] == i)
            .count()
    }

    pub fn formula(&self, x: ElemId) -> Q {
        let ratio = (0..self.orbits.len()).fold(Q::zero(), |acc, i| {
            acc + Q::new(self.intersection(i, x) as i64, self.orbits[i].len() as i64)
        });
        ratio * self.subgroup.len() as i64
    }

    pub fn direct(&self, rho: &ClassFunction, x: ElemId) -> Q {
        self.subgroup.iter().fold(Q::zero(), |acc, &y| {
            acc + rho.eval(self.group, self.group.product(x, y))
        })
    }

    pub fn evaluate(&self, rho: &ClassFunction, x: ElemId) -> OrbitFormulaValue {
        OrbitFormulaValue {
            direct: self.direct(rho, x),
            formula: self.formula(x),
        }
    }
}

/// One-shot form of [`OrbitFormula::evaluate`].
pub fn orbit_formula_sum<A: Action>(
    group: &GroupTable,
    rho: &ClassFunction,
    action: &A,
    subgroup: &[ElemId],
    x: ElemId,
) -> OrbitFormulaValue {
    OrbitFormula::new(group, action, subgroup).evaluate(rho, x)
}

/// Permutation characters of `AGL(n,2)` on `V`, `V∖{0}` (through the linear
/// part), 2-subsets of `V`, and ordered pairs of distinct points of `V`.
#[derive(Clone, Debug)]
pub struct PermutationCharacters {
    pub pi: ClassFunction,
    pub rho: ClassFunction,
    pub pi_sets: ClassFunction,
    pub pi_pairs: ClassFunction,
}

impl PermutationCharacters {
    pub fn new(agl: &Agl) -> Self {
        let g = agl.group();
        let points = 1usize << agl.n();
        Self {
            pi: perm_character(g, &Natural { degree: points }),
            rho: perm_character(g, &LinearPart { points }),
            pi_sets: perm_character(g, &UnorderedPairs::new(Natural { degree: points })),
            pi_pairs: perm_character(g, &OrderedPairs::new(Natural { degree: points })),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CharName {
    One,
    Psi,
    Theta,
    Alpha,
    Beta,
}

impl CharName {
    pub const ALL: [CharName; 5] = [
        CharName::One,
        CharName::Psi,
        CharName::Theta,
        CharName::Alpha,
        CharName::Beta,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "one" | "trivial" => Some(CharName::One),
            "psi" => Some(CharName::Psi),
            "theta" => Some(CharName::Theta),
            "alpha" => Some(CharName::Alpha),
            "beta" => Some(CharName::Beta),
            _ => None,
        }
    }
}

impl fmt::Display for CharName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CharName::One => "one",
            CharName::Psi => "psi",
            CharName::Theta => "theta",
            CharName::Alpha => "alpha",
            CharName::Beta => "beta",
        };
        f.write_str(s)
    }
}

/// `ψ = π - 1` and `θ = ρ - 1`; defined for every `n ≥ 2`.
pub fn standard_characters(agl: &Agl, perm: &PermutationCharacters) -> (ClassFunction, ClassFunction) {
    let one = ClassFunction::trivial(agl.group());
    (&perm.pi - &one, &perm.rho - &one)
}

/// `θ(M, v) = |Ker(M - I)| - 2`, evaluated from the affine data alone.
pub fn theta_pointwise(agl: &Agl, g: ElemId) -> Q {
    q(agl.map(g).linear_fixed_points() as i64 - 2)
}

/// The irreducible constituents of `π^{(2)}`.
#[derive(Clone, Debug)]
pub struct DerivedCharacters {
    pub one: ClassFunction,
    pub psi: ClassFunction,
    pub theta: ClassFunction,
    pub alpha: ClassFunction,
    pub beta: ClassFunction,
    pub perm: PermutationCharacters,
}

impl DerivedCharacters {
    pub fn get(&self, name: CharName) -> &ClassFunction {
        match name {
            CharName::One => &self.one,
            CharName::Psi => &self.psi,
            CharName::Theta => &self.theta,
            CharName::Alpha => &self.alpha,
            CharName::Beta => &self.beta,
        }
    }
}

/// `α = π^{{2}} - 1 - θ - ψ` and `β = π^{(2)} - 1 - 2ψ - θ - α`, each certified
/// irreducible by `⟨χ, χ⟩ = 1`. Refuses `n < 3`, where `α` vanishes.
pub fn derived_characters(agl: &Agl) -> Result<DerivedCharacters> {
    if agl.n() < 3 {
        return Err(Error::Degenerate(format!(
            "AGL({},2): alpha = pi_sets - 1 - theta - psi is zero, derived characters need n >= 3",
            agl.n()
        )));
    }
    let g = agl.group();
    let perm = PermutationCharacters::new(agl);
    let one = ClassFunction::trivial(g);
    let (psi, theta) = standard_characters(agl, &perm);
    let alpha = &(&(&perm.pi_sets - &one) - &theta) - &psi;
    let beta = &(&(&(&perm.pi_pairs - &one) - &psi.scale(2)) - &theta) - &alpha;
    for chi in [&psi, &theta, &alpha, &beta] {
        let norm = inner_product(g, chi, chi);
        if norm != q(1) || chi.degree() <= q(0) {
            return Err(Error::NotIrreducible(crate::rational::fmt_q(&norm)));
        }
    }
    Ok(DerivedCharacters {
        one,
        psi,
        theta,
        alpha,
        beta,
        perm,
    })
}
