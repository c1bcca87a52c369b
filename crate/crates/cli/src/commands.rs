//! Subcommand bodies. Each returns the `results` object and the verdicts.

use std::collections::BTreeMap;

use ekrlab::action::Natural;
use ekrlab::affine::Agl;
use ekrlab::character::{
    coset_char_sum, derived_characters, perm_character, standard_characters, theta_pointwise, CharName,
    ClassFunction, PermutationCharacters,
};
use ekrlab::dgraph::{
    char_eigenvalue, class_spectrum_with, dense_spectrum_with, derangement_series, eigen_bounds_report,
    enumerate_maximum, max_intersecting, random_intersecting_sets, ratio_bound, stability_residual,
    ClassSpectrum, DerangementGraph, Projector, SearchOptions, DENSE_CAP,
};
use ekrlab::dmatrix::{build_m, certify_rank, class_map_rank, isotypic_image_coeffs, random_primes, RankCertificate};
use ekrlab::rational::{big_to_f64, fmt_q, q, Q};
use ekrlab::suite::{run_all, Fixture, CANONICAL_RESIDUAL};
use ekrlab::{ElemId, GroupTable};
use serde_json::{json, Map, Value};

use crate::cache::Cache;
use crate::spec::Built;
use crate::{Command, CosetArg, Failure, RunConfig, Verdict};

/// Largest derangement matrix (in bits) the rank command will allocate.
pub const MATRIX_BIT_CAP: usize = 1 << 32;

type Outcome = Result<(Value, Vec<Verdict>), Failure>;

fn warn(msg: impl std::fmt::Display) {
    eprintln!("ekrlab: warning: {msg}");
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    cache: Option<Cache>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a RunConfig) -> Self {
        let cache = cfg.cache_dir.as_ref().and_then(|d| {
            Cache::open(d)
                .map_err(|e| warn(format!("cache disabled, cannot open {}: {e}", d.display())))
                .ok()
        });
        Self { cfg, cache }
    }

    fn spec(&self) -> String {
        self.cfg.group.to_string()
    }

    fn check_cap(&self, order: usize) -> Result<(), Failure> {
        if order > self.cfg.max_group_size {
            return Err(ekrlab::Error::GroupTooLarge {
                cap: self.cfg.max_group_size,
            }
            .into());
        }
        Ok(())
    }

    fn built(&self) -> Result<Built, Failure> {
        let spec = self.spec();
        if let Some(cache) = &self.cache {
            match cache.load_table(&spec) {
                Ok(Some(table)) => {
                    self.check_cap(table.order())?;
                    match self.cfg.group.adopt(table) {
                        Ok(b) => return Ok(b),
                        Err(e) => warn(format!("rebuilding {spec}, cached table rejected: {e}")),
                    }
                }
                Ok(None) => {}
                Err(reason) => warn(format!("rebuilding {spec}, cached table rejected: {reason}")),
            }
        }
        let built = self.cfg.group.build(self.cfg.max_group_size)?;
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.store_table(&spec, built.group()) {
                warn(format!("cannot cache {spec}: {e}"));
            }
        }
        Ok(built)
    }

    fn cached(&self, key: &str, compute: impl FnOnce() -> Result<Value, Failure>) -> Result<Value, Failure> {
        if let Some(cache) = &self.cache {
            match cache.load_result(key) {
                Ok(Some(v)) => return Ok(v),
                Ok(None) => {}
                Err(reason) => warn(format!("recomputing, cached result rejected: {reason}")),
            }
        }
        let v = compute()?;
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.store_result(key, &v) {
                warn(format!("cannot cache result: {e}"));
            }
        }
        Ok(v)
    }
}

pub fn dispatch(cfg: &RunConfig) -> Outcome {
    let ctx = Ctx::new(cfg);
    match &cfg.command {
        Command::Group => group(&ctx),
        Command::Spectrum { no_dense } => spectrum(&ctx, *no_dense),
        Command::Rank { class_only } => rank(&ctx, *class_only),
        Command::Charsum { character, coset } => charsum(&ctx, *character, *coset),
        Command::Mis { all, cap } => mis(&ctx, *all, *cap),
        Command::Ekr => ekr(&ctx),
        Command::Stability { sets } => stability(&ctx, *sets as usize),
        Command::ReportAll => report_all(),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9 + 0.0
}

/// `π − 1` for the natural action, irreducible exactly when the group is
/// 2-transitive.
fn psi_of(g: &GroupTable) -> Option<ClassFunction> {
    g.is_k_transitive(2)
        .then(|| &perm_character(g, &Natural { degree: g.degree() }) - &ClassFunction::trivial(g))
}

fn group(ctx: &Ctx) -> Outcome {
    let built = ctx.built()?;
    let g = built.group();
    let der = g.derangements().len();
    let proportion = Q::new(der as i64, g.order() as i64);
    let results = json!({
        "spec": ctx.spec(),
        "degree": g.degree(),
        "order": g.order(),
        "generators": g.generators().len(),
        "classes": g.class_count(),
        "class_sizes": g.classes().iter().map(|c| c.size()).collect::<Vec<_>>(),
        "derangements": der,
        "derangement_proportion": fmt_q(&proportion),
        "transitive": g.is_transitive(),
        "two_transitive": g.is_k_transitive(2),
        "affine": built.agl().is_some(),
    });
    let mut verdicts = Vec::new();
    if let Some(agl) = built.agl() {
        let series = derangement_series(agl.n());
        verdicts.push(Verdict::new(
            "derangement proportion = series",
            proportion == series,
            format!("{} vs {}", fmt_q(&proportion), fmt_q(&series)),
        ));
    }
    Ok((results, verdicts))
}

fn exact_accounting(sp: &ClassSpectrum) -> Verdict {
    let (order, k) = (sp.order as i128, sp.degree as i128);
    let total: i128 = sp.values.iter().map(|e| e.multiplicity as i128).sum();
    let trace: i128 = sp.values.iter().map(|e| e.multiplicity as i128 * e.value as i128).sum();
    let trace2: i128 = sp
        .values
        .iter()
        .map(|e| e.multiplicity as i128 * (e.value as i128).pow(2))
        .sum();
    Verdict::new(
        "exact accounting",
        total == order && trace == 0 && trace2 == order * k,
        format!("sum m = {total} (|G| = {order}), trace {trace}, trace of square {trace2} (|G|k = {})", order * k),
    )
}

fn spectrum(ctx: &Ctx, no_dense: bool) -> Outcome {
    let built = ctx.built()?;
    let g = built.group();
    let gr = DerangementGraph::build(g);
    let (exec, tol) = (ctx.cfg.exec, ctx.cfg.tol);
    let (order, k) = (g.order(), gr.degree());
    let mut res = Map::new();
    let mut verdicts = Vec::new();
    res.insert("order".into(), json!(order));
    res.insert("degree".into(), json!(k));

    let exact = match class_spectrum_with(&gr, exec) {
        Ok(sp) => {
            let rows: Vec<Value> = sp
                .values
                .iter()
                .map(|e| json!({"value": e.value, "multiplicity": e.multiplicity, "characters": e.characters}))
                .collect();
            res.insert("exact".into(), json!(rows));
            res.insert("least".into(), json!(sp.least()));
            res.insert("second_least".into(), json!(sp.second_least()));
            res.insert("ratio_bound".into(), json!(fmt_q(&ratio_bound(order, k, sp.least()))));
            verdicts.push(exact_accounting(&sp));
            Some(sp)
        }
        Err(e) => {
            verdicts.push(Verdict::new("exact spectrum", false, e.to_string()));
            None
        }
    };

    if no_dense {
        res.insert("dense".into(), json!("skipped"));
    } else if order > DENSE_CAP {
        res.insert("dense".into(), json!(format!("skipped: order {order} exceeds {DENSE_CAP}")));
    } else {
        let d = dense_spectrum_with(&gr, DENSE_CAP, exec)?;
        let rows: Vec<Value> = d
            .values
            .iter()
            .map(|e| json!({"value": round9(e.value), "multiplicity": e.multiplicity}))
            .collect();
        res.insert("dense".into(), json!(rows));
        let scale = (order * k.max(1)) as f64;
        let ok = d.total_multiplicity() == order
            && d.trace().abs() <= tol * scale
            && (d.trace_of_square() - scale).abs() <= tol * scale;
        verdicts.push(Verdict::new(
            "dense accounting",
            ok,
            format!(
                "sum m = {}, trace {:.3e}, trace of square {:.6}",
                d.total_multiplicity(),
                d.trace(),
                d.trace_of_square()
            ),
        ));
        if let Some(sp) = &exact {
            let agree = sp.values.len() == d.values.len()
                && sp
                    .values
                    .iter()
                    .zip(&d.values)
                    .all(|(a, b)| close(a.value as f64, b.value, tol) && a.multiplicity as usize == b.multiplicity);
            verdicts.push(Verdict::new(
                "exact and dense spectra agree",
                agree,
                format!("{} vs {} distinct values, tol {tol:e}", sp.values.len(), d.values.len()),
            ));
        }
    }

    if let Some(psi) = psi_of(g) {
        let n_points = g.degree() as i64;
        let l = char_eigenvalue(&gr, &psi)?;
        let expected = Q::new(-(k as i64), n_points - 1);
        res.insert("lambda_psi".into(), json!(fmt_q(&l)));
        verdicts.push(Verdict::new(
            "lambda_psi = -k/(N-1)",
            l == expected,
            format!("{} vs {}", fmt_q(&l), fmt_q(&expected)),
        ));
        if let Some(sp) = &exact {
            verdicts.push(Verdict::new(
                "least eigenvalue is lambda_psi",
                q(sp.least()) == l,
                format!("least {}", sp.least()),
            ));
            let dim = ((n_points - 1) * (n_points - 1)) as u64;
            if let Some(e) = sp.get(sp.least()) {
                let shared = e.characters > 1;
                let ok = if shared { e.multiplicity >= dim } else { e.multiplicity == dim };
                verdicts.push(Verdict::new(
                    "psi eigenspace dimension",
                    ok,
                    format!(
                        "multiplicity {} vs (N-1)^2 = {dim}, {} irreducible character(s) share the value",
                        e.multiplicity, e.characters
                    ),
                ));
            }
        }
    }

    if let Some(agl) = built.agl().filter(|a| a.n() >= 2) {
        let perm = PermutationCharacters::new(agl);
        let (psi, theta) = standard_characters(agl, &perm);
        let derived = if agl.n() >= 3 { Some(derived_characters(agl)?) } else { None };
        let extra: Vec<(&str, &ClassFunction)> = derived
            .as_ref()
            .map(|d| vec![("alpha", &d.alpha), ("beta", &d.beta)])
            .unwrap_or_default();
        let b = eigen_bounds_report(agl.n(), &gr, &psi, &theta, &extra, exact.as_ref())?;
        verdicts.push(Verdict::new("lambda_theta > 0", b.lambda_theta_positive, b.lambda_theta.clone()));
        verdicts.push(Verdict::new(
            "character eigenvalue bounds",
            b.character_bounds.iter().all(|c| c.holds),
            b.character_bounds
                .iter()
                .map(|c| format!("{} {} <= {:.3}", c.name, c.eigenvalue, c.bound))
                .collect::<Vec<_>>()
                .join(", "),
        ));
        if let Some(within) = b.others_within() {
            verdicts.push(Verdict::new(
                "other eigenvalues within bound",
                within,
                format!("bound {:.6}", b.other_bound),
            ));
        }
        res.insert("eigen_bounds".into(), serde_json::to_value(&b).map_err(anyhow::Error::from)?);
    }
    Ok((Value::Object(res), verdicts))
}

fn rank_verdicts(cert: &RankCertificate, two_transitive: bool) -> Vec<Verdict> {
    let mut v = vec![
        Verdict::new(
            "kernel vectors annihilated",
            cert.kernel_verified,
            format!("span dimension {}", cert.kernel_dim),
        ),
        Verdict::new(
            "certified",
            cert.certified,
            format!("modular rank {} vs upper bound {}", cert.rank, cert.upper_bound),
        ),
    ];
    if two_transitive {
        v.push(Verdict::new(
            "rank = (N-1)(N-2)",
            cert.rank == cert.expected,
            format!("{} vs {}", cert.rank, cert.expected),
        ));
    }
    v
}

fn rank_value(ctx: &Ctx, class_only: bool) -> Result<Value, Failure> {
    let c = ctx.cfg;
    let key = format!("rank {} class_only={class_only} primes={} seed={}", ctx.spec(), c.primes, c.seed);
    let value = ctx.cached(&key, || {
        let built = ctx.built()?;
        let g = built.group();
        let cert = if class_only {
            let agl = built
                .agl()
                .filter(|a| a.n() >= 2)
                .ok_or_else(|| Failure::Usage("--class-only needs agl(n,2) with n >= 2".into()))?;
            class_map_rank(agl, c.primes, c.seed)?
        } else {
            let n = g.degree();
            let bits = g.order().saturating_mul(n * n.saturating_sub(1));
            if bits > MATRIX_BIT_CAP {
                return Err(ekrlab::Error::OverCap {
                    what: "derangement matrix (bits)",
                    size: bits,
                    cap: MATRIX_BIT_CAP,
                }
                .into());
            }
            certify_rank(&build_m(g), &random_primes(c.primes, c.seed), c.exec)
        };
        Ok(json!({
            "matrix": if class_only { "class" } else { "full" },
            "order": g.order(),
            "two_transitive": g.is_k_transitive(2),
            "certificate": cert,
        }))
    })?;
    let order = value["order"].as_u64().unwrap_or(u64::MAX) as usize;
    ctx.check_cap(order)?;
    Ok(value)
}

fn parse_cert(v: &Value) -> Result<RankCertificate, Failure> {
    serde_json::from_value(v["certificate"].clone()).map_err(|e| Failure::Internal(e.into()))
}

fn rank(ctx: &Ctx, class_only: bool) -> Outcome {
    let v = rank_value(ctx, class_only)?;
    let cert = parse_cert(&v)?;
    let verdicts = rank_verdicts(&cert, v["two_transitive"].as_bool().unwrap_or(false));
    Ok((v, verdicts))
}

fn require_agl(built: &Built, min_n: usize, what: &str) -> Result<(), Failure> {
    match built.agl() {
        Some(a) if a.n() >= min_n => Ok(()),
        _ => Err(Failure::Usage(format!("{what} needs agl(n,2) with n >= {min_n}"))),
    }
}

fn subset(agl: &Agl, arg: CosetArg) -> Result<Vec<ElemId>, Failure> {
    let g = agl.group();
    let n = g.degree();
    Ok(match arg {
        CosetArg::S => agl.set_s()?.members().to_vec(),
        CosetArg::H => agl.h().members().to_vec(),
        CosetArg::K => agl.k().members().to_vec(),
        CosetArg::G0 => agl.g0().members().to_vec(),
        CosetArg::C => agl.centralizer()?.members().to_vec(),
        CosetArg::G => (0..g.order()).collect(),
        CosetArg::Coset(a, b) => {
            if a >= n || b >= n {
                return Err(Failure::Usage(format!("coset({a},{b}): points must be below {n}")));
            }
            g.coset(a, b)?.members().to_vec()
        }
    })
}

/// Character values from fixed-point counts alone: `ψ = fix − 1`,
/// `θ = |Ker(M − I)| − 2`, and `α`, `β` by peeling `π^{{2}}` and `π^{(2)}`.
fn pointwise_char(agl: &Agl, chi: CharName, s: ElemId) -> Q {
    let p = agl.group().element(s);
    let fix = p.fixed_point_count() as i64;
    let swaps = (0..p.degree())
        .filter(|&i| p.apply(i) > i && p.apply(p.apply(i)) == i)
        .count() as i64;
    let psi = q(fix - 1);
    let theta = theta_pointwise(agl, s);
    let sets = q(fix * (fix - 1) / 2 + swaps);
    let pairs = q(fix * (fix - 1));
    let alpha = sets - q(1) - theta - psi;
    match chi {
        CharName::One => q(1),
        CharName::Psi => psi,
        CharName::Theta => theta,
        CharName::Alpha => alpha,
        CharName::Beta => pairs - q(1) - psi * q(2) - theta - alpha,
    }
}

fn closed_form_on_s(agl: &Agl, chi: CharName) -> Q {
    let h = q(agl.h().len() as i64);
    match chi {
        CharName::One => h * q(1 << agl.n()),
        CharName::Psi => q(0),
        CharName::Theta | CharName::Alpha => h,
        CharName::Beta => h * (q(1) + Q::new(1, (1 << (agl.n() - 1)) - 1)),
    }
}

fn class_function(agl: &Agl, chi: CharName) -> Result<ClassFunction, Failure> {
    if agl.n() >= 3 {
        return Ok(derived_characters(agl)?.get(chi).clone());
    }
    let perm = PermutationCharacters::new(agl);
    let (psi, theta) = standard_characters(agl, &perm);
    match chi {
        CharName::One => Ok(ClassFunction::trivial(agl.group())),
        CharName::Psi => Ok(psi),
        CharName::Theta => Ok(theta),
        CharName::Alpha | CharName::Beta => Err(Failure::Usage(format!(
            "{chi} is not an irreducible character of agl({},2); it needs n >= 3",
            agl.n()
        ))),
    }
}

fn charsum(ctx: &Ctx, chi: CharName, coset: CosetArg) -> Outcome {
    let built = ctx.built()?;
    require_agl(&built, 2, "charsum")?;
    let agl = built.agl().expect("checked");
    let eta = class_function(agl, chi)?;
    let members = subset(agl, coset)?;
    let value = coset_char_sum(agl.group(), &eta, &members);
    let oracle = members
        .iter()
        .fold(q(0), |acc, &s| acc + pointwise_char(agl, chi, s));
    let closed = (coset == CosetArg::S && agl.n() >= 3).then(|| closed_form_on_s(agl, chi));
    let mut verdicts = vec![Verdict::new(
        "class sum = pointwise sum",
        value == oracle,
        format!("{} vs {}", fmt_q(&value), fmt_q(&oracle)),
    )];
    if let Some(c) = &closed {
        verdicts.push(Verdict::new(
            "closed form on S",
            value == *c,
            format!("{} vs {}", fmt_q(&value), fmt_q(c)),
        ));
    }
    let results = json!({
        "character": chi,
        "degree": fmt_q(&eta.degree()),
        "subset": coset,
        "subset_size": members.len(),
        "value": fmt_q(&value),
        "pointwise": fmt_q(&oracle),
        "closed_form": closed.map(|c| fmt_q(&c)),
    });
    Ok((results, verdicts))
}

fn search_options(ctx: &Ctx, cap: Option<usize>) -> SearchOptions {
    let d = SearchOptions::default();
    SearchOptions {
        exec: ctx.cfg.exec,
        find_cap: cap.unwrap_or(d.find_cap),
        enumerate_cap: cap.unwrap_or(d.enumerate_cap),
        ..d
    }
}

fn mis(ctx: &Ctx, all: bool, cap: Option<usize>) -> Outcome {
    let built = ctx.built()?;
    let g = built.group();
    let gr = DerangementGraph::build(g);
    let stabilizer = g.is_transitive().then(|| g.order() / g.degree());
    let mut verdicts = Vec::new();
    let results = if all {
        let sets = enumerate_maximum(&gr, search_options(ctx, cap))?;
        let size = sets.first().map_or(0, |s| s.len());
        let canonical = sets.iter().filter(|s| s.is_canonical()).count();
        verdicts.push(Verdict::new(
            "independent",
            sets.iter().all(|s| gr.is_independent(&s.members)),
            format!("{} sets", sets.len()),
        ));
        if let Some(b) = stabilizer {
            verdicts.push(Verdict::new("size = |G|/N", size == b, format!("{size} vs {b}")));
        }
        verdicts.push(Verdict::new(
            "all canonical",
            canonical == sets.len(),
            format!("{canonical} of {} are cosets of point stabilizers", sets.len()),
        ));
        json!({
            "size": size,
            "count": sets.len(),
            "canonical": canonical,
            "sets": sets,
        })
    } else {
        let m = max_intersecting(&gr, search_options(ctx, cap))?;
        verdicts.push(Verdict::new(
            "independent",
            gr.is_independent(&m.set.members),
            format!("{} elements", m.set.len()),
        ));
        if let Some(b) = stabilizer {
            verdicts.push(Verdict::new("size = |G|/N", m.set.len() == b, format!("{} vs {b}", m.set.len())));
        }
        verdicts.push(Verdict::new("canonical", m.set.is_canonical(), format!("{:?}", m.set.certificate)));
        json!({
            "size": m.set.len(),
            "optimality": m.optimality,
            "ratio_bound": m.ratio_bound,
            "set": m.set,
        })
    };
    Ok((results, verdicts))
}

fn ekr(ctx: &Ctx) -> Outcome {
    let built = ctx.built()?;
    let g = built.group();
    let n_points = g.degree();
    let mut res = Map::new();
    let mut verdicts = Vec::new();
    let Some(psi) = psi_of(g) else {
        verdicts.push(Verdict::new("2-transitive", false, "the pipeline needs a 2-transitive group"));
        return Ok((json!({"two_transitive": false}), verdicts));
    };
    let gr = DerangementGraph::build(g);
    let k = gr.degree();
    let sp = class_spectrum_with(&gr, ctx.cfg.exec)?;
    let stab = g.order() / n_points;

    let bound = ratio_bound(g.order(), k, sp.least());
    res.insert("ratio_bound".into(), json!(fmt_q(&bound)));
    verdicts.push(Verdict::new(
        "ratio bound = |G|/N",
        bound == q(stab as i64),
        format!("{} vs {stab}", fmt_q(&bound)),
    ));
    // A subgroup H is independent iff H⁻¹H = H holds no derangement.
    let stabilizers_ok = (0..n_points).all(|a| {
        g.point_stabilizer(a)
            .map(|s| s.len() == stab && !s.members().iter().any(|&x| gr.is_derangement(x)))
            .unwrap_or(false)
    });
    verdicts.push(Verdict::new(
        "point stabilizers are independent and attain the bound",
        stabilizers_ok,
        format!("{n_points} stabilizers of size {stab}"),
    ));

    let l = char_eigenvalue(&gr, &psi)?;
    let expected = Q::new(-(k as i64), n_points as i64 - 1);
    res.insert("lambda_psi".into(), json!(fmt_q(&l)));
    res.insert("least".into(), json!(sp.least()));
    verdicts.push(Verdict::new(
        "least eigenvalue = lambda_psi = -k/(N-1)",
        l == expected && q(sp.least()) == l,
        format!("least {}, lambda_psi {}, -k/(N-1) {}", sp.least(), fmt_q(&l), fmt_q(&expected)),
    ));

    let rank = rank_value(ctx, false)?;
    let cert = parse_cert(&rank)?;
    verdicts.extend(rank_verdicts(&cert, true).into_iter().map(|mut v| {
        v.name = format!("derangement matrix: {}", v.name);
        v
    }));
    res.insert("rank".into(), rank["certificate"].clone());

    if let Some(agl) = built.agl().filter(|a| a.n() >= 3) {
        let d = derived_characters(agl)?;
        let s = agl.set_s()?;
        let mut sums = BTreeMap::new();
        let mut sums_ok = true;
        let mut iso = BTreeMap::new();
        let mut iso_ok = true;
        for chi in CharName::ALL {
            let v = coset_char_sum(g, d.get(chi), s.members());
            sums_ok &= v == closed_form_on_s(agl, chi);
            sums.insert(chi.to_string(), fmt_q(&v));
            let c = isotypic_image_coeffs(agl, d.get(chi))?;
            iso_ok &= c.nonzero == (chi != CharName::Psi);
            iso.insert(chi.to_string(), c);
        }
        verdicts.push(Verdict::new(
            "character sums on S match closed forms",
            sums_ok,
            format!("{sums:?}"),
        ));
        verdicts.push(Verdict::new(
            "isotypic coefficients nonzero except psi",
            iso_ok,
            iso.iter()
                .map(|(k, c)| format!("{k} {}", c.coefficient))
                .collect::<Vec<_>>()
                .join(", "),
        ));
        res.insert("character_sums_on_s".into(), json!(sums));
        res.insert("isotypic".into(), json!(iso));

        let class_rank = rank_value(ctx, true)?;
        let cc = parse_cert(&class_rank)?;
        verdicts.push(Verdict::new(
            "class submatrix rank = (N-1)(N-2)",
            cc.certified && cc.rank == cc.expected,
            format!("{} of {} rows, rank {} vs {}", cc.rows, g.order(), cc.rank, cc.expected),
        ));
        res.insert("class_rank".into(), class_rank["certificate"].clone());
    }
    Ok((Value::Object(res), verdicts))
}

fn stability(ctx: &Ctx, count: usize) -> Outcome {
    let built = ctx.built()?;
    let g = built.group();
    let gr = DerangementGraph::build(g);
    let exec = ctx.cfg.exec;
    let sp = class_spectrum_with(&gr, exec)?;
    let eigenspaces = sp.projector(&[gr.degree() as i64, sp.least()])?;
    let sets = random_intersecting_sets(&gr, count, ctx.cfg.seed);
    let mut held = 0;
    let mut independent = 0;
    let mut min_slack = f64::INFINITY;
    let mut worst_ratio: f64 = 0.0;
    let mut mu = None;
    for s in &sets {
        let r = stability_residual(&gr, &sp, &eigenspaces, s)?;
        mu = Some(r.mu);
        held += usize::from(r.holds);
        independent += usize::from(gr.is_independent(s));
        min_slack = min_slack.min(r.bound_f64 - r.residual_f64);
        if r.bound_f64 > 0.0 {
            worst_ratio = worst_ratio.max(r.residual_f64 / r.bound_f64);
        }
    }
    let mut verdicts = vec![
        Verdict::new("sets are intersecting", independent == sets.len(), format!("{independent}/{}", sets.len())),
        Verdict::new(
            "stability inequality",
            held == sets.len(),
            format!("held on {held}/{}, min slack {min_slack:.3e}", sets.len()),
        ),
    ];
    let mut res = json!({
        "lambda": sp.least(),
        "mu": mu,
        "sets": sets.len(),
        "held": held,
        "min_slack": min_slack,
        "max_residual_over_bound": worst_ratio,
    });
    if let Some(psi) = psi_of(g) {
        let one = ClassFunction::trivial(g);
        let u = Projector::from_characters(g, &[&one, &psi]);
        let n = g.degree();
        let cosets: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        let worst = exec
            .map(&cosets, |&(a, b)| {
                g.coset(a, b)
                    .map(|c| big_to_f64(&u.residual(g, c.members(), ekrlab::Exec::Sequential)))
                    .unwrap_or(f64::INFINITY)
            })
            .into_iter()
            .fold(0.0, f64::max);
        res["canonical_max_residual"] = json!(worst);
        verdicts.push(Verdict::new(
            "canonical cosets lie in U_1 + U_psi",
            worst < CANONICAL_RESIDUAL,
            format!("max residual {worst:.1e} over {} cosets (threshold {CANONICAL_RESIDUAL:e})", cosets.len()),
        ));
    }
    Ok((res, verdicts))
}

fn report_all() -> Outcome {
    let fixture = Fixture::new()?;
    let rows = run_all(&fixture, |r| {
        eprintln!("criterion {:>2} {:<27} {}", r.index, r.name, if r.pass { "PASS" } else { "FAIL" });
    });
    let verdicts = rows
        .iter()
        .map(|r| Verdict::new(format!("criterion {} {}", r.index, r.name), r.pass, r.detail.clone()))
        .collect();
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok((json!({"criteria": rows, "passed": passed, "total": rows.len()}), verdicts))
}
