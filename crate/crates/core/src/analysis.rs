//! Single-variable classification, asymptotic separation of fibers at each
//! point at infinity, reduction to a plane for three or more variables, and
//! the combined verdict.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gaussian::GaussianRational;
use crate::infinity::{
    cone_horn, local_model, points_at_infinity, ConeHorn, InfinityError, LocalModel, PointAtInfinity,
};
use crate::poly::MultiPoly;
use crate::probe::{cluster_roots, roots_univariate, ROOT_CLUSTER_TOL};
use crate::puiseux::{puiseux_roots, reconstruction, sort_branches, PuiseuxBranch, Reconstruction};
use crate::scalar::Scalar;
use crate::univariate::UniPoly;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("polynomial is constant")]
    Constant,
    #[error("plane restriction needs at least 3 variables, got {0}")]
    TooFewVariables(usize),
    #[error("no generic plane section found after {0} attempts")]
    RestrictionFailed(usize),
    #[error(transparent)]
    Infinity(#[from] InfinityError),
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub t_samples: Vec<GaussianRational>,
    pub order: u32,
    pub max_order: u32,
    pub seed: u64,
    pub max_sample_retries: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            t_samples: ["0", "1", "2", "1+i", "-3"].iter().map(|s| s.parse().expect("literal")).collect(),
            order: 12,
            max_order: 256,
            seed: 0,
            max_sample_retries: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotSingleVariable {
    /// `f_d` is not a constant times a power of a linear form.
    LeadingFormNotPower,
    /// The leading form is `c·ℓ^d` but `f` varies along `direction`, which
    /// annihilates `ℓ`.
    VariesAlong { direction: Vec<GaussianRational> },
}

impl fmt::Display for NotSingleVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LeadingFormNotPower => f.write_str("leading form is not a power of a linear form"),
            Self::VariesAlong { direction } => {
                let parts: Vec<String> = direction.iter().map(ToString::to_string).collect();
                write!(f, "derivative along ({}) is nonzero", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub single_variable: bool,
    pub degree: u32,
    /// `ℓ`, normalized so its first nonzero coefficient is 1.
    pub direction: Option<Vec<GaussianRational>>,
    /// `P` with `f = P(ℓ)`.
    pub univariate: Option<UniPoly>,
    /// `n - 1` independent `ξ` with `ξ·∇f ≡ 0`.
    pub annihilators: Vec<Vec<GaussianRational>>,
    pub witness: Option<NotSingleVariable>,
    /// Critical values of `P`, the only candidates for non-trivial values.
    pub excluded_values: Vec<Complex64>,
}

/// A point where `f_d` does not vanish, from a seeded search.
fn nonvanishing_point(form: &MultiPoly) -> Vec<GaussianRational> {
    let n = form.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut candidate = vec![GaussianRational::one(); n];
    for _ in 0..10_000 {
        if !form.eval(&candidate).is_zero() {
            return candidate;
        }
        candidate = (0..n).map(|_| GaussianRational::from_integers(rng.gen_range(-1000..=1000), 0)).collect();
    }
    unreachable!("a nonzero form vanishes on a thin set")
}

pub fn classify_single_variable(f: &MultiPoly) -> Result<Classification, AnalysisError> {
    let d = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(AnalysisError::Constant),
    };
    let n = f.nvars();
    let top = f.homogeneous_part(d);
    let p = nonvanishing_point(&top);
    // Euler: ∇f_d(p)·p = d·f_d(p) != 0
    let grad: Vec<GaussianRational> = top.gradient().iter().map(|g| g.eval(&p)).collect();
    let ell = MultiPoly::linear(&grad);
    let c = &top.eval(&p) / &ell.eval(&p).pow(d);
    let not_single = |witness| Classification {
        single_variable: false,
        degree: d,
        direction: None,
        univariate: None,
        annihilators: Vec::new(),
        witness: Some(witness),
        excluded_values: Vec::new(),
    };
    if ell.pow(d).scale(&c) != top {
        return Ok(not_single(NotSingleVariable::LeadingFormNotPower));
    }
    let j0 = grad.iter().position(|a| !a.is_zero()).expect("nonzero gradient");
    let lead = grad[j0].inv().expect("nonzero");
    let dir: Vec<GaussianRational> = grad.iter().map(|a| a * &lead).collect();
    // x_{j0} = T - Σ_{k != j0} ℓ_k x_k, with T in slot j0
    let images: Vec<MultiPoly> = (0..n)
        .map(|j| {
            if j != j0 {
                return MultiPoly::var(n, j);
            }
            let mut coeffs: Vec<GaussianRational> = dir.iter().map(|a| -a).collect();
            coeffs[j0] = GaussianRational::one();
            MultiPoly::linear(&coeffs)
        })
        .collect();
    let moved = f.substitute(&images).expect("arity");
    let annihilators: Vec<Vec<GaussianRational>> = (0..n)
        .filter(|&k| k != j0)
        .map(|k| {
            let mut xi = vec![GaussianRational::zero(); n];
            xi[k] = GaussianRational::one();
            xi[j0] = -&dir[k];
            xi
        })
        .collect();
    let Some(pu) = moved.to_univariate(j0) else {
        let direction = annihilators
            .iter()
            .find(|xi| !f.partial_derivative(xi).expect("nonzero direction").is_zero())
            .expect("some complementary direction moves f")
            .clone();
        return Ok(not_single(NotSingleVariable::VariesAlong { direction }));
    };
    let as_poly = MultiPoly::from_univariate(&pu, 1, 0);
    debug_assert_eq!(as_poly.substitute(&[MultiPoly::linear(&dir)]).unwrap(), *f);
    let excluded_values = critical_values(&pu);
    Ok(Classification {
        single_variable: true,
        degree: d,
        direction: Some(dir),
        univariate: Some(pu),
        annihilators,
        witness: None,
        excluded_values,
    })
}

fn critical_values(p: &UniPoly) -> Vec<Complex64> {
    let dp = p.derivative();
    if dp.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let Ok(roots) = roots_univariate(&dp.to_complex()) else {
        return Vec::new();
    };
    let values: Vec<Complex64> = roots.iter().map(|z| p.eval_complex(*z)).collect();
    let mut out: Vec<Complex64> = cluster_roots(&values, ROOT_CLUSTER_TOL).into_iter().map(|(z, _)| z).collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointVerdict {
    DistanceZero,
    ConeCriterion,
    Inconclusive,
}

impl fmt::Display for PointVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DistanceZero => "DISTANCE_ZERO",
            Self::ConeCriterion => "CONE_CRITERION",
            Self::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Invariants of one branch at the base sample, with `κ` and `e` measured
/// against every other retained sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchData {
    pub ramification: u32,
    pub beta: u32,
    pub b0: Scalar,
    pub exact: bool,
    /// `κ` in `u`-units: the branch at level `t` agrees with the base branch
    /// up to `u^{β/Q + κ}`. One entry per compared sample.
    pub kappa_by_sample: Vec<Option<Rational64>>,
    /// Common value of `kappa_by_sample` when all agree.
    pub kappa: Option<Rational64>,
    /// `e = (β - Q - Q·κ)/β`: `|y_t(x) - y_s(x)| ~ |x|^e` along the branch.
    pub exponent_e: Option<Rational64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub t: GaussianRational,
    pub exceptional: bool,
    pub reason: Option<String>,
    /// `(Q_i, β_i)` of each branch.
    pub signature: Vec<(u32, u32)>,
    pub reconstruction: Option<Reconstruction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub point: PointAtInfinity,
    pub degree: u32,
    pub m: u32,
    pub lambda: Option<GaussianRational>,
    /// Cone behaviour for consecutive sampled pairs.
    pub horns: Vec<(GaussianRational, GaussianRational, ConeHorn)>,
    pub cone_criterion: bool,
    /// `β = Σ β_i`.
    pub beta: Option<u32>,
    /// `(d - m)·β/m`.
    pub kappa: Option<Rational64>,
    /// `(β - m)/β - (d - m)` from the same `(m, β, d)`.
    pub exponent_e: Option<Rational64>,
    /// Every measured `κ_i` equals `kappa`.
    pub kappa_matches: Option<bool>,
    pub branch_data: Vec<BranchData>,
    /// All `β_i/Q_i` coincide.
    pub ratios_equal: Option<bool>,
    /// `m < β ≤ d`.
    pub ordering_holds: Option<bool>,
    pub truncation_order: u32,
    pub samples: Vec<SampleRecord>,
    pub verdict: PointVerdict,
    pub notes: Vec<String>,
}

impl SeparationReport {
    fn new(model: &LocalModel, order: u32) -> Self {
        Self {
            point: model.point.clone(),
            degree: model.degree,
            m: model.m,
            lambda: model.lambda.clone(),
            horns: Vec::new(),
            cone_criterion: false,
            beta: None,
            kappa: None,
            exponent_e: None,
            kappa_matches: None,
            branch_data: Vec::new(),
            ratios_equal: None,
            ordering_holds: None,
            truncation_order: order,
            samples: Vec::new(),
            verdict: PointVerdict::Inconclusive,
            notes: Vec::new(),
        }
    }
}

fn dedup_samples(samples: &[GaussianRational]) -> Vec<GaussianRational> {
    let mut out: Vec<GaussianRational> = Vec::new();
    for t in samples {
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
    out
}

fn random_gaussian(rng: &mut ChaCha8Rng, bound: i64) -> GaussianRational {
    GaussianRational::from_integers(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
}

/// A level passes when `g_t(u0, ·)` is square-free on at least one of two
/// random vertical lines, i.e. the `v`-discriminant is not identically zero.
fn screen_level(g_t: &MultiPoly, rng: &mut ChaCha8Rng) -> bool {
    (0..2).any(|_| {
        let u0 = loop {
            let z = random_gaussian(rng, 9);
            if !z.is_zero() {
                break z;
            }
        };
        let line = g_t.specialize(0, &u0).to_univariate(0).expect("univariate in v");
        line.degree().unwrap_or(0) == 0 || line.is_squarefree()
    })
}

struct LevelData {
    record: SampleRecord,
    branches: Vec<PuiseuxBranch>,
}

fn examine_level(model: &LocalModel, t: &GaussianRational, order: u32, rng: &mut ChaCha8Rng) -> LevelData {
    let g_t = model.instantiate(t);
    let mut record =
        SampleRecord { t: t.clone(), exceptional: false, reason: None, signature: Vec::new(), reconstruction: None };
    if !screen_level(&g_t, rng) {
        record.exceptional = true;
        record.reason = Some("v-discriminant vanishes on sampled lines".into());
        return LevelData { record, branches: Vec::new() };
    }
    let mut branches = match puiseux_roots(&g_t, order) {
        Ok(b) => b,
        Err(e) => {
            record.exceptional = true;
            record.reason = Some(format!("expansion failed: {e}"));
            return LevelData { record, branches: Vec::new() };
        }
    };
    sort_branches(&mut branches);
    record.signature = branches.iter().map(|b| (b.ramification, b.beta)).collect();
    record.reconstruction = Some(reconstruction(&g_t, &branches, order));
    if branches.iter().any(|b| !b.is_reduced()) {
        record.exceptional = true;
        record.reason = Some("repeated Puiseux root".into());
    }
    LevelData { record, branches }
}

/// First index where `a` and `b` differ.
fn agreement_index(a: &[Scalar], b: &[Scalar]) -> Option<usize> {
    let mut running = 0.0f64;
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        running = running.max(x.norm()).max(y.norm());
        if !x.approx_eq(y, 1e-8, 1e-6 * running) {
            return Some(k);
        }
    }
    None
}

/// Best conjugate match of `branch` against any base branch of the same
/// signature; `None` when they agree to the working precision.
fn measure_kappa(branch: &PuiseuxBranch, base: &[PuiseuxBranch]) -> Option<Rational64> {
    let mut best: Option<usize> = None;
    let mut exhausted = false;
    for b in base.iter().filter(|b| b.ramification == branch.ramification && b.beta == branch.beta) {
        for k in 0..b.ramification {
            match agreement_index(&branch.coeffs, &b.conjugate(k)) {
                None => exhausted = true,
                Some(idx) => best = Some(best.map_or(idx, |cur| cur.max(idx))),
            }
        }
    }
    if exhausted {
        return None;
    }
    let idx = best?;
    Some(Rational64::new(idx as i64 - branch.beta as i64, branch.ramification as i64))
}

fn analyze_point(model: &LocalModel, config: &AnalysisConfig, rng: &mut ChaCha8Rng) -> SeparationReport {
    let d = model.degree;
    let base_order = config.order.max(d * model.point.mult_a + 2).min(config.max_order.max(config.order));
    let mut report = SeparationReport::new(model, base_order);
    let samples = dedup_samples(&config.t_samples);
    for pair in samples.windows(2) {
        report.horns.push((pair[0].clone(), pair[1].clone(), cone_horn(model, &pair[0], &pair[1])));
    }
    let shared = report.horns.iter().filter(|h| h.2 == ConeHorn::SharedLine).count();
    if shared > 0 {
        report.cone_criterion = true;
        report.verdict = PointVerdict::ConeCriterion;
        if shared < report.horns.len() {
            report
                .notes
                .push(format!("tangent cones share a line for {shared} of {} sampled pairs", report.horns.len()));
        }
        return report;
    }
    if model.m >= d {
        report.notes.push("multiplicity equals the degree at this point".into());
        return report;
    }
    let Some(lambda) = model.lambda.clone() else {
        report.notes.push("lowest form is not a power of v".into());
        return report;
    };
    let mut order = base_order;
    loop {
        report.truncation_order = order;
        report.samples.clear();
        report.branch_data.clear();
        let retained = collect_levels(model, &samples, order, config, rng, &mut report);
        if retained.len() < 2 {
            report.notes.push("fewer than two generic levels".into());
            return report;
        }
        let (base, rest) = retained.split_first().expect("two levels");
        let mut data: Vec<BranchData> = base
            .iter()
            .map(|b| BranchData {
                ramification: b.ramification,
                beta: b.beta,
                b0: b.b0.clone(),
                exact: b.is_exact(),
                kappa_by_sample: Vec::new(),
                kappa: None,
                exponent_e: None,
            })
            .collect();
        for level in rest {
            // match each base branch to the level-t branch that agrees longest
            for (bd, b) in data.iter_mut().zip(base) {
                let kappa = level
                    .iter()
                    .filter(|c| c.ramification == b.ramification && c.beta == b.beta)
                    .filter_map(|c| measure_kappa(c, std::slice::from_ref(b)))
                    .max();
                bd.kappa_by_sample.push(kappa);
            }
        }
        let missing = data.iter().any(|bd| bd.kappa_by_sample.iter().any(Option::is_none));
        if missing && order < config.max_order {
            order = (order * 2).min(config.max_order);
            continue;
        }
        for bd in &mut data {
            let first = bd.kappa_by_sample.first().cloned().flatten();
            if bd.kappa_by_sample.iter().all(|k| *k == first) {
                bd.kappa = first;
            } else {
                report.notes.push(format!("κ varies across levels for branch (Q={}, β={})", bd.ramification, bd.beta));
                bd.kappa = bd.kappa_by_sample.iter().flatten().min().cloned();
            }
            bd.exponent_e = bd.kappa.map(|k| {
                let (q, b) = (bd.ramification as i64, bd.beta as i64);
                (Rational64::from_integer(b - q) - k * q) / b
            });
        }
        report.branch_data = data;
        break;
    }
    finish_point(&mut report, &lambda);
    report
}

fn collect_levels(
    model: &LocalModel,
    samples: &[GaussianRational],
    order: u32,
    config: &AnalysisConfig,
    rng: &mut ChaCha8Rng,
    report: &mut SeparationReport,
) -> Vec<Vec<PuiseuxBranch>> {
    let mut levels: Vec<LevelData> = Vec::new();
    let mut queue: Vec<GaussianRational> = samples.to_vec();
    let mut retries = 0;
    let target = samples.len();
    let mut next = 0;
    loop {
        while next < queue.len() {
            let data = examine_level(model, &queue[next], order, rng);
            next += 1;
            levels.push(data);
        }
        // majority signature over levels that passed screening
        let mut counts: Vec<(Vec<(u32, u32)>, usize)> = Vec::new();
        for l in levels.iter().filter(|l| !l.record.exceptional) {
            match counts.iter_mut().find(|c| c.0 == l.record.signature) {
                Some(c) => c.1 += 1,
                None => counts.push((l.record.signature.clone(), 1)),
            }
        }
        let majority = counts.iter().max_by_key(|c| c.1).map(|c| c.0.clone());
        for l in levels.iter_mut().filter(|l| !l.record.exceptional) {
            if Some(&l.record.signature) != majority.as_ref() {
                l.record.exceptional = true;
                l.record.reason = Some("branch signature differs from the majority".into());
            }
        }
        let good = levels.iter().filter(|l| !l.record.exceptional).count();
        if good >= target || retries >= config.max_sample_retries {
            break;
        }
        let mut fresh = random_gaussian(rng, 9);
        while queue.contains(&fresh) {
            fresh = random_gaussian(rng, 9);
        }
        report.notes.push(format!("replacement level t = {fresh}"));
        queue.push(fresh);
        retries += 1;
    }
    for l in &levels {
        if l.record.exceptional {
            report.notes.push(format!(
                "level t = {} set aside: {}",
                l.record.t,
                l.record.reason.as_deref().unwrap_or("")
            ));
        }
    }
    let retained = levels.iter().filter(|l| !l.record.exceptional).map(|l| l.branches.clone()).collect();
    report.samples = levels.into_iter().map(|l| l.record).collect();
    retained
}

fn finish_point(report: &mut SeparationReport, lambda: &GaussianRational) {
    let (d, m) = (report.degree as i64, report.m as i64);
    let beta: i64 = report.branch_data.iter().map(|b| b.beta as i64).sum();
    report.beta = Some(beta as u32);
    let kappa = Rational64::new((d - m) * beta, m);
    report.kappa = Some(kappa);
    report.exponent_e = Some(Rational64::new(beta - m, beta) - (d - m));
    report.kappa_matches = Some(report.branch_data.iter().all(|b| b.kappa == Some(kappa)));
    let first_ratio = report.branch_data.first().map(|b| Rational64::new(b.beta as i64, b.ramification as i64));
    report.ratios_equal = Some(
        report.branch_data.iter().all(|b| Some(Rational64::new(b.beta as i64, b.ramification as i64)) == first_ratio),
    );
    report.ordering_holds = Some(m < beta && beta <= d);
    for s in report.samples.iter().filter(|s| !s.exceptional) {
        if let Some(rec) = &s.reconstruction {
            if !rec.passes() {
                report
                    .notes
                    .push(format!("reconstruction residual at t = {} has u-valuation {}", s.t, rec.residual_valuation));
            }
            if !rec.unit_at_origin.approx_eq(&Scalar::Exact(lambda.clone()), 1e-8, 1.0) {
                report.notes.push(format!("cofactor at the origin differs from λ at t = {}", s.t));
            }
        }
    }
    let any_negative = report.branch_data.iter().any(|b| b.exponent_e.is_some_and(|e| e < Rational64::from_integer(0)));
    report.verdict = if any_negative { PointVerdict::DistanceZero } else { PointVerdict::Inconclusive };
    if !any_negative {
        report.notes.push("no branch with a negative separation exponent".into());
    }
}

/// Per-point analysis over the points at infinity defined over ℚ(i).
pub fn separation_analysis(f: &MultiPoly, config: &AnalysisConfig) -> Result<Vec<SeparationReport>, AnalysisError> {
    let trace = points_at_infinity(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::new();
    for point in &trace.points {
        let model = local_model(f, point)?;
        out.push(analyze_point(&model, config, &mut rng));
    }
    Ok(out)
}

/// A generic plane section `f°(X1, X2) = f(a·X1 + b·X2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub polynomial: MultiPoly,
    /// The two columns `a`, `b` of the linear change kept by the section.
    pub columns: [Vec<GaussianRational>; 2],
    pub seed: u64,
    pub attempts: usize,
}

pub const MAX_RESTRICTION_ATTEMPTS: usize = 20;

pub fn restrict_to_plane(f: &MultiPoly, seed: u64) -> Result<Restriction, AnalysisError> {
    let n = f.nvars();
    if n < 3 {
        return Err(AnalysisError::TooFewVariables(n));
    }
    let d = f.degree().filter(|d| *d >= 1).ok_or(AnalysisError::Constant)?;
    for attempt in 0..MAX_RESTRICTION_ATTEMPTS {
        let s = seed.wrapping_add(attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let a: Vec<GaussianRational> = (0..n).map(|_| random_gaussian(&mut rng, 2)).collect();
        let b: Vec<GaussianRational> = (0..n).map(|_| random_gaussian(&mut rng, 2)).collect();
        let independent = (0..n).any(|i| (i + 1..n).any(|j| !(&(&a[i] * &b[j]) - &(&a[j] * &b[i])).is_zero()));
        if !independent {
            continue;
        }
        let images: Vec<MultiPoly> = (0..n).map(|j| MultiPoly::linear(&[a[j].clone(), b[j].clone()])).collect();
        let plane = f.substitute(&images).expect("arity");
        if plane.degree() == Some(d) && !plane.homogeneous_part(d).is_constant() {
            return Ok(Restriction { polynomial: plane, columns: [a, b], seed: s, attempts: attempt + 1 });
        }
    }
    Err(AnalysisError::RestrictionFailed(MAX_RESTRICTION_ATTEMPTS))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Conclusion {
    BilipschitzTrivialValuesExist,
    GenericFiberDistanceZero,
    Incomplete,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::BilipschitzTrivialValuesExist => "BILIPSCHITZ_TRIVIAL_VALUES_EXIST",
            Self::GenericFiberDistanceZero => "GENERIC_FIBER_DISTANCE_ZERO",
            Self::Incomplete => "INCOMPLETE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisVerdict {
    pub classification: Classification,
    pub restriction: Option<Restriction>,
    /// The bivariate polynomial the per-point analysis ran on.
    pub analyzed: Option<MultiPoly>,
    pub per_point: Vec<SeparationReport>,
    /// Degree of the part of the leading form with no roots over ℚ(i).
    pub unsplit_degree: u32,
    pub conclusion: Conclusion,
    pub notes: Vec<String>,
}

pub fn full_verdict(f: &MultiPoly, config: &AnalysisConfig) -> Result<AnalysisVerdict, AnalysisError> {
    let classification = classify_single_variable(f)?;
    let mut verdict = AnalysisVerdict {
        classification,
        restriction: None,
        analyzed: None,
        per_point: Vec::new(),
        unsplit_degree: 0,
        conclusion: Conclusion::BilipschitzTrivialValuesExist,
        notes: Vec::new(),
    };
    if verdict.classification.single_variable {
        return Ok(verdict);
    }
    let plane = if f.nvars() == 2 {
        f.clone()
    } else {
        let mut seed = config.seed;
        let mut tries = 0;
        loop {
            let r = restrict_to_plane(f, seed)?;
            tries += 1;
            if !classify_single_variable(&r.polynomial)?.single_variable {
                let p = r.polynomial.clone();
                verdict.restriction = Some(r);
                break p;
            }
            verdict.notes.push(format!("plane section from seed {} is single-variable; drawing another", r.seed));
            if tries >= MAX_RESTRICTION_ATTEMPTS {
                return Err(AnalysisError::RestrictionFailed(tries));
            }
            seed = r.seed.wrapping_add(1);
        }
    };
    let trace = points_at_infinity(&plane)?;
    verdict.unsplit_degree = trace.residual.as_ref().and_then(UniPoly::degree).unwrap_or(0) as u32;
    if verdict.unsplit_degree > 0 {
        verdict.notes.push(format!(
            "{} points at infinity are not defined over Q(i) and were not analyzed",
            verdict.unsplit_degree
        ));
    }
    verdict.per_point = separation_analysis(&plane, config)?;
    verdict.analyzed = Some(plane);
    let decided =
        verdict.per_point.iter().any(|r| matches!(r.verdict, PointVerdict::DistanceZero | PointVerdict::ConeCriterion));
    verdict.conclusion = if decided { Conclusion::GenericFiberDistanceZero } else { Conclusion::Incomplete };
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str) -> MultiPoly {
        parse(s, &["x", "y"]).unwrap()
    }

    fn gr(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn classify_examples() {
        let c = classify_single_variable(&p("(x+2*y)^3 + (x+2*y)")).unwrap();
        assert!(c.single_variable);
        assert_eq!(c.direction, Some(vec![gr("1"), gr("2")]));
        let t = MultiPoly::var(1, 0);
        assert_eq!(MultiPoly::from_univariate(c.univariate.as_ref().unwrap(), 1, 0), &t.pow(3) + &t);
        assert_eq!(c.annihilators, vec![vec![gr("-2"), gr("1")]]);
        // critical values of T^3 + T: ±2i/(3√3)
        let expected = 2.0 / (3.0 * 3f64.sqrt());
        assert_eq!(c.excluded_values.len(), 2);
        assert!((c.excluded_values[0] - Complex64::new(0.0, -expected)).norm() < 1e-12);
        assert!((c.excluded_values[1] - Complex64::new(0.0, expected)).norm() < 1e-12);

        let c = classify_single_variable(&p("x*y")).unwrap();
        assert!(!c.single_variable);
        assert_eq!(c.witness, Some(NotSingleVariable::LeadingFormNotPower));

        let c = classify_single_variable(&p("x + y^2")).unwrap();
        assert!(!c.single_variable);
        assert!(matches!(c.witness, Some(NotSingleVariable::VariesAlong { .. })));

        let c = classify_single_variable(&p("3*x - i*y + 5")).unwrap();
        assert!(c.single_variable);
        assert_eq!(c.direction, Some(vec![gr("1"), gr("-1/3*i")]));

        assert_eq!(classify_single_variable(&p("7")), Err(AnalysisError::Constant));
    }

    #[test]
    fn annihilators_kill_single_variable_polynomials() {
        let f = parse("(x1 - x2 + 3*x3)^2 - 4*(x1 - x2 + 3*x3)", &["x1", "x2", "x3"]).unwrap();
        let c = classify_single_variable(&f).unwrap();
        assert!(c.single_variable);
        assert_eq!(c.annihilators.len(), 2);
        for xi in &c.annihilators {
            assert!(f.partial_derivative(xi).unwrap().is_zero());
        }
    }

    #[test]
    fn xy_points_satisfy_cone_criterion() {
        let reports = separation_analysis(&p("x*y"), &AnalysisConfig::default()).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| r.verdict == PointVerdict::ConeCriterion));
    }

    #[test]
    fn parabola_separation() {
        let reports = separation_analysis(&p("x + y^2"), &AnalysisConfig::default()).unwrap();
        assert_eq!(reports.len(), 1);
        let rep = &reports[0];
        assert_eq!((rep.m, rep.beta), (1, Some(2)));
        assert_eq!(rep.kappa, Some(r(2, 1)));
        assert_eq!(rep.exponent_e, Some(r(-1, 2)));
        assert_eq!(rep.branch_data[0].kappa, Some(r(2, 1)));
        assert_eq!(rep.branch_data[0].exponent_e, Some(r(-1, 2)));
        assert_eq!(rep.kappa_matches, Some(true));
        assert_eq!(rep.verdict, PointVerdict::DistanceZero);
    }

    #[test]
    fn cubic_parabola_separation() {
        // v^2 + u^3 - t v^3: β = 3, Q = 2, κ = 3/2, e = -2/3
        let reports = separation_analysis(&p("x + y^3"), &AnalysisConfig::default()).unwrap();
        let rep = &reports[0];
        assert_eq!((rep.m, rep.beta), (2, Some(3)));
        assert_eq!(rep.branch_data[0].b0.exact().map(|b| b.pow(2)), Some(gr("-1")));
        assert_eq!(rep.kappa, Some(r(3, 2)));
        assert_eq!(rep.branch_data[0].kappa, Some(r(3, 2)));
        assert_eq!(rep.exponent_e, Some(r(-2, 3)));
        assert_eq!(rep.branch_data[0].exponent_e, Some(r(-2, 3)));
        assert_eq!(rep.verdict, PointVerdict::DistanceZero);
    }

    #[test]
    fn point_at_vertical_infinity() {
        let reports = separation_analysis(&p("y^2 + x*(y - x^2)"), &AnalysisConfig::default()).unwrap();
        let rep = reports.iter().find(|r| r.point.coords[0].is_zero()).unwrap();
        assert_eq!((rep.m, rep.beta), (1, Some(3)));
        assert_eq!(rep.kappa, Some(r(6, 1)));
        assert_eq!(rep.kappa_matches, Some(true));
    }

    #[test]
    fn x2y_plus_x_decided() {
        let v = full_verdict(&p("x^2*y + x"), &AnalysisConfig::default()).unwrap();
        assert_eq!(v.conclusion, Conclusion::GenericFiberDistanceZero);
        assert!(v.per_point.iter().all(|r| r.verdict != PointVerdict::Inconclusive));
    }

    #[test]
    fn single_variable_verdict() {
        let v = full_verdict(&p("(x+2*y)^3 + (x+2*y)"), &AnalysisConfig::default()).unwrap();
        assert_eq!(v.conclusion, Conclusion::BilipschitzTrivialValuesExist);
        assert!(v.per_point.is_empty());
    }

    #[test]
    fn restriction_examples() {
        let vars = ["x", "y", "z"];
        let xyz = parse("x*y*z", &vars).unwrap();
        let r = restrict_to_plane(&xyz, 3).unwrap();
        assert_eq!(r.polynomial.degree(), Some(3));
        assert!(!r.polynomial.homogeneous_part(3).is_constant());

        let lin = parse("x", &vars).unwrap();
        assert_eq!(restrict_to_plane(&lin, 0).unwrap().polynomial.degree(), Some(1));

        let sq = parse("(x+y+z)^2", &vars).unwrap();
        let r = restrict_to_plane(&sq, 1).unwrap();
        assert_eq!(r.polynomial.degree(), Some(2));
        assert!(classify_single_variable(&r.polynomial).unwrap().single_variable);

        assert_eq!(restrict_to_plane(&p("x*y"), 0), Err(AnalysisError::TooFewVariables(2)));
    }

    #[test]
    fn xyz_reduces_to_plane() {
        let xyz = parse("x*y*z", &["x", "y", "z"]).unwrap();
        let v = full_verdict(&xyz, &AnalysisConfig::default()).unwrap();
        assert!(v.restriction.is_some());
        assert_eq!(v.conclusion, Conclusion::GenericFiberDistanceZero);
    }
}
