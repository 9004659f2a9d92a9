//! Serializable report document and its conversions from core results.

use std::fmt::Write as _;

use bilip_core::analysis::{BranchData, Classification, Restriction, SampleRecord, SeparationReport};
use bilip_core::infinity::ConeHorn;
use bilip_core::probe::DistanceProbeReport;
use bilip_core::puiseux::{PuiseuxBranch, Reconstruction, WeierstrassProfile};
use bilip_core::scalar::Scalar;
use bilip_core::{ComplexF, GaussianRational, MultiPoly};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub input_expression: String,
    pub variables: Vec<String>,
    pub parsed_degree: u32,
    pub nvars: usize,
    pub classification: Option<ClassificationDto>,
    pub restriction: Option<RestrictionDto>,
    pub points_at_infinity: Vec<PointReportDto>,
    pub unsplit_degree: Option<u32>,
    pub verdict: Option<VerdictDto>,
    pub puiseux: Option<PuiseuxDto>,
    pub probe: Option<ProbeDto>,
    pub exceptional_log: Vec<String>,
    pub timing: TimingDto,
}

impl ReportDocument {
    pub fn new(command: &str, expr: &str, variables: &[String], f: &MultiPoly) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            input_expression: expr.to_string(),
            variables: variables.to_vec(),
            parsed_degree: f.degree().unwrap_or(0),
            nvars: f.nvars(),
            classification: None,
            restriction: None,
            points_at_infinity: Vec::new(),
            unsplit_degree: None,
            verdict: None,
            puiseux: None,
            probe: None,
            exceptional_log: Vec::new(),
            timing: TimingDto { elapsed_ms: 0.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingDto {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDto {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexDto {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarDto {
    Exact { value: String },
    Approx { re: f64, im: f64 },
}

impl From<&Scalar> for ScalarDto {
    fn from(s: &Scalar) -> Self {
        match s {
            Scalar::Exact(g) => ScalarDto::Exact { value: g.to_string() },
            Scalar::Approx(z) => ScalarDto::Approx { re: z.re, im: z.im },
        }
    }
}

fn strings(v: &[GaussianRational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationDto {
    pub single_variable: bool,
    pub degree: u32,
    pub direction: Option<Vec<String>>,
    /// `P(T)` with `f = P(direction·x)`.
    pub univariate: Option<String>,
    pub annihilators: Vec<Vec<String>>,
    pub witness: Option<String>,
    pub excluded_values: Vec<ComplexDto>,
}

impl From<&Classification> for ClassificationDto {
    fn from(c: &Classification) -> Self {
        Self {
            single_variable: c.single_variable,
            degree: c.degree,
            direction: c.direction.as_deref().map(strings),
            univariate: c.univariate.as_ref().map(|p| MultiPoly::from_univariate(p, 1, 0).format_with(&["T"])),
            annihilators: c.annihilators.iter().map(|v| strings(v)).collect(),
            witness: c.witness.as_ref().map(ToString::to_string),
            excluded_values: c.excluded_values.iter().map(|z| (*z).into()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionDto {
    pub polynomial: String,
    pub columns: [Vec<String>; 2],
    pub seed: u64,
    pub attempts: usize,
}

impl From<&Restriction> for RestrictionDto {
    fn from(r: &Restriction) -> Self {
        Self {
            polynomial: r.polynomial.format_with(&["x", "y"]),
            columns: [strings(&r.columns[0]), strings(&r.columns[1])],
            seed: r.seed,
            attempts: r.attempts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDto {
    pub conclusion: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HornDto {
    pub s: String,
    pub t: String,
    pub horn: String,
}

pub fn horn_name(h: ConeHorn) -> &'static str {
    match h {
        ConeHorn::TangentToHyperplane => "tangent_to_hyperplane",
        ConeHorn::IsolatedIntersection => "isolated_intersection",
        ConeHorn::SharedLine => "shared_line",
        ConeHorn::HyperplaneLineOnly => "hyperplane_line_only",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionDto {
    pub truncation_order: u32,
    pub residual_valuation: u32,
    pub integral_exponents: bool,
    pub root_count_matches: bool,
    pub unit_at_origin: ScalarDto,
    pub passes: bool,
}

impl From<&Reconstruction> for ReconstructionDto {
    fn from(r: &Reconstruction) -> Self {
        Self {
            truncation_order: r.truncation_order,
            residual_valuation: r.residual_valuation,
            integral_exponents: r.integral_exponents,
            root_count_matches: r.root_count_matches,
            unit_at_origin: (&r.unit_at_origin).into(),
            passes: r.passes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDto {
    pub t: String,
    pub exceptional: bool,
    pub reason: Option<String>,
    pub signature: Vec<[u32; 2]>,
    pub reconstruction: Option<ReconstructionDto>,
}

impl From<&SampleRecord> for SampleDto {
    fn from(s: &SampleRecord) -> Self {
        Self {
            t: s.t.to_string(),
            exceptional: s.exceptional,
            reason: s.reason.clone(),
            signature: s.signature.iter().map(|&(q, b)| [q, b]).collect(),
            reconstruction: s.reconstruction.as_ref().map(Into::into),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDataDto {
    pub ramification: u32,
    pub beta: u32,
    pub b0: ScalarDto,
    pub exact: bool,
    pub kappa_by_sample: Vec<Option<String>>,
    pub kappa: Option<String>,
    pub exponent_e: Option<String>,
}

impl From<&BranchData> for BranchDataDto {
    fn from(b: &BranchData) -> Self {
        Self {
            ramification: b.ramification,
            beta: b.beta,
            b0: (&b.b0).into(),
            exact: b.exact,
            kappa_by_sample: b.kappa_by_sample.iter().map(|k| k.map(|k| k.to_string())).collect(),
            kappa: b.kappa.map(|k| k.to_string()),
            exponent_e: b.exponent_e.map(|k| k.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReportDto {
    pub point: String,
    pub coords: [String; 2],
    pub multiplicity: u32,
    pub m: u32,
    pub lambda: Option<String>,
    pub cone_criterion: bool,
    pub horns: Vec<HornDto>,
    pub beta: Option<u32>,
    pub kappa: Option<String>,
    pub exponent_e: Option<String>,
    pub kappa_matches: Option<bool>,
    pub ratios_equal: Option<bool>,
    pub ordering_holds: Option<bool>,
    pub truncation_order: u32,
    pub branch_data: Vec<BranchDataDto>,
    pub samples: Vec<SampleDto>,
    pub verdict: String,
    pub notes: Vec<String>,
}

impl From<&SeparationReport> for PointReportDto {
    fn from(r: &SeparationReport) -> Self {
        Self {
            point: r.point.to_string(),
            coords: [r.point.coords[0].to_string(), r.point.coords[1].to_string()],
            multiplicity: r.point.mult_a,
            m: r.m,
            lambda: r.lambda.as_ref().map(ToString::to_string),
            cone_criterion: r.cone_criterion,
            horns: r
                .horns
                .iter()
                .map(|(s, t, h)| HornDto { s: s.to_string(), t: t.to_string(), horn: horn_name(*h).to_string() })
                .collect(),
            beta: r.beta,
            kappa: r.kappa.map(|k| k.to_string()),
            exponent_e: r.exponent_e.map(|k| k.to_string()),
            kappa_matches: r.kappa_matches,
            ratios_equal: r.ratios_equal,
            ordering_holds: r.ordering_holds,
            truncation_order: r.truncation_order,
            branch_data: r.branch_data.iter().map(Into::into).collect(),
            samples: r.samples.iter().map(Into::into).collect(),
            verdict: r.verdict.to_string(),
            notes: r.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTermDto {
    /// `u`-exponent `k/Q`.
    pub exponent: String,
    pub coefficient: ScalarDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxBranchDto {
    pub ramification: u32,
    pub beta: u32,
    pub b0: ScalarDto,
    pub multiplicity: u32,
    pub exact: bool,
    pub truncation_order: u32,
    pub terms: Vec<SeriesTermDto>,
}

impl From<&PuiseuxBranch> for PuiseuxBranchDto {
    fn from(b: &PuiseuxBranch) -> Self {
        let q = b.ramification.max(1) as i64;
        let terms = b
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| SeriesTermDto {
                exponent: num_rational::Rational64::new(k as i64, q).to_string(),
                coefficient: c.into(),
            })
            .collect();
        Self {
            ramification: b.ramification,
            beta: b.beta,
            b0: (&b.b0).into(),
            multiplicity: b.multiplicity,
            exact: b.is_exact(),
            truncation_order: b.truncation_order,
            terms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDto {
    pub m: u32,
    pub beta: u32,
    pub eta: Vec<Option<u32>>,
    pub sigma_m0: ScalarDto,
    pub predicted_sigma_m0: ScalarDto,
    pub general_sigma_m0: ScalarDto,
    pub middle_valuations_positive: bool,
    pub sigma_m0_matches: bool,
}

impl From<&WeierstrassProfile> for ProfileDto {
    fn from(p: &WeierstrassProfile) -> Self {
        Self {
            m: p.m,
            beta: p.beta,
            eta: p.eta.clone(),
            sigma_m0: (&p.sigma_m0).into(),
            predicted_sigma_m0: (&p.predicted_sigma_m0).into(),
            general_sigma_m0: (&p.general_sigma_m0).into(),
            middle_valuations_positive: p.middle_valuations_positive(),
            sigma_m0_matches: p.sigma_m0_matches(1e-9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxDto {
    pub point: String,
    pub t: String,
    pub order: u32,
    pub chart: String,
    pub local_equation: String,
    pub m: u32,
    pub lambda: Option<String>,
    pub branches: Vec<PuiseuxBranchDto>,
    pub reconstruction: ReconstructionDto,
    pub profiles: Vec<ProfileDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeDto {
    pub s: ComplexDto,
    pub t: ComplexDto,
    pub radii: Vec<f64>,
    pub min_distance_per_radius: Vec<f64>,
    pub fitted_exponent: Option<f64>,
    pub fitted_std_error: Option<f64>,
    pub ratio_to_value_gap: Option<f64>,
    pub relative_variation: Option<f64>,
    pub skipped_radii: Vec<f64>,
    pub degenerate_samples: usize,
    pub angles_per_radius: usize,
    pub seed: u64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl ProbeDto {
    pub fn new(r: &DistanceProbeReport, angles_per_radius: usize, seed: u64) -> Self {
        Self {
            s: r.s.into(),
            t: r.t.into(),
            radii: r.radii.clone(),
            min_distance_per_radius: r.min_distance_per_radius.clone(),
            fitted_exponent: r.fitted_exponent.as_ref().map(|f| f.exponent),
            fitted_std_error: r.fitted_exponent.as_ref().map(|f| f.std_error),
            ratio_to_value_gap: finite(r.ratio_to_value_gap),
            relative_variation: finite(r.relative_variation()),
            skipped_radii: r.skipped_radii.clone(),
            degenerate_samples: r.degenerate_samples,
            angles_per_radius,
            seed,
        }
    }
}

fn fmt_complex(z: ComplexF) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn fmt_scalar(s: &ScalarDto) -> String {
    match s {
        ScalarDto::Exact { value } => value.clone(),
        ScalarDto::Approx { re, im } => format!("~{}", fmt_complex(Complex64::new(*re, *im))),
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), ToString::to_string)
}

/// Plain-text rendering of the document.
pub fn render_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        "{} {}  (variables {}, degree {})",
        doc.command,
        doc.input_expression,
        doc.variables.join(","),
        doc.parsed_degree
    );
    if let Some(c) = &doc.classification {
        let _ = writeln!(w, "single variable: {}", c.single_variable);
        if let (Some(dir), Some(p)) = (&c.direction, &c.univariate) {
            let _ = writeln!(w, "  f = P(ℓ), ℓ = ({}), P(T) = {}", dir.join(", "), p);
            let vals: Vec<String> = c.excluded_values.iter().map(|z| fmt_complex(Complex64::new(z.re, z.im))).collect();
            let _ = writeln!(
                w,
                "  critical values of P: {}",
                if vals.is_empty() { "none".into() } else { vals.join(", ") }
            );
        }
        if let Some(why) = &c.witness {
            let _ = writeln!(w, "  {why}");
        }
    }
    if let Some(r) = &doc.restriction {
        let _ = writeln!(w, "plane section (seed {}, attempt {}): {}", r.seed, r.attempts, r.polynomial);
    }
    for p in &doc.points_at_infinity {
        let _ = writeln!(
            w,
            "point {} (multiplicity {}): m = {}, λ = {}, verdict {}",
            p.point,
            p.multiplicity,
            p.m,
            opt(&p.lambda),
            p.verdict
        );
        if p.beta.is_some() {
            let _ = writeln!(
                w,
                "  β = {}, κ = {}, e = {}, N = {}",
                opt(&p.beta),
                opt(&p.kappa),
                opt(&p.exponent_e),
                p.truncation_order
            );
            for b in &p.branch_data {
                let _ = writeln!(
                    w,
                    "  branch Q = {}, β = {}, b0 = {}: κ = {}, e = {}",
                    b.ramification,
                    b.beta,
                    fmt_scalar(&b.b0),
                    opt(&b.kappa),
                    opt(&b.exponent_e)
                );
            }
        }
        for n in &p.notes {
            let _ = writeln!(w, "  note: {n}");
        }
    }
    if let Some(v) = &doc.verdict {
        let _ = writeln!(w, "conclusion: {}", v.conclusion);
        for n in &v.notes {
            let _ = writeln!(w, "  note: {n}");
        }
    }
    if let Some(pz) = &doc.puiseux {
        let _ = writeln!(w, "point {} at t = {}, chart {}", pz.point, pz.t, pz.chart);
        let _ = writeln!(w, "  g_t = {}", pz.local_equation);
        for b in &pz.branches {
            let series: Vec<String> =
                b.terms.iter().map(|t| format!("({})*u^({})", fmt_scalar(&t.coefficient), t.exponent)).collect();
            let _ = writeln!(w, "  v = {} + O(u^{})", series.join(" + "), b.truncation_order);
        }
        let r = &pz.reconstruction;
        let _ = writeln!(
            w,
            "  reconstruction: residual valuation {} (order {}), passes {}",
            r.residual_valuation, r.truncation_order, r.passes
        );
    }
    if let Some(pr) = &doc.probe {
        let _ = writeln!(
            w,
            "probe s = {}, t = {}",
            fmt_complex(Complex64::new(pr.s.re, pr.s.im)),
            fmt_complex(Complex64::new(pr.t.re, pr.t.im))
        );
        for (r, d) in pr.radii.iter().zip(&pr.min_distance_per_radius) {
            let _ = writeln!(w, "  R = {r:e}: distance ≤ {d:e}");
        }
        let _ = writeln!(w, "  fitted exponent: {} ± {}", opt(&pr.fitted_exponent), opt(&pr.fitted_std_error));
        let _ = writeln!(w, "  ratio to |s - t|: {}", opt(&pr.ratio_to_value_gap));
    }
    for e in &doc.exceptional_log {
        let _ = writeln!(w, "log: {e}");
    }
    let _ = writeln!(w, "elapsed: {:.1} ms", doc.timing.elapsed_ms);
    out
}
