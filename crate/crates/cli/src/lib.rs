//! Command-line front end: argument model, command execution and output.

pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use bilip_core::analysis::{classify_single_variable, full_verdict, restrict_to_plane, AnalysisConfig, AnalysisError};
use bilip_core::infinity::{local_model, points_at_infinity, PointAtInfinity};
use bilip_core::probe::{distance_probe, ProbeConfig, ProbeError};
use bilip_core::puiseux::{puiseux_roots, reconstruction, sort_branches, weierstrass_profile, PuiseuxError};
use bilip_core::{parse, ComplexF, GaussianRational, MultiPoly};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use report::{ClassificationDto, ProbeDto, PuiseuxDto, ReportDocument, VerdictDto};

#[derive(Debug, Parser)]
#[command(name = "bilip", version, about = "Bi-Lipschitz triviality of complex polynomial fibers at infinity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the polynomial is a polynomial in one linear form.
    Classify(CommonArgs),
    /// Full pipeline: classification, points at infinity, separation, verdict.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// Also run the numerical distance probe.
        #[arg(long)]
        probe: bool,
        #[command(flatten)]
        values: ProbeValues,
    },
    /// Numerical distance between two fibers over growing radii.
    Probe {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        values: ProbeValues,
    },
    /// Puiseux roots of the local equation at one point at infinity.
    Puiseux {
        #[command(flatten)]
        common: CommonArgs,
        /// Point at infinity as "a:b".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Level t of the local equation g_t.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        t: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Polynomial expression.
    #[arg(allow_hyphen_values = true)]
    pub expr: String,
    /// Ordered variable names.
    #[arg(long, default_value = "x,y")]
    pub vars: String,
    /// Levels t at which local equations are expanded.
    #[arg(long, default_value = "0,1,2,1+i,-3", allow_hyphen_values = true)]
    pub t_samples: String,
    /// Truncation order N of Puiseux expansions.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(4..=64))]
    pub order: u32,
    /// Increasing probe radii.
    #[arg(long, default_value = "10,100,1000,10000")]
    pub radii: String,
    /// Angles sampled per radius.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..=100_000))]
    pub angles: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write (R, θ, distance) probe samples as CSV.
    #[arg(long)]
    pub csv_dump: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbeValues {
    /// First fiber value.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub s: String,
    /// Second fiber value.
    #[arg(long = "t", default_value = "2", allow_hyphen_values = true)]
    pub t: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("parse error {0}")]
    Parse(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

/// Validated settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub variables: Vec<String>,
    pub analysis: AnalysisConfig,
    pub probe: ProbeConfig,
    pub output_format: OutputFormat,
    pub csv_dump_path: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

fn parse_list<T>(raw: &str, what: &str, item: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, CliError> {
    raw.split(',').map(|s| item(s.trim()).ok_or_else(|| CliError::Usage(format!("bad {what} entry {s:?}")))).collect()
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs) -> Result<Self, CliError> {
        let variables: Vec<String> = a.vars.split(',').map(|v| v.trim().to_string()).collect();
        let t_samples = parse_list(&a.t_samples, "t sample", |s| s.parse::<GaussianRational>().ok())?;
        let radii = parse_list(&a.radii, "radius", |s| s.parse::<f64>().ok().filter(|r| r.is_finite() && *r > 0.0))?;
        if radii.len() < 2 || radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage("radii must be increasing with at least two entries".into()));
        }
        let analysis = AnalysisConfig { t_samples, order: a.order, seed: a.seed, ..AnalysisConfig::default() };
        Ok(Self {
            variables,
            analysis,
            probe: ProbeConfig { radii, angles_per_radius: a.angles as usize, seed: a.seed },
            output_format: a.format,
            csv_dump_path: a.csv_dump.clone(),
            out: a.out.clone(),
        })
    }

    pub fn parse_expr(&self, expr: &str) -> Result<MultiPoly, CliError> {
        let names: Vec<&str> = self.variables.iter().map(String::as_str).collect();
        let f = parse(expr, &names).map_err(|e| CliError::Parse(e.to_string()))?;
        if f.is_constant() {
            return Err(CliError::Degenerate("polynomial is constant".into()));
        }
        Ok(f)
    }
}

/// A complex value written as a float (`0.1`) or a Gaussian rational (`1+2*i`).
pub fn parse_complex(raw: &str) -> Result<ComplexF, CliError> {
    let raw = raw.trim();
    if let Ok(x) = raw.parse::<f64>() {
        if x.is_finite() {
            return Ok(Complex64::new(x, 0.0));
        }
    }
    raw.parse::<GaussianRational>()
        .map(|g| g.to_complex())
        .map_err(|_| CliError::Usage(format!("bad complex value {raw:?}")))
}

fn analysis_error(e: AnalysisError) -> CliError {
    match e {
        AnalysisError::TooFewVariables(_) => CliError::Usage(e.to_string()),
        AnalysisError::RestrictionFailed(_) => CliError::Numeric(e.to_string()),
        _ => CliError::Degenerate(e.to_string()),
    }
}

fn probe_error(e: ProbeError) -> CliError {
    match e {
        ProbeError::InvalidInput(_) => CliError::Usage(e.to_string()),
        _ => CliError::Numeric(e.to_string()),
    }
}

/// Result of one invocation: the document plus an optional CSV payload.
#[derive(Debug, Clone)]
pub struct Output {
    pub document: ReportDocument,
    pub csv: Option<String>,
}

pub fn cmd_classify(expr: &str, cfg: &RunConfig) -> Result<ReportDocument, CliError> {
    let f = cfg.parse_expr(expr)?;
    let mut doc = ReportDocument::new("classify", expr, &cfg.variables, &f);
    let c = classify_single_variable(&f).map_err(analysis_error)?;
    doc.classification = Some(ClassificationDto::from(&c));
    Ok(doc)
}

pub fn cmd_analyze(expr: &str, cfg: &RunConfig, probe: Option<(ComplexF, ComplexF)>) -> Result<Output, CliError> {
    let f = cfg.parse_expr(expr)?;
    let mut doc = ReportDocument::new("analyze", expr, &cfg.variables, &f);
    let v = full_verdict(&f, &cfg.analysis).map_err(analysis_error)?;
    doc.classification = Some(ClassificationDto::from(&v.classification));
    doc.restriction = v.restriction.as_ref().map(Into::into);
    doc.points_at_infinity = v.per_point.iter().map(Into::into).collect();
    if !v.classification.single_variable {
        doc.unsplit_degree = Some(v.unsplit_degree);
    }
    for p in &v.per_point {
        for s in p.samples.iter().filter(|s| s.exceptional) {
            doc.exceptional_log.push(format!("{}: t = {}: {}", p.point, s.t, s.reason.as_deref().unwrap_or("")));
        }
    }
    doc.verdict = Some(VerdictDto { conclusion: v.conclusion.to_string(), notes: v.notes.clone() });
    let mut csv = None;
    if let Some((s, t)) = probe {
        let plane =
            v.analyzed.clone().unwrap_or(if f.nvars() == 2 { f.clone() } else { plane_for_probe(&f, cfg, &mut doc)? });
        let (dto, dump) = run_probe(&plane, s, t, cfg)?;
        doc.probe = Some(dto);
        csv = Some(dump);
    }
    Ok(Output { document: doc, csv })
}

fn plane_for_probe(f: &MultiPoly, cfg: &RunConfig, doc: &mut ReportDocument) -> Result<MultiPoly, CliError> {
    if f.nvars() == 1 {
        return Err(CliError::Usage("the probe needs at least two variables".into()));
    }
    let r = restrict_to_plane(f, cfg.analysis.seed).map_err(analysis_error)?;
    doc.exceptional_log.push(format!("probe runs on the plane section {}", r.polynomial.format_with(&["x", "y"])));
    let poly = r.polynomial.clone();
    doc.restriction = Some((&r).into());
    Ok(poly)
}

fn run_probe(plane: &MultiPoly, s: ComplexF, t: ComplexF, cfg: &RunConfig) -> Result<(ProbeDto, String), CliError> {
    if plane.degree_in(1).unwrap_or(0) == 0 {
        return Err(CliError::Degenerate("the probed polynomial does not involve y".into()));
    }
    let r = distance_probe(plane, s, t, &cfg.probe).map_err(probe_error)?;
    let mut csv = String::from("radius,angle,distance\n");
    for p in &r.samples {
        csv.push_str(&format!("{},{},{}\n", p.radius, p.angle, p.distance));
    }
    Ok((ProbeDto::new(&r, cfg.probe.angles_per_radius, cfg.probe.seed), csv))
}

pub fn cmd_probe(expr: &str, s: ComplexF, t: ComplexF, cfg: &RunConfig) -> Result<Output, CliError> {
    let f = cfg.parse_expr(expr)?;
    let mut doc = ReportDocument::new("probe", expr, &cfg.variables, &f);
    let plane = if f.nvars() == 2 { f.clone() } else { plane_for_probe(&f, cfg, &mut doc)? };
    let (dto, csv) = run_probe(&plane, s, t, cfg)?;
    for r in &dto.skipped_radii {
        doc.exceptional_log.push(format!("radius {r} skipped: all slices degenerate"));
    }
    doc.probe = Some(dto);
    Ok(Output { document: doc, csv: Some(csv) })
}

fn parse_point(raw: &str) -> Result<(GaussianRational, GaussianRational), CliError> {
    let bad = || CliError::Usage(format!("bad point {raw:?}, expected \"a:b\""));
    let (a, b) = raw.split_once(':').ok_or_else(bad)?;
    let a: GaussianRational = a.trim().parse().map_err(|_| bad())?;
    let b: GaussianRational = b.trim().parse().map_err(|_| bad())?;
    if a.is_zero() && b.is_zero() {
        return Err(bad());
    }
    Ok((a, b))
}

fn puiseux_error(e: PuiseuxError) -> CliError {
    match e {
        PuiseuxError::Numeric(_) => CliError::Numeric(e.to_string()),
        _ => CliError::Degenerate(e.to_string()),
    }
}

pub fn cmd_puiseux(expr: &str, point: &str, t: &str, cfg: &RunConfig) -> Result<ReportDocument, CliError> {
    let f = cfg.parse_expr(expr)?;
    if f.nvars() != 2 {
        return Err(CliError::Usage("puiseux needs exactly two variables".into()));
    }
    let (a, b) = parse_point(point)?;
    let t: GaussianRational = t.parse().map_err(|_| CliError::Usage(format!("bad level t {t:?}")))?;
    let wanted = PointAtInfinity::new(a, b, 1);
    let trace = points_at_infinity(&f).map_err(|e| CliError::Degenerate(e.to_string()))?;
    let p = trace
        .points
        .iter()
        .find(|p| p.coords == wanted.coords)
        .ok_or_else(|| CliError::Degenerate(format!("{wanted} is not a point at infinity")))?;
    let model = local_model(&f, p).map_err(|e| CliError::Degenerate(e.to_string()))?;
    let g_t = model.instantiate(&t);
    let order = cfg.analysis.order;
    let mut branches = puiseux_roots(&g_t, order).map_err(puiseux_error)?;
    sort_branches(&mut branches);
    let rec = reconstruction(&g_t, &branches, order);
    let mut doc = ReportDocument::new("puiseux", expr, &cfg.variables, &f);
    doc.puiseux = Some(PuiseuxDto {
        point: p.to_string(),
        t: t.to_string(),
        order,
        chart: model.chart.to_string(),
        local_equation: g_t.format_with(&["u", "v"]),
        m: model.m,
        lambda: model.lambda.as_ref().map(ToString::to_string),
        branches: branches.iter().map(Into::into).collect(),
        reconstruction: (&rec).into(),
        profiles: branches.iter().map(|b| (&weierstrass_profile(b)).into()).collect(),
    });
    Ok(doc)
}

/// Runs one parsed invocation; timing is filled in here.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let start = Instant::now();
    let mut out = match &cli.command {
        Command::Classify(c) => {
            let cfg = RunConfig::from_args(c)?;
            Output { document: cmd_classify(&c.expr, &cfg)?, csv: None }
        }
        Command::Analyze { common, probe, values } => {
            let cfg = RunConfig::from_args(common)?;
            let pv = if *probe { Some((parse_complex(&values.s)?, parse_complex(&values.t)?)) } else { None };
            cmd_analyze(&common.expr, &cfg, pv)?
        }
        Command::Probe { common, values } => {
            let cfg = RunConfig::from_args(common)?;
            cmd_probe(&common.expr, parse_complex(&values.s)?, parse_complex(&values.t)?, &cfg)?
        }
        Command::Puiseux { common, point, t } => {
            let cfg = RunConfig::from_args(common)?;
            Output { document: cmd_puiseux(&common.expr, point, t, &cfg)?, csv: None }
        }
    };
    out.document.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Classify(c) => c,
            Command::Analyze { common, .. } | Command::Probe { common, .. } | Command::Puiseux { common, .. } => common,
        }
    }
}

pub fn render(doc: &ReportDocument, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Text => report::render_text(doc),
    }
}
