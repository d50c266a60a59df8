use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use waring5::classify::{classify_rank, ClassifyError};
use waring5::construct::{canonical_scheme, sample_point, sample_with_coefficients, ConstructError};
use waring5::json::{
    binary_decomposition_to_json, curve_witness_to_json, decomposition_from_json,
    decomposition_to_json, plane_bound_to_json, poly_from_json, rank_report_to_json,
    rational_from_json, sample_from_json, sample_to_json, scheme_from_json,
    verify_report_to_json,
};
use waring5::pipeline::{run_pipeline, sample_from_report, PipelineConfig, PipelineError};
use waring5::poly::{parse_poly, HomogPoly};
use waring5::scalar::{Rational, MIN_PRECISION};
use waring5::schemes::{hilbert_h0_h1, low_degree_curve_witness, points_h1, JetScheme, SchemeType};
use waring5::strata::{stratum_dimension, StrataError, StratumProbe};
use waring5::sylvester::{binary_decomposition, sylvester_info, SylvesterConfig, SylvesterError};
use waring5::witness::{decompose, plane_upper_bound, verify_decomposition, WitnessError};

#[derive(Parser)]
#[command(name = "waring5", version, about = "Rank and Waring decompositions of border rank 5 forms")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 256)]
    precision_bits: u32,
    #[arg(long, global = true, default_value_t = 100)]
    coeff_height: u64,
    /// Fail instead of leaving the rationals.
    #[arg(long, global = true)]
    rational_only: bool,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Run over all seven scheme types.
    #[arg(long, global = true)]
    sweep: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Text,
}

#[derive(Args, Clone)]
struct Shape {
    /// Scheme type, e.g. 2:3,2.
    #[arg(long = "type")]
    ty: Option<String>,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 9)]
    d: u32,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a form in the span of a scheme of the given type.
    Construct {
        #[command(flatten)]
        shape: Shape,
        /// All span coefficients equal to 1.
        #[arg(long)]
        unit_coefficients: bool,
    },
    /// Recover the scheme and the rank of a form.
    Classify {
        /// Polynomial text or JSON with an "f" field; stdin when absent.
        input: Option<PathBuf>,
        #[arg(long)]
        d: Option<u32>,
    },
    /// Decompose a sample, or a bare form after classifying it.
    Decompose { input: Option<PathBuf> },
    /// Re-expand a decomposition and compare with a form.
    Verify {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        decomposition: PathBuf,
        #[arg(long, default_value_t = 1e-40)]
        tolerance: f64,
    },
    /// h0 and h1 of the ideal sheaf of a scheme twisted by d.
    Hilbert {
        input: Option<PathBuf>,
        #[arg(long)]
        d: u32,
    },
    /// Rank and a decomposition of a binary form.
    Sylvester { input: Option<PathBuf> },
    /// Dimension of the stratum of a scheme type.
    StratumDim {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// Line, conic or plane cubic carrying too many points of a finite set.
    CurveWitness {
        input: Option<PathBuf>,
        #[arg(long)]
        d: u32,
    },
    /// Rank bound for a planar form in the span of a degree-5 scheme.
    PlaneBound {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        retries: usize,
    },
    /// construct, classify, decompose and verify.
    Pipeline {
        #[command(flatten)]
        shape: Shape,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    NotBorderRankFive(String),
    Witness(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::NotBorderRankFive(_) => 3,
            Failure::Witness(_) => 4,
            Failure::Internal(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(s) | Failure::NotBorderRankFive(s) | Failure::Witness(s) | Failure::Internal(s) => s,
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::BadType(_) | ClassifyError::DegreeTooSmall(_) => Failure::Usage(e.to_string()),
            ClassifyError::NotBorderRankFive(_) => Failure::NotBorderRankFive(e.to_string()),
            ClassifyError::IrrationalSupport => Failure::Witness(e.to_string()),
            ClassifyError::RecoveryInconsistent => Failure::Internal(e.to_string()),
        }
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::CheckFailed(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<WitnessError> for Failure {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::WitnessSearchFailed(_) => Failure::Witness(e.to_string()),
            WitnessError::NotPlanar => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Construct(e) => e.into(),
            PipelineError::Classify(e) => e.into(),
            PipelineError::Witness(e) => e.into(),
            PipelineError::Inconsistent(_) => Failure::Internal(e.to_string()),
        }
    }
}

impl From<StrataError> for Failure {
    fn from(e: StrataError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SylvesterError> for Failure {
    fn from(e: SylvesterError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

type Res<T> = Result<T, Failure>;

fn read_input(path: &Option<PathBuf>) -> Res<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(usage)?;
            Ok(s)
        }
    }
}

fn as_json(text: &str) -> Option<Res<Value>> {
    let t = text.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Some(serde_json::from_str(t).map_err(usage))
    } else {
        None
    }
}

/// A form from polynomial text or from JSON carrying an "f" field.
fn read_form(text: &str) -> Res<HomogPoly> {
    match as_json(text) {
        Some(v) => {
            let v = v?;
            let nvars = v.get("m").and_then(Value::as_u64).map(|m| m as usize + 1);
            poly_from_json(v.get("f").ok_or_else(|| usage("missing \"f\""))?, nvars).map_err(usage)
        }
        None => parse_poly(text.trim(), None).map_err(usage),
    }
}

fn parse_type(shape: &Shape) -> Res<SchemeType> {
    let s = shape.ty.as_deref().ok_or_else(|| usage("--type is required"))?;
    let t: SchemeType = s.parse().map_err(usage)?;
    if t.total() != 5 {
        return Err(usage(format!("type {t} does not have degree 5")));
    }
    Ok(t)
}

fn types_for(shape: &Shape, g: &Global) -> Res<Vec<SchemeType>> {
    if g.sweep {
        Ok(SchemeType::all_degree_five())
    } else {
        Ok(vec![parse_type(shape)?])
    }
}

fn sylvester_config(g: &Global) -> SylvesterConfig {
    SylvesterConfig {
        seed: g.seed,
        precision: g.precision_bits,
        rational_only: g.rational_only,
        ..SylvesterConfig::default()
    }
}

/// Results of a sweep, in input order; the first failure wins.
fn sweep<T: Send, F>(types: &[SchemeType], f: F) -> Res<Vec<T>>
where
    F: Fn(&SchemeType) -> Res<T> + Sync,
{
    let out: Vec<Res<T>> = types.par_iter().map(|t| f(t)).collect();
    out.into_iter().collect()
}

fn single_or_list(mut v: Vec<Value>, swept: bool) -> Value {
    if swept {
        Value::Array(v)
    } else {
        v.pop().expect("one result")
    }
}

fn text_of(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, x)| match x {
                Value::String(s) => format!("{k}: {s}"),
                Value::Object(_) | Value::Array(_) => format!("{k}: {}", x),
                _ => format!("{k}: {x}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Value::Array(items) => items.iter().map(text_of).collect::<Vec<_>>().join("\n\n"),
        _ => v.to_string(),
    }
}

fn to_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Res<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Failure::Internal(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 fields"))
}

enum Rendered {
    Json(Value),
    Csv(String),
}

fn render(r: Rendered, out: Output) -> Res<String> {
    match (r, out) {
        (Rendered::Json(v), Output::Json) => {
            Ok(serde_json::to_string_pretty(&v).expect("serializable") + "\n")
        }
        (Rendered::Json(v), Output::Text) => Ok(text_of(&v) + "\n"),
        (Rendered::Csv(s), _) => Ok(s),
        (Rendered::Json(_), Output::Csv) => {
            Err(usage("csv output is available for stratum-dim and pipeline"))
        }
    }
}

fn cmd_construct(shape: &Shape, unit: bool, g: &Global) -> Res<(Rendered, u8)> {
    let types = types_for(shape, g)?;
    let samples = sweep(&types, |t| {
        let a = canonical_scheme(t, shape.m)?;
        let sp = if unit {
            let c = a.components.iter().map(|c| vec![Rational::from(1); c.length]).collect();
            sample_with_coefficients(&a, shape.d, c, g.seed)?
        } else {
            sample_point(&a, shape.d, g.seed, g.coeff_height)?
        };
        Ok(sample_to_json(&sp))
    })?;
    Ok((Rendered::Json(single_or_list(samples, g.sweep)), 0))
}

fn cmd_classify(input: &Option<PathBuf>, d: Option<u32>, g: &Global) -> Res<(Rendered, u8)> {
    let f = read_form(&read_input(input)?)?;
    if let Some(d) = d {
        if d != f.degree() {
            return Err(usage(format!("--d {d} does not match the degree {} of the form", f.degree())));
        }
    }
    let rep = classify_rank(&f, f.degree(), g.seed)?;
    let code = if rep.passed() { 0 } else { 5 };
    Ok((Rendered::Json(rank_report_to_json(&rep)), code))
}

fn cmd_decompose(input: &Option<PathBuf>, g: &Global) -> Res<(Rendered, u8)> {
    let text = read_input(input)?;
    let cfg = sylvester_config(g);
    let sample = match as_json(&text) {
        Some(v) if v.as_ref().map_or(false, |v| v.get("components").is_some()) => {
            sample_from_json(&v?).map_err(usage)?
        }
        _ => {
            let f = read_form(&text)?;
            let rep = classify_rank(&f, f.degree(), g.seed)?;
            sample_from_report(&f, &rep, g.seed)
                .ok_or_else(|| Failure::Internal("form outside the recovered span".into()))?
        }
    };
    let dec = decompose(&sample, &cfg)?;
    Ok((Rendered::Json(decomposition_to_json(&dec)), 0))
}

fn cmd_verify(form: &PathBuf, dec: &PathBuf, tol: f64) -> Res<(Rendered, u8)> {
    let f = read_form(&read_input(&Some(form.clone()))?)?;
    let text = read_input(&Some(dec.clone()))?;
    let v: Value = serde_json::from_str(&text).map_err(usage)?;
    let d = decomposition_from_json(&v).map_err(usage)?;
    let rep = verify_decomposition(&f, &d, tol);
    let mut out = verify_report_to_json(&rep);
    out["terms"] = json!(d.len());
    Ok((Rendered::Json(out), if rep.ok { 0 } else { 3 }))
}

fn scheme_input(text: &str) -> Res<JetScheme> {
    let v = as_json(text).ok_or_else(|| usage("expected scheme JSON"))??;
    scheme_from_json(&v).map_err(usage)
}

fn cmd_hilbert(input: &Option<PathBuf>, d: u32) -> Res<(Rendered, u8)> {
    let a = scheme_input(&read_input(input)?)?;
    let (h0, h1) = hilbert_h0_h1(&a, d);
    Ok((
        Rendered::Json(json!({
            "type": a.scheme_type().to_string(),
            "degree": a.degree(),
            "d": d,
            "h0": h0,
            "h1": h1,
        })),
        0,
    ))
}

fn cmd_sylvester(input: &Option<PathBuf>, g: &Global) -> Res<(Rendered, u8)> {
    let f = read_form(&read_input(input)?)?;
    let cfg = sylvester_config(g);
    let info = sylvester_info(&f, &cfg)?;
    let dec = binary_decomposition(&f, &cfg)?;
    let found = dec.is_some();
    let out = json!({
        "degree": info.degree,
        "rank": info.rank,
        "r1": info.r1,
        "decomposition": dec.as_ref().map(binary_decomposition_to_json),
    });
    Ok((Rendered::Json(out), if found { 0 } else { 4 }))
}

fn cmd_stratum(shape: &Shape, trials: usize, g: &Global) -> Res<(Rendered, u8)> {
    let types = types_for(shape, g)?;
    let probes: Vec<StratumProbe> =
        sweep(&types, |t| Ok(stratum_dimension(t, shape.m, shape.d, g.seed, trials)?))?;
    let code = if probes.iter().all(|p| p.matches_expected() && p.stable()) { 0 } else { 5 };
    if g.output == Output::Csv {
        let rows = probes.iter().map(|p| {
            vec![
                p.scheme_type.to_string(),
                p.m.to_string(),
                p.d.to_string(),
                p.parameter_count.to_string(),
                p.jacobian_rank.to_string(),
                p.projective_dimension.to_string(),
                p.expected_dimension.to_string(),
            ]
        });
        let header = [
            "type",
            "m",
            "d",
            "parameter_count",
            "jacobian_rank",
            "projective_dimension",
            "expected_dimension",
        ];
        return Ok((Rendered::Csv(to_csv(&header, rows)?), code));
    }
    let vals = probes
        .iter()
        .map(|p| serde_json::to_value(p).expect("serializable"))
        .collect();
    Ok((Rendered::Json(single_or_list(vals, g.sweep)), code))
}

fn cmd_curve_witness(input: &Option<PathBuf>, d: u32) -> Res<(Rendered, u8)> {
    let v = as_json(&read_input(input)?).ok_or_else(|| usage("expected a JSON point list"))??;
    let list = v.get("points").unwrap_or(&v);
    let pts = list
        .as_array()
        .ok_or_else(|| usage("points must be an array"))?
        .iter()
        .map(|p| {
            p.as_array()
                .ok_or_else(|| usage("a point must be an array"))?
                .iter()
                .map(|x| rational_from_json(x).map_err(usage))
                .collect::<Res<Vec<_>>>()
        })
        .collect::<Res<Vec<_>>>()?;
    if pts.is_empty() || pts.iter().any(|p| p.len() != pts[0].len()) {
        return Err(usage("points must be nonempty and of one length"));
    }
    let h1 = points_h1(&pts, d);
    let w = low_degree_curve_witness(&pts, d).map_err(usage)?;
    let code = if h1 > 0 && w.is_none() { 4 } else { 0 };
    Ok((
        Rendered::Json(json!({
            "d": d,
            "h1": h1,
            "witness": w.as_ref().map(curve_witness_to_json),
        })),
        code,
    ))
}

fn cmd_plane_bound(input: &Option<PathBuf>, retries: usize, g: &Global) -> Res<(Rendered, u8)> {
    let text = read_input(input)?;
    let a = scheme_input(&text)?;
    let f = read_form(&text)?;
    let b = plane_upper_bound(&f, &a, f.degree(), g.seed, retries)?;
    Ok((Rendered::Json(plane_bound_to_json(&b)), 0))
}

fn cmd_pipeline(shape: &Shape, g: &Global) -> Res<(Rendered, u8)> {
    let types = types_for(shape, g)?;
    let cfg = PipelineConfig {
        coeff_height: g.coeff_height,
        ..PipelineConfig::default()
    };
    let scfg = sylvester_config(g);
    let results = sweep(&types, |t| Ok(run_pipeline(t, shape.m, shape.d, g.seed, &cfg, &scfg)?))?;
    let code = if results.iter().all(|r| r.verified) { 0 } else { 5 };
    if g.output == Output::Csv {
        let rows = results.iter().map(|r| {
            vec![
                r.report.scheme_type.to_string(),
                shape.m.to_string(),
                shape.d.to_string(),
                g.seed.to_string(),
                r.report.rank.map_or(String::new(), |x| x.to_string()),
                r.decomposition.len().to_string(),
                r.decomposition.exactness.as_str().to_string(),
                r.verified.to_string(),
            ]
        });
        let header = ["type", "m", "d", "seed", "rank", "terms", "exactness", "verified"];
        return Ok((Rendered::Csv(to_csv(&header, rows)?), code));
    }
    let vals = results
        .iter()
        .map(|r| {
            json!({
                "sample": sample_to_json(&r.sample),
                "report": rank_report_to_json(&r.report),
                "decomposition": decomposition_to_json(&r.decomposition),
                "verified": r.verified,
            })
        })
        .collect();
    Ok((Rendered::Json(single_or_list(vals, g.sweep)), code))
}

fn run(cli: &Cli) -> Res<(String, u8)> {
    let g = &cli.global;
    if g.precision_bits < MIN_PRECISION {
        return Err(usage(format!("--precision-bits must be at least {MIN_PRECISION}")));
    }
    if g.coeff_height < 2 {
        return Err(usage("--coeff-height must be at least 2"));
    }
    let (r, code) = match &cli.cmd {
        Cmd::Construct { shape, unit_coefficients } => cmd_construct(shape, *unit_coefficients, g)?,
        Cmd::Classify { input, d } => cmd_classify(input, *d, g)?,
        Cmd::Decompose { input } => cmd_decompose(input, g)?,
        Cmd::Verify { form, decomposition, tolerance } => cmd_verify(form, decomposition, *tolerance)?,
        Cmd::Hilbert { input, d } => cmd_hilbert(input, *d)?,
        Cmd::Sylvester { input } => cmd_sylvester(input, g)?,
        Cmd::StratumDim { shape, trials } => cmd_stratum(shape, *trials, g)?,
        Cmd::CurveWitness { input, d } => cmd_curve_witness(input, *d)?,
        Cmd::PlaneBound { input, retries } => cmd_plane_bound(input, *retries, g)?,
        Cmd::Pipeline { shape } => cmd_pipeline(shape, g)?,
    };
    Ok((render(r, g.output)?, code))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((text, code)) => {
            let mut out = io::stdout().lock();
            if out.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(5);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
