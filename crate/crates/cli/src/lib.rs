//! The `lamicone` command line: argument parsing, command execution and
//! report rendering. `main` only prints what [`execute`] returns.

pub mod input;
pub mod report;
pub mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use lamicone::limit::{
    base_exists, directedness_check, limit_ray_certificate, minimality_certificate, trivial_limit_certificate,
};
use lamicone::realization::{default_schedule, geometric_schedule};
use lamicone::{
    builtin, odd_approximate, realize_arcs_odd, realize_pipeline, ArcSystemStage, BuiltinFamily, Certificate,
    InverseConeSystem, Rational, RationalMatrix, StochasticMatrix,
};
use serde_json::{json, Value};
use thiserror::Error;

pub const DEFAULT_HORIZON: usize = 50;
pub const DEFAULT_TOL: &str = "1/1000000000";
pub const DEFAULT_TRIVIAL_TOL: &str = "1/100";
pub const DEFAULT_STAGE: usize = 1;
pub const DEFAULT_EPS: &str = "1/10";
pub const DEFAULT_EPS0: &str = "1/10";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invariant(String),
    #[error("round-trip failure: {0}")]
    RoundTrip(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::RoundTrip(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "lamicone", version, about = "Finite-stage certificates for inverse systems of cones")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every certificate on a system file or builtin example.
    Analyze {
        /// A system file, a builtin name, or the word `builtin` followed by a name.
        source: String,
        name: Option<String>,
        #[arg(long, env = "LAMICONE_HORIZON", default_value_t = DEFAULT_HORIZON)]
        horizon: usize,
        #[arg(long, default_value = DEFAULT_TOL)]
        tol: String,
        #[arg(long, default_value = DEFAULT_TRIVIAL_TOL)]
        trivial_tol: String,
        #[arg(long, default_value_t = DEFAULT_STAGE)]
        stage: usize,
    },
    /// Approximate a column-stochastic matrix by one with odd scaled entries.
    Approx {
        file: PathBuf,
        #[arg(long, default_value = DEFAULT_EPS)]
        eps: String,
    },
    /// Turn a stochastic system into positive odd integer transitions.
    Realize {
        file: PathBuf,
        /// Comma-separated tolerances, one per stage.
        #[arg(long, conflicts_with = "eps0")]
        eps_schedule: Option<String>,
        /// First tolerance of the halving schedule.
        #[arg(long)]
        eps0: Option<String>,
        /// Also build and verify arc systems for every stage.
        #[arg(long)]
        arcs: bool,
        /// Treat the input as positive odd integer matrices and only build arcs.
        #[arg(long, conflicts_with_all = ["eps_schedule", "eps0"])]
        arcs_only: bool,
        /// Write one SVG drawing per stage into this directory (implies --arcs).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check the expected facts of a builtin example.
    Example { name: String },
}

/// What a finished command prints, and its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub output: String,
    pub code: i32,
}

fn defaults() -> Value {
    json!({
        "horizon": DEFAULT_HORIZON,
        "tol": DEFAULT_TOL,
        "trivial_tol": DEFAULT_TRIVIAL_TOL,
        "stage": DEFAULT_STAGE,
        "eps": DEFAULT_EPS,
        "eps0": DEFAULT_EPS0,
        "format": "json",
    })
}

fn render_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

pub fn execute(cli: &Cli) -> Result<Run, CliError> {
    match &cli.command {
        Command::Analyze { source, name, horizon, tol, trivial_tol, stage } => {
            analyze(source, name.as_deref(), *horizon, tol, trivial_tol, *stage, cli.format)
        }
        Command::Approx { file, eps } => approx(file, eps, cli.format),
        Command::Realize { file, eps_schedule, eps0, arcs, arcs_only, svg } => {
            let options = RealizeOptions {
                eps_schedule: eps_schedule.as_deref(),
                eps0: eps0.as_deref(),
                arcs: *arcs || svg.is_some(),
                arcs_only: *arcs_only,
                svg: svg.as_deref(),
            };
            realize(file, &options, cli.format)
        }
        Command::Example { name } => example(name, cli.format),
    }
}

/// Parses `args` (including the program name) and executes; clap's own
/// usage errors are reported as parse errors.
pub fn run_args<I, T>(args: I) -> Result<Run, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Parse(e.to_string()))?;
    execute(&cli)
}

fn load_system(source: &str, name: Option<&str>) -> Result<(InverseConeSystem, Value), CliError> {
    let unknown = |e: lamicone::builtins::UnknownExample| CliError::Parse(e.to_string());
    if source == "builtin" {
        let name = name.ok_or_else(|| CliError::Parse("`analyze builtin` needs an example name".into()))?;
        let family = BuiltinFamily::from_name(name).map_err(unknown)?;
        return Ok((InverseConeSystem::builtin(family), json!({"builtin": family.name()})));
    }
    if let Some(extra) = name {
        return Err(CliError::Parse(format!("unexpected argument {extra:?}")));
    }
    let path = Path::new(source);
    if !path.exists() {
        if let Ok(family) = BuiltinFamily::from_name(source) {
            return Ok((InverseConeSystem::builtin(family), json!({"builtin": family.name()})));
        }
        return Err(CliError::Parse(format!(
            "{source}: no such file or builtin example (known: {})",
            BuiltinFamily::names().join(", ")
        )));
    }
    let text = input::read_file(path)?;
    Ok((input::parse_system(&text, source)?, json!({"file": source})))
}

fn invariant<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Invariant(e.to_string())
}

pub fn certificates(
    sys: &InverseConeSystem,
    horizon: usize,
    tol: &Rational,
    trivial_tol: &Rational,
    stage: usize,
) -> Result<Vec<Certificate>, CliError> {
    Ok(vec![
        base_exists(sys, horizon).map_err(invariant)?,
        directedness_check(sys, horizon).map_err(invariant)?,
        limit_ray_certificate(sys, stage, horizon, tol).map_err(invariant)?,
        trivial_limit_certificate(sys, stage, horizon, trivial_tol).map_err(invariant)?,
        minimality_certificate(sys, stage, horizon).map_err(invariant)?,
    ])
}

fn analyze(
    source: &str,
    name: Option<&str>,
    horizon: usize,
    tol: &str,
    trivial_tol: &str,
    stage: usize,
    format: Format,
) -> Result<Run, CliError> {
    let tol_q = input::parse_rational_arg(tol, "tol")?;
    let trivial_q = input::parse_rational_arg(trivial_tol, "trivial-tol")?;
    let (sys, origin) = load_system(source, name)?;
    let certs = certificates(&sys, horizon, &tol_q, &trivial_q, stage)?;
    let output = match format {
        Format::Json => render_json(&json!({
            "command": "analyze",
            "defaults": defaults(),
            "parameters": {
                "horizon": horizon,
                "tol": report::q(&tol_q),
                "trivial_tol": report::q(&trivial_q),
                "stage": stage,
            },
            "system": origin,
            "certificates": certs.iter().map(report::certificate).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut out = format!(
                "analyze {source} horizon={horizon} tol={tol_q} trivial_tol={trivial_q} stage={stage}\n\
                 defaults: horizon={DEFAULT_HORIZON} tol={DEFAULT_TOL} trivial_tol={DEFAULT_TRIVIAL_TOL} stage={DEFAULT_STAGE}\n"
            );
            for cert in &certs {
                let _ = writeln!(out, "{}", report::certificate_line(cert));
            }
            out
        }
    };
    Ok(Run { output, code: 0 })
}

fn approx(file: &Path, eps: &str, format: Format) -> Result<Run, CliError> {
    let eps_q = input::parse_rational_arg(eps, "eps")?;
    let text = input::read_file(file)?;
    let m = input::parse_matrix(&text, &file.display().to_string())?;
    let stochastic = StochasticMatrix::new(m).map_err(invariant)?;
    let out = odd_approximate(&stochastic, &eps_q).map_err(invariant)?;
    let output = match format {
        Format::Json => render_json(&json!({
            "command": "approx",
            "defaults": defaults(),
            "approximation": report::approximation(&out, &eps_q),
        })),
        Format::Text => {
            let mut s = format!("K = {}  scale pK = {}  max error = {}\n", out.k, out.scale(), out.max_error);
            for row in out.integer_rows() {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "{}", cells.join(" "));
            }
            s
        }
    };
    Ok(Run { output, code: 0 })
}

struct RealizeOptions<'a> {
    eps_schedule: Option<&'a str>,
    eps0: Option<&'a str>,
    arcs: bool,
    arcs_only: bool,
    svg: Option<&'a Path>,
}

fn schedule(options: &RealizeOptions, count: usize) -> Result<Vec<Rational>, CliError> {
    if let Some(list) = options.eps_schedule {
        return list.split(',').map(|s| input::parse_rational_arg(s.trim(), "eps-schedule")).collect();
    }
    match options.eps0 {
        Some(eps0) => Ok(geometric_schedule(&input::parse_rational_arg(eps0, "eps0")?, count)),
        None => Ok(default_schedule(count)),
    }
}

/// Per-stage JSON, text summary lines, and the SVG file names written.
type ArcOutput = (Vec<Value>, Vec<String>, Vec<String>);

/// Chains arc systems through `matrices`, verifying each stage. `internal`
/// marks matrices produced by the pipeline, where any failure is a breach.
fn build_arcs(matrices: &[RationalMatrix], internal: bool, svg_dir: Option<&Path>) -> Result<ArcOutput, CliError> {
    let first = matrices.first().ok_or_else(|| CliError::Invariant("system has no stages".into()))?;
    let mut stage = ArcSystemStage::initial(first.rows());
    let mut values = Vec::new();
    let mut drawings = vec![svg::render(&stage, "stage 0")];
    let mut summary = Vec::new();
    for (n, pi) in matrices.iter().enumerate() {
        let real = realize_arcs_odd(&stage, pi).map_err(|e| {
            let msg = format!("stage {}: {e}", n + 1);
            if internal {
                CliError::RoundTrip(msg)
            } else {
                CliError::Invariant(msg)
            }
        })?;
        let check = real.verify(pi).map_err(|e| CliError::RoundTrip(format!("stage {}: {e}", n + 1)))?;
        if !check.ok() {
            return Err(CliError::RoundTrip(format!("stage {}: {check:?}", n + 1)));
        }
        values.push(report::arcs(n + 1, &real, &check));
        let sizes: Vec<String> = real.path.sizes().iter().map(|s| s.to_string()).collect();
        summary.push(format!("stage {}: subdivision sizes ({}), round trip ok", n + 1, sizes.join(",")));
        drawings.push(svg::render(&real.next, &format!("stage {}", n + 1)));
        stage = real.next;
    }
    let mut files = Vec::new();
    if let Some(dir) = svg_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for (n, drawing) in drawings.iter().enumerate() {
            let name = format!("stage-{n}.svg");
            let path = dir.join(&name);
            std::fs::write(&path, drawing).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            files.push(name);
        }
    }
    Ok((values, summary, files))
}

fn realize(file: &Path, options: &RealizeOptions, format: Format) -> Result<Run, CliError> {
    let text = input::read_file(file)?;
    let matrices = input::parse_stages(&text, &file.display().to_string())?;
    let mut report = json!({"command": "realize", "defaults": defaults()});
    let mut lines = Vec::new();
    let arc_input = if options.arcs_only {
        matrices
    } else {
        let system =
            matrices.into_iter().map(StochasticMatrix::new).collect::<Result<Vec<_>, _>>().map_err(invariant)?;
        let eps = schedule(options, system.len())?;
        let out = realize_pipeline(&system, &eps).map_err(invariant)?;
        report["pipeline"] = report::pipeline(&out);
        for (n, s) in out.stages.iter().enumerate() {
            lines.push(format!("stage {}: K = {}, error {} < {}", n + 1, s.approximation.k, s.achieved, s.epsilon));
        }
        lines.extend(out.warnings.iter().map(|w| format!("warning: {w}")));
        if !options.arcs {
            Vec::new()
        } else {
            out.stages.iter().map(|s| s.transition.clone()).collect()
        }
    };
    if options.arcs || options.arcs_only {
        let (values, summary, files) = build_arcs(&arc_input, !options.arcs_only, options.svg)?;
        report["arcs"] = Value::Array(values);
        report["svg_files"] = json!(files);
        lines.extend(summary);
    }
    let output = match format {
        Format::Json => render_json(&report),
        Format::Text => lines.iter().map(|l| format!("{l}\n")).collect(),
    };
    Ok(Run { output, code: 0 })
}

fn example(name: &str, format: Format) -> Result<Run, CliError> {
    let ex =
        builtin(name).map_err(|e| CliError::Parse(format!("{e} (known: {})", BuiltinFamily::names().join(", "))))?;
    let outcomes = ex.verify();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let output = match format {
        Format::Json => render_json(&json!({
            "command": "example",
            "defaults": defaults(),
            "example": ex.name(),
            "facts": report::facts(&outcomes),
            "failed": failed,
        })),
        Format::Text => {
            let mut s = String::new();
            for o in &outcomes {
                let _ = writeln!(s, "{} {}  {}", if o.passed { "ok  " } else { "FAIL" }, o.description, o.detail);
            }
            let _ = writeln!(s, "{} facts, {failed} failed", outcomes.len());
            s
        }
    };
    Ok(Run { output, code: i32::from(failed > 0) })
}
