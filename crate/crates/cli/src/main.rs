//! `ctxarch` command-line front end.
//!
//! Exit codes: 0 success or Accept, 1 gate Reject or no winner, 2 parse or
//! usage error, 3 well-formedness error, 4 runtime error.

mod table;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ctxarch_core::adl::{self, EventKind, Trace};
use ctxarch_core::metrics::{Decision, Thresholds};
use ctxarch_core::model::{has_errors, validate_wellformed, Model};
use ctxarch_core::resources::ContextSnapshot;
use ctxarch_core::runtime::{self, PoissonRow};
use ctxarch_core::selection::{self, QualityReport, SelectionError};

use table::Table;

const OK: u8 = 0;
const REJECT: u8 = 1;
const PARSE: u8 = 2;
const WELLFORMEDNESS: u8 = 3;
const RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "ctxarch", version, about = "Evaluate, select and reconfigure context-aware architectures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model against the well-formedness catalog.
    Validate { model: PathBuf },
    /// Metrics and gate verdict of one configuration.
    Evaluate {
        model: PathBuf,
        #[arg(long)]
        config: String,
        /// Context file; enables time behaviour and quality for CPIM configurations.
        #[arg(long)]
        context: Option<PathBuf>,
        /// `coupling,cohesion,complexity`, or a file holding a thresholds block.
        #[arg(long)]
        thresholds: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Rank candidate configurations and pick the best.
    Select {
        model: PathBuf,
        /// Comma-separated configuration names.
        #[arg(long, value_delimiter = ',', required = true)]
        configs: Vec<String>,
        #[arg(long)]
        context: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run the adaptation loop over a trace or a Poisson event source.
    Simulate(SimulateArgs),
    /// Family descriptors as XML.
    ExportFamilies { model: PathBuf },
    /// Evaluate every configuration of a model.
    Report {
        model: PathBuf,
        #[arg(long)]
        context: Option<PathBuf>,
        #[arg(long)]
        thresholds: Option<String>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct SimulateArgs {
    model: PathBuf,
    #[arg(long)]
    config: String,
    #[arg(long)]
    family: String,
    #[arg(long, conflicts_with = "poisson", required_unless_present = "poisson")]
    trace: Option<PathBuf>,
    /// Events per second.
    #[arg(long)]
    poisson: Option<f64>,
    /// Simulated milliseconds.
    #[arg(long, default_value_t = 60_000)]
    horizon: u64,
    #[arg(long)]
    seed: u64,
    /// Probe period in milliseconds.
    #[arg(long, default_value_t = 100)]
    dt: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait Code<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code,
            error: e.into(),
        })
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .code(PARSE)
}

fn parse_errors(path: &Path, errors: &[adl::ParseError]) -> Failure {
    let lines: Vec<String> = errors
        .iter()
        .map(|e| format!("{}:{e}", path.display()))
        .collect();
    Failure {
        code: PARSE,
        error: anyhow!(lines.join("\n")),
    }
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    let text = read(path)?;
    adl::parse_model(&text).map_err(|e| parse_errors(path, &e))
}

fn load_context(path: &Path, model: &Model) -> Result<ContextSnapshot, Failure> {
    let text = read(path)?;
    adl::parse_context(&text, model).map_err(|e| parse_errors(path, &e))
}

fn load_thresholds(arg: Option<&str>, model: &Model) -> Result<Option<Thresholds>, Failure> {
    let Some(arg) = arg else {
        return Ok(model.thresholds);
    };
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    if let [a, b, c] = parts[..] {
        if let (Ok(a), Ok(b), Ok(c)) = (a.parse(), b.parse(), c.parse()) {
            return Ok(Some(Thresholds::new(a, b, c)));
        }
    }
    let path = Path::new(arg);
    let text = read(path)?;
    let wrapped = format!("model Thresholds {{\n{text}\n}}");
    let m = adl::parse_model(&wrapped).map_err(|e| parse_errors(path, &e))?;
    m.thresholds
        .map(Some)
        .ok_or_else(|| anyhow!("{} holds no thresholds block", path.display()))
        .code(PARSE)
}

fn emit(text: &str) -> Result<(), Failure> {
    io::stdout().write_all(text.as_bytes()).code(RUNTIME)
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), num)
}

fn report_row(r: &QualityReport) -> Vec<String> {
    let m = &r.metrics;
    vec![
        r.config_name.clone(),
        r.level.to_string(),
        num(m.coupling),
        num(m.cohesion),
        num(m.complexity),
        m.mark().to_string(),
        opt(m.tbm_ms),
        m.maac
            .map_or_else(|| "-".to_string(), |c| format!("{}..{}", c.min, c.max)),
        opt(m.quality),
        r.verdict
            .as_ref()
            .map_or_else(|| "-".to_string(), |v| format!("{:?}", v.decision)),
        r.diagnostics.iter().filter(|d| d.is_error()).count().to_string(),
    ]
}

const REPORT_HEADERS: [&str; 11] = [
    "config",
    "level",
    "coupling",
    "cohesion",
    "complexity",
    "mark",
    "tbm_ms",
    "maac",
    "quality",
    "verdict",
    "errors",
];

fn print_diagnostics(diags: &[ctxarch_core::model::Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn validate(path: &Path) -> Result<u8, Failure> {
    let model = load_model(path)?;
    let diags = validate_wellformed(&model);
    print_diagnostics(&diags);
    Ok(if has_errors(&diags) { WELLFORMEDNESS } else { OK })
}

fn evaluate(
    path: &Path,
    config: &str,
    context: Option<&Path>,
    thresholds: Option<&str>,
    format: Format,
) -> Result<u8, Failure> {
    let model = load_model(path)?;
    let ctx = context.map(|c| load_context(c, &model)).transpose()?;
    let thresholds = load_thresholds(thresholds, &model)?;
    let report = selection::evaluate(&model, config, ctx.as_ref(), thresholds.as_ref())
        .map_err(|e| match e {
            SelectionError::UnknownConfiguration(_) => Failure {
                code: PARSE,
                error: e.into(),
            },
            e => Failure {
                code: RUNTIME,
                error: e.into(),
            },
        })?;
    print_diagnostics(&report.diagnostics);

    let row = report_row(&report);
    let mut table = Table::new(["metric", "value"]);
    for (h, v) in REPORT_HEADERS.iter().zip(row).skip(1) {
        table.push([h.to_string(), v]);
    }
    if let Some(v) = &report.verdict {
        table.push(["failed".to_string(), v.failed.join(";")]);
        table.push(["advisories".to_string(), v.advisories.join(";")]);
    }
    emit(&table.render(format == Format::Csv).code(RUNTIME)?)?;

    Ok(if report.has_errors() {
        WELLFORMEDNESS
    } else if report
        .verdict
        .as_ref()
        .is_some_and(|v| v.decision == Decision::Reject)
    {
        REJECT
    } else {
        OK
    })
}

fn select(path: &Path, configs: &[String], context: &Path, format: Format) -> Result<u8, Failure> {
    let model = load_model(path)?;
    let ctx = load_context(context, &model)?;
    let names: Vec<&str> = configs.iter().map(String::as_str).collect();
    let result = match selection::select_best(&model, &names, &ctx) {
        Ok(r) => r,
        Err(SelectionError::AllCandidatesInvalid) => {
            let mut wf = false;
            for n in &names {
                if let Ok(r) = selection::evaluate(&model, n, None, None) {
                    print_diagnostics(&r.diagnostics);
                    wf |= r.has_errors();
                }
            }
            eprintln!("no eligible candidate");
            return Ok(if wf { WELLFORMEDNESS } else { REJECT });
        }
        Err(e @ SelectionError::UnknownConfiguration(_)) | Err(e @ SelectionError::NoCandidates) => {
            return Err(e).code(PARSE)
        }
        Err(e) => return Err(e).code(RUNTIME),
    };
    print_diagnostics(&result.winner().diagnostics);

    let mut order: Vec<usize> = (0..result.reports.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |i: usize| result.scores[i].unwrap_or(f64::NEG_INFINITY);
        key(b).total_cmp(&key(a))
    });
    let mut table = Table::new(["rank", "config", "tbm_ms", "maac", "quality", "status"]);
    for (rank, &i) in order.iter().enumerate() {
        let r = &result.reports[i];
        let row = report_row(r);
        let status = if i == result.winner_index {
            "winner"
        } else if result.scores[i].is_some() {
            "eligible"
        } else {
            "ineligible"
        };
        table.push([
            (rank + 1).to_string(),
            r.config_name.clone(),
            row[6].clone(),
            row[7].clone(),
            row[8].clone(),
            status.to_string(),
        ]);
    }
    let mut out = table.render(format == Format::Csv).code(RUNTIME)?;
    if format == Format::Text {
        out.push_str(&format!("winner: {}\n", result.winner().config_name));
    }
    emit(&out)?;
    Ok(OK)
}

/// Bandwidth of every link between a quarter and all of its capacity, and
/// CPU of every device between half and all of it.
fn default_rows(model: &Model) -> Vec<PoissonRow> {
    let links = model
        .links
        .iter()
        .map(|l| PoissonRow::new(EventKind::Bandwidth, &l.name, 0.25 * l.bandwidth, l.bandwidth));
    let devices = model.devices.iter().map(|d| {
        PoissonRow::new(EventKind::Cpu, &d.name, 0.5 * d.cpu_capacity, d.cpu_capacity)
    });
    links.chain(devices).collect()
}

fn simulate(a: &SimulateArgs) -> Result<u8, Failure> {
    let model = load_model(&a.model)?;
    let trace = match (&a.trace, a.poisson) {
        (Some(p), _) => {
            let text = read(p)?;
            adl::parse_trace(&text).map_err(|e| parse_errors(p, &e))?
        }
        (None, Some(rate)) => {
            runtime::gen_poisson_trace(rate, a.horizon, a.seed, &default_rows(&model))
        }
        (None, None) => Trace::default(),
    };
    let log = runtime::run(&model, &a.config, &a.family, &trace, a.seed, a.horizon, a.dt)
        .map_err(|e| {
            let code = match e {
                runtime::SimError::IllFormed(_) => WELLFORMEDNESS,
                runtime::SimError::UnknownConfiguration(_)
                | runtime::SimError::UnknownFamily(_)
                | runtime::SimError::NotAMember { .. } => PARSE,
                _ => RUNTIME,
            };
            Failure {
                code,
                error: e.into(),
            }
        })?;
    let text = log.serialize();
    match &a.out {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .code(RUNTIME)?,
        None => emit(&text)?,
    }
    Ok(OK)
}

fn export(path: &Path) -> Result<u8, Failure> {
    let model = load_model(path)?;
    emit(&adl::export_families_xml(&model))?;
    Ok(OK)
}

fn report(
    path: &Path,
    context: Option<&Path>,
    thresholds: Option<&str>,
    format: Format,
) -> Result<u8, Failure> {
    let model = load_model(path)?;
    let ctx = context.map(|c| load_context(c, &model)).transpose()?;
    let thresholds = load_thresholds(thresholds, &model)?;
    let mut table = Table::new(REPORT_HEADERS);
    let mut code = OK;
    for c in &model.configurations {
        let r = selection::evaluate(&model, &c.name, ctx.as_ref(), thresholds.as_ref())
            .code(RUNTIME)?;
        if r.has_errors() {
            code = WELLFORMEDNESS;
        } else if code == OK && r.verdict.as_ref().is_some_and(|v| !v.is_accept()) {
            code = REJECT;
        }
        table.push(report_row(&r));
    }
    print_diagnostics(&validate_wellformed(&model));
    emit(&table.render(format == Format::Csv).code(RUNTIME)?)?;
    Ok(code)
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Validate { model } => validate(model),
        Command::Evaluate {
            model,
            config,
            context,
            thresholds,
            output,
        } => evaluate(model, config, context.as_deref(), thresholds.as_deref(), output.format),
        Command::Select {
            model,
            configs,
            context,
            output,
        } => select(model, configs, context, output.format),
        Command::Simulate(a) => simulate(a),
        Command::ExportFamilies { model } => export(model),
        Command::Report {
            model,
            context,
            thresholds,
            output,
        } => report(model, context.as_deref(), thresholds.as_deref(), output.format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { PARSE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
