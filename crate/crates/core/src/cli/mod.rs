//! Command-line front end: scenario runs, sweeps, verifications and attacks.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check, 2 on unreadable input,
//! 3 on a geometry or wiring error.

pub mod scenario;
pub mod tasks;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::causal::SystemError;
use crate::rational;
use scenario::{Analysis, Mode, Scenario, Task};
use tasks::{Check, Report};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Geometry(_) => 3,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Geometry(e.to_string())
    }
}

impl From<SystemError> for CliError {
    fn from(e: SystemError) -> Self {
        CliError::Geometry(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "relcrypt", version, about = "Exact verification of relativistic two-party resources")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Monte Carlo samples per branch; switches the analysis to sampling.
    #[arg(long, global = true)]
    pub mc_n: Option<u64>,
    #[arg(long, global = true)]
    pub mc_delta: Option<f64>,
    #[arg(long, global = true)]
    pub rng_seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a scenario file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Run a scenario once per grid value of its parameter.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values; may be empty.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        grid: String,
    },
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    Attack {
        #[command(subcommand)]
        what: AttackCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Check causality of a system file, or of every bundled system.
    Causality {
        #[arg(long)]
        system: Option<PathBuf>,
    },
    /// Compare cut enumeration with brute force and check causality functions.
    Cuts {
        #[arg(long, default_value_t = 30)]
        posets: usize,
        #[arg(long, default_value_t = 8)]
        max_points: usize,
    },
    /// Entanglement test against identity and replacement channels.
    EprDistinguisher {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Coin flip from a channel with delay, all three cases.
    ConstructCf {
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum AttackCommand {
    /// Man in the middle between two biased coin flips.
    Mitm {
        #[arg(long, default_value = "0")]
        p: String,
        /// Sweep p over 0, step, 2·step, ..., 1.
        #[arg(long)]
        sweep: Option<String>,
        /// Also decompose a bundled candidate: direct_message or blocked_channel.
        #[arg(long)]
        candidate: Option<String>,
    },
    /// Blocked composition against chained channels.
    DelayExtension {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        k: Option<u32>,
    },
}

/// What a command produced: one report, or rows of a sweep.
pub enum Output {
    Report(Report),
    Sweep { header: Vec<String>, rows: Vec<Vec<String>>, reports: Vec<Report> },
}

impl Output {
    pub fn passed(&self) -> bool {
        match self {
            Output::Report(r) => r.passed,
            Output::Sweep { reports, .. } => reports.iter().all(|r| r.passed),
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Io(e.to_string());
        match (self, format) {
            (Output::Report(r), Format::Json) => Ok(pretty(&json!(r))),
            (Output::Sweep { reports, .. }, Format::Json) => Ok(pretty(&json!(reports))),
            (Output::Report(r), Format::Csv) => {
                w.write_record(["check", "passed", "detail"]).map_err(csv_err)?;
                for c in &r.checks {
                    w.write_record([c.name.as_str(), &c.passed.to_string(), c.detail.as_str()]).map_err(csv_err)?;
                }
                finish(w)
            }
            (Output::Sweep { header, rows, .. }, Format::Csv) => {
                w.write_record(header).map_err(csv_err)?;
                for row in rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                finish(w)
            }
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn analysis_from(common: &Common, base: &Analysis) -> Analysis {
    let mut a = base.clone();
    if let Some(n) = common.mc_n {
        a.mode = Mode::Mc;
        a.n = n;
    }
    if let Some(d) = common.mc_delta {
        a.delta = d;
    }
    if let Some(s) = common.rng_seed {
        a.rng_seed = s;
    }
    a
}

fn load_with_flags(path: &PathBuf, common: &Common) -> Result<Scenario, CliError> {
    let mut s = Scenario::load(path)?;
    s.analysis = analysis_from(common, &s.analysis);
    Ok(s)
}

fn ad_hoc(name: &str, task: Task, common: &Common) -> Scenario {
    Scenario {
        name: name.into(),
        task,
        analysis: analysis_from(common, &Analysis::default()),
        assertions: Vec::new(),
        out: None,
    }
}

fn parse_grid(grid: &str) -> Vec<String> {
    grid.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn sweep_header(param: &str) -> Vec<String> {
    let cols: &[&str] = match param {
        "p" => &["p", "agreement", "advantage", "bound", "pass", "p_f64", "agreement_f64", "advantage_f64", "bound_f64"],
        "k" => &["k", "advantage", "expected", "bound", "pass", "advantage_f64", "expected_f64", "bound_f64"],
        _ => &["dim", "advantage", "expected", "pass"],
    };
    cols.iter().map(|s| s.to_string()).collect()
}

fn field(r: &Report, path: &[&str]) -> String {
    let mut v = &r.result;
    for k in path {
        v = &v[*k];
    }
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn as_float(text: &str) -> String {
    rational::parse(text).map(|r| format!("{:.6}", rational::to_f64(&r))).unwrap_or_default()
}

fn sweep_row(param: &str, value: &str, r: &Report) -> Vec<String> {
    let pass = r.passed.to_string();
    match param {
        "p" => {
            let (a, adv, b) = (field(r, &["agreement"]), field(r, &["advantage"]), field(r, &["bound"]));
            let p = field(r, &["p"]);
            vec![p.clone(), a.clone(), adv.clone(), b.clone(), pass, as_float(&p), as_float(&a), as_float(&adv), as_float(&b)]
        }
        "k" => {
            let (adv, exp, b) = (
                field(r, &["fixed_message_advantage"]),
                field(r, &["expected"]),
                field(r, &["epsilon_lower_bound"]),
            );
            vec![value.to_string(), adv.clone(), exp.clone(), b.clone(), pass, as_float(&adv), as_float(&exp), as_float(&b)]
        }
        _ => vec![value.to_string(), field(r, &["advantage"]), field(r, &["expected_advantage"]), pass],
    }
}

pub fn sweep(s: &Scenario, param: Option<&str>, grid: &[String]) -> Result<Output, CliError> {
    let own = s
        .sweep_parameter()
        .ok_or_else(|| CliError::Parse(format!("scenario {:?} has nothing to sweep", s.name)))?;
    let param = param.unwrap_or(own);
    if param != own {
        return Err(CliError::Parse(format!("scenario {:?} sweeps {own}, not {param}", s.name)));
    }
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for v in grid {
        let r = tasks::run_scenario(&s.with_parameter(param, v)?)?;
        rows.push(sweep_row(param, v, &r));
        reports.push(r);
    }
    Ok(Output::Sweep { header: sweep_header(param), rows, reports })
}

fn step_grid(step: &str) -> Result<Vec<String>, CliError> {
    let step = rational::parse(step).map_err(|e| CliError::Parse(e.to_string()))?;
    if step <= rational::zero() {
        return Err(CliError::Parse("sweep step must be positive".into()));
    }
    let mut grid = Vec::new();
    let mut p = rational::zero();
    while p <= rational::one() {
        grid.push(rational::format(&p));
        p += &step;
    }
    Ok(grid)
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::Run { scenario } => {
            let s = load_with_flags(scenario, common)?;
            Ok(Output::Report(tasks::run_scenario(&s)?))
        }
        Command::Sweep { scenario, param, grid } => {
            let s = load_with_flags(scenario, common)?;
            sweep(&s, param.as_deref(), &parse_grid(grid))
        }
        Command::Verify { what } => match what {
            VerifyCommand::Causality { system } => Ok(Output::Report(verify::causality(system.as_deref())?)),
            VerifyCommand::Cuts { posets, max_points } => {
                Ok(Output::Report(verify::cuts(*posets, *max_points, common.rng_seed.unwrap_or(0))?))
            }
            VerifyCommand::EprDistinguisher { dim, samples } => {
                let s = ad_hoc("epr-distinguisher", Task::Epr { dim: *dim, samples: *samples }, common);
                Ok(Output::Report(tasks::run_scenario(&s)?))
            }
            VerifyCommand::ConstructCf { scenario } => {
                let s = match scenario {
                    Some(path) => load_with_flags(path, common)?,
                    None => ad_hoc("construct-cf", Task::ConstructCf { geometry: None }, common),
                };
                Ok(Output::Report(tasks::run_scenario(&s)?))
            }
        },
        Command::Attack { what } => match what {
            AttackCommand::Mitm { p, sweep: step, candidate } => {
                let p = rational::parse(p).map_err(|e| CliError::Parse(e.to_string()))?;
                let s = ad_hoc("mitm", Task::Mitm { p: rational::RatString(p), candidate: candidate.clone() }, common);
                match step {
                    Some(step) => sweep(&s, Some("p"), &step_grid(step)?),
                    None => Ok(Output::Report(tasks::run_scenario(&s)?)),
                }
            }
            AttackCommand::DelayExtension { scenario, k } => {
                let mut s = match scenario {
                    Some(path) => load_with_flags(path, common)?,
                    None => ad_hoc("delay-extension", Task::DelayExtension { channels: None, k: None }, common),
                };
                if let (Some(kv), Task::DelayExtension { k: slot, .. }) = (k, &mut s.task) {
                    *slot = Some(*kv);
                }
                Ok(Output::Report(tasks::run_scenario(&s)?))
            }
        },
    }
}

fn scenario_out(cli: &Cli) -> Option<PathBuf> {
    let path = match &cli.command {
        Command::Run { scenario } | Command::Sweep { scenario, .. } => scenario,
        _ => return None,
    };
    Scenario::load(path).ok().and_then(|s| s.out)
}

/// Parses arguments, runs the command, writes the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli).and_then(|out| Ok((out.render(cli.common.format)?, out.passed()))) {
        Ok((text, passed)) => {
            let target = cli.common.out.clone().or_else(|| scenario_out(&cli));
            let written = match target {
                Some(path) => std::fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 2;
            }
            if passed {
                0
            } else {
                eprintln!("one or more checks failed");
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Failed checks of a report, for diagnostics.
pub fn failures(r: &Report) -> Vec<&Check> {
    r.checks.iter().filter(|c| !c.passed).collect()
}
