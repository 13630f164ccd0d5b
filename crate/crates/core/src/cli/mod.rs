//! The `wgslab` command line.
//!
//! Every subcommand writes `<outdir>/<subcommand>-<timestamp>.csv` with a
//! `.json` sidecar (resolved configuration, tool version, wall time) and
//! prints a one-line summary on standard output.
//!
//! A flat `key = value` file passed with `--config` supplies defaults; flags
//! on the command line win. `WGSLAB_WORKERS` sets the worker count when
//! `--workers` is absent.
//!
//! Exit codes: 0 success, 1 domain or usage error, 2 capacity error,
//! 3 no transition found.

mod commands;
pub mod output;
pub mod parse;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::lattice::{LatticeSpec, Range};
use output::write_artifacts;
use parse::{parse_grid, parse_range};

pub const WORKERS_ENV: &str = "WGSLAB_WORKERS";

#[derive(Parser, Debug, Serialize)]
#[command(name = "wgslab", version, about = "Weighted graph state entanglement toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// GGM against time for one or more fall-off rates.
    GgmCurve(GgmCurveArgs),
    /// Locate alpha* from the dG/dt detector at t = 2pi.
    Detect(DetectArgs),
    /// alpha* against the bond angle of an L x L lattice.
    ThetaScan(ThetaScanArgs),
    /// Time-averaged GGM.
    Avg(AvgArgs),
    /// Saturation length N_sat of the time-averaged GGM.
    Nsat(NsatArgs),
    /// Critical range z_c of the time-averaged GGM.
    Zc(ZcArgs),
    /// Closed form against brute-force GGM on random small models.
    Oracle(OracleArgs),
    /// Subset density matrices against dense partial traces.
    RdmCheck(RdmCheckArgs),
    /// Sigma-z measurements with local-unitary correction.
    Measure(MeasureArgs),
}

/// A grid given as `a,b,c` or `start:stop:step`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_grid(s).map(Grid)
    }
}

/// A real number accepting a `pi` suffix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Real(pub f64);

impl FromStr for Real {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse::parse_real(s).map(Real)
    }
}

/// `full` or an integer cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZArg(pub Option<usize>);

impl FromStr for ZArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_range(s).map(ZArg)
    }
}

impl ZArg {
    pub fn range(self) -> Range {
        self.0.map_or(Range::Full, Range::Cutoff)
    }
}

/// Comma-separated integers.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct IntList(pub Vec<usize>);

impl FromStr for IntList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse::parse_usize_list(s).map(IntList)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeArg {
    Chain,
    #[value(name = "2d")]
    #[serde(rename = "2d")]
    TwoD,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExecArgs {
    /// Output directory for CSV and JSON files.
    #[arg(long, default_value = ".")]
    pub outdir: PathBuf,
    /// Worker threads (default: WGSLAB_WORKERS, then all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flat key=value file with defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the summary only.
    #[arg(long)]
    pub no_write: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LatticeArgs {
    #[arg(long, value_enum, default_value = "chain")]
    pub lattice: LatticeArg,
    /// Number of chain sites.
    #[arg(long, conflicts_with = "l")]
    pub n: Option<usize>,
    /// Side length of a 2D lattice.
    #[arg(long)]
    pub l: Option<usize>,
    /// Bond angle of a 2D lattice in degrees.
    #[arg(long)]
    pub theta: Option<Real>,
    /// Interaction range: `full` or an integer (chains only).
    #[arg(long, default_value = "full")]
    pub z: ZArg,
}

impl LatticeArgs {
    pub fn spec(&self) -> crate::Result<LatticeSpec> {
        match self.lattice {
            LatticeArg::Chain => {
                if self.l.is_some() || self.theta.is_some() {
                    return Err(Error::Domain("--l and --theta apply to --lattice 2d only".into()));
                }
                LatticeSpec::chain(self.n.ok_or_else(|| Error::Domain("--n is required for chains".into()))?)
            }
            LatticeArg::TwoD => {
                if self.n.is_some() {
                    return Err(Error::Domain("use --l (side length) for 2D lattices".into()));
                }
                let l = self.l.ok_or_else(|| Error::Domain("--l is required for 2D lattices".into()))?;
                LatticeSpec::deformed(l, self.theta.map_or(90.0, |t| t.0))
            }
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct GgmCurveArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Fall-off rates, one CSV column each.
    #[arg(long, default_value = "1")]
    pub alpha: Grid,
    /// Times, e.g. `0:3pi:0.001`.
    #[arg(long)]
    pub t: Grid,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct DetectArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Fall-off grid, e.g. `0.5:1.5:0.001`.
    #[arg(long)]
    pub alpha: Grid,
    /// Rescan the located cell at this finer step.
    #[arg(long)]
    pub refine: Option<f64>,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct ThetaScanArgs {
    #[arg(long, default_value_t = 40)]
    pub l: usize,
    /// Bond angles in degrees.
    #[arg(long)]
    pub theta: Grid,
    /// Coarse fall-off range `start:stop:step`.
    #[arg(long, default_value = "1:2.6:0.01")]
    pub alpha: String,
    #[arg(long, default_value_t = 0.001)]
    pub fine_step: f64,
    /// Also extrapolate alpha* to 120 degrees from both sides.
    #[arg(long)]
    pub limit: bool,
    /// Angle offsets from 120 degrees used by --limit.
    #[arg(long, default_value = "0.5,1,1.5")]
    pub offsets: Grid,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct AvgArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub alpha: Grid,
    /// Averaging horizon.
    #[arg(long = "T", default_value = "3pi")]
    pub t_end: Real,
    /// Quadrature points (odd).
    #[arg(long, default_value_t = 6001)]
    pub points: usize,
    /// Use the site maximum instead of the chain-end closed form on chains.
    #[arg(long)]
    pub site_max: bool,
    /// Report the heuristic alpha*_SR knee over the alpha grid (chains).
    #[arg(long)]
    pub knee: bool,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct NsatArgs {
    #[arg(long)]
    pub alpha: Grid,
    #[arg(long, default_value = "1e-4")]
    pub eps: Grid,
    #[arg(long = "T", default_value = "3pi")]
    pub t_end: Real,
    #[arg(long, default_value_t = 6001)]
    pub points: usize,
    /// Consecutive N that must satisfy the inequality.
    #[arg(long, default_value_t = 1)]
    pub persistence: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub n_cap: usize,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct ZcArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: Real,
    #[arg(long, default_value = "1e-3,1e-4")]
    pub eps: Grid,
    #[arg(long = "T", default_value = "3pi")]
    pub t_end: Real,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Restrict sampling to chains.
    #[arg(long)]
    pub chains_only: bool,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct RdmCheckArgs {
    #[arg(long, default_value_t = 14)]
    pub n_max: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub max_subset: usize,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub alpha: Real,
    #[arg(long)]
    pub t: Real,
    /// Measured sites (0-based, in measurement order).
    #[arg(long)]
    pub sites: IntList,
    /// Outcomes (0/1) per measured site; all strings when omitted.
    #[arg(long)]
    pub outcomes: Option<IntList>,
    /// Write the post-measurement state of the first outcome string as WGSV.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub exec: ExecArgs,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GgmCurve(_) => "ggm-curve",
            Command::Detect(_) => "detect",
            Command::ThetaScan(_) => "theta-scan",
            Command::Avg(_) => "avg",
            Command::Nsat(_) => "nsat",
            Command::Zc(_) => "zc",
            Command::Oracle(_) => "oracle",
            Command::RdmCheck(_) => "rdm-check",
            Command::Measure(_) => "measure",
        }
    }

    pub fn exec(&self) -> &ExecArgs {
        match self {
            Command::GgmCurve(a) => &a.exec,
            Command::Detect(a) => &a.exec,
            Command::ThetaScan(a) => &a.exec,
            Command::Avg(a) => &a.exec,
            Command::Nsat(a) => &a.exec,
            Command::Zc(a) => &a.exec,
            Command::Oracle(a) => &a.exec,
            Command::RdmCheck(a) => &a.exec,
            Command::Measure(a) => &a.exec,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity(_) => 2,
        Error::NoTransition(_) => 3,
        Error::Domain(_) | Error::NotSaturated(_) | Error::Io(_) => 1,
    }
}

/// Splices `--key value` pairs from a `--config` file in front of the
/// user's own flags so that the latter take precedence.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = Some(args.get(i + 1).ok_or("--config needs a path")?.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut subcommand = None;
    let mut injected = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        let (k, v) = (k.trim().replace('_', "-"), v.trim().to_string());
        if k == "subcommand" {
            subcommand = Some(v);
            continue;
        }
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => {
                injected.push(format!("--{k}"));
                injected.push(v);
            }
        }
    }
    let mut out = vec![args.first().cloned().unwrap_or_else(|| "wgslab".into())];
    let rest = &args[1.min(args.len())..];
    let has_sub = rest.first().is_some_and(|a| !a.starts_with('-'));
    if has_sub {
        out.push(rest[0].clone());
        out.extend(injected);
        out.extend(rest[1..].iter().cloned());
    } else {
        out.push(subcommand.ok_or("no subcommand given on the command line or in the config")?);
        out.extend(injected);
        out.extend(rest.iter().cloned());
    }
    Ok(out)
}

fn worker_count(flag: Option<usize>) -> Result<usize, String> {
    if let Some(n) = flag {
        return if n == 0 { Err("--workers must be positive".into()) } else { Ok(n) };
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<String> = argv.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            if code == 0 {
                print!("{e}");
            } else {
                eprint!("{}", e.render());
            }
            return code;
        }
    };
    let workers = match worker_count(cli.command.exec().workers) {
        Ok(n) => n,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    let started = Instant::now();
    let result = pool.install(|| commands::execute(&cli.command));
    let wall = started.elapsed().as_secs_f64();
    match result {
        Ok(out) => {
            println!("{}", out.summary);
            let exec = cli.command.exec();
            if !exec.no_write {
                let mut config = serde_json::to_value(&cli.command).expect("serializable config");
                if let Some(obj) = config.as_object_mut() {
                    obj.insert("workers_resolved".into(), workers.into());
                }
                match write_artifacts(&exec.outdir, cli.command.name(), &out.table, config, &out.summary, wall) {
                    Ok(a) => eprintln!("wrote {} and {}", a.csv.display(), a.json.display()),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return exit_code(&e);
                    }
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
