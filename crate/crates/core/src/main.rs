use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fairpid::dist::{JointDist, Units, Var};
use fairpid::ingest::{ingest_csv, CsvColumns};
use fairpid::pid::SolverConfig;
use fairpid::report::{
    error_exit_code, exit, run_audit, run_blackwell, run_sweep, sweep_exit_code, AuditReport, Format, ReportOptions,
};
use fairpid::scenario::{generate_scenario, load_dist_json, DistFile, ScenarioKind, ScenarioSpec};
use fairpid::{Error, Result};

#[derive(Parser)]
#[command(name = "fairpid", version, about = "Decompose group-fairness gaps of (Z, Yhat, Y) distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit a CSV of records or a JSON distribution file.
    Audit {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Generate a named scenario and audit it.
    Scenario {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Print the generated distribution instead of auditing it.
        #[arg(long)]
        emit_dist: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Audit every point of a sweep scenario and write a CSV trajectory.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check whether one source's channel from Z is Blackwell sufficient
    /// for the other's.
    Blackwell {
        #[command(flatten)]
        input: InputArgs,
        /// Generate the distribution from a scenario instead of --input.
        #[arg(long, conflicts_with = "input")]
        scenario: Option<String>,
        /// Candidate sufficient variable.
        #[arg(long, value_enum)]
        candidate: Candidate,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// CSV file of records, or a `.json` distribution file.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    z_col: Option<String>,
    #[arg(long)]
    y_col: Option<String>,
    /// Omit for dataset-only mode.
    #[arg(long)]
    yhat_col: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    smoothing: f64,
}

#[derive(Args)]
struct ScenarioArgs {
    /// example1..example4, motivational, markov_sweep, sp_zero_family, custom
    kind: String,
    /// Scenario parameter as NAME=VALUE; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Distribution file for the custom kind.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = SolverConfig::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iters)]
    max_iters: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long, value_enum, default_value_t = UnitsArg::Bits)]
    units: UnitsArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitsArg {
    Bits,
    Nats,
}

#[derive(Clone, Copy, ValueEnum)]
enum Candidate {
    Yhat,
    Y,
}

impl CommonArgs {
    fn solver(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            tol: self.tol,
            max_iters: self.max_iters,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }

    fn units(&self) -> Units {
        match self.units {
            UnitsArg::Bits => Units::Bits,
            UnitsArg::Nats => Units::Nats,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::SPEC as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            let code = error_exit_code(&err);
            let diag = serde_json::json!({
                "error": { "code": code, "kind": error_kind(&err), "message": err.to_string() }
            });
            eprintln!("{diag}");
            ExitCode::from(code as u8)
        }
    }
}

fn error_kind(err: &Error) -> &'static str {
    match error_exit_code(err) {
        exit::INGESTION => "ingestion",
        exit::SPEC => "spec",
        _ => "io",
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Audit { input, common } => {
            let cfg = common.solver()?;
            let (dist, opts) = load_input(&input, common.units())?;
            let report = run_audit(&dist, &cfg, &opts)?;
            emit(&common.out, &report.render(common.format()))?;
            Ok(report.exit_code())
        }
        Command::Scenario {
            scenario,
            emit_dist,
            common,
        } => {
            let cfg = common.solver()?;
            let spec = scenario_spec(&scenario)?;
            let points = generate_scenario(&spec)?;
            if emit_dist {
                let files: Vec<DistFile> = points.iter().map(|p| DistFile::from_dist(&p.dist)).collect();
                let mut json = if spec.kind.is_sweep() {
                    serde_json::to_string_pretty(&files)?
                } else {
                    serde_json::to_string_pretty(&files[0])?
                };
                json.push('\n');
                emit(&common.out, &json)?;
                return Ok(exit::SUCCESS);
            }
            let reports = points
                .iter()
                .map(|p| {
                    let source = std::iter::once(format!("scenario {}", spec.kind))
                        .chain(p.params.iter().map(|(k, v)| format!("{k}={v}")))
                        .collect::<Vec<_>>()
                        .join(" ");
                    let opts = ReportOptions {
                        units: common.units(),
                        source,
                        ..ReportOptions::default()
                    };
                    run_audit(&p.dist, &cfg, &opts)
                })
                .collect::<Result<Vec<AuditReport>>>()?;
            let text = match (spec.kind.is_sweep(), common.format()) {
                (false, f) => reports[0].render(f),
                (true, Format::Json) => {
                    let mut s = serde_json::to_string_pretty(&reports)?;
                    s.push('\n');
                    s
                }
                (true, Format::Text) => reports.iter().map(AuditReport::to_text).collect::<Vec<_>>().join("\n"),
            };
            emit(&common.out, &text)?;
            let codes: Vec<i32> = reports.iter().map(AuditReport::exit_code).collect();
            Ok([exit::NON_CONVERGENCE, exit::THEOREM_BREACH]
                .into_iter()
                .find(|c| codes.contains(c))
                .unwrap_or(exit::SUCCESS))
        }
        Command::Sweep { scenario, common } => {
            let cfg = common.solver()?;
            let spec = scenario_spec(&scenario)?;
            let rows = match &common.out {
                Some(path) => {
                    // Buffered so a failed sweep leaves no partial file.
                    let mut buf = Vec::new();
                    let rows = run_sweep(&spec, &cfg, common.units(), &mut buf)?;
                    write_file(path, &buf)?;
                    rows
                }
                None => run_sweep(&spec, &cfg, common.units(), io::stdout().lock())?,
            };
            Ok(sweep_exit_code(&rows))
        }
        Command::Blackwell {
            input,
            scenario,
            candidate,
            common,
        } => {
            let cfg = common.solver()?;
            let (dist, source) = match scenario {
                Some(kind) => {
                    let spec = ScenarioSpec::new(kind.parse()?);
                    if spec.kind.is_sweep() {
                        return Err(Error::Scenario(format!("{} yields several distributions", spec.kind)));
                    }
                    let dist = generate_scenario(&spec)?.remove(0).dist;
                    (dist, format!("scenario {kind}"))
                }
                None => {
                    let (dist, opts) = load_input(&input, common.units())?;
                    (dist, opts.source)
                }
            };
            let var = match candidate {
                Candidate::Yhat => Var::Yhat,
                Candidate::Y => Var::Y,
            };
            let report = run_blackwell(&dist, var, &cfg, common.units(), &source)?;
            emit(&common.out, &report.render(common.format()))?;
            Ok(if report.converged { exit::SUCCESS } else { exit::NON_CONVERGENCE })
        }
    }
}

fn scenario_spec(args: &ScenarioArgs) -> Result<ScenarioSpec> {
    let kind: ScenarioKind = args.kind.parse()?;
    let mut spec = match (&args.input, kind) {
        (Some(path), ScenarioKind::Custom) => ScenarioSpec::custom(path),
        (Some(_), _) => return Err(Error::Scenario("--input is only used by the custom kind".into())),
        (None, _) => ScenarioSpec::new(kind),
    };
    spec.seed = args.seed;
    for p in &args.params {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| Error::Scenario(format!("parameter '{p}' is not NAME=VALUE")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Scenario(format!("parameter '{name}' has non-numeric value '{value}'")))?;
        spec = spec.with_param(name, value);
    }
    spec.validate()?;
    Ok(spec)
}

fn load_input(args: &InputArgs, units: Units) -> Result<(JointDist, ReportOptions)> {
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--input is required".into()))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let dist = load_dist_json(path)?;
        let opts = ReportOptions {
            units,
            source: path.display().to_string(),
            ..ReportOptions::default()
        };
        return Ok((dist, opts));
    }
    let need = |v: &Option<String>, flag: &str| {
        v.clone()
            .ok_or_else(|| Error::InvalidArgument(format!("{flag} is required for CSV input")))
    };
    let columns = CsvColumns {
        z: need(&args.z_col, "--z-col")?,
        y: need(&args.y_col, "--y-col")?,
        yhat: args.yhat_col.clone(),
    };
    let got = ingest_csv(path, &columns, args.smoothing)?;
    for w in &got.warnings {
        eprintln!("warning: {w}");
    }
    let opts = ReportOptions {
        units,
        source: path.display().to_string(),
        records: Some(got.records),
        smoothing: args.smoothing,
        dataset_only: got.dataset_only,
        warnings: got.warnings,
    };
    Ok((got.dist, opts))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text.as_bytes()),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(bytes)?;
    w.flush()?;
    Ok(())
}
