//! Command-line surface: `sweep` emits CSV datasets over parameter grids,
//! `verify` runs the cross-verification suite, `state` prints the evolved
//! density matrix of a configuration.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qfim_lab::models::ModelConfig;
use qfim_lab::sweep::{self, SweepSpec};
use qfim_lab::verify::{self, Level};
use qfim_lab::witnesses::Quantity;

#[derive(Parser)]
#[command(
    name = "qfim-lab",
    version,
    about = "Quantum Fisher information, Cramér–Rao bounds and non-Markovianity \
             witnesses for a dephasing two-qubit system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate quantities over a parameter grid and emit CSV.
    Sweep(SweepArgs),
    /// Run the cross-verification suite.
    Verify(VerifyArgs),
    /// Print the evolved 4x4 density matrix of a configuration.
    State(StateArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Figure preset name (see --list).
    #[arg(long)]
    preset: Option<String>,
    /// Sweep spec as a JSON file; overrides the preset when both are given.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// List available presets and exit.
    #[arg(long)]
    list: bool,

    // Field overrides; flags win over the spec file, which wins over the
    // preset defaults.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    omega1: Option<f64>,
    #[arg(long)]
    omega2: Option<f64>,
    #[arg(long)]
    start: Option<f64>,
    #[arg(long)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Evaluation time for non-time axes.
    #[arg(long)]
    t: Option<f64>,
    /// Comma-separated quantity tags (qfi_p, qfi_r, ip, lqu, fidelity,
    /// coherence, purity, delta_min, trace_distance, delta_*_indep/simul).
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Grid sizing: quick or full.
    #[arg(long, default_value = "quick")]
    level: String,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct StateArgs {
    /// Model configuration JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Evolution time.
    #[arg(long)]
    t: f64,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => run_sweep(args),
        Command::Verify(args) => run_verify(args),
        Command::State(args) => run_state(args),
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn run_sweep(args: SweepArgs) -> ExitCode {
    if args.list {
        for preset in sweep::presets() {
            println!("{:8}  {}", preset.name, preset.comment);
        }
        return ExitCode::SUCCESS;
    }

    let mut spec: Option<SweepSpec> = None;
    if let Some(name) = &args.preset {
        match sweep::preset(name) {
            Ok(p) => spec = Some(p.spec),
            Err(e) => return usage_error(&e.to_string()),
        }
    }
    if let Some(path) = &args.spec {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return usage_error(&format!("reading {}: {e}", path.display())),
        };
        match serde_json::from_str::<SweepSpec>(&text) {
            Ok(s) => spec = Some(s),
            Err(e) => return usage_error(&format!("parsing {}: {e}", path.display())),
        }
    }
    let Some(mut spec) = spec else {
        return usage_error("pass --preset <name> or --spec <file.json> (or --list)");
    };

    if let Some(p) = args.p {
        spec.config.initial.p = p;
    }
    if let Some(r) = args.r {
        spec.config.initial.r = r;
    }
    if let Some(w) = args.omega1 {
        spec.config.omega1 = w;
    }
    if let Some(w) = args.omega2 {
        spec.config.omega2 = w;
    }
    if let Some(v) = args.start {
        spec.start = v;
    }
    if let Some(v) = args.stop {
        spec.stop = v;
    }
    if let Some(v) = args.steps {
        spec.steps = v;
    }
    if let Some(v) = args.t {
        spec.eval_time = v;
    }
    if let Some(tags) = &args.outputs {
        let mut outputs = Vec::with_capacity(tags.len());
        for tag in tags {
            match Quantity::parse(tag) {
                Some(q) => outputs.push(q),
                None => return usage_error(&format!("unknown quantity tag {tag:?}")),
            }
        }
        spec.outputs = outputs;
    }

    if let Err(e) = spec.validate() {
        return usage_error(&e.to_string());
    }
    let result = match sweep::run_sweep(&spec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    for note in &result.notes {
        eprintln!("note: {note}");
    }
    let csv = result.to_csv_string();
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, csv) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(EXIT_FAILURE);
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(csv.as_bytes()).is_err() {
                return ExitCode::from(EXIT_FAILURE);
            }
        }
    }
    ExitCode::SUCCESS
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    let level = match args.level.as_str() {
        "quick" => Level::Quick,
        "full" => Level::Full,
        other => return usage_error(&format!("unknown level {other:?}, expected quick|full")),
    };
    let report = verify::run_suite(level);
    for check in &report.checks {
        let mark = if check.passed { "PASS" } else { "FAIL" };
        println!("[{mark}] {} — {}", check.name, check.detail);
    }
    println!(
        "{}: {}/{} checks passed in {:.2} s",
        report.level,
        report.checks.iter().filter(|c| c.passed).count(),
        report.checks.len(),
        report.elapsed_seconds
    );
    if let Some(path) = &args.json {
        match serde_json::to_string_pretty(&report) {
            Ok(json) => {
                if let Err(e) = fs::write(path, json) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(EXIT_FAILURE);
                }
            }
            Err(e) => {
                eprintln!("error: serializing report: {e}");
                return ExitCode::from(EXIT_FAILURE);
            }
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        if let Some(first) = report.first_failure() {
            eprintln!("first failing check: {} — {}", first.name, first.detail);
        }
        ExitCode::from(EXIT_FAILURE)
    }
}

fn run_state(args: StateArgs) -> ExitCode {
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return usage_error(&format!("reading {}: {e}", args.config.display())),
    };
    let cfg = match ModelConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return usage_error(&format!("parsing {}: {e}", args.config.display())),
    };
    let rho = match qfim_lab::models::evolved_state(args.t, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    let m = rho.matrix();
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| {
                let z = m[(i, j)];
                // Normalize negative zeros so t = 0 phases print cleanly.
                let re = if z.re == 0.0 { 0.0 } else { z.re };
                let im = if z.im == 0.0 { 0.0 } else { z.im };
                if im >= 0.0 {
                    format!("{re}+{im}i")
                } else {
                    format!("{re}-{}i", -im)
                }
            })
            .collect();
        println!("{}", row.join("\t"));
    }
    ExitCode::SUCCESS
}
