//! `degenlog`: run scenarios, compute eigenvalues and characteristic values,
//! evaluate hypothesis checks and run the acceptance suites.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use degenlog::evolve::run;
use degenlog::geometry::{DomainSpec, Point, SetShape};
use degenlog::grid::Grid;
use degenlog::io::{
    emit_scenario, emit_trajectory_csv, encode_pgm, parse_scenario_with_overrides, parse_shape, snapshot_sidecar,
    Pgm,
};
use degenlog::scenarios::{cross_check, predict, registry, Prediction, Scenario};
use degenlog::spectral::{
    default_deltas, lambda0_of_set, principal_eigenpair, second_eigenvalue, DEFAULT_EIGEN_TOL, DEFAULT_LAMBDA0_CAP,
};
use degenlog::suite::{jobs_from_env, run_suite, SuiteName, SuiteOptions};

#[derive(Parser)]
#[command(name = "degenlog", version, about = "Degenerate logistic equations with moving vanishing sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write its trajectory and snapshots.
    Run {
        /// Registry label or scenario file.
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        /// Override a scenario key, e.g. `--set equation.lambda=30`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Principal and second Dirichlet eigenvalues of a shape.
    Eig {
        /// Shape in the scenario-file syntax; the whole domain when omitted.
        #[arg(long)]
        shape: Option<String>,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, value_enum, default_value_t = DomainArg::Square)]
        domain: DomainArg,
    },
    /// Characteristic value of a set from shrinking neighborhoods.
    Lambda0 {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = DEFAULT_LAMBDA0_CAP)]
        cap: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, value_enum, default_value_t = DomainArg::Square)]
        domain: DomainArg,
    },
    /// Evaluate every hypothesis check on a scenario.
    Predict {
        scenario: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Compare the prediction with a simulation.
    Crosscheck {
        scenario: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run an acceptance suite: paper-examples, properties or all.
    Suite {
        name: String,
        /// Directory for `report.txt` and `report.csv`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads; DEGENLOG_JOBS takes precedence.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    /// The unit square.
    Square,
    /// The unit disc centered at the origin.
    Disc,
    /// The unit interval.
    Interval,
}

impl DomainArg {
    fn spec(self) -> DomainSpec {
        match self {
            DomainArg::Square => DomainSpec::unit_square(),
            DomainArg::Disc => DomainSpec::Disc {
                center: Point::new(0.0, 0.0),
                radius: 1.0,
            },
            DomainArg::Interval => DomainSpec::Interval { lo: 0.0, hi: 1.0 },
        }
    }
}

/// A scenario from a file when the path exists, otherwise from the registry.
fn load_scenario(reference: &str, overrides: &[String]) -> Result<Scenario> {
    let path = Path::new(reference);
    let src = if path.is_file() {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    } else {
        let s = registry::lookup(reference).ok_or_else(|| {
            anyhow!(
                "'{reference}' is neither a file nor a registry label (known: {})",
                registry::LABELS.join(", ")
            )
        })?;
        if overrides.is_empty() {
            return Ok(s);
        }
        emit_scenario(&s)
    };
    parse_scenario_with_overrides(&src, overrides).with_context(|| format!("scenario {reference}"))
}

fn print_prediction(p: &Prediction) {
    for c in &p.checks {
        let mark = if c.hypotheses_hold { "fires" } else { "silent" };
        println!(
            "{:<20} {:<7} {:<13} {}",
            c.theorem.label(),
            mark,
            c.predicted.label(),
            c.details_text()
        );
        if !c.note.is_empty() {
            println!("{:<20} {}", "", c.note);
        }
    }
    match p.verdict() {
        Some(v) => println!("prediction: {}", v.label()),
        None => println!("prediction: none (no criterion applies)"),
    }
}

fn cmd_run(reference: &str, out: &Path, overrides: &[String]) -> Result<()> {
    let s = load_scenario(reference, overrides)?;
    let tr = run(&s).with_context(|| format!("running {}", s.label))?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("scenario.toml"), emit_scenario(&s))?;
    let csv_path = out.join("trajectory.csv");
    let file = fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    emit_trajectory_csv(&tr, std::io::BufWriter::new(file)).with_context(|| format!("writing {}", csv_path.display()))?;
    let display_max = s
        .outputs
        .display_max
        .unwrap_or_else(|| tr.snapshots.iter().map(|(_, f)| f.sup_norm()).fold(0.0, f64::max));
    for (k, (t, field)) in tr.snapshots.iter().enumerate() {
        let stem = format!("snapshot_{k:03}");
        fs::write(out.join(format!("{stem}.pgm")), encode_pgm(&Pgm::from_field(field, display_max)))?;
        fs::write(out.join(format!("{stem}.scale.txt")), snapshot_sidecar(*t, display_max))?;
    }
    println!(
        "{}: {} records, final sup-norm {:.6e}{}",
        s.label,
        tr.len(),
        tr.sup_norms.last().copied().unwrap_or(0.0),
        tr.cap_hit.map(|t| format!(", growth cap hit at t = {t}")).unwrap_or_default()
    );
    Ok(())
}

fn shape_grid(shape: Option<&str>, n: usize, domain: DomainArg) -> Result<(Grid, SetShape)> {
    let grid = Grid::new(domain.spec(), n)?;
    let shape = match shape {
        Some(text) => parse_shape(text).with_context(|| format!("shape '{text}'"))?,
        None => SetShape::Empty,
    };
    Ok((grid, shape))
}

fn cmd_eig(shape: Option<&str>, n: usize, domain: DomainArg) -> Result<()> {
    let (grid, shape) = shape_grid(shape, n, domain)?;
    let mask = if shape == SetShape::Empty {
        grid.mask.clone()
    } else {
        grid.mask_from_shape(&shape)
    };
    let pair = principal_eigenpair(&grid, &mask, DEFAULT_EIGEN_TOL)?;
    let second = second_eigenvalue(&grid, &mask, DEFAULT_EIGEN_TOL)?;
    println!("nodes    {}", mask.count());
    println!("lambda1  {:.10}", pair.value);
    println!("lambda2  {:.10}", second);
    Ok(())
}

fn cmd_lambda0(shape: &str, cap: f64, n: usize, domain: DomainArg) -> Result<()> {
    let (grid, shape) = shape_grid(Some(shape), n, domain)?;
    let est = lambda0_of_set(&grid, &shape, &default_deltas(&grid), cap)?;
    for (d, v) in est.deltas.iter().zip(&est.values) {
        println!("delta {d:.6e}  lambda1 {v:.6e}");
    }
    println!("lambda0  {:?}", est.verdict);
    Ok(())
}

fn cmd_suite(name: &str, out: &Path, jobs: Option<usize>) -> Result<ExitCode> {
    let suite: SuiteName = name.parse()?;
    let report = run_suite(suite, &SuiteOptions { jobs: jobs_from_env(jobs)? })?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let text = report.render_text();
    fs::write(out.join("report.txt"), &text)?;
    fs::write(out.join("report.csv"), report.render_csv())?;
    print!("{text}");
    Ok(ExitCode::from(report.exit_code()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            out,
            overrides,
        } => cmd_run(&scenario, &out, &overrides).map(|_| ExitCode::SUCCESS),
        Command::Eig { shape, n, domain } => cmd_eig(shape.as_deref(), n, domain).map(|_| ExitCode::SUCCESS),
        Command::Lambda0 { shape, cap, n, domain } => cmd_lambda0(&shape, cap, n, domain).map(|_| ExitCode::SUCCESS),
        Command::Predict { scenario, overrides } => load_scenario(&scenario, &overrides)
            .and_then(|s| Ok(predict(&s)?))
            .map(|p| {
                print_prediction(&p);
                ExitCode::SUCCESS
            }),
        Command::Crosscheck { scenario, overrides } => {
            load_scenario(&scenario, &overrides).and_then(|s| {
                let r = cross_check(&s)?;
                print_prediction(&r.prediction);
                println!("observed:   {} ({})", r.verdict.kind.label(), r.verdict.reason);
                println!("status:     {}", r.status);
                if r.status == degenlog::scenarios::Status::Violation {
                    bail!("{}: simulation contradicts the prediction", r.label);
                }
                Ok(ExitCode::SUCCESS)
            })
        }
        Command::Suite { name, out, jobs } => cmd_suite(&name, &out, jobs),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
