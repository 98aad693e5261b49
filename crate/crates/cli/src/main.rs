use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use proxlab::scenario::{self, *};
use proxlab::{run_commands, run_scenario, CliError, RunOutcome, EXIT_INPUT};

#[derive(Parser)]
#[command(
    name = "proxlab",
    version,
    about = "Proximality certificates and simultaneous proximalization"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Sampling resolution of every certification.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Search budget (words tried by searches).
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Runs every command of a scenario file.
    Run {
        scenario: PathBuf,
    },
    /// Validates a scenario file without running it.
    Check {
        scenario: PathBuf,
    },
    AnalyzeMatrix(AnalyzeMatrixArgs),
    AnalyzeIsometry(AnalyzeIsometryArgs),
    EstimateDelta(EstimateDeltaArgs),
    BuildAms(BuildAmsArgs),
    Proximalize(ProximalizeArgs),
    VerifyBounds(VerifyBoundsArgs),
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SpecArg {
    /// Scenario file providing the semigroup.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

/// Projections, proximal data and an optional certificate of a matrix.
#[derive(Args)]
struct AnalyzeMatrixArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Rows separated by `;`, entries by `,`: `2,0;0,1`.
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long)]
    rep: Option<usize>,
    #[arg(long)]
    word: Option<String>,
    #[arg(long)]
    power: Option<u64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Tree,
    Plane,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Rank of the free group (tree).
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Base of the visual metric.
    #[arg(long)]
    a: Option<f64>,
}

impl ModelArgs {
    fn def(&self) -> Option<ModelDef> {
        self.model.map(|m| match m {
            ModelArg::Tree => ModelDef::Tree {
                rank: self.rank,
                a: self.a.unwrap_or(2.0),
            },
            ModelArg::Plane => ModelDef::Plane {
                a: self.a.unwrap_or(std::f64::consts::E),
            },
        })
    }
}

/// Classification, stable length and length gap of an isometry.
#[derive(Args)]
struct AnalyzeIsometryArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    model: ModelArgs,
    /// A reduced word (`abA`) on the tree, `a,b,c,d` on the plane.
    #[arg(long)]
    isometry: Option<String>,
    #[arg(long)]
    rep: Option<usize>,
    #[arg(long)]
    word: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
}

/// Four-point delta on random samples.
#[derive(Args)]
struct EstimateDeltaArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    samples: Option<usize>,
}

/// Builds the set S.
#[derive(Args)]
struct BuildAmsArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    n_scan_max: Option<usize>,
}

/// Builds S, then proximalizes explicit or random words.
#[derive(Args)]
struct ProximalizeArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Comma-separated words; random words when absent.
    #[arg(long, value_delimiter = ',')]
    words: Option<Vec<String>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
}

/// Builds S, then measures the spectral and length discrepancies.
#[derive(Args)]
struct VerifyBoundsArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
}

/// Certification of the powers of a word.
#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    rep: Option<usize>,
    #[arg(long)]
    word: Option<String>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
}

fn parse_matrix(s: &str) -> Result<MatrixDef, CliError> {
    let rows = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Input(format!("matrix entry `{x}`: {e}")))
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>, _>>()?;
    Ok(MatrixDef {
        dim: rows.len(),
        rows,
    })
}

fn parse_isometry(s: &str) -> Result<IsometryDef, CliError> {
    if !s.contains(',') {
        return Ok(IsometryDef::Word(s.to_string()));
    }
    let v = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Input(format!("isometry entry `{x}`: {e}")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    match v.as_slice() {
        [a, b, c, d] => Ok(IsometryDef::Mat {
            mat: [[*a, *b], [*c, *d]],
        }),
        _ => Err(CliError::Input(format!(
            "a plane isometry has 4 entries, got {}",
            v.len()
        ))),
    }
}

fn load_spec(arg: &SpecArg) -> Result<(Option<proxlab_core::ams::SemigroupSpec>, u64), CliError> {
    match &arg.scenario {
        Some(p) => {
            let (sc, spec) = scenario::load(p)?;
            Ok((Some(spec), sc.seed))
        }
        None => Ok((None, 0)),
    }
}

fn single(cli: &Cli) -> Result<RunOutcome, CliError> {
    let over = Overrides {
        resolution: cli.resolution,
        budget: cli.budget,
        seed: cli.seed,
    };
    let (spec_arg, cmd) = match &cli.command {
        Cmd::AnalyzeMatrix(a) => (
            Some(&a.spec),
            CommandDef::AnalyzeMatrix(AnalyzeMatrix {
                matrix: a.matrix.as_deref().map(parse_matrix).transpose()?,
                rep: a.rep,
                word: a.word.clone(),
                power: a.power,
                r: a.r,
                eps: a.eps,
                ..Default::default()
            }),
        ),
        Cmd::AnalyzeIsometry(a) => (
            Some(&a.spec),
            CommandDef::AnalyzeIsometry(AnalyzeIsometry {
                model: a.model.def(),
                isometry: a.isometry.as_deref().map(parse_isometry).transpose()?,
                rep: a.rep,
                word: a.word.clone(),
                n_max: a.n_max,
                r: a.r,
                eps: a.eps,
                ..Default::default()
            }),
        ),
        Cmd::EstimateDelta(a) => (
            None,
            CommandDef::EstimateDelta(EstimateDelta {
                model: a.model.def(),
                samples: a.samples,
                ..Default::default()
            }),
        ),
        Cmd::BuildAms(a) => (
            Some(&a.spec),
            CommandDef::BuildAms(BuildAms {
                r: a.r,
                eps: a.eps,
                n_scan_max: a.n_scan_max,
                ..Default::default()
            }),
        ),
        Cmd::Proximalize(a) => (
            Some(&a.spec),
            CommandDef::Proximalize(Proximalize {
                words: a.words.clone(),
                samples: a.samples,
                max_len: a.max_len,
                ..Default::default()
            }),
        ),
        Cmd::VerifyBounds(a) => (
            Some(&a.spec),
            CommandDef::VerifyBounds(VerifyBounds {
                samples: a.samples,
                max_len: a.max_len,
                n_max: a.n_max,
                ..Default::default()
            }),
        ),
        Cmd::Sweep(a) => (
            Some(&a.spec),
            CommandDef::Sweep(Sweep {
                rep: a.rep,
                word: a.word.clone(),
                n_min: a.n_min,
                n_max: a.n_max,
                r: a.r,
                eps: a.eps,
                ..Default::default()
            }),
        ),
        Cmd::Run { .. } | Cmd::Check { .. } => unreachable!("handled by main"),
    };
    let (spec, seed) = match spec_arg {
        Some(s) => load_spec(s)?,
        None => (None, 0),
    };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    run_commands(spec, seed, vec![cmd], &dir, over)
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("PROXLAB_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            CliError::Input(format!(
                "PROXLAB_THREADS must be a positive integer, got `{v}`"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn report(outcome: &RunOutcome) {
    for (rep, path) in outcome.reports.iter().zip(&outcome.files) {
        let status = if rep.passed() { "ok" } else { "FAILED" };
        println!("{:<18} {:<6} {}", rep.command, status, path.display());
    }
    println!("summary: {}", outcome.dir.join("summary.json").display());
}

fn check(path: &Path) -> Result<(), CliError> {
    let (sc, spec) = scenario::load(path)?;
    println!(
        "{}: {} generators, {} representations, {} commands",
        path.display(),
        spec.rank(),
        spec.representations().len(),
        sc.commands.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Cmd::Check { scenario } => check(scenario).map(|_| 0),
        Cmd::Run { scenario } => {
            let over = Overrides {
                resolution: cli.resolution,
                budget: cli.budget,
                seed: cli.seed,
            };
            run_scenario(scenario, cli.out.as_deref(), over).map(|o| {
                report(&o);
                o.exit_code()
            })
        }
        _ => single(&cli).map(|o| {
            report(&o);
            o.exit_code()
        }),
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
