use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use coalition_core::generators::{GameSpec, GENERATOR_NAMES};
use coalition_core::io::{game_to_json, write_text_file};
use coalition_core::report::{self, AnalysisRequest, Outputs, Source, EXAMPLES};
use coalition_core::{Concept, GameError, Settings};

const THREADS_ENV: &str = "COALITION_CORE_THREADS";

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CAP: u8 = 4;
const EXIT_MISMATCH: u8 = 5;

/// Cooperative characteristic functions and cores of finite normal-form games.
#[derive(Debug, Parser)]
#[command(name = "coalition-core", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute characteristic functions, cores, equilibria and certificates.
    Analyze(AnalyzeArgs),
    /// Run a worked example end to end and compare with known values.
    Reproduce(ReproduceArgs),
    /// Check the separable-game hypotheses that guarantee a non-empty core.
    Certify(CertifyArgs),
    /// Write a generated game in the game JSON format.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Game JSON file.
    #[arg(conflicts_with = "generator")]
    file: Option<PathBuf>,
    /// Built-in generator.
    #[arg(long = "gen", value_name = "ID", value_parser = clap::builder::PossibleValuesParser::new(GENERATOR_NAMES))]
    generator: Option<String>,
    /// Grid points per player (odd for the worked examples).
    #[arg(long, value_name = "POINTS")]
    grid: Option<usize>,
    /// Number of players for status and random generators.
    #[arg(long, value_name = "PLAYERS")]
    n: Option<usize>,
    /// Seed for random generators.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Strategy counts per player for random generators.
    #[arg(long, value_delimiter = ',', value_name = "M1,M2,..")]
    sizes: Option<Vec<usize>>,
}

impl SourceArgs {
    fn source(&self) -> Result<Source, Failure> {
        match (&self.file, &self.generator) {
            (Some(path), None) => Ok(Source::File(path.clone())),
            (None, Some(id)) => {
                let grid = self.grid.unwrap_or(default_grid(id));
                Ok(Source::Generator(GameSpec::from_parts(
                    id,
                    grid,
                    self.n,
                    self.seed,
                    self.sizes.clone(),
                )?))
            }
            _ => Err(Failure::Usage("give either a game file or --gen <ID>".into())),
        }
    }
}

fn default_grid(id: &str) -> usize {
    match id {
        "gamma1" | "gamma2" | "gamma4" => 101,
        "status" => 5,
        _ => 3,
    }
}

#[derive(Debug, Args)]
struct SettingsArgs {
    /// Tolerance for every argmax and core comparison.
    #[arg(long, default_value_t = coalition_core::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Largest number of strategy profiles to enumerate.
    #[arg(long, value_name = "COUNT")]
    max_profiles: Option<u64>,
}

impl SettingsArgs {
    fn settings(&self) -> Settings {
        let mut s = Settings::default().with_epsilon(self.epsilon);
        if let Some(m) = self.max_profiles {
            s.max_profiles = m;
        }
        s
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Characteristic functions to compute.
    #[arg(long = "fn", value_delimiter = ',', value_name = "LIST")]
    functions: Vec<Concept>,
    /// Decide core emptiness for each requested function.
    #[arg(long)]
    core: bool,
    /// List profiles whose payoffs lie in the generalised leader core.
    #[arg(long)]
    profile_core: bool,
    /// Include the separable-game certificate.
    #[arg(long)]
    certificate: bool,
    /// List pure Nash equilibria.
    #[arg(long)]
    nash: bool,
    /// List socially optimal profiles.
    #[arg(long)]
    social_optima: bool,
    /// Use lambda-gen (with a warning) when lambda is undefined.
    #[arg(long)]
    allow_gen_fallback: bool,
    #[command(flatten)]
    settings: SettingsArgs,
    /// Report path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXAMPLES))]
    example: String,
    #[arg(long, value_name = "POINTS")]
    grid: Option<usize>,
    /// Players in the status game.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Print the JSON table instead of text.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    settings: SettingsArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    settings: SettingsArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Game(GameError),
    Mismatch,
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        Failure::Game(e)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => Ok(write_text_file(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze(a) => {
            let outputs = Outputs {
                core: a.core,
                profile_core: a.profile_core,
                certificate: a.certificate,
                nash: a.nash,
                social_optima: a.social_optima,
            };
            let request = AnalysisRequest {
                source: a.source.source()?,
                functions: a.functions,
                outputs,
                settings: a.settings.settings(),
                allow_gen_fallback: a.allow_gen_fallback,
            };
            if let Err(GameError::InvalidSettings(msg)) = request.validate() {
                return Err(Failure::Usage(msg));
            }
            let value = report::analyze(&request)?;
            emit(a.out.as_ref(), &report::render(&value))
        }
        Command::Reproduce(r) => {
            let grid = r.grid.unwrap_or(default_grid(&r.example));
            let rep = report::reproduce(&r.example, grid, r.n, &r.settings.settings())?;
            let text = if r.json {
                report::render(&rep.to_json())
            } else {
                rep.table()
            };
            emit(r.out.as_ref(), &text)?;
            if rep.pass() {
                Ok(())
            } else {
                Err(Failure::Mismatch)
            }
        }
        Command::Certify(c) => {
            let source = c.source.source()?;
            let game = source.load()?;
            let value = report::certify(&game, &source, &c.settings.settings())?;
            emit(c.out.as_ref(), &report::render(&value))
        }
        Command::Generate(g) => {
            let source = g.source.source()?;
            let game = source.load()?;
            let mut text = game_to_json(&game);
            text.push('\n');
            emit(g.out.as_ref(), &text)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            let _ = Cli::command().error(clap::error::ErrorKind::ArgumentConflict, msg).print();
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Mismatch) => {
            eprintln!("error: reproduction does not match the expected values");
            ExitCode::from(EXIT_MISMATCH)
        }
        Err(Failure::Game(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource_limit() { EXIT_CAP } else { EXIT_INPUT })
        }
    }
}
