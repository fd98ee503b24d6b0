use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rendezvous_core::agent::{AgentConfig, LlmAgent, OracleClient, PromptMode};
use rendezvous_core::dataset::{
    build_examples, export, record_episode, split_by_seed, DatasetError, DatasetFormat,
    ExportOptions, GameplayLog, TrainingExample,
};
use rendezvous_core::eval::{
    export_trajectories, read_trajectory, render_range_plot, run_campaign, AgentSpec, EvalError,
};
use rendezvous_core::navball::{NavballParams, NavballPilot};
use rendezvous_core::orbital::{BodyConstants, OrbitConstraints, OrbitError, OrbitGenerator};
use rendezvous_core::scenario::{EpisodeConfig, NaivePilot, Pilot, PursuerInit, ScenarioError};
use rendezvous_service::AppState;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Parser)]
#[command(name = "rendezvous", version, about = "Orbital pursuit simulator tooling")]
struct Cli {
    /// Episode config JSON; unspecified fields take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the episode time limit (s).
    #[arg(long, global = true)]
    max_duration: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecordAgent {
    Navball,
    Naive,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalAgent {
    Navball,
    Naive,
    Oracle,
    Mock,
    Llm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    ChatJsonl,
    Alpaca,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Plain,
    Augmented,
    CotFewshot,
}

impl From<Mode> for PromptMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Plain => PromptMode::Plain,
            Mode::Augmented => PromptMode::Augmented,
            Mode::CotFewshot => PromptMode::CotFewShot,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print seeded pursuer orbits as a JSON array of elements.
    GenOrbits {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Fly episodes with a scripted pilot and write one gameplay log per seed.
    Record {
        #[arg(long, value_enum, default_value = "navball")]
        agent: RecordAgent,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Convert gameplay logs into a fine-tuning dataset.
    Dataset {
        /// Log files or directories of `*.json` logs.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "chat-jsonl")]
        format: Format,
        #[arg(long, value_enum, default_value = "augmented")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        window: usize,
        #[arg(long, default_value_t = 1)]
        lookahead: usize,
        #[arg(long)]
        cot: bool,
        #[arg(long)]
        keywords: bool,
        /// Fraction of seeds for the training file; the rest go to a
        /// sibling `.test` file.
        #[arg(long)]
        split: Option<f64>,
    },
    /// Run an evaluation campaign and write the JSON report.
    Eval {
        #[arg(long, value_enum, default_value = "navball")]
        agent: EvalAgent,
        #[arg(long, default_value_t = 10)]
        episodes: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Directory for per-episode trajectory files.
        #[arg(long)]
        trajectories: Option<PathBuf>,
        #[arg(long, default_value = "http://localhost:8000/v1")]
        endpoint: String,
        #[arg(long, default_value = "gpt-3.5-turbo")]
        model: String,
        #[arg(long, value_enum, default_value = "augmented")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        window: usize,
        /// Request timeout (s).
        #[arg(long, default_value_t = 30.0)]
        timeout: f64,
        /// Canned reply for the mock agent.
        #[arg(long, default_value = "")]
        reply: String,
    },
    /// Serve the session API and an optional static front end.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
    /// Plot range over time from trajectory files as SVG.
    Plot {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(cli: &Cli) -> Result<EpisodeConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path).map_err(io_err(path))?)?,
        None => EpisodeConfig::default(),
    };
    if let Some(d) = cli.max_duration {
        config.max_duration = d;
    }
    config.validate()?;
    Ok(config)
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

fn log_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .map_err(io_err(input))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(suffix);
    if let Some(ext) = path.extension() {
        name.push(".");
        name.push(ext);
    }
    path.with_file_name(name)
}

fn gen_orbits(config: &EpisodeConfig, seed: u64, count: usize) -> Result<(), CliError> {
    let constraints = match config.pursuer {
        PursuerInit::Generate(c) => c,
        PursuerInit::Fixed(_) => OrbitConstraints::around(&config.evader_orbit),
    };
    let body: BodyConstants = config.body;
    let mut generator = OrbitGenerator::new(seed);
    let orbits = (0..count)
        .map(|_| generator.next_orbit(&config.evader_orbit, &constraints, &body))
        .collect::<Result<Vec<_>, _>>()?;
    println!("{}", serde_json::to_string_pretty(&orbits)?);
    Ok(())
}

fn record(config: &EpisodeConfig, agent: RecordAgent, seed: u64, count: u64, out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let params = NavballParams::default();
    for s in seed..seed + count {
        let cfg = EpisodeConfig { seed: s, ..config.clone() };
        let (mut pilot, meta): (Box<dyn Pilot>, _) = match agent {
            RecordAgent::Navball => (Box::new(NavballPilot::new(params).map_err(|e| CliError::Usage(e.to_string()))?), json!(params)),
            RecordAgent::Naive => (Box::new(NaivePilot), serde_json::Value::Null),
            RecordAgent::Oracle => {
                let agent = LlmAgent::new(AgentConfig::default(), OracleClient { params }).map_err(CliError::Usage)?;
                (Box::new(agent), json!(params))
            }
        };
        let log = record_episode(&cfg, pilot.as_mut(), meta)?;
        let path = out_dir.join(format!("log_{s}.json"));
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        log.write_json(file)?;
        eprintln!("{}: {} samples", path.display(), log.samples.len());
    }
    Ok(())
}

fn dataset(inputs: &[PathBuf], out: &Path, format: DatasetFormat, opts: ExportOptions, split: Option<f64>) -> Result<(), CliError> {
    let mut examples: Vec<TrainingExample> = Vec::new();
    for path in log_files(inputs)? {
        let log = GameplayLog::read_json(fs::File::open(&path).map_err(io_err(&path))?)?;
        examples.extend(build_examples(&log, &opts)?);
    }
    match split {
        None => {
            write(out, &export(&examples, format)?)?;
            eprintln!("{}: {} records", out.display(), examples.len());
        }
        Some(fraction) => {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(CliError::Usage("--split must lie in [0, 1]".into()));
            }
            let (train, test) = split_by_seed(examples, fraction);
            let test_path = with_suffix(out, ".test");
            write(out, &export(&train, format)?)?;
            write(&test_path, &export(&test, format)?)?;
            eprintln!("{}: {} records, {}: {} records", out.display(), train.len(), test_path.display(), test.len());
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::GenOrbits { seed, count } => gen_orbits(&config, *seed, *count),
        Command::Record { agent, seed, count, out_dir } => record(&config, *agent, *seed, *count, out_dir),
        Command::Dataset { inputs, out, format, mode, window, lookahead, cot, keywords, split } => {
            let opts = ExportOptions {
                mode: (*mode).into(),
                window: *window,
                lookahead: *lookahead,
                cot: *cot,
                keywords: *keywords,
            };
            let format = match format {
                Format::ChatJsonl => DatasetFormat::ChatJsonl,
                Format::Alpaca => DatasetFormat::Alpaca,
            };
            dataset(inputs, out, format, opts, *split)
        }
        Command::Eval { agent, episodes, seed, report, trajectories, endpoint, model, mode, window, timeout, reply } => {
            let agent_config = AgentConfig {
                endpoint: endpoint.clone(),
                model: model.clone(),
                mode: (*mode).into(),
                window: *window,
                timeout: *timeout,
                ..AgentConfig::default()
            };
            let params = NavballParams::default();
            let spec = match agent {
                EvalAgent::Navball => AgentSpec::Navball { params },
                EvalAgent::Naive => AgentSpec::Naive,
                EvalAgent::Oracle => AgentSpec::Oracle { config: agent_config, params },
                EvalAgent::Mock => AgentSpec::Mock { config: agent_config, reply: reply.clone() },
                EvalAgent::Llm => AgentSpec::Llm { config: agent_config },
            };
            let seeds: Vec<u64> = (*seed..seed + episodes).collect();
            let campaign = run_campaign(&spec, &config, &seeds)?;
            println!("{}", campaign.report.to_table());
            if let Some(path) = report {
                write(path, &serde_json::to_string_pretty(&campaign.report)?)?;
            }
            if let Some(dir) = trajectories {
                export_trajectories(&campaign.results, dir)?;
            }
            Ok(())
        }
        Command::Serve { port, static_dir, log_dir } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Usage(e.to_string()))?;
            let addr = std::net::SocketAddr::from(([0, 0, 0, 0], *port));
            eprintln!("listening on {addr}");
            runtime
                .block_on(rendezvous_service::serve(addr, AppState::new(log_dir.clone()), static_dir.clone()))
                .map_err(|e| CliError::Usage(e.to_string()))
        }
        Command::Plot { inputs, out } => {
            let series = inputs
                .iter()
                .map(|p| {
                    let label = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                    Ok((label, read_trajectory(p)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            write(out, &render_range_plot(&series))
        }
    }
}
