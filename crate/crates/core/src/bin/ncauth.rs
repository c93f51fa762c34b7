use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ncauth::attack::DEFAULT_GUARD;
use ncauth::scenario::{
    demo_config, lemma_sweep, run_keygen, run_scenario, to_json, AttackConfig, Overrides, ScenarioConfig,
    SweepConfig, CONFIG_VERSION,
};
use ncauth::Error;

#[derive(Parser)]
#[command(name = "ncauth", version, about = "Attack laboratory for a linear network-coding authentication code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and print the source key and verifier shares.
    Keygen(RunArgs),
    /// Honest run: propagate, verify every edge, decode at every sink.
    Simulate(RunArgs),
    /// Run a scenario whose attack is `forge`.
    Forge(RunArgs),
    /// Run a scenario whose attack is `pollute`.
    Pollute(RunArgs),
    /// Run a scenario whose attack is `recover`.
    Recover(RunArgs),
    /// Sweep parameter ranges and compare predicted, eliminated and brute-force key counts.
    LemmaSweep(SweepArgs),
    /// Pollution on the built-in binary butterfly.
    Demo(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Brute-force candidate limit.
    #[arg(long)]
    guard: Option<u64>,
    /// Allow more messages than the per-key bound M.
    #[arg(long = "unsafe-n-gt-m")]
    unsafe_n_gt_m: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config; without it a small default sweep runs.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn overrides(c: &CommonArgs) -> Overrides {
    Overrides {
        seed: c.seed,
        guard: c.guard,
        unsafe_n_gt_m: c.unsafe_n_gt_m,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Config { field: "--out".into(), message: format!("{}: {e}", path.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(args: &RunArgs) -> Result<(ScenarioConfig, PathBuf), Error> {
    let (mut cfg, base) = ScenarioConfig::load(&args.config)?;
    cfg.apply(&overrides(&args.common));
    Ok((cfg, base))
}

fn scenario(args: &RunArgs, expect: Option<&str>) -> Result<(), Error> {
    let (mut cfg, base) = load(args)?;
    match expect {
        None => cfg.attack = AttackConfig::None,
        Some(kind) if cfg.attack.kind() != kind => {
            return Err(Error::Config {
                field: "attack.kind".into(),
                message: format!("expected `{kind}`, config has `{}`", cfg.attack.kind()),
            })
        }
        Some(_) => {}
    }
    let report = run_scenario(&cfg, &base)?;
    emit(args.common.out.as_deref(), &to_json(&report))
}

fn default_sweep() -> SweepConfig {
    SweepConfig {
        version: CONFIG_VERSION,
        seed: 0,
        q: vec![2, 3],
        l: vec![1, 2],
        k: vec![2, 3],
        m: vec![1, 2],
        coalition: vec![1, 2],
        family: "fanout".into(),
        repetitions: 2,
        guard: DEFAULT_GUARD,
        max_fan_in: None,
        unsafe_n_gt_m: false,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Keygen(args) => {
            let (cfg, base) = load(&args)?;
            emit(args.common.out.as_deref(), &to_json(&run_keygen(&cfg, &base)?))
        }
        Command::Simulate(args) => scenario(&args, None),
        Command::Forge(args) => scenario(&args, Some("forge")),
        Command::Pollute(args) => scenario(&args, Some("pollute")),
        Command::Recover(args) => scenario(&args, Some("recover")),
        Command::LemmaSweep(args) => {
            let mut cfg = match &args.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
                        field: "--config".into(),
                        message: format!("{}: {e}", path.display()),
                    })?;
                    SweepConfig::parse(&text)?
                }
                None => default_sweep(),
            };
            if let Some(seed) = args.common.seed {
                cfg.seed = seed;
            }
            if let Some(guard) = args.common.guard {
                cfg.guard = guard;
            }
            cfg.unsafe_n_gt_m |= args.common.unsafe_n_gt_m;
            let report = lemma_sweep(&cfg);
            let text = match args.format {
                Format::Table => report.to_table(),
                Format::Json => to_json(&report),
            };
            eprintln!("{}", report.summary_line());
            emit(args.common.out.as_deref(), &text)
        }
        Command::Demo(common) => {
            let mut cfg = demo_config();
            cfg.apply(&overrides(&common));
            let report = run_scenario(&cfg, Path::new("."))?;
            emit(common.out.as_deref(), &to_json(&report))
        }
    }
}
