use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use netlogic::approximation::Embedding;
use netlogic::cli::{
    execute, CapacityParams, Command, CompileParams, ExperimentConfig, MetaphorParams, Outcome,
    PipelineParams, EXIT_CONFIG_ERROR,
};

#[derive(Debug, Parser)]
#[command(
    name = "netlogic",
    version,
    about = "Predicate-capacity, net-compilation and token-pipeline experiments"
)]
struct Args {
    /// Experiment config (JSON); used when no subcommand is given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed recorded in the run manifest.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Counting predicate vs width-w threshold units, n = w+1 ..= n_max.
    Capacity {
        #[arg(long)]
        w: usize,
        #[arg(long = "n-max")]
        n_max: usize,
        /// Record elapsed seconds per row.
        #[arg(long)]
        timing: bool,
    },
    /// Compile a weights file into per-bit predicates and verify it.
    Compile { weights: PathBuf },
    /// Run the token pipeline described by a pipeline config.
    Pipeline {
        pipeline_config: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Least-squares fit of each target predicate over a basis.
    Metaphor {
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        basis: PathBuf,
        /// Drop the intercept column.
        #[arg(long)]
        linear: bool,
        /// Embed truth values as -1/+1 instead of 0/1.
        #[arg(long)]
        signed: bool,
    },
}

fn resolve(args: Args) -> netlogic::Result<(Command, PathBuf, u64)> {
    let out_flag = args.out;
    let seed_flag = args.seed;
    let (cmd, out, seed) = match (args.command, args.config) {
        (Some(cmd), _) => {
            let cmd = match cmd {
                Cmd::Capacity { w, n_max, timing } => {
                    Command::Capacity(CapacityParams { w, n_max, timing })
                }
                Cmd::Compile { weights } => Command::Compile(CompileParams { weights }),
                Cmd::Pipeline {
                    pipeline_config,
                    steps,
                } => Command::Pipeline(PipelineParams {
                    config: pipeline_config,
                    steps,
                }),
                Cmd::Metaphor {
                    targets,
                    basis,
                    linear,
                    signed,
                } => Command::Metaphor(MetaphorParams {
                    targets,
                    basis,
                    affine: !linear,
                    embedding: if signed {
                        Embedding::PlusMinusOne
                    } else {
                        Embedding::ZeroOne
                    },
                }),
            };
            (
                cmd,
                out_flag.unwrap_or_else(|| PathBuf::from("out")),
                seed_flag.unwrap_or(0),
            )
        }
        (None, Some(path)) => {
            let (cfg, cmd) = ExperimentConfig::load(&path)?;
            (
                cmd,
                out_flag.unwrap_or(cfg.output_dir),
                seed_flag.unwrap_or(cfg.seed),
            )
        }
        (None, None) => {
            return Err(netlogic::Error::Config(
                "give a subcommand or --config <path>".into(),
            ));
        }
    };
    Ok((cmd, out, seed))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = resolve(args).and_then(|(cmd, out, seed)| execute(&cmd, &out, seed));
    match result {
        Ok(outcome) => {
            if let Outcome::Violation(msg) = &outcome {
                eprintln!("prediction violated: {msg}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG_ERROR as u8)
        }
    }
}
