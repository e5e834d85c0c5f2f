use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use famalg::commands::{run_commands, run_workspace, CommandRequest, RunReport};
use famalg::workspace::Workspace;
use famalg::Scalar;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Out {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Validate,
    Construct,
    Cohomology,
    Deform,
    Search,
}

/// Exact checks of semigroup-indexed operator families.
///
/// Without --cmd, runs the commands listed in the workspace file.
/// Exit status: 0 when every verdict passes, 1 when one fails, 2 on a usage or parse error.
#[derive(Debug, Parser)]
#[command(name = "famalg", version)]
struct Cli {
    #[arg(long)]
    workspace: PathBuf,
    #[arg(long, value_enum)]
    cmd: Option<Cmd>,
    #[arg(long)]
    object: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    out: Out,
    /// Constructor recipe, for --cmd construct.
    #[arg(long)]
    recipe: Option<String>,
    /// Comma-separated object names passed to the recipe.
    #[arg(long, value_delimiter = ',')]
    args: Vec<String>,
    /// Name for the constructed object.
    #[arg(long)]
    name: Option<String>,
    /// Search target: a family kind, aybf1, aybf2 or aybf2_skew.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    semigroup: Option<String>,
    #[arg(long)]
    algebra: Option<String>,
    #[arg(long)]
    bimodule: Option<String>,
    #[arg(long)]
    cocycle: Option<String>,
    /// Comma-separated coefficient set, e.g. -1,0,1/2.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<String>>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long)]
    max_results: Option<usize>,
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long)]
    nil_bound: Option<usize>,
}

fn scalar(s: &str) -> anyhow::Result<Scalar> {
    s.trim().parse().map_err(|e| anyhow::anyhow!("bad rational '{s}': {e}"))
}

fn request(cli: &Cli, cmd: Cmd) -> anyhow::Result<CommandRequest> {
    let cmd = match cmd {
        Cmd::Validate => "validate",
        Cmd::Construct => "construct",
        Cmd::Cohomology => "cohomology",
        Cmd::Deform => "deform",
        Cmd::Search => "search",
    };
    Ok(CommandRequest {
        cmd: cmd.to_string(),
        object: cli.object.clone(),
        recipe: cli.recipe.clone(),
        args: cli.args.clone(),
        name: cli.name.clone(),
        n_max: cli.n_max,
        order: cli.order,
        seed: cli.seed,
        target: cli.target.clone(),
        semigroup: cli.semigroup.clone(),
        algebra: cli.algebra.clone(),
        bimodule: cli.bimodule.clone(),
        cocycle: cli.cocycle.clone(),
        coeffs: cli.coeffs.as_ref().map(|cs| cs.iter().map(|c| scalar(c)).collect()).transpose()?,
        lambda: cli.lambda.as_deref().map(scalar).transpose()?,
        max_results: cli.max_results,
        bound: cli.bound,
        nil_bound: cli.nil_bound,
    })
}

fn run(cli: &Cli) -> anyhow::Result<RunReport> {
    let mut ws = Workspace::from_path(&cli.workspace)?;
    Ok(match cli.cmd {
        Some(cmd) => run_commands(&mut ws, &[request(cli, cmd)?])?,
        None => run_workspace(&mut ws)?,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.out {
                Out::Json => println!("{}", report.to_json()),
                Out::Text => print!("{}", report.to_text()),
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("famalg: {e:#}");
            ExitCode::from(2)
        }
    }
}
