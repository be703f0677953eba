use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nilflux_cli::{parse_config, reproduce, run_job, CliError, Task};

#[derive(Parser)]
#[command(name = "nilflux", version, about = "Exact flux and displacement computations on nilmanifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers and representatives of invariant cohomology.
    Cohomology(JobArgs),
    /// Flux subgroup generators verified from loops, plus membership tests.
    FluxSubgroup(JobArgs),
    /// Flux of a symplectic field or of an affine map.
    Flux(JobArgs),
    CheckSymplectic(JobArgs),
    CheckLagrangian(JobArgs),
    /// Whether a map or field descends to the quotient.
    CheckDescent(JobArgs),
    /// Whether a map displaces a region of the quotient from itself.
    DisplaceQuotient(JobArgs),
    /// Whether a commutator with a partially defined map displaces V0.
    DisplaceCommutator(JobArgs),
    /// A single exterior calculus operation.
    ExteriorEval(JobArgs),
    /// Rerun a stored computation and compare with its expected output.
    Reproduce {
        /// Case identifier, or `all`.
        case: String,
        /// Print the freshly computed bundle instead of comparing.
        #[arg(long)]
        show: bool,
    },
}

#[derive(Args)]
struct JobArgs {
    /// Preset name or path to a model document.
    #[arg(long)]
    model: String,
    /// Path to the job document.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Search bound for deck words and integer enumeration.
    #[arg(long, default_value_t = 8)]
    bound: i64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, args) = match cli.command {
        Command::Cohomology(a) => (Task::Cohomology, a),
        Command::FluxSubgroup(a) => (Task::FluxSubgroup, a),
        Command::Flux(a) => (Task::Flux, a),
        Command::CheckSymplectic(a) => (Task::CheckSymplectic, a),
        Command::CheckLagrangian(a) => (Task::CheckLagrangian, a),
        Command::CheckDescent(a) => (Task::CheckDescent, a),
        Command::DisplaceQuotient(a) => (Task::DisplaceQuotient, a),
        Command::DisplaceCommutator(a) => (Task::DisplaceCommutator, a),
        Command::ExteriorEval(a) => (Task::ExteriorEval, a),
        Command::Reproduce { case, show } => return run_reproduce(&case, show),
    };
    let result = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::usage(format!("--config: cannot read {}: {e}", args.config.display())))
        .and_then(|text| parse_config(&text))
        .and_then(|config| run_job(task, &args.model, &config, args.bound));
    match result {
        Ok(report) => {
            match args.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, args.format),
    }
}

fn fail(e: &CliError, format: Format) -> ExitCode {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&e.to_json()).expect("error serializes")),
        Format::Text => eprintln!("error: {e}"),
    }
    ExitCode::from(e.exit_code() as u8)
}

fn run_reproduce(case: &str, show: bool) -> ExitCode {
    let ids: Vec<&str> = if case == "all" { reproduce::CASES.to_vec() } else { vec![case] };
    let mut ok = true;
    for id in ids {
        if show {
            match reproduce::run(id) {
                Ok((bundle, _)) => print!("{bundle}"),
                Err(e) => return fail(&e, Format::Text),
            }
            continue;
        }
        let v = match reproduce::reproduce(id) {
            Ok(v) => v,
            Err(e) => return fail(&e, Format::Text),
        };
        for (name, pass) in &v.checks {
            println!("  [{}] {name}", if *pass { "ok" } else { "FAIL" });
        }
        if !v.matches_expected {
            println!("  [FAIL] output differs from the stored artifact");
        }
        println!("{} {id}", if v.pass() { "PASS" } else { "FAIL" });
        ok &= v.pass();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
