use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weil_core::Error;

mod generate;
mod report;
mod scenario;

use scenario::{RunOptions, Scenario};

/// Exact Weil indices and product-formula verification.
#[derive(Parser, Debug)]
#[command(name = "weil", version)]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Flags {
    /// Relative precision of local-field elements, in uniformizer digits [default: 32]
    #[arg(long, global = true)]
    precision: Option<i64>,
    /// Print the machine report as JSON instead of a table
    #[arg(long, global = true)]
    json: bool,
    /// Seed for scenario generation
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Extra probe places, e.g. "3,11,101"
    #[arg(long, global = true, value_delimiter = ',')]
    places: Vec<u64>,
    /// Largest finite group enumerated [default: 2000000]
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Zero the per-place timings so reports compare byte for byte
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weil index of a single quadratic character
    Weil {
        #[command(subcommand)]
        what: WeilCmd,
    },
    /// Gauss sum and Weil index of a finite quadratic character
    GaussSum { file: PathBuf },
    /// Product-formula verifiers
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Exact identity checks
    Check {
        #[command(subcommand)]
        what: CheckCmd,
    },
    /// Write seeded scenario files
    Generate {
        kind: generate::Kind,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a scenario file of any kind ("-" reads standard input)
    Run { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum WeilCmd {
    /// ψ(½·a·x²) over a local field
    Local { file: PathBuf },
    /// ψ(Res ½·xᵀQx·w·dt) over k((t))ⁿ
    Loop { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Global { file: PathBuf },
    Loop { file: PathBuf },
    Curve { file: PathBuf },
    Surface { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    /// Non-degeneracy, Fourier identity and SL₂(Z) relations
    Finite { file: PathBuf },
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        e if e.is_resource() => EXIT_RESOURCE,
        Error::RelationViolation(_) | Error::NotWeilIndex(_) => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

fn read_scenario(path: &Path) -> Result<Scenario, Error> {
    let mut text = String::new();
    let read = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    read.map_err(|e| Error::Input(format!("reading {}: {e}", path.display())))?;
    Scenario::parse(&text).map_err(|e| e.context(&path.display().to_string()))
}

fn run_file(path: &Path, expected: Option<&str>, flags: &Flags) -> Result<bool, Error> {
    let s = read_scenario(path)?;
    if let Some(k) = expected {
        if s.kind() != k {
            return Err(Error::Input(format!(
                "{}: scenario kind is {}, this command expects {k}",
                path.display(),
                s.kind()
            )));
        }
    }
    let opts = RunOptions {
        precision: flags.precision,
        cap: flags.cap,
        places: flags.places.clone(),
    };
    let mut report = s.run(&opts)?;
    if flags.no_timing {
        report = report.without_timing();
    }
    if flags.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    } else {
        print!("{}", report.table());
    }
    Ok(report.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let f = &cli.flags;
    let result = match &cli.command {
        Command::Weil { what: WeilCmd::Local { file } } => run_file(file, Some("weil-local"), f),
        Command::Weil { what: WeilCmd::Loop { file } } => run_file(file, Some("weil-loop"), f),
        Command::GaussSum { file } => run_file(file, Some("gauss-sum"), f),
        Command::Verify { what } => match what {
            VerifyCmd::Global { file } => run_file(file, Some("verify-global"), f),
            VerifyCmd::Loop { file } => run_file(file, Some("verify-loop"), f),
            VerifyCmd::Curve { file } => run_file(file, Some("verify-curve"), f),
            VerifyCmd::Surface { file } => run_file(file, Some("verify-surface"), f),
        },
        Command::Check { what: CheckCmd::Finite { file } } => run_file(file, Some("check-finite"), f),
        Command::Run { file } => run_file(file, None, f),
        Command::Generate { kind, count, out } => generate::write(*kind, f.seed, *count, out).map(|paths| {
            for p in paths {
                println!("{}", p.display());
            }
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
