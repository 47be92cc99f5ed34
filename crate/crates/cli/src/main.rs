//! `linrec`: terms of linear recurrences over Z/p.

mod bench;
mod error;
mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use linrec::seqterm::AlgoTag;
use linrec::selftest;

use crate::error::CliError;
use crate::job::JobSpec;

#[derive(Parser)]
#[command(name = "linrec", version, about = "D-th terms of linear recurrences over Z/p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a_D for a recurrence given by flags or a JSON job file.
    Nth(NthArgs),
    /// Compare algorithms on random recurrences with a repeated factor.
    Bench(BenchArgs),
    /// Run the built-in property suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct NthArgs {
    /// JSON job file; replaces the other job flags.
    #[arg(long, conflicts_with_all = ["modulus", "coeffs", "init", "index", "algo", "seed"])]
    input: Option<PathBuf>,
    #[arg(long)]
    modulus: Option<String>,
    /// c_0,…,c_{d-1} in a_{i+d} = sum c_j a_{i+j}
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<String>>,
    /// a_0,…,a_{d-1}
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    init: Option<Vec<String>>,
    #[arg(long, allow_hyphen_values = true)]
    index: Option<String>,
    /// auto, naive, fiduccia or factored
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Also report the algorithm used and field-operation counts on stderr.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = (1u64 << 61) - 1)]
    prime: u64,
    /// Degree of the squarefree factor Q.
    #[arg(long)]
    f: usize,
    /// Multiplicity of Q in the characteristic polynomial.
    #[arg(long)]
    m: usize,
    /// The index is 2^index-bits.
    #[arg(long)]
    index_bits: u32,
    #[arg(long, value_delimiter = ',', default_value = "fiduccia,factored")]
    algos: Vec<String>,
    /// Number of random cases.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: PathBuf,
}

impl NthArgs {
    fn into_spec(self) -> Result<(JobSpec, bool), CliError> {
        let verbose = self.verbose;
        if let Some(path) = &self.input {
            return Ok((JobSpec::from_json_file(path)?, verbose));
        }
        let missing = |field: &'static str| CliError::validation(field, "missing (or pass --input FILE)");
        let spec = JobSpec {
            modulus: self.modulus.ok_or_else(|| missing("modulus"))?,
            coeffs: self.coeffs.ok_or_else(|| missing("coeffs"))?,
            init: self.init.ok_or_else(|| missing("init"))?,
            index: self.index.ok_or_else(|| missing("index"))?,
            algo: self.algo.unwrap_or_else(|| "auto".to_owned()),
            seed: self.seed.map(job::Seed::Text),
        };
        Ok((spec, verbose))
    }
}

fn cmd_nth(args: NthArgs) -> Result<(), CliError> {
    let (spec, verbose) = args.into_spec()?;
    let outcome = job::run(&spec)?;
    println!("{}", outcome.value);
    if verbose {
        eprintln!("algo: {}", outcome.algo);
        eprintln!("field_mults: {}", outcome.counts.mults);
        eprintln!("field_adds: {}", outcome.counts.adds);
        eprintln!("field_invs: {}", outcome.counts.invs);
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let algos = args
        .algos
        .iter()
        .map(|s| s.parse::<AlgoTag>().map_err(|e| CliError::validation("algos", e)))
        .collect::<Result<Vec<_>, _>>()?;
    let shape = bench::Shape {
        prime: args.prime,
        f: args.f,
        m: args.m,
        index_bits: args.index_bits,
        algos,
        reps: args.reps,
        seed: args.seed,
    };
    let rows = bench::run(&shape)?;
    bench::write_csv(&args.csv, &rows)?;
    println!("wrote {} rows to {}", rows.len(), args.csv.display());
    Ok(())
}

fn cmd_selftest(seed: u64) -> Result<(), CliError> {
    let reports = selftest::run(seed);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(CliError::SelftestFailed {
            failed,
            total: reports.len(),
        });
    }
    println!("all {} suites passed", reports.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Nth(args) => cmd_nth(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Selftest { seed } => cmd_selftest(seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
