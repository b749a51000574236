use std::path::PathBuf;
use std::process::ExitCode;

use batsvd2::batch_driver::Path;
use batsvd2::batch_layout::FieldKind;
use batsvd2::svd2_core::{Assembly, Backscale};
use batsvd2_cli::{compare, generate, run, write_compare, CliError, RunArgs, Source};
use clap::{Parser, Subcommand, ValueEnum};

/// Batched 2×2 SVD: test-file generator, batch runner and speedup report.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Vec,
    Ptw,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackscaleArg {
    None,
    Safe,
    Unconditional,
}

#[derive(Clone, Copy, ValueEnum)]
enum AssemblyArg {
    Tangent,
    Sine,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write random finite matrices to a test file.
    Generate {
        /// Number of matrices, a multiple of 8.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        field: FieldArg,
        #[arg(long, default_value_t = 0, conflicts_with = "entropy")]
        seed: u64,
        /// Read bits from /dev/urandom instead of the seeded generator.
        #[arg(long)]
        entropy: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a test file through the batch driver and append a CSV report.
    Run {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        field: FieldArg,
        #[arg(long, value_enum, default_value = "vec")]
        path: PathArg,
        #[arg(long, default_value_t = 1 << 20)]
        batch_size: usize,
        /// Defaults to the number of available cores.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "none")]
        backscale: BackscaleArg,
        #[arg(long, value_enum, default_value = "tangent")]
        assembly: AssemblyArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a speedup table from a vectorized and a pointwise report.
    Compare {
        #[arg(long = "vec")]
        report_vec: PathBuf,
        #[arg(long = "ptw")]
        report_ptw: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn field(f: FieldArg) -> FieldKind {
    match f {
        FieldArg::Real => FieldKind::Real,
        FieldArg::Complex => FieldKind::Complex,
    }
}

fn exec(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Generate { n, field: f, seed, entropy, out } => {
            let source = if entropy { Source::Entropy } else { Source::Seed(seed) };
            generate(n, field(f), source, &out)
        }
        Cmd::Run { input, field: f, path, batch_size, threads, backscale, assembly, out } => {
            let args = RunArgs {
                input,
                field: field(f),
                path: match path {
                    PathArg::Vec => Path::Vectorized,
                    PathArg::Ptw => Path::Pointwise,
                },
                batch_size,
                threads: threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
                backscale: match backscale {
                    BackscaleArg::None => Backscale::None,
                    BackscaleArg::Safe => Backscale::Safe,
                    BackscaleArg::Unconditional => Backscale::Unconditional,
                },
                assembly: match assembly {
                    AssemblyArg::Tangent => Assembly::Tangent,
                    AssemblyArg::Sine => Assembly::Sine,
                },
                out,
            };
            let rows = run(&args)?;
            eprintln!("{} batches, {} matrices", rows.len(), rows.iter().map(|r| r.n).sum::<usize>());
            Ok(())
        }
        Cmd::Compare { report_vec, report_ptw, out } => {
            let rows = compare(&report_vec, &report_ptw)?;
            match out {
                Some(p) => write_compare(&rows, std::fs::File::create(p)?),
                None => write_compare(&rows, std::io::stdout().lock()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match exec(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
