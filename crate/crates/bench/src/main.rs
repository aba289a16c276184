use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use atasses_bench::{emit_summary, run_bench, write_csv, BenchConfig, Scheme};
use clap::Parser;

/// Sweep approximate secret sharing schemes over N, T and K and write one
/// CSV row per trial.
#[derive(Debug, Parser)]
#[command(name = "atasses-bench", version)]
struct Args {
    /// Comma-separated schemes: atasses, type1, type2, replicated.
    #[arg(long, value_delimiter = ',', default_value = "atasses,type1,type2,replicated")]
    schemes: Vec<Scheme>,
    #[arg(long, value_delimiter = ',', default_value = "10,20,50,100,200")]
    n_list: Vec<usize>,
    /// Thresholds as fractions of N.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.7,0.9")]
    t_frac: Vec<f64>,
    /// Message lengths as multiples of the inner ring degree.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20")]
    k_mults: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 98.0)]
    bandwidth_mbps: f64,
    #[arg(long, default_value = atasses::params::PRESET_PN12QP109)]
    preset: String,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run N above 200 instead of skipping it.
    #[arg(long)]
    allow_large_n: bool,
    /// Write each trial's transcript as CSV into this directory.
    #[arg(long)]
    transcript_dir: Option<PathBuf>,
    /// Largest Type-I share modulus, in bits.
    #[arg(long, default_value_t = 512)]
    type1_max_bits: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = BenchConfig {
        schemes: args.schemes,
        n_list: args.n_list,
        t_fracs: args.t_frac,
        k_mults: args.k_mults,
        trials: args.trials,
        seed: args.seed,
        bandwidth_mbps: args.bandwidth_mbps,
        preset: args.preset,
        allow_large_n: args.allow_large_n,
        type1_max_bits: args.type1_max_bits,
        transcript_dir: args.transcript_dir,
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let rows = match run_bench(&cfg) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let written = match &args.out {
        Some(path) => File::create(path).and_then(|f| write_csv(&rows, BufWriter::new(f))),
        None => write_csv(&rows, io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: writing CSV: {e}");
        return ExitCode::FAILURE;
    }
    eprint!("{}", emit_summary(&rows));
    ExitCode::SUCCESS
}
