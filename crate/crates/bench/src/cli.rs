//! Command-line driver.
//!
//! ```text
//! tsd bench          [--n 20,50] [--seeds 0] [--instances 10] [--out DIR] ...
//! tsd verify
//! tsd counterexample [--n 5] [--T 40] [--kind both] [--out FILE]
//! tsd instance       [--n 20] [--seeds 0] [--noise 1] [--out FILE]
//! ```
//!
//! Exit codes: 0 success, 1 verification or run failure, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tsd_core::linalg::{gaussian_vector, seeded_rng};
use tsd_core::verify::{counterexample_deterministic, counterexample_randomized, run_all, CounterexampleRun};
use tsd_core::{Error, Result};

use crate::bench::{run_benchmark, BenchConfig, PartitionChoice, RuleChoice};
use crate::config::ConfigFile;
use crate::instance::{gen_instance_with_noise, NOISE_STD};

/// Sizes used by `--paper-sizes`.
pub const PAPER_SIZES: [usize; 4] = [50, 100, 150, 200];

#[derive(Debug, Parser)]
#[command(name = "tsd", version, about = "Tangent subspace descent: benchmark and verification driver")]
pub struct Cli {
    /// `key=value` file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run TSD and gradient descent on Procrustes instances and write CSVs.
    Bench(BenchArgs),
    /// Run the numerical verification suite.
    Verify,
    /// Emit the counterexample traces on f(x) = ||x||^2 / 2.
    Counterexample(CounterexampleArgs),
    /// Dump a generated Procrustes instance.
    Instance(InstanceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Givens,
    RandomOnb,
    Stiefel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PartitionArg {
    Singleton,
    Matching,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Randomized,
    Deterministic,
    Both,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Problem sizes.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Use the sizes 50, 100, 150, 200.
    #[arg(long)]
    pub paper_sizes: bool,
    /// Base seeds; each yields `--instances` instances per size.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub instances: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub max_cycles: Option<usize>,
    /// Gradient-norm tolerance relative to ||D||_F.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    #[arg(long, value_enum)]
    pub partition: Option<PartitionArg>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Standard deviation of the noise entries.
    #[arg(long)]
    pub noise: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Outer iterations.
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// Seed for the start point and the random draws.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub noise: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

fn value_enum<T: ValueEnum>(file: &ConfigFile, key: &str) -> Result<Option<T>> {
    file.get(key)
        .map(|v| {
            T::from_str(v, true).map_err(|e| Error::InvalidArgument(format!("configuration key `{key}`: {e}")))
        })
        .transpose()
}

const BENCH_KEYS: &[&str] = &[
    "n",
    "paper-sizes",
    "seeds",
    "instances",
    "out",
    "max-cycles",
    "tol",
    "rule",
    "partition",
    "format",
    "noise",
];

/// Benchmark settings and output directory: flags, then the file, then
/// defaults.
pub fn resolve_bench(args: &BenchArgs, file: &ConfigFile) -> Result<(BenchConfig, PathBuf)> {
    file.check_keys(BENCH_KEYS)?;
    let d = BenchConfig::default();
    let preset = args.paper_sizes || file.parsed::<bool>("paper-sizes")?.unwrap_or(false);
    let sizes = match (&args.n, preset) {
        (Some(n), _) => n.clone(),
        (None, true) => PAPER_SIZES.to_vec(),
        (None, false) => file.list("n")?.unwrap_or(d.sizes),
    };
    let rule = match args.rule.or(value_enum(file, "rule")?) {
        Some(RuleArg::Givens) | None => RuleChoice::Givens,
        Some(RuleArg::RandomOnb) => RuleChoice::RandomOnb,
        Some(RuleArg::Stiefel) => RuleChoice::Stiefel,
    };
    let partition = match args.partition.or(value_enum(file, "partition")?) {
        Some(PartitionArg::Singleton) | None => PartitionChoice::Singleton,
        Some(PartitionArg::Matching) => PartitionChoice::Matching,
    };
    let _format: FormatArg = args.format.or(value_enum(file, "format")?).unwrap_or(FormatArg::Csv);
    let config = BenchConfig {
        sizes,
        seeds: args.seeds.clone().or(file.list("seeds")?).unwrap_or(d.seeds),
        instances: args.instances.or(file.parsed("instances")?).unwrap_or(d.instances),
        max_cycles: args.max_cycles.or(file.parsed("max-cycles")?).unwrap_or(d.max_cycles),
        tol: args.tol.or(file.parsed("tol")?).unwrap_or(d.tol),
        rule,
        partition,
        noise_std: args.noise.or(file.parsed("noise")?).unwrap_or(d.noise_std),
    };
    config.validate()?;
    let out = args
        .out
        .clone()
        .or(file.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("bench-out"));
    Ok((config, out))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("writing {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidArgument(format!("writing to stdout: {e}"))),
    }
}

/// Counterexample traces as CSV:
/// `construction,t,f,target,ratio` with `target = epsilon (1 + 2^{-t})`.
pub fn counterexample_csv(runs: &[(&str, CounterexampleRun)]) -> String {
    let mut s = String::from("construction,t,f,target,ratio\n");
    for (name, run) in runs {
        for rec in &run.trace.records {
            let t = rec.iteration;
            let target = run.epsilon * (1.0 + 0.5f64.powi(t as i32));
            let ratio = run
                .report
                .ratio_at(t)
                .map_or_else(String::new, |r| format!("{r:.12e}"));
            s.push_str(&format!("{name},{t},{:.17e},{target:.17e},{ratio}\n", rec.value));
        }
    }
    s
}

fn counterexample(args: &CounterexampleArgs, file: &ConfigFile) -> Result<()> {
    file.check_keys(&["n", "T", "seeds", "kind", "out", "format"])?;
    let n = args.n.or(file.parsed("n")?).unwrap_or(5);
    let t = args.t.or(file.parsed("T")?).unwrap_or(40);
    let seed = args
        .seeds
        .clone()
        .or(file.list("seeds")?)
        .and_then(|s| s.first().copied())
        .unwrap_or(0);
    let kind = args.kind.or(value_enum(file, "kind")?).unwrap_or(KindArg::Both);
    let mut rng = seeded_rng(seed);
    let x0 = gaussian_vector(n, &mut rng);
    let mut runs = Vec::new();
    if matches!(kind, KindArg::Randomized | KindArg::Both) {
        runs.push(("randomized", counterexample_randomized(n, &x0, t, seed)?));
    }
    if matches!(kind, KindArg::Deterministic | KindArg::Both) {
        runs.push(("deterministic", counterexample_deterministic(n, &x0, t)?));
    }
    let out = args.out.clone().or(file.get("out").map(PathBuf::from));
    emit(out.as_deref(), &counterexample_csv(&runs))
}

fn instance(args: &InstanceArgs, file: &ConfigFile) -> Result<()> {
    file.check_keys(&["n", "seeds", "noise", "out", "format"])?;
    let n = args.n.or(file.parsed("n")?).unwrap_or(20);
    let seed = args
        .seeds
        .clone()
        .or(file.list("seeds")?)
        .and_then(|s| s.first().copied())
        .unwrap_or(0);
    let noise = args.noise.or(file.parsed("noise")?).unwrap_or(NOISE_STD);
    let inst = gen_instance_with_noise(n, seed, noise)?;
    let mut s = String::from("matrix,row,col,value\n");
    for (name, m) in [("A", &inst.a), ("X", &inst.x_true), ("B", &inst.b), ("D", &inst.d)] {
        for i in 0..n {
            for j in 0..n {
                s.push_str(&format!("{name},{i},{j},{:.17e}\n", m[(i, j)]));
            }
        }
    }
    let out = args.out.clone().or(file.get("out").map(PathBuf::from));
    emit(out.as_deref(), &s)
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let file = match cli.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Verify => {
            let outcomes = run_all();
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            return if outcomes.iter().all(|o| o.passed) { 0 } else { 1 };
        }
        Command::Bench(args) => match resolve_bench(args, &file) {
            Ok((config, out)) => run_benchmark(&config, &out).map(|outputs| {
                for o in outputs {
                    println!("{}", o.table.display());
                }
            }),
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        Command::Counterexample(args) => counterexample(args, &file),
        Command::Instance(args) => instance(args, &file),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
