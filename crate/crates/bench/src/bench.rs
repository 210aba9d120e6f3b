//! TSD against Riemannian gradient descent on seeded Procrustes instances.
//!
//! One TSD cycle is a sweep over all `n (n - 1) / 2` Givens pairs (for
//! randomized rules, as many draws as the rule has outcomes); one GD cycle is
//! one gradient step. Per instance, with `f_best` the lowest value reached by
//! either method and `K*` the larger of the two cycle counts,
//!
//! ```text
//! gap closed (%) = 100 (f(x^0) - f(x^c)) / (f(x^0) - f_best)
//! percent        = 100 c / K*
//! ```
//!
//! The CSV samples every instance at shared, log-spaced percent checkpoints.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use tsd_core::objective::LinearTrace;
use tsd_core::selection::{GivensPartition, GivensRule, RandomizedOrthogonalRule, RandomizedStiefelRule, SelectionRule};
use tsd_core::solver::{rgd_run, tsd_run, IterationTrace, SolverConfig, StepsizePolicy, Termination, UnderflowPolicy};
use tsd_core::{Error, Point, Result};

use crate::instance::{gen_instance_with_noise, ProcrustesInstance};

/// Largest number of percent checkpoints per CSV.
pub const MAX_CHECKPOINTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleChoice {
    /// Deterministic Givens sweep with exact line search.
    Givens,
    /// Uniformly drawn Givens pair with exact line search.
    RandomOnb,
    /// Randomized Stiefel rule with backtracking on `St(ceil(n/2), n)`.
    Stiefel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionChoice {
    /// One pair per block, lexicographic order.
    Singleton,
    /// Round-robin perfect matchings.
    Matching,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub instances: usize,
    pub max_cycles: usize,
    /// Gradient-norm tolerance relative to `||D||_F`.
    pub tol: f64,
    pub rule: RuleChoice,
    pub partition: PartitionChoice,
    pub noise_std: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![20, 50],
            seeds: vec![0],
            instances: 10,
            max_cycles: 300,
            tol: 1e-10,
            rule: RuleChoice::Givens,
            partition: PartitionChoice::Singleton,
            noise_std: crate::instance::NOISE_STD,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(Error::InvalidArgument("sizes must be nonempty and >= 2".into()));
        }
        if self.seeds.is_empty() || self.instances == 0 || self.max_cycles == 0 {
            return Err(Error::InvalidArgument(
                "need at least one seed, one instance and one cycle".into(),
            ));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerance must be >= 0".into()));
        }
        Ok(())
    }
}

/// Objective value and cumulative flops after each cycle (index 0 is the
/// start).
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub values: Vec<f64>,
    pub flops: Vec<u64>,
    pub termination: Termination,
}

impl Series {
    /// Cycles run.
    pub fn cycles(&self) -> usize {
        self.values.len() - 1
    }

    /// Value after `cycle` cycles; the final value past the end.
    pub fn value_at(&self, cycle: usize) -> f64 {
        self.values[cycle.min(self.values.len() - 1)]
    }

    pub fn best(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct InstanceRun {
    pub n: usize,
    pub seed: u64,
    pub tsd: Series,
    pub gd: Series,
    pub tsd_seconds: f64,
    pub gd_seconds: f64,
}

impl InstanceRun {
    pub fn start_value(&self) -> f64 {
        self.tsd.values[0]
    }

    pub fn best_value(&self) -> f64 {
        self.tsd.best().min(self.gd.best())
    }

    /// `K*`.
    pub fn cycle_scale(&self) -> usize {
        self.tsd.cycles().max(self.gd.cycles()).max(1)
    }

    /// Percent of `f(x^0) - f_best` closed by `value`, clamped to `[0, 100]`.
    pub fn gap_closed(&self, value: f64) -> f64 {
        let span = self.start_value() - self.best_value();
        if !(span > 0.0) {
            return 100.0;
        }
        (100.0 * (self.start_value() - value) / span).clamp(0.0, 100.0)
    }

    /// First cycle at which `series` closes at least `percent` of the gap.
    pub fn cycles_to(&self, series: &Series, percent: f64) -> Option<usize> {
        series.values.iter().position(|&v| self.gap_closed(v) >= percent)
    }
}

/// Converts a trace recorded every `epoch` outer iterations into a
/// per-cycle series.
fn series_from(trace: &IterationTrace, epoch: usize) -> Series {
    let mut values = Vec::with_capacity(trace.records.len());
    let mut flops = Vec::with_capacity(trace.records.len());
    for r in &trace.records {
        let cycle = r.iteration.div_ceil(epoch);
        if cycle < values.len() {
            values[cycle] = r.value;
            flops[cycle] = r.flops;
        } else {
            values.push(r.value);
            flops.push(r.flops);
        }
    }
    Series {
        values,
        flops,
        termination: trace.termination,
    }
}

fn solver_config(policy: StepsizePolicy, epoch: usize, max_cycles: usize, tol: f64) -> SolverConfig {
    SolverConfig {
        max_outer_iterations: max_cycles * epoch,
        gradient_tolerance: tol,
        policy,
        record_inner: false,
        monitor_decrease: false,
        check_interval: epoch,
        on_underflow: UnderflowPolicy::Stop,
    }
}

/// Runs TSD and GD on one instance.
pub fn run_instance(inst: &ProcrustesInstance, config: &BenchConfig) -> Result<InstanceRun> {
    let n = inst.n;
    let backtracking = StepsizePolicy::backtracking();
    let (obj, x0, mut rule, epoch, policy): (LinearTrace, Point, Box<dyn SelectionRule>, usize, StepsizePolicy) =
        match config.rule {
            RuleChoice::Givens => {
                let part = match config.partition {
                    PartitionChoice::Singleton => GivensPartition::singleton(n),
                    PartitionChoice::Matching => GivensPartition::round_robin(n),
                };
                let rule = GivensRule::new(part)?;
                (inst.objective(), inst.start(), Box::new(rule), 1, StepsizePolicy::ExactGivens)
            }
            RuleChoice::RandomOnb => {
                let rule = RandomizedOrthogonalRule::uniform(n, inst.seed)?;
                let epoch = n * (n - 1) / 2;
                (inst.objective(), inst.start(), Box::new(rule), epoch, StepsizePolicy::ExactGivens)
            }
            RuleChoice::Stiefel => {
                let p = n.div_ceil(2).min(n - 1);
                let d = inst.d.columns(0, p).into_owned();
                let rule = RandomizedStiefelRule::uniform(n, p, inst.seed)?;
                let epoch = rule.outcomes().len();
                let u0 = DMatrix::identity(n, p);
                (LinearTrace::new(d), Point::stiefel(u0)?, Box::new(rule), epoch, backtracking)
            }
        };
    let tol = config.tol * obj.d().norm();
    let clock = Instant::now();
    let tsd = tsd_run(&obj, &x0, rule.as_mut(), &solver_config(policy, epoch, config.max_cycles, tol))?;
    let tsd_seconds = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let gd = rgd_run(&obj, &x0, &solver_config(backtracking, 1, config.max_cycles, tol))?;
    let gd_seconds = clock.elapsed().as_secs_f64();
    Ok(InstanceRun {
        n,
        seed: inst.seed,
        tsd: series_from(&tsd.trace, epoch),
        gd: series_from(&gd.trace, 1),
        tsd_seconds,
        gd_seconds,
    })
}

/// Seed of instance `index` of size `n` derived from `base` (SplitMix64
/// finalizer).
pub fn instance_seed(base: u64, n: usize, index: usize) -> u64 {
    let mut z = base
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((n as u64) << 32)
        .wrapping_add(index as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Log-spaced percents from `100 / k` to `100`, at most
/// [`MAX_CHECKPOINTS`] of them and never more than `k`.
pub fn checkpoints(k: usize) -> Vec<f64> {
    let k = k.max(1);
    let count = k.min(MAX_CHECKPOINTS);
    if count == 1 {
        return vec![100.0];
    }
    let lo = (100.0 / k as f64).ln();
    let hi = 100f64.ln();
    let mut out: Vec<f64> = (0..count)
        .map(|j| (lo + (hi - lo) * j as f64 / (count - 1) as f64).exp())
        .collect();
    out[count - 1] = 100.0;
    out.dedup_by(|a, b| format_percent(*a) == format_percent(*b));
    out
}

fn format_percent(p: f64) -> String {
    format!("{p:.6}")
}

/// Cycle of `run` at percent `p` of its own `K*`.
pub fn cycle_at(run: &InstanceRun, percent: f64) -> usize {
    ((percent / 100.0) * run.cycle_scale() as f64).round() as usize
}

/// Percent-of-cycles against gap-closed table for the runs of one size.
pub fn render_csv(runs: &[InstanceRun]) -> Result<String> {
    let k = runs.iter().map(InstanceRun::cycle_scale).max().unwrap_or(1);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["percent".to_string()];
    for i in 1..=runs.len() {
        header.push(format!("TSDcycle{i}"));
        header.push(format!("GDcycle{i}"));
    }
    w.write_record(&header).map_err(csv_err)?;
    for p in checkpoints(k) {
        let mut row = vec![format_percent(p)];
        for run in runs {
            let c = cycle_at(run, p);
            row.push(format!("{:.6}", run.gap_closed(run.tsd.value_at(c))));
            row.push(format!("{:.6}", run.gap_closed(run.gd.value_at(c))));
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    into_string(w)
}

/// One row per (algorithm, instance, cycle).
pub fn render_records(runs: &[InstanceRun]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "algorithm",
        "instance",
        "seed",
        "cycle",
        "percent_cycles",
        "gap_closed",
        "objective",
        "flops",
    ])
    .map_err(csv_err)?;
    for (i, run) in runs.iter().enumerate() {
        for (tag, series) in [("TSD", &run.tsd), ("GD", &run.gd)] {
            for (c, (&v, &fl)) in series.values.iter().zip(&series.flops).enumerate() {
                w.write_record([
                    tag.to_string(),
                    (i + 1).to_string(),
                    run.seed.to_string(),
                    c.to_string(),
                    format!("{:.6}", 100.0 * c as f64 / run.cycle_scale() as f64),
                    format!("{:.6}", run.gap_closed(v)),
                    format!("{v:.12e}"),
                    fl.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    into_string(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

/// Runs every instance of size `n`.
pub fn run_size(n: usize, config: &BenchConfig) -> Result<Vec<InstanceRun>> {
    let jobs: Vec<u64> = config
        .seeds
        .iter()
        .flat_map(|&s| (0..config.instances).map(move |i| instance_seed(s, n, i)))
        .collect();
    jobs.par_iter()
        .map(|&seed| run_instance(&gen_instance_with_noise(n, seed, config.noise_std)?, config))
        .collect()
}

/// Files written for one size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeOutput {
    pub table: PathBuf,
    pub records: PathBuf,
    pub log: PathBuf,
}

fn log_text(runs: &[InstanceRun], config: &BenchConfig) -> String {
    let mut s = String::new();
    for (i, r) in runs.iter().enumerate() {
        let _ = writeln!(
            s,
            "instance {} n={} seed={} tsd: cycles={} termination={:?} seconds={:.3}; gd: cycles={} termination={:?} seconds={:.3}",
            i + 1,
            r.n,
            r.seed,
            r.tsd.cycles(),
            r.tsd.termination,
            r.tsd_seconds,
            r.gd.cycles(),
            r.gd.termination,
            r.gd_seconds,
        );
        for (tag, series) in [("TSD", &r.tsd), ("GD", &r.gd)] {
            if series.termination != Termination::GradientTolerance {
                let _ = writeln!(
                    s,
                    "  warning: {tag} did not reach the gradient tolerance within {} cycles ({:?})",
                    config.max_cycles, series.termination
                );
            }
        }
    }
    s
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("writing {}: {e}", path.display())))
}

/// Runs the benchmark and writes, per size, `procrustes_n<n>.csv`,
/// `procrustes_n<n>_records.csv` and `procrustes_n<n>.log` into `out_dir`.
pub fn run_benchmark(config: &BenchConfig, out_dir: &Path) -> Result<Vec<SizeOutput>> {
    config.validate()?;
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::InvalidArgument(format!("creating {}: {e}", out_dir.display())))?;
    let mut outputs = Vec::new();
    for &n in &config.sizes {
        let runs = run_size(n, config)?;
        let out = SizeOutput {
            table: out_dir.join(format!("procrustes_n{n}.csv")),
            records: out_dir.join(format!("procrustes_n{n}_records.csv")),
            log: out_dir.join(format!("procrustes_n{n}.log")),
        };
        write(&out.table, &render_csv(&runs)?)?;
        write(&out.records, &render_records(&runs)?)?;
        write(&out.log, &log_text(&runs, config))?;
        outputs.push(out);
    }
    Ok(outputs)
}
