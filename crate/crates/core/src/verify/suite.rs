//! Self-contained numerical checks run by the `verify` CLI command.

use std::f64::consts::PI;

use rand::Rng;

use super::audit::{decrease_audit, AuditConstants, GapConstants};
use super::counterexample::{counterexample_deterministic, counterexample_randomized, CounterexampleRun};
use super::gap::{adversarial_collapse, check_gap_orthogonal, gap_gamma, gap_radius};
use super::randomized::estimate_randomized_constant;
use crate::linalg::{
    expm_givens, expm_skew, gaussian_matrix, gaussian_vector, random_orthogonal, random_skew, random_stiefel,
    seeded_rng, GivensCoefficients, SkewMatrix,
};
use crate::manifold::{self, Point, Tangent};
use crate::objective::LinearTrace;
use crate::selection::{GivensPartition, GivensRule, RandomizedStiefelRule};
use crate::solver::{givens_exact_linesearch, tsd_run, SolverConfig, StepsizePolicy};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs every check; each outcome carries a one-line summary.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        outcome("counterexamples", counterexamples()),
        outcome("givens-kernel", givens_kernel()),
        outcome("transport-isometry", transport_isometry()),
        outcome("gap-bound", gap_bound()),
        outcome("adversarial-collapse", adversarial()),
        outcome("stiefel-randomized-constant", stiefel_constant()),
        outcome("exact-line-search", line_search()),
        outcome("decrease-audit", audit()),
    ]
}

fn divergence(run: &CounterexampleRun) -> f64 {
    run.report.ratio_at(40).unwrap_or(0.0) / run.report.ratio_at(5).unwrap_or(f64::INFINITY)
}

fn counterexamples() -> Result<(bool, String)> {
    let mut rng = seeded_rng(11);
    let (mut worst_dev, mut worst_growth) = (0.0f64, f64::INFINITY);
    for n in [3, 5, 10] {
        let x0 = gaussian_vector(n, &mut rng);
        let r = counterexample_randomized(n, &x0, 40, rng.random())?;
        let d = counterexample_deterministic(n, &x0, 40)?;
        worst_dev = worst_dev.max(r.max_value_deviation).max(d.max_value_deviation);
        worst_growth = worst_growth.min(divergence(&r)).min(divergence(&d));
    }
    Ok((
        worst_dev <= 1e-9 && worst_growth >= 10.0,
        format!("max |f - eps(1 + 2^-t)| = {worst_dev:.2e}, min ratio growth t=5..40 = {worst_growth:.2e}"),
    ))
}

fn givens_kernel() -> Result<(bool, String)> {
    let mut rng = seeded_rng(12);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=20);
        let mut idx: Vec<usize> = (0..n).collect();
        for a in (1..n).rev() {
            idx.swap(a, rng.random_range(0..=a));
        }
        let pairs = rng.random_range(1..=n / 2);
        let entries = (0..pairs)
            .map(|p| {
                let (i, j) = (idx[2 * p].min(idx[2 * p + 1]), idx[2 * p].max(idx[2 * p + 1]));
                (i, j, rng.random_range(-PI..PI))
            })
            .collect();
        let g = GivensCoefficients::new(n, entries)?;
        worst = worst.max((expm_givens(&g) - expm_skew(&g.to_skew())).norm());
    }
    Ok((worst <= 1e-12, format!("max ||expm_givens - expm||_F = {worst:.2e}")))
}

fn transport_isometry() -> Result<(bool, String)> {
    let mut rng = seeded_rng(13);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=20);
        let x = Point::Orthogonal(random_orthogonal(n, rng.random()));
        let [c, u, v] = [0, 1, 2].map(|_| Tangent::Orthogonal(random_skew(n, &mut rng)));
        let (tu, tv) = (manifold::transport(&x, &c, &u)?, manifold::transport(&x, &c, &v)?);
        let y = manifold::exp(&x, &c)?;
        worst = worst.max((manifold::metric(&y, &tu, &tv)? - manifold::metric(&x, &u, &v)?).abs());
    }
    Ok((worst <= 1e-10, format!("max metric distortion = {worst:.2e}")))
}

fn gap_bound() -> Result<(bool, String)> {
    let mut rng = seeded_rng(14);
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for beta in [0.5, 0.9, 0.99] {
        for trial in 0..100 {
            let n = rng.random_range(3..=8);
            let part = if trial % 2 == 0 {
                GivensPartition::singleton(n)
            } else {
                GivensPartition::round_robin(n)
            };
            let radius = gap_radius(beta);
            let displacements: Vec<SkewMatrix> = (0..part.len())
                .map(|_| {
                    let c = random_skew(n, &mut rng);
                    let scale = radius * rng.random::<f64>() / c.norm();
                    &c * scale
                })
                .collect();
            let report = check_gap_orthogonal(&part, &displacements, beta)?;
            pass &= report.pass && report.premise_holds();
            worst = worst.min(report.min_alignment() - beta);
        }
    }
    Ok((pass, format!("min alignment - beta = {worst:.3e}")))
}

fn adversarial() -> Result<(bool, String)> {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [4, 6, 10] {
        let y0 = Point::Orthogonal(random_orthogonal(n, n as u64));
        let r = adversarial_collapse(&y0, (0, 1), (n - 2, n - 1))?;
        pass &= r.conjugation_residual <= 1e-12 && r.sigma_min < 1e-10;
        detail.push(format!("n={n}: residual {:.1e}, sigma_min {:.1e}", r.conjugation_residual, r.sigma_min));
    }
    Ok((pass, detail.join("; ")))
}

fn stiefel_constant() -> Result<(bool, String)> {
    let (n, p) = (8, 3);
    let mut rng = seeded_rng(15);
    let u = random_stiefel(n, p, &mut rng);
    let x = Point::stiefel(u.clone())?;
    let mut rule = RandomizedStiefelRule::uniform(n, p, 16)?;
    let est = estimate_randomized_constant(&mut rule, &x, 20_000, 20, 17)?;
    let mut worst_z = 0.0f64;
    for probe in &est.probes {
        let w = match &probe.direction {
            Tangent::Stiefel(w) => w,
            _ => unreachable!("Stiefel probes"),
        };
        let want = rule.expected_squared_norm(&u, w);
        worst_z = worst_z.max((probe.mean - want).abs() / probe.std_error);
    }
    let floor = rule.constant();
    let pass = worst_z <= 3.0 && est.c2_hat >= floor - 3.0 * est.c2_std_error;
    Ok((
        pass,
        format!("max |z| = {worst_z:.2}, C^2 estimate {:.4} vs bound {floor:.4}", est.c2_hat),
    ))
}

fn line_search() -> Result<(bool, String)> {
    let mut rng = seeded_rng(18);
    let grid = 100_000;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=10);
        let g = gaussian_matrix(n, n, &mut rng);
        let i = rng.random_range(0..n - 1);
        let j = rng.random_range(i + 1..n);
        let ls = givens_exact_linesearch(&g, i, j);
        let rest = g.trace() - g[(i, i)] - g[(j, j)];
        let best = (0..grid)
            .map(|s| {
                let a = 2.0 * PI * s as f64 / grid as f64;
                rest + (g[(i, i)] + g[(j, j)]) * a.cos() - (g[(i, j)] - g[(j, i)]) * a.sin()
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max((ls.value - best).abs());
    }
    Ok((worst <= 1e-6, format!("max |closed form - grid| = {worst:.2e}")))
}

fn audit() -> Result<(bool, String)> {
    let n = 10;
    let mut rng = seeded_rng(19);
    let d = gaussian_matrix(n, n, &mut rng);
    let part = GivensPartition::singleton(n);
    let obj = LinearTrace::new(d).with_uniform_blocks(part.len());
    let mut rule = GivensRule::new(part.clone())?;
    let config = SolverConfig {
        max_outer_iterations: 50,
        policy: StepsizePolicy::FixedInverseL,
        ..SolverConfig::default()
    };
    let x0 = Point::Orthogonal(random_orthogonal(n, 20));
    let out = tsd_run(&obj, &x0, &mut rule, &config)?;
    let beta = 0.999_999;
    let lf = obj.d().norm();
    let report = decrease_audit(
        &out.trace,
        &AuditConstants {
            smoothness: lf,
            block_constants: vec![lf; part.len()],
            gap: Some(GapConstants {
                gamma: gap_gamma(part.max_block_size(), beta),
                radius: gap_radius(beta),
            }),
        },
    )?;
    Ok((
        report.passed(),
        format!(
            "{} iterations, {} failures, min step residual {:.2e}",
            report.iterations.len(),
            report.failures(),
            report.min_step_residual()
        ),
    ))
}
