//! End-to-end tests of the `tsd` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nalgebra::DMatrix;
use tsd_bench::instance::gen_instance_with_noise;

fn tsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsd")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(tsd(&["bench", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(tsd(&[]).status.code(), Some(2));
    assert_eq!(tsd(&["bench", "--rule", "nope"]).status.code(), Some(2));
    assert_eq!(tsd(&["--config", "/nonexistent/tsd.conf", "verify"]).status.code(), Some(2));
}

#[test]
fn verify_passes_every_check() {
    let o = tsd(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.len() >= 8, "{out}");
    assert!(lines.iter().all(|l| l.starts_with("PASS ")), "{out}");
}

#[test]
fn counterexample_trace_tracks_its_target() {
    let o = tsd(&["counterexample", "--n", "5", "--T", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("construction,t,f,target,ratio"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 41);
    for r in &rows {
        let (f, target): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!((f - target).abs() <= 1e-12 * target, "{r:?}");
        // Iteration 0 has no decomposition; every later row has a ratio.
        assert_eq!(r[4].is_empty(), r[1] == "0");
    }
    let last_ratio: f64 = rows[40][4].parse().unwrap();
    let first_ratio: f64 = rows[1][4].parse().unwrap();
    assert!(last_ratio > 1e4 * first_ratio);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let conf = dir.path().join("bench.conf");
    fs::write(
        &conf,
        format!("# small run\nn = 6\ninstances = 3\nmax-cycles = 4\nout = {}\n", out.display()),
    )
    .unwrap();
    let o = tsd(&["--config", conf.to_str().unwrap(), "bench", "--instances", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = read_csv(&out.join("procrustes_n6.csv"));
    assert_eq!(table[0], ["percent", "TSDcycle1", "GDcycle1", "TSDcycle2", "GDcycle2"]);

    fs::write(&conf, "instances = 2\nbogus = 1\n").unwrap();
    assert_eq!(tsd(&["--config", conf.to_str().unwrap(), "bench"]).status.code(), Some(2));
}

#[test]
fn bench_table_has_one_column_pair_per_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tsd(&["bench", "--n", "8", "--instances", "10", "--max-cycles", "20", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let table = read_csv(&dir.path().join("procrustes_n8.csv"));
    assert!(table.iter().all(|r| r.len() == 21));
    let percents: Vec<f64> = table[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(percents.windows(2).all(|w| w[1] > w[0]));
    assert!((percents.last().unwrap() - 100.0).abs() < 1e-9);
    assert!(dir.path().join("procrustes_n8.log").exists());

    // Gap closed never decreases along a series.
    let records = read_csv(&dir.path().join("procrustes_n8_records.csv"));
    let mut prev: Option<(String, String, f64)> = None;
    for r in &records[1..] {
        let gap: f64 = r[5].parse().unwrap();
        assert!((0.0..=100.0).contains(&gap));
        if let Some((alg, inst, g)) = &prev {
            if *alg == r[0] && *inst == r[1] {
                assert!(gap >= *g, "{r:?}");
            }
        }
        prev = Some((r[0].clone(), r[1].clone(), gap));
    }
}

#[test]
fn single_cycle_run_gives_a_single_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tsd(&["bench", "--n", "5", "--instances", "1", "--max-cycles", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let table = read_csv(&dir.path().join("procrustes_n5.csv"));
    assert_eq!(table.len(), 2);
    assert_eq!(table[1][0].parse::<f64>().unwrap(), 100.0);
}

fn instance_matrices(text: &str, n: usize) -> [DMatrix<f64>; 4] {
    let mut ms = [(); 4].map(|_| DMatrix::zeros(n, n));
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let k = ["A", "X", "B", "D"].iter().position(|&m| m == f[0]).unwrap();
        ms[k][(f[1].parse().unwrap(), f[2].parse().unwrap())] = f[3].parse().unwrap();
    }
    ms
}

#[test]
fn instance_dump_has_the_generating_distribution() {
    let n = 60;
    let o = tsd(&["instance", "--n", "60", "--seeds", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let [a, x, b, d] = instance_matrices(&stdout(&o), n);
    let count = (n * n) as f64;
    let mean = a.sum() / count;
    let std = ((a.map(|v| v * v).sum() / count) - mean * mean).sqrt();
    // A has N(0, 4) entries: mean within 4 standard errors, std within 5%.
    assert!(mean.abs() < 4.0 * 2.0 / count.sqrt(), "mean {mean}");
    assert!((std - 2.0).abs() < 0.1, "std {std}");
    assert!((x.transpose() * &x - DMatrix::identity(n, n)).norm() < 1e-12);
    let noise = &b - &a * &x;
    let noise_std = (noise.map(|v| v * v).sum() / count).sqrt();
    assert!((noise_std - 1.0).abs() < 0.05, "noise std {noise_std}");
    assert!((d + a.transpose() * &b).norm() < 1e-9 * b.norm());
}

#[test]
fn noise_free_instance_is_solved_by_the_planted_rotation() {
    let inst = gen_instance_with_noise(12, 5, 0.0).unwrap();
    // D = -A^T A X, so -D = (A^T A) X has polar factor X.
    let svd = (-&inst.d).svd(true, true);
    let polar = svd.u.unwrap() * svd.v_t.unwrap();
    assert!((&polar - &inst.x_true).norm() < 1e-8);
    let (opt, value) = inst.closed_form_optimum();
    assert!((opt - &inst.x_true).norm() < 1e-8);
    assert!((value - inst.value(&inst.x_true)).abs() < 1e-9 * value.abs());
}
