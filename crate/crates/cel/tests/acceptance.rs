// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cel::runner::Runner;
use cel::selftest;
use cel_core::bounds::{self, DeltaEta};
use cel_core::codes::TieBreak;
use cel_core::forbidden::{self, BallSpec};
use cel_core::seed;
use cel_core::sim::{CodeSpec, Criterion, ExperimentConfig, StrategySpec};
use cel_core::Codeword;

fn report(n: u32, pass: bool, started: Instant, limit: Duration, detail: &str) {
    let elapsed = started.elapsed();
    let timely = elapsed <= limit;
    println!(
        "criterion {n}: {} ({detail}; {:.2}s of {}s)",
        if pass && timely { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(pass, "criterion {n} failed: {detail}");
    assert!(timely, "criterion {n} too slow: {elapsed:?}");
}

#[test]
fn criterion_1_bounds_identities() {
    let t = Instant::now();
    let mut failures = Vec::new();
    for p in bounds::grid(0.0, 1.0, 0.001).unwrap() {
        if bounds::rate_upper(p) != (1.0 - 2.0 * p).max(0.0) {
            failures.push(format!("rate_upper({p})"));
        }
    }
    if bounds::rate_lower(0.0) != 1.0 {
        failures.push("rate_lower(0)".into());
    }
    for p in [0.5, 0.55, 0.75, 1.0] {
        if bounds::rate_lower(p) != 0.0 {
            failures.push(format!("rate_lower({p})"));
        }
    }
    let p1 = bounds::p1();
    if (p1 - 0.38369).abs() > 1e-4 {
        failures.push(format!("p1 = {p1}"));
    }
    let mut worst_g = 0.0f64;
    for i in 0..50 {
        let p = p1 + (0.499 - p1) * i as f64 / 49.0;
        let r = bounds::root_r(p).unwrap();
        worst_g = worst_g.max(bounds::g_p(p, r).unwrap().abs());
    }
    if worst_g > 1e-9 {
        failures.push(format!("|G_p(root)| = {worst_g:e}"));
    }
    let gap = (bounds::rate_lower(p1 - 1e-12) - bounds::rate_lower(p1 + 1e-12)).abs();
    if gap > 1e-6 {
        failures.push(format!("gap at p1 = {gap:e}"));
    }
    let detail = format!("p1 = {p1:.6}, max |G_p| = {worst_g:.1e}, gap = {gap:.1e}, {} failures", failures.len());
    report(1, failures.is_empty(), t, Duration::from_secs(5), &detail);
}

#[test]
fn criterion_2_curve_orderings() {
    let t = Instant::now();
    let phi = bounds::phi_intersection();
    let mut failures = Vec::new();
    for p in bounds::grid(0.001, 0.499, 0.001).unwrap() {
        let r = bounds::rate_lower(p);
        let c = bounds::classical_bounds(p);
        if !(c.gv < r && r < 1.0 - p) {
            failures.push(format!("sandwich at {p}"));
        }
        let best = c.best_upper();
        if p < phi - 0.005 && r <= best {
            failures.push(format!("below min(EB, MRRW) at {p}"));
        }
        if p > phi + 0.005 && r >= best {
            failures.push(format!("above min(EB, MRRW) at {p}"));
        }
    }
    if (phi - 0.348).abs() > 0.005 {
        failures.push(format!("phi = {phi}"));
    }
    let detail = format!("phi = {phi:.6}, {} failures {:?}", failures.len(), failures.first());
    report(2, failures.is_empty(), t, Duration::from_secs(10), &detail);
}

#[test]
fn criterion_3_finite_rate_limit() {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in [0.2, 0.3, 0.42, 0.45] {
        let limit = bounds::rate_lower(p);
        let mut previous_gap: Option<f64> = None;
        for s in [1e-4, 1e-3, 1e-2] {
            let de = DeltaEta::new(s, s).unwrap();
            let Ok(r) = bounds::rate_delta_eta(p, de) else {
                continue;
            };
            checked += 1;
            let gap = (r - limit).abs();
            if gap > 10.0 * de.sum() {
                failures.push(format!("p={p} s={s} gap={gap}"));
            }
            if previous_gap.is_some_and(|g| gap < g) {
                failures.push(format!("p={p} s={s} not monotone"));
            }
            previous_gap = Some(gap);
        }
    }
    let detail = format!("{checked} feasible cases, {} failures {:?}", failures.len(), failures.first());
    report(3, failures.is_empty() && checked > 0, t, Duration::from_secs(5), &detail);
}

#[test]
fn criterion_4_ball_oracle() {
    let t = Instant::now();
    let mut rng = seed::rng_from(0x0c4);
    let (mut cases, mut mismatches) = (0usize, 0usize);
    for n in 1..=12 {
        for k in 0..=n {
            for budget in 0..=n {
                for q in 0..=k.min(budget) {
                    for _ in 0..5 {
                        let spec = BallSpec::random(n, k, budget, q, &mut rng).unwrap();
                        let members = forbidden::ball_enumerate(&spec).unwrap();
                        cases += 1;
                        if forbidden::ball_size_exact(&spec) != members.len().into() {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    let detail = format!("{cases} centers, {mismatches} mismatches");
    report(4, mismatches == 0, t, Duration::from_secs(120), &detail);
}

#[test]
fn criterion_5_ball_bound_large_n() {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for (p, s, n) in [(0.2, 0.02, 200), (0.2, 0.02, 400), (0.45, 0.002, 1000)] {
        let r = forbidden::ball_bound_check(p, DeltaEta::new(s, s).unwrap(), n).unwrap();
        pass &= r.pass;
        lines.push(format!("n={n} margin={:.1} bits", r.margin_bits));
    }
    report(5, pass, t, Duration::from_secs(30), &lines.join(", "));
}

fn word(text: &str) -> Codeword {
    text.parse().unwrap()
}

#[test]
fn criterion_6_wait_push_potency() {
    let t = Instant::now();
    let runner = Runner::new(4).unwrap();
    let mut toy = ExperimentConfig::new(
        CodeSpec::Explicit {
            words: vec![word("000000"), word("000111")],
            coins_per_message: 1,
        },
        StrategySpec::WaitPush {
            epsilon: 0.1,
            wait_length: Some(3),
        },
        3,
        2000,
    );
    toy.tie_break = TieBreak::Uniform;
    let toy = runner.estimate(&toy, 6).unwrap();

    let n = 24;
    let k = (0.7 * n as f64).ceil() as usize;
    let random = ExperimentConfig::new(
        CodeSpec::Sampled {
            n,
            k,
            d: 0,
            seed: 6,
            pruned: false,
        },
        StrategySpec::WaitPush {
            epsilon: 0.1,
            wait_length: None,
        },
        n / 4,
        2000,
    );
    let random = runner.estimate(&random, 6).unwrap();
    let detail = format!(
        "toy P_avg = {:.4} (>= 0.2), n=24 k={k} P_avg = {:.4} (>= 0.05)",
        toy.point_estimate, random.point_estimate
    );
    let pass = toy.point_estimate >= 0.2 && random.point_estimate >= 0.05;
    report(6, pass, t, Duration::from_secs(120), &detail);
}

#[test]
fn criterion_7_achievability() {
    let t = Instant::now();
    let runner = Runner::new(4).unwrap();
    let code = CodeSpec::Sampled {
        n: 24,
        k: 12,
        d: 4,
        seed: 7,
        pruned: true,
    };
    let strategies = [
        StrategySpec::WaitPush {
            epsilon: 0.1,
            wait_length: None,
        },
        StrategySpec::UniformRandom,
        StrategySpec::Burst {
            start: None,
            length: None,
        },
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, strategy) in strategies.into_iter().enumerate() {
        let mut config = ExperimentConfig::new(code.clone(), strategy.clone(), 2, 2000);
        config.criterion = Criterion::Max;
        config.strict = Some(true);
        config.message_subset = Some(20);
        config.strategy_seed = 70 + i as u64;
        let est = runner.estimate(&config, 7).unwrap();
        pass &= est.point_estimate <= 0.02 && est.type_two_errors == 0;
        parts.push(format!(
            "{} P_max = {:.3} type-II = {}",
            strategy.name(),
            est.point_estimate,
            est.type_two_errors
        ));
    }
    report(7, pass, t, Duration::from_secs(180), &parts.join(", "));
}

#[test]
fn criterion_8_causality_fuzz() {
    let t = Instant::now();
    let g = selftest::causality_fuzz(10_000);
    let detail = match g.first_failure() {
        None => "10000 prefix pairs clean".to_string(),
        Some(c) => format!("failed: {}", c.name),
    };
    report(8, g.pass(), t, Duration::from_secs(30), &detail);
}

fn cel(args: &[&str], jobs: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_cel"))
        .args(args)
        .env("CEL_JOBS", jobs)
        .output()
        .unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn simulate(dir: &Path, config: &Path, tag: &str, jobs: &str) -> (Vec<u8>, Vec<u8>) {
    let csv = dir.join(format!("{tag}.csv"));
    let json = dir.join(format!("{tag}.json"));
    cel(
        &[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "99",
            "--out",
            csv.to_str().unwrap(),
        ],
        jobs,
    );
    (std::fs::read(csv).unwrap(), std::fs::read(json).unwrap())
}

#[test]
fn criterion_9_reproducibility() {
    let t = Instant::now();
    let bounds_args = ["bounds", "--p-min", "0", "--p-max", "0.5", "--step", "0.001"];
    let b = [cel(&bounds_args, "1"), cel(&bounds_args, "1"), cel(&bounds_args, "4")];
    let bounds_same = b[0] == b[1] && b[0] == b[2] && !b[0].is_empty();

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("experiments.json");
    std::fs::write(
        &config,
        r#"{
  "schema_version": 1,
  "experiments": [
    {"code": {"n": 20, "k": 8, "d": 3, "seed": 1, "pruned": true},
     "strategy": {"strategy": "uniform_random", "seed": 3}, "budget": 3, "trials": 3000},
    {"code": {"n": 20, "k": 10, "d": 0, "seed": 2},
     "strategy": {"strategy": "wait_push", "seed": 4}, "budget": 5, "trials": 3000, "criterion": "max", "message_subset": 30},
    {"code": {"n": 16, "k": 6, "d": 2, "seed": 5},
     "strategy": {"strategy": "burst", "seed": 5}, "budget": 4, "trials": 2000},
    {"code": {"n": 14, "k": 5, "d": 2, "seed": 6, "pruned": true},
     "strategy": {"strategy": "two_step", "first": "random", "q": 1, "second": "push_other_message", "seed": 6},
     "budget": 3, "trials": 1000},
    {"code": {"n": 12, "k": 4, "d": 1, "seed": 8},
     "strategy": {"strategy": "omniscient", "seed": 8}, "budget": 2, "trials": 500}
  ]
}"#,
    )
    .unwrap();
    let a = simulate(dir.path(), &config, "a", "1");
    let b2 = simulate(dir.path(), &config, "b", "1");
    let c = simulate(dir.path(), &config, "c", "4");
    let rows = a.0.iter().filter(|&&c| c == b'\n').count() - 1;
    let errors = String::from_utf8_lossy(&a.0).matches(",error,").count();
    let simulate_same = a == b2 && a == c && rows == 5 && errors == 0;
    let detail = format!("bounds identical: {bounds_same}, simulate identical: {simulate_same} ({rows} rows)");
    report(9, bounds_same && simulate_same, t, Duration::from_secs(120), &detail);
}
