// SPDX-License-Identifier: Apache-2.0

//! Fast built-in checks: bound identities, the forbidden-ball oracle at
//! small `n`, causality fuzzing and exact round trips.

use cel_core::bounds;
use cel_core::channels::{self, Strategy};
use cel_core::codes::{self, Codebook, TieBreak};
use cel_core::forbidden::{self, BallSpec};
use cel_core::seed;
use cel_core::Codeword;
use rand::Rng;

/// Deliberate defects that the checks must catch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Mutation {
    #[default]
    None,
    /// Ball formula with the suffix radius off by one.
    BallRadius,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    pub name: &'static str,
    pub checks: Vec<Check>,
}

impl Group {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push(Check {
            name: name.into(),
            pass,
        });
    }
}

pub fn run(mutation: Mutation) -> Vec<Group> {
    vec![
        bounds_identities(),
        ball_oracle(mutation, 10),
        causality_fuzz(1_000),
        round_trip_decode(),
    ]
}

fn bounds_identities() -> Group {
    let mut g = Group {
        name: "bounds identities",
        checks: Vec::new(),
    };
    let grid = bounds::grid(0.0, 1.0, 0.001).expect("valid grid");
    g.check(
        "rate_upper equals (1-2p)^+ on a 0.001 grid",
        grid.iter().all(|&p| bounds::rate_upper(p) == (1.0 - 2.0 * p).max(0.0)),
    );
    g.check("rate_lower(0) = 1", bounds::rate_lower(0.0) == 1.0);
    g.check(
        "rate_lower vanishes from p = 1/2",
        [0.5, 0.6, 1.0].iter().all(|&p| bounds::rate_lower(p) == 0.0),
    );
    g.check("p1 = 0.38369 within 1e-4", (bounds::p1() - 0.38369).abs() <= 1e-4);
    let p1 = bounds::p1();
    g.check(
        "G_p(root_r(p)) within 1e-9 on [p1, 0.499]",
        (0..50).all(|i| {
            let p = p1 + (0.499 - p1) * i as f64 / 49.0;
            bounds::root_r(p)
                .and_then(|r| bounds::g_p(p, r))
                .map(|g| g.abs() <= 1e-9)
                .unwrap_or(false)
        }),
    );
    let gap = (bounds::rate_lower(p1 - 1e-12) - bounds::rate_lower(p1 + 1e-12)).abs();
    g.check("rate_lower continuous at p1", gap <= 1e-6);
    g
}

fn ball_oracle(mutation: Mutation, max_n: usize) -> Group {
    let mut g = Group {
        name: "forbidden ball oracle",
        checks: Vec::new(),
    };
    let mut rng = seed::rng_from(0xBA11);
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for n in 1..=max_n {
        for k in 0..=n {
            for budget in 0..=n {
                for q in 0..=k.min(budget) {
                    for _ in 0..2 {
                        let spec = BallSpec::random(n, k, budget, q, &mut rng).expect("valid parameters");
                        let members = forbidden::ball_enumerate(&spec).expect("small n").len();
                        let formula = ball_size_with(n, k, budget, q, mutation);
                        cases += 1;
                        if formula != members as u128 {
                            mismatches.push((n, k, budget, q));
                        }
                    }
                }
            }
        }
    }
    let name = match mismatches.first() {
        None => format!("ball size equals enumeration on {cases} centers with n <= {max_n}"),
        Some((n, k, b, q)) => format!(
            "ball size equals enumeration ({} of {cases} mismatched, first n={n} k={k} budget={b} q={q})",
            mismatches.len()
        ),
    };
    g.check(name, mismatches.is_empty());
    g
}

/// The closed-form ball size, with an optional injected defect.
fn ball_size_with(n: usize, k: usize, budget: usize, q: usize, mutation: Mutation) -> u128 {
    let size = match mutation {
        Mutation::None => forbidden::ball_size(n, k, budget, q).expect("valid parameters"),
        Mutation::BallRadius => forbidden::hamming_ball_volume(n - k, budget - q + 1) << q,
    };
    u128::try_from(size).expect("small ball")
}

fn causal_set<'a>(code: &'a Codebook, budget: usize, s: u64) -> Vec<Box<dyn Strategy + 'a>> {
    let n = code.n();
    vec![
        channels::boxed(channels::uniform_random_eraser(n, budget, s).expect("budget <= n")),
        channels::boxed(
            channels::wait_push_adversary(code, channels::default_wait_length(n, budget, 0.1), budget, s)
                .expect("valid wait length"),
        ),
        channels::boxed(
            channels::burst_eraser(n, s as usize % (n - budget + 1), budget, budget).expect("window fits"),
        ),
    ]
}

/// `pairs` prefix-pair transmissions spread over the causal strategies.
pub fn causality_fuzz(pairs: usize) -> Group {
    let mut g = Group {
        name: "causality fuzz",
        checks: Vec::new(),
    };
    let table = codes::sample_systematic_code(16, 6, 2, 31).expect("valid code");
    let code = table.codebook();
    let mut rng = seed::rng_from(0xCA5A);
    let (mut causality, mut budget_overruns, mut corruptions, mut done) = (0, 0, 0, 0);
    let mut trial = 0u64;
    while done < pairs {
        let budget = rng.gen_range(0..=8);
        let x = code.entries()[rng.gen_range(0..code.len())].word;
        let shared = rng.gen_range(0..=16);
        let list = code.prefix_matches(&x.prefix(shared));
        let x_tilde = if rng.gen_bool(0.5) {
            list[rng.gen_range(0..list.len())].word
        } else {
            let keep = x.prefix(shared);
            let tail = Codeword::from_bits(rng.gen::<u128>(), 16 - shared).expect("short word");
            keep.concat(&tail).expect("length 16")
        };
        let s = seed::splitmix64(trial);
        trial += 1;
        for (mut a, mut b) in causal_set(code, budget, s).into_iter().zip(causal_set(code, budget, s)) {
            if done == pairs {
                break;
            }
            match channels::check_prefix_pair(a.as_mut(), b.as_mut(), &x, &x_tilde, shared) {
                Ok(c) => {
                    causality += c.causality as usize;
                    budget_overruns += c.budget as usize;
                    corruptions += c.corruption as usize;
                }
                Err(_) => corruptions += 1,
            }
            done += 1;
        }
    }
    g.check(format!("no causality violations in {pairs} prefix pairs"), causality == 0);
    g.check("no budget overruns", budget_overruns == 0);
    g.check("no symbol corruptions", corruptions == 0);
    g
}

fn round_trip_decode() -> Group {
    let mut g = Group {
        name: "round-trip decode",
        checks: Vec::new(),
    };
    let table = codes::sample_systematic_code(16, 6, 2, 12).expect("valid code");
    let code = table.codebook();
    let all_messages = code.entries().iter().all(|e| {
        codes::decode(code, &e.word.to_received(), TieBreak::Uniform, 0)
            .map(|r| r.message == Some(e.message))
            .unwrap_or(false)
    });
    g.check("unerased codewords decode to their message", all_messages);
    let pruned = codes::prune(&table, 0).expect("budget 0 pruning");
    let exact = pruned.codebook().entries().iter().all(|e| {
        codes::decode(pruned.codebook(), &e.word.to_received(), TieBreak::Uniform, 0)
            .map(|r| r.message == Some(e.message) && r.coin == Some(e.coin))
            .unwrap_or(false)
    });
    g.check("pruned codewords decode to their (message, coin)", exact);
    g
}
