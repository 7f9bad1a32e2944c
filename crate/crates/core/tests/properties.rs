// SPDX-License-Identifier: Apache-2.0

use cel_core::bounds::{self, DeltaEta};
use cel_core::codes::{self, TieBreak};
use cel_core::forbidden::{self, BallSpec};
use cel_core::word::{self, Codeword, ErasurePattern};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn codeword(max_len: usize) -> impl Strategy<Value = Codeword> {
    (1..=max_len, any::<u128>()).prop_map(|(n, bits)| Codeword::from_bits(bits, n).unwrap())
}

fn pair(max_len: usize) -> impl Strategy<Value = (Codeword, Codeword)> {
    (1..=max_len, any::<u128>(), any::<u128>()).prop_map(|(n, a, b)| {
        (Codeword::from_bits(a, n).unwrap(), Codeword::from_bits(b, n).unwrap())
    })
}

fn word_mask(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

proptest! {
    #[test]
    fn erasing_keeps_consistency(x in codeword(128), mask in any::<u128>()) {
        let pattern = ErasurePattern::from_mask(mask & word_mask(x.len()), x.len()).unwrap();
        let y = word::erase(&x, &pattern).unwrap();
        prop_assert!(word::is_consistent(&x, &y).unwrap());
        prop_assert_eq!(word::erasure_count(&y), pattern.count());
    }

    #[test]
    fn distance_is_a_metric((a, b) in pair(128), c_bits in any::<u128>()) {
        let c = Codeword::from_bits(c_bits, a.len()).unwrap();
        let d = |x: &Codeword, y: &Codeword| word::hamming_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn erasing_the_disagreements_confuses((a, b) in pair(64)) {
        let diff = ErasurePattern::from_mask(a.bits() ^ b.bits(), a.len()).unwrap();
        let y = word::erase(&a, &diff).unwrap();
        prop_assert!(word::is_consistent(&b, &y).unwrap());
    }

    #[test]
    fn text_round_trip(x in codeword(128), mask in any::<u128>()) {
        let y = word::erase(&x, &ErasurePattern::from_mask(mask & word_mask(x.len()), x.len()).unwrap()).unwrap();
        prop_assert_eq!(x.to_string().parse::<Codeword>().unwrap(), x);
        prop_assert_eq!(y.to_string().parse::<word::ReceivedWord>().unwrap(), y);
    }

    #[test]
    fn rate_lower_is_sandwiched(p in 0.001f64..0.499) {
        let r = bounds::rate_lower(p);
        let c = bounds::classical_bounds(p);
        prop_assert!(c.gv < r);
        prop_assert!(r < c.random_capacity);
        prop_assert!(r <= bounds::rate_upper(p) + 1e-12);
    }

    #[test]
    fn rate_lower_decreases(p in 0.0f64..0.49, dp in 1e-4f64..0.01) {
        prop_assert!(bounds::rate_lower(p + dp) < bounds::rate_lower(p));
    }

    #[test]
    fn finite_rate_sits_below_limit(p in 0.01f64..0.49, share in 0.01f64..0.99, scale in 1e-4f64..0.5) {
        let room = bounds::constraint_bound(p).unwrap() * scale;
        let de = DeltaEta::new(room * share, room * (1.0 - share)).unwrap();
        let r = bounds::rate_delta_eta(p, de).unwrap();
        prop_assert!(r <= bounds::rate_lower(p) + 1e-9);
    }

    #[test]
    fn ball_membership_matches_size(
        n in 2usize..=11,
        k_frac in 0.0f64..1.0,
        budget_frac in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let k = ((n as f64) * k_frac) as usize;
        let budget = ((n as f64) * budget_frac) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = if k.min(budget) == 0 { 0 } else { (seed as usize) % (k.min(budget) + 1) };
        let spec = BallSpec::random(n, k, budget, q, &mut rng).unwrap();
        let members = forbidden::ball_enumerate(&spec).unwrap();
        prop_assert_eq!(forbidden::ball_size_exact(&spec), members.len().into());
        prop_assert_eq!(forbidden::ball_size(n, k, budget, q).unwrap(), members.len().into());
    }

    #[test]
    fn ball_size_grows_with_budget(n in 4usize..60, k in 1usize..4, budget in 0usize..4) {
        let q = 0;
        let small = forbidden::ball_size(n, k, budget, q).unwrap();
        let large = forbidden::ball_size(n, k, budget + 1, q).unwrap();
        prop_assert!(small <= large);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decoding_without_erasures_is_exact(seed in any::<u64>()) {
        let t = codes::sample_systematic_code(14, 4, 2, seed).unwrap();
        let cb = t.codebook();
        for e in cb.entries() {
            let set = cb.consistent_set(&e.word.to_received()).unwrap();
            prop_assert!(set.iter().any(|r| r.message == e.message && r.coin == e.coin));
            prop_assert!(set.iter().all(|r| r.message == e.message));
            let r = codes::decode(cb, &e.word.to_received(), TieBreak::Uniform, seed).unwrap();
            prop_assert_eq!(r.message, Some(e.message));
        }
    }

    #[test]
    fn distinct_messages_never_collide(seed in any::<u64>()) {
        let t = codes::sample_systematic_code(10, 5, 1, seed).unwrap();
        let rows = t.codebook().entries();
        for a in rows {
            for b in rows {
                if a.message != b.message {
                    prop_assert_ne!(a.word, b.word);
                }
            }
        }
    }
}
