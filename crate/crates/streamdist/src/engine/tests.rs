use super::lane::{boundary, SuffixSide};
use super::*;
use crate::oracle::{all_alignments_exact, exact_hamming, exact_moment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_word(rng: &mut ChaCha8Rng, len: usize, sigma: u32) -> Vec<Symbol> {
    (0..len).map(|_| rng.gen_range(1..=sigma)).collect()
}

fn config(n: usize, sigma: u32, p: f64, eps: f64) -> ProblemConfig {
    ProblemConfig::new(n, sigma, p, eps).unwrap().with_seed(11).with_repetitions(3)
}

#[test]
fn bank_matches_fresh_sketches() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [0.0, 1.0] {
        let pattern = random_word(&mut rng, 23, 5);
        let engine = Engine::new(&pattern, &config(23, 5, p, 0.5)).unwrap();
        let b = engine.block_len();
        for lane in &engine.lanes {
            let SuffixSide::Linear(side) = &lane.suffix else { panic!() };
            assert_eq!(side.bank.len(), b);
            for j in 1..=b {
                let fresh = side.family.columns().word_sketch(&pattern[j..]);
                assert_eq!(side.bank[j - 1], fresh, "j = {j}");
            }
        }
    }
}

#[test]
fn single_symbol_bank_entry() {
    let pattern = vec![2, 1, 3, 1];
    let engine = Engine::new(&pattern, &config(4, 3, 0.0, 0.5).with_block_len(3)).unwrap();
    let SuffixSide::Linear(side) = &engine.lanes[0].suffix else { panic!() };
    let cols = side.family.columns();
    assert_eq!(side.bank[2], cols.block_sketch(&[1]));
}

#[test]
fn window_sketch_matches_recombination() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in [0.0, 1.0] {
        let (n, sigma) = (17, 4);
        let pattern = random_word(&mut rng, n, sigma);
        let text = random_word(&mut rng, 60, sigma);
        let mut engine = Engine::new(&pattern, &config(n, sigma, p, 0.5)).unwrap();
        let b = engine.block_len();
        for (idx, &s) in text.iter().enumerate() {
            engine.process_character(s).unwrap();
            let i = idx + 1;
            if i < n {
                continue;
            }
            let (kblk, _, c) = boundary(i, n, b);
            if c > i {
                continue;
            }
            let current = (i - 1) / b + 1;
            for lane in &engine.lanes {
                let SuffixSide::Linear(side) = &lane.suffix else { panic!() };
                let got = side.window_sketch(kblk, current).unwrap();
                let want = side.family.columns().word_sketch(&text[c - 1..i]);
                assert_eq!(got, want, "i = {i}");
            }
        }
    }
}

#[test]
fn window_coverage() {
    for n in 1..30 {
        for b in 1..=n {
            for i in n..n + 3 * b {
                let (kblk, jlen, c) = boundary(i, n, b);
                assert!((1..=b).contains(&jlen));
                assert_eq!(jlen + (i + 1 - c), n);
                assert_eq!(c, kblk * b + 1);
            }
        }
    }
}

#[test]
fn ring_sizes_stay_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [0.0, 1.0, 0.5, 1.5] {
        let n = 20;
        let pattern = random_word(&mut rng, n, 3);
        let text = random_word(&mut rng, 120, 3);
        let mut engine = Engine::new(&pattern, &config(n, 3, p, 0.5)).unwrap();
        let bound = n.div_ceil(engine.block_len()) + 1;
        for &s in &text {
            engine.process_character(s).unwrap();
            assert!(engine.ring_len() <= bound, "p = {p}");
        }
        assert_eq!(engine.lookup_failures(), 0);
    }
}

#[test]
fn first_block_ring_size_is_one() {
    let pattern = vec![1; 16];
    let mut engine = Engine::new(&pattern, &config(16, 2, 0.0, 0.5)).unwrap();
    for _ in 0..engine.block_len() {
        engine.process_character(2).unwrap();
    }
    for lane in &engine.lanes {
        assert_eq!(lane.encodings.len(), 1);
        let SuffixSide::Linear(side) = &lane.suffix else { panic!() };
        assert_eq!(side.ring.len(), 1);
    }
}

#[test]
fn text_equal_to_pattern_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in [0.0, 1.0, 0.5, 1.5, 2.0] {
        let n = 25;
        let pattern = random_word(&mut rng, n, 6);
        let out = run_text(&pattern, &pattern, &config(n, 6, p, 0.5)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].end_pos, n);
        assert_eq!(out[0].estimate, 0.0, "p = {p}");
    }
}

#[test]
fn block_boundary_alignment_splits_evenly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n, b) = (12, 4);
    let pattern = random_word(&mut rng, n, 3);
    let text = random_word(&mut rng, 40, 3);
    let cfg = config(n, 3, 0.0, 0.5).with_block_len(b);
    let mut engine = Engine::new(&pattern, &cfg).unwrap();
    for (idx, &s) in text.iter().enumerate() {
        engine.process_character(s).unwrap();
        let i = idx + 1;
        if i >= n && (i - n) % b == 0 {
            let (_, jlen, c) = boundary(i, n, b);
            assert_eq!(jlen, b);
            assert_eq!(i + 1 - c, n - b);
        }
    }
}

#[test]
fn prefix_parts_exact_with_large_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for p in [0.0, 1.0, 0.5] {
        let (n, sigma) = (16, 4);
        let pattern = random_word(&mut rng, n, sigma);
        let text = random_word(&mut rng, 50, sigma);
        let mut constants = crate::config::SketchConstants::default();
        constants.threshold = 1e4;
        let cfg = config(n, sigma, p, 0.5).with_constants(constants);
        let mut engine = Engine::new(&pattern, &cfg).unwrap();
        let b = engine.block_len();
        for (idx, &s) in text.iter().enumerate() {
            engine.process_character(s).unwrap();
            let i = idx + 1;
            if i < n {
                continue;
            }
            let (_, jlen, c) = boundary(i, n, b);
            let window = &text[i - n..c - 1];
            let want = if p == 0.0 {
                exact_hamming(window, &pattern[..jlen]).unwrap() as f64
            } else if p == 1.0 {
                exact_moment(window, &pattern[..jlen], 1.0).unwrap()
            } else {
                continue;
            };
            for lane in &engine.lanes {
                let (prefix, _) = lane.last_parts.unwrap();
                assert_eq!(prefix, want, "p = {p}, i = {i}");
            }
        }
    }
}

#[test]
fn exhaustive_small_hamming_sweep() {
    let (n, b, sigma) = (4, 2, 2);
    let cfg = ProblemConfig::new(n, sigma, 0.0, 0.3)
        .unwrap()
        .with_block_len(b)
        .with_repetitions(9)
        .with_execution(Execution::Sequential);
    let mut hits = 0usize;
    let mut total = 0usize;
    for pm in 0..16u32 {
        let pattern: Vec<Symbol> = (0..n).map(|t| 1 + ((pm >> t) & 1)).collect();
        for tm in 0..64u32 {
            let text: Vec<Symbol> = (0..6).map(|t| 1 + ((tm >> t) & 1)).collect();
            let cfg = cfg.clone().with_seed((pm * 64 + tm) as u64);
            let est = run_text(&pattern, &text, &cfg).unwrap();
            let exact = all_alignments_exact(&pattern, &text, 0.0).unwrap();
            for (e, x) in est.iter().zip(&exact.values) {
                total += 1;
                if (e.estimate - x).abs() <= 0.3 * x {
                    hits += 1;
                }
            }
        }
    }
    assert_eq!(total, 16 * 64 * 3);
    assert!(hits as f64 >= 0.7 * total as f64, "{hits} / {total}");
}

#[test]
fn parallel_and_sequential_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [0.0, 1.0, 0.5, 1.5] {
        let pattern = random_word(&mut rng, 20, 4);
        let text = random_word(&mut rng, 70, 4);
        let cfg = config(20, 4, p, 0.5);
        let a = run_text(&pattern, &text, &cfg.clone().with_execution(Execution::Sequential)).unwrap();
        let b = run_text(&pattern, &text, &cfg.with_execution(Execution::Parallel)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn streaming_matches_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pattern = random_word(&mut rng, 15, 3);
    let text = random_word(&mut rng, 50, 3);
    let cfg = config(15, 3, 1.5, 0.5);
    let batch = run_text(&pattern, &text, &cfg).unwrap();
    let mut engine = Engine::new(&pattern, &cfg).unwrap();
    let stream: Vec<_> = text
        .iter()
        .filter_map(|&s| engine.process_character(s).unwrap())
        .collect();
    assert_eq!(batch, stream);
    assert_eq!(batch.first().unwrap().end_pos, 15);
    assert_eq!(batch.last().unwrap().end_pos, 50);
}

#[test]
fn fresh_state_has_no_ring_entries() {
    let pattern = vec![1, 2, 3, 1, 2, 3, 1, 2, 3];
    let engine = Engine::new(&pattern, &config(9, 3, 0.0, 0.5)).unwrap();
    let snap = engine.measure_state();
    assert_eq!(snap.encodings, 0);
    assert!(snap.buffers > 0);
    assert_eq!(snap.characters, 0);
    assert_eq!(snap.work_units, 0);
}

#[test]
fn rejects_bad_input() {
    let cfg = config(4, 3, 0.0, 0.5);
    assert!(Engine::new(&[1, 2, 3], &cfg).is_err());
    assert!(Engine::new(&[1, 2, 4, 1], &cfg).is_err());
    let mut engine = Engine::new(&[1, 2, 3, 1], &cfg).unwrap();
    assert!(engine.process_character(0).is_err());
    assert!(engine.process_character(9).is_err());
}
