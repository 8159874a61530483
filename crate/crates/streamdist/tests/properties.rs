use proptest::prelude::*;

use streamdist::hashing::{RangeBackend, RangeSummableHash};
use streamdist::prefix::hamming::{build_hamming_prefix_encoding, estimate_hamming_at, hamming_levels};
use streamdist::sketch::EuclideanSketcher;
use streamdist::{moment_norm_convert, split_into_windows, Direction, Symbol};

fn word(len: usize, sigma: u32) -> impl Strategy<Value = Vec<Symbol>> {
    prop::collection::vec(1..=sigma, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn range_sums_are_additive(seed in any::<u64>(), a in 0u64..5000, b in 0u64..5000, c in 0u64..5000) {
        let h = RangeSummableHash::with_backend(seed, 5000, RangeBackend::Fast);
        let mut v = [a, b, c];
        v.sort_unstable();
        let [a, b, c] = v;
        let whole = h.range_sum(a, c).unwrap();
        prop_assert_eq!(whole, h.range_sum(a, b).unwrap() + h.range_sum(b, c).unwrap());
        prop_assert!(whole.unsigned_abs() <= c - a);
    }

    #[test]
    fn euclidean_sketch_is_linear(
        seed in any::<u64>(),
        x in prop::collection::vec(-5i64..5, 40),
        y in prop::collection::vec(-5i64..5, 40),
        s in -3i64..3,
    ) {
        let sk = EuclideanSketcher::new(seed, 16, 8, 8);
        let combined: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + s * b).collect();
        let mut lhs = sk.e_sketch(&x).unwrap();
        lhs.add_scaled(&sk.e_sketch(&y).unwrap(), s).unwrap();
        prop_assert_eq!(lhs.values, sk.e_sketch(&combined).unwrap().values);
    }

    #[test]
    fn moment_norm_round_trips(value in 0.0f64..1e6, p in 0.05f64..2.0) {
        let norm = moment_norm_convert(value, p, Direction::MomentToNorm).unwrap();
        let back = moment_norm_convert(norm, p, Direction::NormToMoment).unwrap();
        prop_assert!((back - value).abs() <= 1e-9 * value.max(1.0));
    }

    #[test]
    fn windows_cover_each_end_once(n in 1usize..40, extra in 0usize..200) {
        let len = n + extra;
        let mut ends = Vec::new();
        for w in split_into_windows(len, n) {
            ends.extend(w.first_end..=w.last_end);
        }
        prop_assert_eq!(ends, (n..=len).collect::<Vec<_>>());
    }

    #[test]
    fn hamming_decode_matches_direct(
        seed in any::<u64>(),
        block in word(24, 3),
        pattern in word(48, 3),
        k in 1u64..6,
    ) {
        let b = block.len();
        let h = hamming_levels(seed, b);
        let enc = build_hamming_prefix_encoding(&block, &pattern[..b], k, &h).unwrap();
        for j in 1..=b {
            let direct = estimate_hamming_at(&block[b - j..], &pattern[..j], k, &h, b - j).unwrap();
            if !direct.overflow {
                prop_assert_eq!(enc.decode(&pattern, j).unwrap(), direct);
            }
        }
    }

    #[test]
    fn identical_block_decodes_to_zero(seed in any::<u64>(), pattern in word(32, 5), k in 1u64..4) {
        let b = 16;
        let h = hamming_levels(seed, b);
        let enc = build_hamming_prefix_encoding(&pattern[..b], &pattern[..b], k, &h).unwrap();
        prop_assert_eq!(enc.decode(&pattern, b).unwrap().estimate, 0.0);
    }
}
