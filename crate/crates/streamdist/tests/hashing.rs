use streamdist::hashing::{
    calibrate_abs_median, derive_seed, PStableSampler, PolyHash, RangeBackend, RangeSummableHash,
    MIN_CALIBRATION_SAMPLES,
};
use streamdist::Error;

#[test]
fn poly_hash_is_seed_deterministic() {
    let a = PolyHash::new(7, 1000, 20);
    let b = PolyHash::new(7, 1000, 20);
    let c = PolyHash::new(8, 1000, 20);
    assert!((0..1000).all(|x| a.bits(x) == b.bits(x)));
    assert!((0..1000).any(|x| a.bits(x) != c.bits(x)));
}

#[test]
fn poly_hash_rejects_out_of_domain() {
    let h = PolyHash::new(1, 10, 8);
    assert!(h.eval(9).is_ok());
    assert_eq!(h.eval(10), Err(Error::DomainOverflow { value: 10, domain: 10 }));
    assert!(h.eval_sign(10).is_err());
}

#[test]
fn poly_hash_output_fits_bits_and_signs_balance() {
    let h = PolyHash::new(3, 1 << 16, 5);
    assert!((0..1 << 16).all(|x| h.bits(x) < 32));
    let total: i64 = (0..1 << 16).map(|x| h.sign(x)).sum();
    assert!(total.abs() < 2000, "{total}");
}

#[test]
fn poly_hash_bits_look_uniform() {
    let mut counts = [0u32; 16];
    let h = PolyHash::new(11, 1 << 16, 4);
    for x in 0..1 << 16 {
        counts[h.bits(x) as usize] += 1;
    }
    assert!(counts.iter().all(|&c| (3600..=4600).contains(&c)), "{counts:?}");
}

#[test]
fn derived_seeds_differ() {
    let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, 7, i)).collect();
    assert_eq!(seeds.len(), 1000);
    assert_ne!(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
}

#[test]
fn range_sum_backends_agree_on_large_domain() {
    let t = 1u64 << 20;
    let fast = RangeSummableHash::with_backend(5, t, RangeBackend::Fast);
    let table = RangeSummableHash::with_backend(5, t, RangeBackend::PrefixTable);
    assert_eq!(fast.backend(), RangeBackend::Fast);
    let mut x = 12345u64;
    for _ in 0..2000 {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let a = (x >> 20) % (t + 1);
        let b = (x >> 40) % (t + 1);
        let (a, b) = (a.min(b), a.max(b));
        assert_eq!(fast.range_sum(a, b).unwrap(), table.range_sum(a, b).unwrap());
    }
    assert_eq!(fast.range_sum(0, t).unwrap(), table.range_sum(0, t).unwrap());
}

#[test]
fn range_sum_of_unit_interval_is_eval() {
    let h = RangeSummableHash::with_backend(9, 300, RangeBackend::Fast);
    for x in 0..300 {
        let v = h.eval(x).unwrap();
        assert!(v == 1 || v == -1);
        assert_eq!(h.range_sum(x, x + 1).unwrap(), v);
    }
}

#[test]
fn range_sum_on_non_power_of_two_domain_ends() {
    let h = RangeSummableHash::with_backend(2, 1000, RangeBackend::Fast);
    let brute: i64 = (0..1000).map(|x| h.eval(x).unwrap()).sum();
    assert_eq!(h.range_sum_fast(0, 1000).unwrap(), brute);
}

#[test]
fn range_sum_errors() {
    let h = RangeSummableHash::new(1, 64);
    assert_eq!(h.range_sum(5, 3), Err(Error::ReversedRange { start: 5, end: 3 }));
    assert!(matches!(h.range_sum(0, 65), Err(Error::DomainOverflow { .. })));
    assert!(h.eval(64).is_err());
    assert_eq!(h.range_sum(7, 7).unwrap(), 0);
}

#[test]
fn cauchy_abs_median_is_one() {
    let m = calibrate_abs_median(1.0, 200_000, 3).unwrap();
    assert!((m - 1.0).abs() < 0.01, "{m}");
}

#[test]
fn gaussian_abs_median_matches_variance_two() {
    // Median of |N(0, 2)| is 0.674489750·√2.
    let m = calibrate_abs_median(2.0, 200_000, 4).unwrap();
    assert!((m - 0.674_489_750 * 2f64.sqrt()).abs() < 0.01, "{m}");
}

#[test]
fn calibration_rejects_small_samples() {
    assert!(matches!(
        calibrate_abs_median(1.5, MIN_CALIBRATION_SAMPLES - 1, 0),
        Err(Error::TooFewSamples { .. })
    ));
    assert!(calibrate_abs_median(0.0, MIN_CALIBRATION_SAMPLES, 0).is_err());
    assert!(PStableSampler::new(2.5, 0).is_err());
}

#[test]
fn draws_are_symmetric_and_deterministic() {
    for p in [0.5, 1.0, 1.5, 2.0] {
        let s = PStableSampler::new(p, 17).unwrap();
        let again = PStableSampler::new(p, 17).unwrap();
        let positive = (0..20_000).filter(|&i| s.draw(i) > 0.0).count();
        assert!((9_500..=10_500).contains(&positive), "p = {p}: {positive}");
        assert!((0..100).all(|i| s.draw(i) == again.draw(i)));
        let mut abs: Vec<f64> = (0..50_000).map(|i| s.draw(i).abs()).collect();
        let med = streamdist::config::median_in_place(&mut abs);
        assert!((med / s.abs_median() - 1.0).abs() < 0.03, "p = {p}");
    }
}
